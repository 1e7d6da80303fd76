use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("obj parse error on line {line}: {msg}")]
    ObjParse { line: usize, msg: String },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifold(usize, usize),
    #[error("vertex {0} has more than one fan of faces")]
    NonManifoldVertex(usize),
    #[error("faces cannot be oriented consistently (edge ({0}, {1}))")]
    InconsistentOrientation(usize, usize),
    #[error("invalid face {face}: {msg}")]
    InvalidFace { face: usize, msg: String },
    #[error("face {0} is not a quad")]
    NonQuadFace(usize),
    #[error("meshes with boundary are not supported")]
    BoundaryUnsupported,
    #[error("insufficient regular collar around the extraordinary element: {0}")]
    InsufficientRegularCollar(String),
    #[error("element does not match the scheme kind: {0}")]
    WrongElement(String),
    #[error("unsupported valence {0} (need n >= 3)")]
    UnsupportedValence(usize),
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),
    #[error("unknown scheme id '{0}'")]
    UnknownScheme(String),
    #[error("coset sums differ: {0:?}")]
    NonConstantCosetSums([f64; 4]),
    #[error("symbol is not divisible by (1 + z_{direction}); remainder {remainder:e}")]
    NotDivisible { direction: usize, remainder: f64 },
    #[error("symbol has non-real coefficient (imaginary part {0:e})")]
    NonRealSymbol(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is numerically singular (smallest singular value {0:e})")]
    SingularMatrix(f64),
    #[error("all differences are below the noise floor")]
    AllBelowNoiseFloor,
    #[error("too few usable points for a fit: {0}")]
    InsufficientPoints(usize),
    #[error("gate failed: {0}")]
    GateFailed(String),
    #[error("iteration did not converge after {iterations} steps (last increment {increment:e})")]
    NotConverged { iterations: usize, increment: f64 },
    #[error("subdominant eigenvalue is not real, double and non-defective")]
    DefectiveSubdominant,
    #[error("degenerate normals at {bad} of {total} samples")]
    DegenerateNormals { bad: usize, total: usize },
    #[error("schemes are incompatible: {0}")]
    IncompatibleSchemes(String),
}
