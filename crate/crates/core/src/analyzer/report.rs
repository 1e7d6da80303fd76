//! Hypothesis-by-hypothesis reports for the convergence and
//! normal-continuity theorems.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::rings::{sample_characteristic_ring, CharMapOptions};
use crate::localmatrix::{decay_fit, local_matrix, spectrum, DecayFit, Spectrum, SpectrumOptions};
use crate::schemes::SubdivisionScheme;
use crate::symbols::{
    asymptotic_equivalence, divided_difference_symbol, has_smoothing_factor,
    iterated_operator_norm, Direction, EquivalenceEstimate, Mask2D, Verdict,
};
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Stationary schemes whose regular-region convergence is classical.
pub const CONVERGENT_WHITELIST: [&str; 2] = ["ds", "cc"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "convergence")]
    Convergence,
    #[serde(rename = "normal-continuity")]
    NormalContinuity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: Status,
    pub evidence: Value,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub spectrum: SpectrumOptions,
    pub decay_k_min: u32,
    pub decay_k_max: u32,
    /// Largest RMS residual (log units) accepted for a decay fit.
    pub decay_residual_max: f64,
    pub equivalence_k_max: u32,
    /// Levels whose masks are tested for the (1 + z_j) factors.
    pub symbol_levels: u32,
    pub charmap: CharMapOptions,
    /// Largest power L tried in the contractivity check ‖S_d^L‖∞ < 1.
    pub contractivity_max_power: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            spectrum: SpectrumOptions::default(),
            decay_k_min: 1,
            decay_k_max: 15,
            decay_residual_max: 0.5,
            equivalence_k_max: 50,
            symbol_levels: 20,
            charmap: CharMapOptions::default(),
            contractivity_max_power: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub schema_version: u32,
    pub theorem: Theorem,
    pub scheme: String,
    pub reference: String,
    pub valence: usize,
    pub parameters: AnalysisOptions,
    pub hypotheses: Vec<Hypothesis>,
    pub verdict: Status,
}

impl ConditionReport {
    fn new(
        theorem: Theorem,
        ns: &dyn SubdivisionScheme,
        stat: &dyn SubdivisionScheme,
        n: usize,
        opts: &AnalysisOptions,
        hypotheses: Vec<Hypothesis>,
    ) -> Self {
        let verdict = if hypotheses.iter().any(|h| h.status == Status::Fail) {
            Status::Fail
        } else if hypotheses.iter().any(|h| h.status == Status::Warn) {
            Status::Warn
        } else {
            Status::Pass
        };
        ConditionReport {
            schema_version: SCHEMA_VERSION,
            theorem,
            scheme: ns.id(),
            reference: stat.id(),
            valence: n,
            parameters: *opts,
            hypotheses,
            verdict,
        }
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Hypothesis> {
        self.hypotheses.iter().find(|h| h.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.hypotheses
            .iter()
            .filter(|h| h.status == Status::Fail)
            .map(|h| h.name.as_str())
            .collect()
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn status(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn hyp(name: &str, status: Status, evidence: Value) -> Hypothesis {
    Hypothesis {
        name: name.to_string(),
        status,
        evidence,
    }
}

fn check_compatible(ns: &dyn SubdivisionScheme, stat: &dyn SubdivisionScheme) -> Result<()> {
    if ns.kind() != stat.kind() || ns.sector_size() != stat.sector_size() {
        return Err(Error::IncompatibleSchemes(format!(
            "{} ({:?}) and {} ({:?})",
            ns.id(),
            ns.kind(),
            stat.id(),
            stat.kind()
        )));
    }
    if !stat.is_stationary() {
        return Err(Error::IncompatibleSchemes(format!(
            "reference {} is not stationary",
            stat.id()
        )));
    }
    Ok(())
}

fn valence_entry(n: usize) -> Hypothesis {
    hyp(
        "valence_range",
        if n >= 5 { Status::Pass } else { Status::Warn },
        json!({ "valence": n, "analysed_range": "n >= 5" }),
    )
}

fn spectrum_evidence(s: &Spectrum) -> Value {
    json!({
        "lambda0": [s.lambda0.re, s.lambda0.im],
        "lambda1": s.lambda1.map(|z| [z.re, z.im]),
        "lambda2_modulus": s.lambda2_modulus,
        "x0_ones_deviation": s.x0_ones_deviation,
        "left_residual": s.left_residual,
        "min_singular_value": s.min_singular_value,
        "dominant_multiplicity": s.clusters[0].algebraic,
        "subdominant_algebraic": s.clusters.get(1).map(|c| c.algebraic),
        "subdominant_geometric": s.clusters.get(1).and_then(|c| c.geometric),
        "flags": s.flags,
    })
}

fn stationary_spectrum(
    stat: &dyn SubdivisionScheme,
    n: usize,
    opts: &AnalysisOptions,
) -> std::result::Result<Spectrum, Value> {
    local_matrix(stat, 1, n)
        .and_then(|s| spectrum(&s, &opts.spectrum))
        .map_err(|e| json!({ "error": e.to_string() }))
}

/// ‖S_d^L‖∞ < 1 for the difference schemes d_j = c/(1 + z_j).
fn contractivity(stat: &dyn SubdivisionScheme, max_power: usize) -> Value {
    let c = stat.regular_mask(1).to_symbol();
    let mut dirs = Vec::new();
    for dir in [Direction::E1, Direction::E2] {
        let entry = match divided_difference_symbol(&c, dir).and_then(|b| b.to_mask()) {
            Ok(b) => {
                let d = b.scaled(0.5);
                let norms: Vec<f64> = (1..=max_power)
                    .map(|l| iterated_operator_norm(&vec![d.clone(); l]))
                    .collect();
                let power = norms.iter().position(|&x| x < 1.0).map(|i| i + 1);
                json!({ "direction": dir.axis() + 1, "norms": norms, "contractive_power": power })
            }
            Err(e) => json!({ "direction": dir.axis() + 1, "error": e.to_string() }),
        };
        dirs.push(entry);
    }
    Value::Array(dirs)
}

fn equivalence(
    ns: &dyn SubdivisionScheme,
    stat: &dyn SubdivisionScheme,
    order: u32,
    k_max: u32,
) -> (EquivalenceEstimate, Value) {
    let reference = stat.regular_mask(1);
    let masks = |k: u32| -> Mask2D { ns.regular_mask(k) };
    let est = asymptotic_equivalence(order, &masks, &reference, k_max);
    let sums = &est.partial_sums;
    let at40 = sums.get(39).copied();
    let ev = json!({
        "order": order,
        "k_max": k_max,
        "total": est.total(),
        "partial_sum_k40": at40,
        "tail_ratio": est.tail_ratio,
        "last_term": est.terms.last(),
        "verdict": est.verdict,
    });
    (est, ev)
}

enum DecayOutcome {
    Fit(DecayFit),
    Exact,
    Failed,
}

fn decay(ns: &dyn SubdivisionScheme, n: usize, opts: &AnalysisOptions) -> (DecayOutcome, Value) {
    match decay_fit(ns, n, opts.decay_k_min..=opts.decay_k_max) {
        Ok(f) => {
            let ev = json!({
                "sigma": f.sigma,
                "c": f.c,
                "residual": f.residual,
                "sigma_band": [f.sigma_band.0, f.sigma_band.1],
                "tail_sigma": f.tail_sigma,
                "points_used": f.used.iter().filter(|&&u| u).count(),
            });
            (DecayOutcome::Fit(f), ev)
        }
        Err(Error::AllBelowNoiseFloor) => (
            DecayOutcome::Exact,
            json!({ "all_below_noise_floor": true, "sigma": null }),
        ),
        Err(e) => (DecayOutcome::Failed, json!({ "error": e.to_string() })),
    }
}

/// Hypotheses (i)–(iii) of the convergence theorem at valence n.
pub fn verify_convergence_conditions(
    ns: &dyn SubdivisionScheme,
    stat: &dyn SubdivisionScheme,
    n: usize,
    opts: &AnalysisOptions,
) -> Result<ConditionReport> {
    check_compatible(ns, stat)?;
    let mut hs = vec![valence_entry(n)];

    match stationary_spectrum(stat, n, opts) {
        Ok(s) => hs.push(hyp(
            "i_stationary_spectrum",
            status(s.flags.convergence_gate()),
            spectrum_evidence(&s),
        )),
        Err(ev) => hs.push(hyp("i_stationary_spectrum", Status::Fail, ev)),
    }

    let whitelisted = CONVERGENT_WHITELIST.contains(&stat.id().as_str());
    let contr = contractivity(stat, opts.contractivity_max_power);
    let contractive = contr
        .as_array()
        .map_or(false, |a| a.iter().all(|d| d["contractive_power"].is_u64()));
    hs.push(hyp(
        "i_regular_convergence",
        status(whitelisted || contractive),
        json!({ "whitelisted": whitelisted, "difference_schemes": contr }),
    ));

    let (est, ev) = equivalence(ns, stat, 0, opts.equivalence_k_max);
    hs.push(hyp(
        "ii_asymptotic_equivalence_order0",
        status(est.verdict == Verdict::Converged),
        ev,
    ));

    let (out, ev) = decay(ns, n, opts);
    let ok = match out {
        DecayOutcome::Fit(f) => f.sigma > 1.0 && f.residual <= opts.decay_residual_max,
        DecayOutcome::Exact => true,
        DecayOutcome::Failed => false,
    };
    hs.push(hyp("iii_decay", status(ok), ev));

    Ok(ConditionReport::new(
        Theorem::Convergence,
        ns,
        stat,
        n,
        opts,
        hs,
    ))
}

/// Hypotheses (i)–(iv) of the normal-continuity theorem at valence n.
pub fn verify_normal_continuity_conditions(
    ns: &dyn SubdivisionScheme,
    stat: &dyn SubdivisionScheme,
    n: usize,
    opts: &AnalysisOptions,
) -> Result<ConditionReport> {
    check_compatible(ns, stat)?;
    let mut hs = vec![valence_entry(n)];

    let c = stat.regular_mask(1).to_symbol();
    hs.push(hyp(
        "i_smoothing_factor",
        status(has_smoothing_factor(&c)),
        json!({ "divisible_e1": divided_difference_symbol(&c, Direction::E1).is_ok(),
                "divisible_e2": divided_difference_symbol(&c, Direction::E2).is_ok() }),
    ));

    let spec = stationary_spectrum(stat, n, opts);
    let lambda1 = match &spec {
        Ok(s) => {
            hs.push(hyp(
                "i_subdominant_spectrum",
                status(s.flags.normal_gate()),
                spectrum_evidence(s),
            ));
            s.lambda1.filter(|_| s.flags.normal_gate()).map(|z| z.re)
        }
        Err(ev) => {
            hs.push(hyp("i_subdominant_spectrum", Status::Fail, ev.clone()));
            None
        }
    };

    match sample_characteristic_ring(stat, n, &opts.charmap) {
        Ok(r) => hs.push(hyp(
            "i_characteristic_map",
            status(r.pass),
            serde_json::to_value(&r).expect("serializable"),
        )),
        Err(e) => hs.push(hyp(
            "i_characteristic_map",
            Status::Fail,
            json!({ "error": e.to_string() }),
        )),
    }

    let mut first_error: Option<(u32, String)> = None;
    let mut factored_diff: Option<f64> = None;
    for k in 1..=opts.symbol_levels {
        let sym = ns.regular_mask(k).to_symbol();
        for dir in [Direction::E1, Direction::E2] {
            if let Err(e) = divided_difference_symbol(&sym, dir) {
                if first_error.is_none() {
                    first_error = Some((k, e.to_string()));
                }
            }
        }
        if let Some(f) = ns.factored_symbol(k) {
            let d = f.max_abs_diff(&sym);
            factored_diff = Some(factored_diff.map_or(d, |m: f64| m.max(d)));
        }
    }
    let factored_ok = factored_diff.map_or(true, |d| d <= 1e-12);
    hs.push(hyp(
        "ii_level_smoothing_factor",
        status(first_error.is_none() && factored_ok),
        json!({
            "levels": opts.symbol_levels,
            "first_failure": first_error.as_ref().map(|(k, e)| json!({ "level": k, "error": e })),
            "factored_symbol_max_diff": factored_diff,
        }),
    ));

    let (est, ev) = equivalence(ns, stat, 1, opts.equivalence_k_max);
    hs.push(hyp(
        "iii_asymptotic_equivalence_order1",
        status(est.verdict == Verdict::Converged),
        ev,
    ));

    let (out, mut ev) = decay(ns, n, opts);
    ev["inverse_lambda1"] = json!(lambda1.map(|l| 1.0 / l));
    let ok = match (out, lambda1) {
        (_, None) => false,
        (DecayOutcome::Exact, Some(_)) => true,
        (DecayOutcome::Fit(f), Some(l)) => {
            f.sigma > 1.0 / l && f.residual <= opts.decay_residual_max
        }
        (DecayOutcome::Failed, Some(_)) => false,
    };
    hs.push(hyp("iv_decay_vs_subdominant", status(ok), ev));

    Ok(ConditionReport::new(
        Theorem::NormalContinuity,
        ns,
        stat,
        n,
        opts,
        hs,
    ))
}
