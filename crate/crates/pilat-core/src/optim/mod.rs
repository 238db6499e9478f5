//! Constrained polynomial optimization and the bound search.
//!
//! The dichotomy refines an inductive bound `k` for a candidate invariant:
//! `k` is accepted when the certified extrema of the noise objective over
//! `{P <= k} x parameter box` fit strictly inside `(-(1-|ev|)k, (1-|ev|)k)`.
//! Acceptance uses the oracle's outward-conservative bounds, so a returned
//! `k` is sound even when it is not minimal.

pub mod oracle;
pub mod quad;

pub use oracle::min_oracle;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::interval::Interval;
use crate::num::ratio::{rat_from_fraction_string, rat_to_fraction_string};
use crate::poly::MPoly;
use crate::{Rat, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error("sublevel set has no derivable bounding box: {reason}")]
    UnboundedSublevel { reason: String },
    #[error("sublevel set is empty at this bound")]
    EmptySublevel,
    #[error("no inductive bound found within {iterations} iterations")]
    NoInductiveBound { iterations: u32 },
    #[error("degree precheck failed: {0}")]
    PrecheckFailed(String),
    #[error("ill-formed optimization problem: {0}")]
    InvalidProblem(String),
}

/// Objective and constraints for one oracle call.
#[derive(Debug, Clone)]
pub struct OptProblem {
    /// Number of state variables; the objective ring is (vars ++ params).
    pub nvars: usize,
    /// Polynomial over (vars ++ params) to bound.
    pub objective: MPoly<Rat>,
    /// Constraint polynomial over the vars; the state constraint is
    /// `sublevel <= bound`.
    pub sublevel: MPoly<Rat>,
    pub bound: Rat,
    /// One interval per parameter.
    pub param_box: Vec<(Rat, Rat)>,
    /// Relative tolerance for the bound gap.
    pub tolerance: Rat,
}

impl OptProblem {
    fn validate(&self) -> Result<(), OptError> {
        if self.objective.nvars() != self.nvars + self.param_box.len() {
            return Err(OptError::InvalidProblem(format!(
                "objective ring has {} indeterminates, expected {} + {}",
                self.objective.nvars(),
                self.nvars,
                self.param_box.len()
            )));
        }
        if self.sublevel.nvars() != self.nvars {
            return Err(OptError::InvalidProblem("constraint ring mismatch".into()));
        }
        for (lo, hi) in &self.param_box {
            if lo > hi {
                return Err(OptError::InvalidProblem("empty parameter interval".into()));
            }
        }
        Ok(())
    }
}

/// Outcome of one oracle call. `lower <= min(Q) <= inner_min` and
/// `inner_max <= max(Q) <= upper`, all four exact rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct OptResult {
    pub lower: Rat,
    pub upper: Rat,
    pub inner_min: Rat,
    pub inner_max: Rat,
    pub tolerance: Rat,
    pub nodes: usize,
}

/// Dichotomy settings; defaults follow the usual heuristics (ten
/// iterations, ceiling guess 50).
#[derive(Debug, Clone)]
pub struct DichotomyConfig {
    pub iterations: u32,
    pub k_init: Rat,
    pub low_floor: Rat,
    pub tolerance: Rat,
    pub allow_precheck_override: bool,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig {
            iterations: 10,
            k_init: Rat::from_int(50),
            low_floor: Rat::zero(),
            tolerance: Rat::new(1.into(), 10_000.into()),
            allow_precheck_override: false,
        }
    }
}

/// Outcome of the growth comparison between the objective and the
/// constraint polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecheckReport {
    pub pass: bool,
    pub deg_constraint: u32,
    pub deg_objective: u32,
    /// Certified bound on the leading-form ratio when degrees tie.
    pub ratio_bound: Option<String>,
    /// `1 - |lambda|`, the slack the ratio must stay below.
    pub slack: String,
    pub reason: String,
}

/// Sufficient condition for the dichotomy to converge: the objective must
/// grow strictly slower than the constraint on the sublevel scale. Passes
/// when `deg_X(Q) < deg_X(P)`; on a degree tie the leading forms must be
/// proportional with a certified ratio below `1 - |lambda|`.
pub fn degree_precheck(
    constraint: &MPoly<Rat>,
    objective: &MPoly<Rat>,
    lambda: &Rat,
    param_box: &[(Rat, Rat)],
) -> PrecheckReport {
    let nvars = constraint.nvars();
    let var_idx: Vec<usize> = (0..nvars).collect();
    let slack = Rat::one() - lambda.abs();
    let slack_str = rat_to_fraction_string(&slack);
    let deg_p = constraint.degree_in(&var_idx);
    let deg_q = objective.degree_in(&var_idx);
    let mut report = PrecheckReport {
        pass: false,
        deg_constraint: deg_p,
        deg_objective: deg_q,
        ratio_bound: None,
        slack: slack_str,
        reason: String::new(),
    };
    if objective.is_zero() {
        report.pass = true;
        report.reason = "objective is identically zero".into();
        return report;
    }
    if deg_p == 0 {
        report.reason = "constraint polynomial is constant".into();
        return report;
    }
    if deg_q < deg_p {
        report.pass = true;
        report.reason = format!(
            "objective degree {deg_q} is below constraint degree {deg_p}; the ratio vanishes at infinity"
        );
        return report;
    }
    if deg_q > deg_p {
        report.reason = format!(
            "objective degree {deg_q} exceeds constraint degree {deg_p}; the objective outgrows the sublevel"
        );
        return report;
    }
    // Degree tie: compare leading homogeneous forms.
    let lf_p = constraint.leading_form_in(&var_idx, deg_p);
    let lf_q = objective.leading_form_in(&var_idx, deg_p);
    let q_by_monomial = lf_q.collect_by_prefix(nvars);
    let nparams = objective.nvars() - nvars;
    // Candidate ratio c(N) from the first monomial of the constraint form.
    let Some((m0, p0)) = lf_p.terms().next().map(|(e, c)| (e.clone(), c.clone())) else {
        report.reason = "constraint has no leading form".into();
        return report;
    };
    let c_poly = q_by_monomial
        .get(&m0)
        .map(|q0| q0.scale(&(Rat::one() / p0)))
        .unwrap_or_else(|| MPoly::zero(nparams));
    // Verify proportionality: LF_Q == c(N) * LF_P termwise.
    let mut reconstructed = MPoly::zero(objective.nvars());
    for (e, coeff) in lf_p.terms() {
        for (pe, pc) in c_poly.terms() {
            let mut exps = e.0[..nvars].to_vec();
            exps.extend_from_slice(&pe.0);
            reconstructed.add_term(crate::poly::Expo(exps), coeff.clone() * pc.clone());
        }
    }
    if reconstructed != lf_q {
        report.reason =
            "leading forms tie in degree but are not proportional; no finite ratio bound".into();
        return report;
    }
    let ivs: Vec<Interval<Rat>> = param_box
        .iter()
        .map(|(lo, hi)| Interval::new(lo.clone(), hi.clone()))
        .collect();
    let ratio = c_poly.eval_interval(&ivs).abs_sup();
    report.ratio_bound = Some(rat_to_fraction_string(&ratio));
    if ratio < slack {
        report.pass = true;
        report.reason = format!(
            "leading forms proportional with certified ratio {} below the slack",
            rat_to_fraction_string(&ratio)
        );
    } else {
        report.reason = format!(
            "leading-form ratio bound {} reaches the slack {}",
            rat_to_fraction_string(&ratio),
            report.slack
        );
    }
    report
}

/// One dichotomy iteration as recorded in the report trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyStep {
    pub phase: DichotomyPhase,
    pub k: String,
    pub min_lower: String,
    pub max_upper: String,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DichotomyPhase {
    /// Ceiling search: the initial guess doubles until some k is accepted.
    Bracket,
    /// Bisection between the last rejected and the best accepted k.
    Bisect,
}

impl DichotomyStep {
    pub fn k_value(&self) -> Rat {
        rat_from_fraction_string(&self.k).expect("trace stores canonical rationals")
    }
}

/// Bisection on the bound. Starts from the configured ceiling instead of a
/// machine maximum, doubling it while nothing is accepted, and floors the
/// search at `init_floor` when the initial state demands it. Returns the
/// smallest accepted `k` and the per-iteration trace.
pub fn dichotomy_search(
    lambda: &Rat,
    constraint: &MPoly<Rat>,
    objective: &MPoly<Rat>,
    param_box: &[(Rat, Rat)],
    init_floor: Option<&Rat>,
    cfg: &DichotomyConfig,
) -> Result<(Rat, Vec<DichotomyStep>), OptError> {
    let ev = lambda.abs();
    if ev >= Rat::one() {
        return Err(OptError::InvalidProblem(
            "dichotomy needs |lambda| strictly below one".into(),
        ));
    }
    let mut low = cfg.low_floor.clone();
    if let Some(f) = init_floor {
        if *f > low {
            low = f.clone();
        }
    }
    let mut up = if cfg.k_init > low {
        cfg.k_init.clone()
    } else {
        low.clone() + low.clone() + Rat::one()
    };

    let mut trace = Vec::new();
    let mut budget = cfg.iterations;
    let mut best: Option<Rat> = None;

    let test = |k: &Rat, trace: &mut Vec<DichotomyStep>, phase: DichotomyPhase| -> Result<bool, OptError> {
        let accepted = accept_bound(lambda, constraint, objective, param_box, k, &cfg.tolerance, trace, phase)?;
        Ok(accepted)
    };

    // Ceiling search.
    while budget > 0 {
        budget -= 1;
        match test(&up, &mut trace, DichotomyPhase::Bracket) {
            Ok(true) => {
                best = Some(up.clone());
                break;
            }
            Ok(false) | Err(OptError::EmptySublevel) => {
                low = up.clone();
                up = &up * Rat::from_int(2);
            }
            Err(e) => return Err(e),
        }
    }
    let Some(mut best_k) = best else {
        return Err(OptError::NoInductiveBound { iterations: cfg.iterations });
    };

    // Refinement.
    while budget > 0 {
        budget -= 1;
        let k = (&low + &up) / Rat::from_int(2);
        match test(&k, &mut trace, DichotomyPhase::Bisect) {
            Ok(true) => {
                up = k.clone();
                best_k = k;
            }
            Ok(false) | Err(OptError::EmptySublevel) => {
                low = k;
            }
            Err(e) => return Err(e),
        }
    }
    Ok((best_k, trace))
}

/// The acceptance test at one k: certified extrema strictly inside the
/// contraction slack.
#[allow(clippy::too_many_arguments)]
fn accept_bound(
    lambda: &Rat,
    constraint: &MPoly<Rat>,
    objective: &MPoly<Rat>,
    param_box: &[(Rat, Rat)],
    k: &Rat,
    tolerance: &Rat,
    trace: &mut Vec<DichotomyStep>,
    phase: DichotomyPhase,
) -> Result<bool, OptError> {
    let ev = lambda.abs();
    let prob = OptProblem {
        nvars: constraint.nvars(),
        objective: objective.clone(),
        sublevel: constraint.clone(),
        bound: k.clone(),
        param_box: param_box.to_vec(),
        tolerance: tolerance.clone(),
    };
    let res = match min_oracle(&prob) {
        Ok(r) => r,
        Err(OptError::EmptySublevel) => {
            trace.push(DichotomyStep {
                phase,
                k: rat_to_fraction_string(k),
                min_lower: String::new(),
                max_upper: String::new(),
                accepted: false,
            });
            return Err(OptError::EmptySublevel);
        }
        Err(e) => return Err(e),
    };
    let slack = (Rat::one() - ev) * k;
    let accepted = res.lower > -slack.clone() && res.upper < slack;
    trace.push(DichotomyStep {
        phase,
        k: rat_to_fraction_string(k),
        min_lower: rat_to_fraction_string(&res.lower),
        max_upper: rat_to_fraction_string(&res.upper),
        accepted,
    });
    Ok(accepted)
}

/// Re-checks a bound with a fresh oracle call (used by tests and by the
/// engine to confirm a returned k).
pub fn verify_bound(
    lambda: &Rat,
    constraint: &MPoly<Rat>,
    objective: &MPoly<Rat>,
    param_box: &[(Rat, Rat)],
    k: &Rat,
    tolerance: &Rat,
) -> Result<bool, OptError> {
    let mut sink = Vec::new();
    accept_bound(
        lambda,
        constraint,
        objective,
        param_box,
        k,
        tolerance,
        &mut sink,
        DichotomyPhase::Bisect,
    )
}
