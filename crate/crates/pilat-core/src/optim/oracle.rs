//! The min/max oracle: outward-certified bounds on a polynomial objective
//! over `{P(X) <= k} x parameter box`.
//!
//! Two routes, both exact-rational:
//!
//! * Objectives linear in the state variables (every eigenvector noise
//!   objective is) reduce to the ellipsoid support function
//!   `c(N)^T mu -/+ sqrt(r * c(N)^T S^-1 c(N)) + d(N)`, leaving a
//!   branch-and-bound over the parameter box alone with certified rational
//!   square-root enclosures.
//! * General objectives fall back to interval branch-and-bound over the
//!   bounding box of the sublevel set, with a constraint-aware reduction
//!   (`Q = alpha(N) * P + R` when the leading forms are proportional) so
//!   boundary optima do not stall the bound gap.
//!
//! Inner estimates are always values of the objective at points whose
//! feasibility is checked in exact arithmetic.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::quad::{sublevel_box, SublevelBox};
use super::{OptError, OptProblem, OptResult};
use crate::num::interval::Interval;
use crate::num::ratio::{rat_from_f64, rat_sqrt_lower, rat_sqrt_upper};
use crate::poly::{Expo, MPoly};
use crate::Rat;

/// Node budget per bound; hitting it keeps the bounds sound but loose.
const MAX_NODES: usize = 60_000;
const DESCENT_STARTS: usize = 8;
const DESCENT_STEPS: usize = 60;
const SQRT_PRECISION: u32 = 48;

/// Certified bounds on the minimum and maximum of the objective.
pub fn min_oracle(prob: &OptProblem) -> Result<OptResult, OptError> {
    prob.validate()?;
    let nvars = prob.nvars;
    let nparams = prob.param_box.len();

    let keep: Vec<usize> = prob
        .objective
        .support()
        .into_iter()
        .filter(|&i| i < nvars)
        .collect();
    let sb = sublevel_box(&prob.sublevel, &prob.bound, &keep)?;

    let var_idx: Vec<usize> = (0..nvars).collect();
    if prob.objective.degree_in(&var_idx) <= 1 {
        return ellipsoid_linear_bounds(prob, &sb);
    }
    box_branch_and_bound(prob, &sb, &keep)
}

/// Splits a state-linear objective into `sum_i c_i(N) x_i + d(N)` with the
/// coefficients as parameter polynomials (indices into the support list).
fn split_linear(
    objective: &MPoly<Rat>,
    nvars: usize,
    nparams: usize,
    support: &[usize],
) -> (Vec<MPoly<Rat>>, MPoly<Rat>) {
    let mut coeffs = vec![MPoly::zero(nparams); support.len()];
    let mut constant = MPoly::zero(nparams);
    for (expo, c) in objective.terms() {
        let vars_in: Vec<usize> = (0..nvars).filter(|&i| expo.0[i] > 0).collect();
        let tail = Expo(expo.0[nvars..].to_vec());
        if vars_in.is_empty() {
            constant.add_term(tail, c.clone());
        } else {
            let loc = support.iter().position(|&s| s == vars_in[0]).expect("support checked");
            coeffs[loc].add_term(tail, c.clone());
        }
    }
    (coeffs, constant)
}

/// Support-function route for state-linear objectives.
fn ellipsoid_linear_bounds(prob: &OptProblem, sb: &SublevelBox) -> Result<OptResult, OptError> {
    let nvars = prob.nvars;
    let nparams = prob.param_box.len();
    let (coeffs, constant) = split_linear(&prob.objective, nvars, nparams, &sb.support);
    let m = sb.support.len();

    // base(N) = c(N)^T mu + d(N); quad(N) = c(N)^T S^-1 c(N).
    let mut base = constant;
    for (loc, &amb) in sb.support.iter().enumerate() {
        base = base.add(&coeffs[loc].scale(&sb.center[amb]));
    }
    let mut quad = MPoly::zero(nparams);
    for a in 0..m {
        for b in 0..m {
            if !sb.s_inv[(a, b)].is_zero() {
                quad = quad.add(&coeffs[a].mul(&coeffs[b]).scale(&sb.s_inv[(a, b)]));
            }
        }
    }

    let param_ivs: Vec<Interval<Rat>> = prob
        .param_box
        .iter()
        .map(|(lo, hi)| Interval::new(lo.clone(), hi.clone()))
        .collect();

    // Extremum enclosure over a parameter sub-box, for one side.
    let enclose = |ivs: &[Interval<Rat>], maximize: bool| -> Interval<Rat> {
        let b = base.eval_interval(ivs);
        let mut q = quad.eval_interval(ivs);
        if q.lo < Rat::zero() {
            q.lo = Rat::zero(); // the form is PSD; negative lows are interval slack
        }
        let s_lo = rat_sqrt_lower(&(&sb.radius * &q.lo), SQRT_PRECISION).unwrap();
        let s_hi = rat_sqrt_upper(&(&sb.radius * &q.hi), SQRT_PRECISION).unwrap();
        if maximize {
            Interval::new(&b.lo + &s_lo, &b.hi + &s_hi)
        } else {
            Interval::new(&b.lo - &s_hi, &b.hi - &s_lo)
        }
    };

    // Exact feasible witness for the extremum at a parameter point.
    let witness = |draw: &[Rat], maximize: bool| -> Rat {
        let qv = quad.eval(draw);
        let mut point = vec![Rat::zero(); nvars + nparams];
        point[..nvars].clone_from_slice(&sb.center[..nvars]);
        point[nvars..].clone_from_slice(draw);
        if !qv.is_zero() {
            // x = mu -/+ t * S^-1 c with t <= sqrt(r/quad): stays feasible
            // because P(x) = P(mu) + t^2 quad <= P(mu) + r = k.
            let t = rat_sqrt_lower(&(&sb.radius / &qv), SQRT_PRECISION).unwrap();
            let c_at: Vec<Rat> = (0..m).map(|a| coeffs[a].eval(draw)).collect();
            let dir = sb.s_inv.mat_vec(&c_at);
            for (loc, &amb) in sb.support.iter().enumerate() {
                let shift = &t * &dir[loc];
                if maximize {
                    point[amb] = &sb.center[amb] + &shift;
                } else {
                    point[amb] = &sb.center[amb] - &shift;
                }
            }
        }
        debug_assert!(prob.sublevel.eval(&point[..nvars]) <= prob.bound);
        prob.objective.eval(&point)
    };

    let mut run_side = |maximize: bool| -> (Rat, Rat, usize) {
        // Best-first search on the parameter box for the outer extremum.
        struct Node {
            score: Rat,
            ivs: Vec<Interval<Rat>>,
        }
        impl PartialEq for Node {
            fn eq(&self, o: &Self) -> bool {
                self.score == o.score
            }
        }
        impl Eq for Node {}
        impl PartialOrd for Node {
            fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for Node {
            fn cmp(&self, o: &Self) -> std::cmp::Ordering {
                self.score.cmp(&o.score)
            }
        }
        let outer_of = |iv: &Interval<Rat>| if maximize { iv.hi.clone() } else { iv.lo.clone() };
        let mut heap: BinaryHeap<Node> = BinaryHeap::new();
        let root = enclose(&param_ivs, maximize);
        // Max-heap on the score; minimization flips the sign.
        let to_score = |v: &Rat| if maximize { v.clone() } else { -v.clone() };
        heap.push(Node { score: to_score(&outer_of(&root)), ivs: param_ivs.clone() });
        let mut best_inner: Option<Rat> = None;
        let better = |a: &Rat, b: &Rat| if maximize { a > b } else { a < b };
        let mut nodes = 0usize;
        let outer;
        loop {
            let Some(node) = heap.pop() else {
                // Parameter box is a point and was fully resolved.
                outer = if maximize { root.hi.clone() } else { root.lo.clone() };
                break;
            };
            nodes += 1;
            let node_outer = if maximize { node.score.clone() } else { -node.score.clone() };
            let mid: Vec<Rat> = node.ivs.iter().map(Interval::midpoint).collect();
            let w = witness(&mid, maximize);
            if best_inner.as_ref().is_none_or(|b| better(&w, b)) {
                best_inner = Some(w);
            }
            let b = best_inner.as_ref().unwrap();
            let tol = prob.tolerance.clone()
                * {
                    let a = b.abs();
                    if a > Rat::one() {
                        a
                    } else {
                        Rat::one()
                    }
                };
            let gap = if maximize { &node_outer - b } else { b - &node_outer };
            if gap <= tol || nodes > MAX_NODES || node.ivs.is_empty() {
                outer = node_outer;
                break;
            }
            // Split the widest parameter dimension.
            let (dim, _) = node
                .ivs
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.width().cmp(&b.width()))
                .unwrap();
            if node.ivs[dim].is_point() {
                outer = node_outer;
                break;
            }
            let (lo_half, hi_half) = node.ivs[dim].bisect();
            for half in [lo_half, hi_half] {
                let mut ivs = node.ivs.clone();
                ivs[dim] = half;
                let enc = enclose(&ivs, maximize);
                heap.push(Node { score: to_score(&outer_of(&enc)), ivs });
            }
        }
        (outer, best_inner.unwrap_or_else(|| outer_of(&root)), nodes)
    };

    let (upper, inner_max, nodes_max) = run_side(true);
    let (lower, inner_min, nodes_min) = run_side(false);
    Ok(OptResult {
        lower,
        upper,
        inner_min,
        inner_max,
        tolerance: prob.tolerance.clone(),
        nodes: nodes_min + nodes_max,
    })
}

/// General route: interval branch-and-bound over the bounding box.
fn box_branch_and_bound(
    prob: &OptProblem,
    sb: &SublevelBox,
    keep: &[usize],
) -> Result<OptResult, OptError> {
    let nvars = prob.nvars;
    let nparams = prob.param_box.len();
    let mut box_ivs: Vec<Interval<Rat>> = vec![Interval::zero(); nvars + nparams];
    for (amb, iv) in &sb.bounds {
        box_ivs[*amb] = iv.clone();
    }
    for (j, (lo, hi)) in prob.param_box.iter().enumerate() {
        box_ivs[nvars + j] = Interval::new(lo.clone(), hi.clone());
    }
    let active: Vec<usize> = keep.iter().copied().chain((0..nparams).map(|j| nvars + j)).collect();

    let constraint = sb.projected.extend_vars(nvars + nparams);
    let p_floor = &prob.bound - &sb.radius; // P >= P(center) everywhere
    let neg = prob.objective.neg();
    let (min_lower, min_inner, nodes_min) = bb_minimize(
        &prob.objective,
        &constraint,
        &prob.bound,
        &p_floor,
        &box_ivs,
        &active,
        nvars,
        &prob.tolerance,
    );
    let (negmax_lower, negmax_inner, nodes_max) = bb_minimize(
        &neg,
        &constraint,
        &prob.bound,
        &p_floor,
        &box_ivs,
        &active,
        nvars,
        &prob.tolerance,
    );
    Ok(OptResult {
        lower: min_lower,
        upper: -negmax_lower,
        inner_min: min_inner,
        inner_max: -negmax_inner,
        tolerance: prob.tolerance.clone(),
        nodes: nodes_min + nodes_max,
    })
}

/// Minimizes `q` over `{constraint <= k}` within the box. Returns
/// (certified lower bound, inner estimate, node count).
#[allow(clippy::too_many_arguments)]
fn bb_minimize(
    q: &MPoly<Rat>,
    constraint: &MPoly<Rat>,
    k: &Rat,
    p_floor: &Rat,
    box_ivs: &[Interval<Rat>],
    active: &[usize],
    nvars: usize,
    tolerance: &Rat,
) -> (Rat, Rat, usize) {
    let grads: Vec<MPoly<Rat>> = active.iter().map(|&i| q.partial_derivative(i)).collect();

    // Constraint-aware reduction: q = alpha(N) * P + rest with rest of lower
    // state degree, so the known range of P on the feasible part of a box
    // tightens the enclosure where the objective tracks the constraint.
    let reduction = proportional_reduction(q, constraint, nvars);

    let mut best_inner: Option<Rat> = None;
    let mut consider = |point: &[Rat], best: &mut Option<Rat>| {
        if constraint.eval(point) <= *k {
            let v = q.eval(point);
            if best.as_ref().is_none_or(|b| v < *b) {
                *best = Some(v);
            }
        }
    };

    for p in descent_candidates(q, constraint, k, box_ivs, active) {
        consider(&p, &mut best_inner);
    }
    let mid: Vec<Rat> = box_ivs.iter().map(Interval::midpoint).collect();
    consider(&mid, &mut best_inner);

    let eval_node = |ivs: &[Interval<Rat>]| -> Interval<Rat> {
        let mut enclosure = q.eval_interval(ivs);
        // Centered form.
        let c: Vec<Rat> = ivs.iter().map(Interval::midpoint).collect();
        let mut centered = Interval::point(q.eval(&c));
        for (gi, &i) in grads.iter().zip(active) {
            if gi.is_zero() {
                continue;
            }
            let g = gi.eval_interval(ivs);
            let dev = ivs[i].sub(&Interval::point(c[i].clone()));
            centered = centered.add(&g.mul(&dev));
        }
        enclosure = enclosure.intersect(&centered).unwrap_or(enclosure);
        // Reduction bound, valid on the feasible part of the box only;
        // sound here because infeasible boxes are pruned separately.
        if let Some((alpha, rest)) = &reduction {
            let p_iv = constraint.eval_interval(ivs);
            let p_feas = Interval::new(
                if p_iv.lo > *p_floor { p_iv.lo.clone() } else { p_floor.clone() },
                if p_iv.hi < *k { p_iv.hi.clone() } else { k.clone() },
            );
            if p_feas.lo <= p_feas.hi {
                let a_iv = alpha.eval_interval(&ivs[nvars..]);
                let reduced = a_iv.mul(&p_feas).add(&rest.eval_interval(ivs));
                enclosure = enclosure.intersect(&reduced).unwrap_or(enclosure);
            }
        }
        enclosure
    };

    let initial_widths: Vec<Rat> = active
        .iter()
        .map(|&i| {
            let w = box_ivs[i].width();
            if w.is_zero() {
                Rat::one()
            } else {
                w
            }
        })
        .collect();

    struct Node {
        qlo: Rat,
        ivs: Vec<Interval<Rat>>,
    }
    impl PartialEq for Node {
        fn eq(&self, other: &Self) -> bool {
            self.qlo == other.qlo
        }
    }
    impl Eq for Node {}
    impl PartialOrd for Node {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Node {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.qlo.cmp(&other.qlo)
        }
    }

    let root_iv = eval_node(box_ivs);
    let mut heap: BinaryHeap<Reverse<Node>> = BinaryHeap::new();
    heap.push(Reverse(Node { qlo: root_iv.lo.clone(), ivs: box_ivs.to_vec() }));
    let mut nodes = 0usize;
    let mut lower = None;

    while let Some(Reverse(node)) = heap.pop() {
        nodes += 1;
        let tol = tolerance.clone()
            * best_inner
                .as_ref()
                .map(|b| {
                    let a = b.abs();
                    if a > Rat::one() {
                        a
                    } else {
                        Rat::one()
                    }
                })
                .unwrap_or_else(Rat::one);
        if let Some(b) = &best_inner {
            if node.qlo >= b.clone() - tol {
                lower = Some(node.qlo);
                break;
            }
        }
        if nodes > MAX_NODES {
            lower = Some(node.qlo);
            break;
        }
        let p_iv = constraint.eval_interval(&node.ivs);
        if p_iv.lo > *k {
            continue; // certainly infeasible
        }
        let center: Vec<Rat> = node.ivs.iter().map(Interval::midpoint).collect();
        consider(&center, &mut best_inner);

        let mut split_dim = active[0];
        let mut split_score = Rat::zero();
        for (ai, &i) in active.iter().enumerate() {
            if node.ivs[i].is_point() {
                continue;
            }
            let score = node.ivs[i].width() / initial_widths[ai].clone();
            if score > split_score {
                split_score = score;
                split_dim = i;
            }
        }
        if split_score.is_zero() {
            lower = Some(node.qlo);
            break;
        }
        let (a, b) = node.ivs[split_dim].bisect();
        for half in [a, b] {
            let mut ivs = node.ivs.clone();
            ivs[split_dim] = half;
            let qiv = eval_node(&ivs);
            heap.push(Reverse(Node { qlo: qiv.lo, ivs }));
        }
    }

    let lower = match lower {
        Some(l) => l,
        // Queue exhausted: every box was certainly infeasible. The sublevel
        // box always contains the form's center, so treat as the root bound.
        None => root_iv.lo,
    };
    let inner = best_inner.unwrap_or_else(|| lower.clone());
    (lower, inner, nodes)
}

/// Writes `q = alpha(N) * constraint + rest` when the top state-degree form
/// of `q` is a parameter-polynomial multiple of the constraint's.
fn proportional_reduction(
    q: &MPoly<Rat>,
    constraint: &MPoly<Rat>,
    nvars: usize,
) -> Option<(MPoly<Rat>, MPoly<Rat>)> {
    let total = q.nvars();
    let nparams = total - nvars;
    let var_idx: Vec<usize> = (0..nvars).collect();
    let dq = q.degree_in(&var_idx);
    let dp = constraint.degree_in(&var_idx);
    if dq != dp || dq == 0 {
        return None;
    }
    let lf_q = q.leading_form_in(&var_idx, dq);
    let lf_p = constraint.leading_form_in(&var_idx, dp);
    let q_parts = lf_q.collect_by_prefix(nvars);
    let (m0, p0) = lf_p
        .terms()
        .next()
        .map(|(e, c)| (Expo(e.0[..nvars].to_vec()), c.clone()))?;
    let alpha = q_parts.get(&m0).map(|c| c.scale(&(Rat::one() / p0)))?;
    // rest = q - alpha * constraint
    let mut alpha_full = MPoly::zero(total);
    for (pe, c) in alpha.terms() {
        let mut exps = vec![0u32; nvars];
        exps.extend_from_slice(&pe.0);
        alpha_full.add_term(Expo(exps), c.clone());
    }
    let rest = q.sub(&alpha_full.mul(constraint));
    if rest.degree_in(&var_idx) < dq {
        Some((alpha, rest))
    } else {
        None
    }
}

/// Multistart projected gradient descent in f64, rationalized and re-checked
/// exactly before use.
fn descent_candidates(
    q: &MPoly<Rat>,
    constraint: &MPoly<Rat>,
    k: &Rat,
    box_ivs: &[Interval<Rat>],
    active: &[usize],
) -> Vec<Vec<Rat>> {
    let qf = q.map_coeffs(|c| c.to_f64().unwrap_or(0.0));
    let pf = constraint.map_coeffs(|c| c.to_f64().unwrap_or(0.0));
    let kf = k.to_f64().unwrap_or(f64::INFINITY);
    let grads: Vec<MPoly<f64>> = active.iter().map(|&i| qf.partial_derivative(i)).collect();
    let lo: Vec<f64> = box_ivs.iter().map(|iv| iv.lo.to_f64().unwrap_or(0.0)).collect();
    let hi: Vec<f64> = box_ivs.iter().map(|iv| iv.hi.to_f64().unwrap_or(0.0)).collect();
    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let mut out = Vec::new();
    for start in 0..DESCENT_STARTS {
        let mut x = center.clone();
        if start > 0 {
            for &i in active {
                x[i] = rng.gen_range(0.0..=1.0) * (hi[i] - lo[i]) + lo[i];
            }
        }
        project_feasible(&mut x, &pf, kf, &center, active);
        let mut step: f64 = active
            .iter()
            .map(|&i| hi[i] - lo[i])
            .fold(0.0_f64, f64::max)
            * 0.25;
        for _ in 0..DESCENT_STEPS {
            let g: Vec<f64> = grads.iter().map(|gi| gi.eval(&x)).collect();
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-14 {
                break;
            }
            for (ai, &i) in active.iter().enumerate() {
                x[i] = (x[i] - step * g[ai] / norm).clamp(lo[i], hi[i]);
            }
            project_feasible(&mut x, &pf, kf, &center, active);
            step *= 0.9;
        }
        // Rationalize and pull inward until exactly feasible.
        let mut xr: Vec<Rat> = Vec::with_capacity(x.len());
        for (i, v) in x.iter().enumerate() {
            let mut r = rat_from_f64(*v).unwrap_or_else(Rat::zero);
            if r < box_ivs[i].lo {
                r = box_ivs[i].lo.clone();
            }
            if r > box_ivs[i].hi {
                r = box_ivs[i].hi.clone();
            }
            xr.push(r);
        }
        let center_r: Vec<Rat> = box_ivs.iter().map(Interval::midpoint).collect();
        let mut t = Rat::one();
        for _ in 0..60 {
            let cand: Vec<Rat> = xr
                .iter()
                .zip(&center_r)
                .map(|(x, c)| c + (x - c) * t.clone())
                .collect();
            if constraint.eval(&cand) <= *k {
                out.push(cand);
                break;
            }
            t *= Rat::new(9.into(), 10.into());
        }
    }
    out
}

fn project_feasible(x: &mut [f64], pf: &MPoly<f64>, k: f64, center: &[f64], active: &[usize]) {
    if pf.eval(x) <= k {
        return;
    }
    let mut lo_t = 0.0;
    let mut hi_t = 1.0;
    for _ in 0..40 {
        let mid = 0.5 * (lo_t + hi_t);
        let cand: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if active.contains(&i) {
                    center[i] + mid * (v - center[i])
                } else {
                    v
                }
            })
            .collect();
        if pf.eval(&cand) <= k {
            lo_t = mid;
        } else {
            hi_t = mid;
        }
    }
    for &i in active {
        x[i] = center[i] + lo_t * 0.999 * (x[i] - center[i]);
    }
}
