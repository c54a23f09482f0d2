//! Non-uniform facility costs: power-of-two cost levels, the per-step cap
//! `τ`, and the level-sampling runner.

use crate::norms::Norm;
use crate::ofl::{bisection_done, step_uniform, OflError, OflInstance, OflStep, OflTrace, Runner, BISECTION_ITERS};
use crate::scalar::{CompensatedSum, Scalar};

/// Rounded cost levels of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct CostLevels<T> {
    /// `levels[0] = 0`, then the distinct rounded costs in increasing order.
    pub levels: Vec<T>,
    /// Level index of each point, `None` for points that cannot be opened.
    pub level_of: Vec<Option<usize>>,
    /// Rounded cost of each openable point.
    pub rounded: Vec<Option<T>>,
}

impl<T: Scalar> CostLevels<T> {
    /// Number of positive levels.
    pub fn m(&self) -> usize {
        self.levels.len() - 1
    }
}

/// Largest power of two not exceeding `c > 0`.
pub fn round_down_pow2<T: Scalar>(c: T) -> T {
    let two = T::of(2.0);
    let mut p = two.powi(c.log2().floor().to_i32().unwrap_or(0));
    while p > c {
        p = p / two;
    }
    while p * two <= c {
        p = p * two;
    }
    p
}

/// Rounds every openable cost down to a power of two and indexes the levels.
pub fn cost_levels<T: Scalar>(instance: &OflInstance<T>) -> Result<CostLevels<T>, OflError> {
    let n = instance.metric().len();
    let mut rounded = vec![None; n];
    for q in instance.openable() {
        let c = instance.cost(q);
        if !(c > T::zero()) {
            return Err(OflError::InvalidCost {
                index: q,
                value: c.to_f64_lossy(),
            });
        }
        rounded[q] = Some(round_down_pow2(c));
    }
    let mut positive: Vec<T> = rounded.iter().flatten().copied().collect();
    positive.sort_by(|a, b| a.partial_cmp(b).expect("finite costs"));
    positive.dedup();
    let level_of = rounded
        .iter()
        .map(|r| r.map(|c| 1 + positive.iter().position(|&l| l == c).expect("level present")))
        .collect();
    let mut levels = vec![T::zero()];
    levels.extend(positive);
    Ok(CostLevels {
        levels,
        level_of,
        rounded,
    })
}

/// Inputs of one step of the non-uniform rule.
#[derive(Debug, Clone)]
pub struct StepState<'a, T> {
    pub norm: &'a Norm<T>,
    /// Auxiliary prefix `d̂^(0)` of the earlier steps (zero from `index` on).
    pub base: &'a [T],
    pub index: usize,
    /// `levels[j] = f^(j)`, with `levels[0] = 0`.
    pub levels: &'a [T],
    /// `d(x_i, W^(j))` for `j = 0..=m`; `None` when `W^(j)` is empty.
    pub dists: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauSolution<T> {
    /// Binding cap, `None` when uncapped.
    pub tau: Option<T>,
    /// `d̂^(j)` per level.
    pub dhat: Vec<T>,
    /// `δ^(j)` per level.
    pub deltas: Vec<T>,
    /// `p^(j)` per level, summing to one.
    pub probs: Vec<T>,
}

struct Eval<T> {
    dhat: Vec<T>,
    deltas: Vec<T>,
    probs: Vec<T>,
    sum: T,
}

impl<T: Scalar> StepState<'_, T> {
    fn eval(&self, tau: Option<T>) -> Eval<T> {
        let cap = |d: Option<T>| match (d, tau) {
            (Some(d), Some(t)) => d.min(t),
            (Some(d), None) => d,
            (None, Some(t)) => t,
            (None, None) => T::infinity(),
        };
        let dhat: Vec<T> = self.dists.iter().map(|&d| cap(d)).collect();
        let h0 = dhat[0];
        let m0 = self.norm.marginal_unchecked(self.base, self.index, h0);
        let slope = if h0 > T::zero() { m0 / h0 } else { T::zero() };
        let mut deltas: Vec<T> = dhat.iter().map(|&h| slope * h).collect();
        deltas[0] = m0;
        let mut probs = vec![T::zero(); dhat.len()];
        let mut sum = CompensatedSum::new();
        for j in 1..dhat.len() {
            let p = ((deltas[j - 1] - deltas[j]) / self.levels[j]).max(T::zero());
            probs[j] = p;
            sum.add(p);
        }
        Eval {
            dhat,
            deltas,
            probs,
            sum: sum.value(),
        }
    }
}

const MAX_DOUBLINGS: usize = 2048;

/// Solves for the cap `τ_i` and the level probabilities of one step.
///
/// The constraint `S(τ) = Σ_{j≥1} p^(j)(τ)` is bisected for the largest `τ`
/// with `S(τ) <= 1`; every probe is checked against the bracket for
/// monotonicity. When the cap binds, `p^(1..m)` is renormalised to sum to
/// one and `p^(0) = 0`.
pub fn tau_solve<T: Scalar>(state: &StepState<'_, T>) -> Result<TauSolution<T>, OflError> {
    let step = state.index;
    let m = state.levels.len() - 1;
    if state.dists.len() != m + 1 {
        return Err(OflError::InvalidInstance(format!(
            "step {step}: {} level distances for {m} levels",
            state.dists.len()
        )));
    }
    if let Some(d0) = state.dists[0] {
        let e = state.eval(None);
        if e.sum <= T::one() {
            let mut probs = e.probs;
            probs[0] = (T::one() - e.sum).max(T::zero());
            return Ok(TauSolution {
                tau: None,
                dhat: e.dhat,
                deltas: e.deltas,
                probs,
            });
        }
        debug_assert!(d0 > T::zero());
    }
    let s = |t: T| state.eval(Some(t));
    let mut hi = match state.dists[0] {
        Some(d0) => d0,
        None => {
            let mut h = state
                .dists
                .iter()
                .flatten()
                .fold(T::zero(), |a, &b| a.max(b))
                .max(T::one());
            let mut k = 0;
            while s(h).sum <= T::one() {
                h = h * T::of(2.0);
                k += 1;
                if k > MAX_DOUBLINGS || h.is_infinite() {
                    return Err(OflError::NoBracket { step });
                }
            }
            h
        }
    };
    let mut lo = T::zero();
    let mut e_lo = s(lo);
    let mut e_hi = s(hi);
    let slack = |v: T| T::of(1e-9) * v.abs().max(T::one());
    let dump = |lo: T, slo: T, mid: T, smid: T, hi: T, shi: T| OflError::NonMonotone {
        step,
        dump: format!(
            "S({lo}) = {slo}, S({mid}) = {smid}, S({hi}) = {shi}; level distances {:?}; levels {:?}",
            state.dists, state.levels
        ),
    };
    if e_lo.sum > e_hi.sum + slack(e_hi.sum) {
        return Err(dump(lo, e_lo.sum, hi, e_hi.sum, hi, e_hi.sum));
    }
    for _ in 0..BISECTION_ITERS {
        if bisection_done(lo, hi) {
            break;
        }
        let mid = lo + (hi - lo) / T::of(2.0);
        let e_mid = s(mid);
        if e_mid.sum + slack(e_lo.sum) < e_lo.sum || e_mid.sum > e_hi.sum + slack(e_hi.sum) {
            return Err(dump(lo, e_lo.sum, mid, e_mid.sum, hi, e_hi.sum));
        }
        if e_mid.sum <= T::one() {
            lo = mid;
            e_lo = e_mid;
        } else {
            hi = mid;
            e_hi = e_mid;
        }
    }
    let (tau, e) = if e_lo.sum > T::zero() { (lo, e_lo) } else { (hi, e_hi) };
    let mut probs = e.probs;
    let total = e.sum;
    for p in probs.iter_mut().skip(1) {
        *p = *p / total;
    }
    probs[0] = T::zero();
    Ok(TauSolution {
        tau: Some(tau),
        dhat: e.dhat,
        deltas: e.deltas,
        probs,
    })
}

/// Picks a level by inverse CDF over `1, ..., m` and then `0`.
fn sample_level<T: Scalar>(probs: &[T], u: f64) -> usize {
    let mut cum = 0.0;
    for (j, p) in probs.iter().enumerate().skip(1) {
        cum += p.to_f64_lossy();
        if u < cum {
            return j;
        }
    }
    if probs[0] > T::zero() {
        0
    } else {
        // rounding left a sliver of mass unclaimed; give it to the last live level
        (1..probs.len()).rev().find(|&j| probs[j] > T::zero()).unwrap_or(0)
    }
}

/// Runs the non-uniform rule on costs rounded down to powers of two.
pub fn run_nonuniform<T: Scalar>(instance: &OflInstance<T>, seed: u64) -> Result<OflTrace<T>, OflError> {
    let cl = cost_levels(instance)?;
    let m = cl.m();
    let norm = instance.norm();
    let metric = instance.metric();
    let openable = instance.openable();
    let n = instance.n_requests();
    let mut dhat = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut facilities: Vec<usize> = Vec::new();
    let mut is_open = vec![false; metric.len()];
    let mut steps = Vec::with_capacity(n);
    let mut marginals = CompensatedSum::new();
    let mut opening = CompensatedSum::new();
    let mut opening_original = CompensatedSum::new();

    for (i, &x) in instance.requests().iter().enumerate() {
        let d0 = metric.nearest(x, facilities.iter().copied()).map(|(_, v)| v);
        let mut per_level: Vec<Option<T>> = vec![None; m + 1];
        for &q in &openable {
            let j = cl.level_of[q].expect("openable point has a level");
            let v = metric.dist(x, q);
            per_level[j] = Some(per_level[j].map_or(v, |w: T| w.min(v)));
        }
        let mut dists = Vec::with_capacity(m + 1);
        let mut run = d0;
        dists.push(run);
        for pl in per_level.iter().skip(1) {
            run = match (run, *pl) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            dists.push(run);
        }
        if dists[m] != Some(T::zero()) {
            return Err(OflError::InvalidInstance(format!(
                "step {i}: request point {x} is not reachable at the top level"
            )));
        }
        let sol = tau_solve(&StepState {
            norm,
            base: &dhat,
            index: i,
            levels: &cl.levels,
            dists,
        })?;

        let level = sample_level(&sol.probs, step_uniform(seed, i));
        let candidates = facilities.iter().copied().chain(
            (level > 0)
                .then(|| openable.iter().copied().filter(|&q| cl.level_of[q].is_some_and(|l| l <= level)))
                .into_iter()
                .flatten(),
        );
        let (q, dist) = metric
            .nearest(x, candidates)
            .ok_or_else(|| OflError::InvalidInstance(format!("step {i}: sampled an empty level")))?;
        let facilities_before = facilities.len();
        let opened = if is_open[q] {
            None
        } else {
            is_open[q] = true;
            facilities.push(q);
            opening.add(cl.rounded[q].expect("openable"));
            opening_original.add(instance.cost(q));
            Some(q)
        };
        d[i] = dist;
        let h0 = sol.dhat[0];
        marginals.add(norm.marginal_unchecked(&dhat, i, h0));
        dhat[i] = h0;
        steps.push(OflStep {
            step: i,
            request: x,
            opened,
            served_by: q,
            level,
            d: dist,
            dhat: h0,
            deltas: sol.deltas,
            probs: sol.probs,
            tau: sol.tau,
            facilities_before,
        });
    }

    Ok(OflTrace {
        runner: Runner::NonUniform,
        seed,
        steps,
        levels: cl.levels,
        opening_cost: opening.value(),
        opening_cost_original: opening_original.value(),
        norm_d: norm.value(&d),
        norm_dhat: norm.value(&dhat),
        marginal_sum: marginals.value(),
        facilities,
        d,
        dhat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofl::{FacilityCosts, MetricSpace};
    use approx::assert_abs_diff_eq;

    fn line(points: &[f64]) -> MetricSpace<f64> {
        MetricSpace::euclidean(points.iter().map(|&p| vec![p]).collect()).unwrap()
    }

    #[test]
    fn rounding_and_levels() {
        assert_eq!(round_down_pow2(3.0f64), 2.0);
        assert_eq!(round_down_pow2(4.0f64), 4.0);
        assert_eq!(round_down_pow2(0.3f64), 0.25);
        let inst = OflInstance::new(
            line(&[0.0, 1.0, 2.0]),
            vec![0, 1, 2],
            FacilityCosts::PerPoint(vec![3.0, 4.0, 9.0]),
            &[],
            Norm::l1(3),
        )
        .unwrap();
        let cl = cost_levels(&inst).unwrap();
        assert_eq!(cl.levels, vec![0.0, 2.0, 4.0, 8.0]);
        assert_eq!(cl.level_of, vec![Some(1), Some(2), Some(3)]);

        let same = inst.with_costs(FacilityCosts::PerPoint(vec![1.0, 2.0, 4.0])).unwrap();
        assert_eq!(cost_levels(&same).unwrap().levels, vec![0.0, 1.0, 2.0, 4.0]);
        let uni = inst.with_costs(FacilityCosts::Uniform(5.0)).unwrap();
        assert_eq!(cost_levels(&uni).unwrap().levels, vec![0.0, 4.0]);
        let zero = inst.with_costs(FacilityCosts::PerPoint(vec![1.0, 0.0, 4.0])).unwrap();
        assert!(matches!(cost_levels(&zero), Err(OflError::InvalidCost { index: 1, .. })));
    }

    #[test]
    fn degenerate_step_at_open_facility() {
        let norm = Norm::<f64>::l1(2);
        let sol = tau_solve(&StepState {
            norm: &norm,
            base: &[1.0, 0.0],
            index: 1,
            levels: &[0.0, 1.0, 2.0],
            dists: vec![Some(0.0), Some(0.0), Some(0.0)],
        })
        .unwrap();
        assert_eq!(sol.tau, None);
        assert_eq!(sol.probs, vec![1.0, 0.0, 0.0]);
        assert!(sol.deltas.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn uncapped_leaves_mass_on_level_zero() {
        let norm = Norm::<f64>::l1(1);
        let sol = tau_solve(&StepState {
            norm: &norm,
            base: &[0.0],
            index: 0,
            levels: &[0.0, 4.0],
            dists: vec![Some(1.0), Some(0.0)],
        })
        .unwrap();
        assert_eq!(sol.tau, None);
        assert_abs_diff_eq!(sol.probs[1], 0.25);
        assert_abs_diff_eq!(sol.probs[0], 0.75);
    }

    #[test]
    fn capped_step_sums_to_one() {
        let norm = Norm::<f64>::l1(1);
        let sol = tau_solve(&StepState {
            norm: &norm,
            base: &[0.0],
            index: 0,
            levels: &[0.0, 1.0, 2.0],
            dists: vec![None, Some(3.0), Some(0.0)],
        })
        .unwrap();
        let tau = sol.tau.unwrap();
        assert_eq!(sol.probs[0], 0.0);
        assert_abs_diff_eq!(sol.probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
        // S(τ) = (τ − min(3, τ)) / 1 + min(3, τ) / 2 = 1  ⇒  τ = 2
        assert_abs_diff_eq!(tau, 2.0, epsilon = 1e-8);
    }

    #[test]
    fn single_site_opening_probability() {
        // request at distance D from the open set, openable in place at cost f
        for (dist, f) in [(0.5, 1.0), (3.0, 1.0), (1.0, 4.0)] {
            let norm = Norm::<f64>::l1(1);
            let sol = tau_solve(&StepState {
                norm: &norm,
                base: &[0.0],
                index: 0,
                levels: &[0.0, f],
                dists: vec![Some(dist), Some(0.0)],
            })
            .unwrap();
            assert_abs_diff_eq!(sol.probs[1], (dist / f).min(1.0), epsilon = 1e-8);
        }
    }

    #[test]
    fn trace_invariants_hold() {
        let inst = OflInstance::new(
            line(&[0.0, 0.4, 1.5, 3.0, 3.2]),
            vec![0, 1, 3, 4, 1, 0],
            FacilityCosts::PerPoint(vec![1.0, 2.5, 8.0, 1.0, 0.7]),
            &[2],
            Norm::top_k(6, 3).unwrap(),
        )
        .unwrap();
        for seed in 0..50 {
            let t = run_nonuniform(&inst, seed).unwrap();
            t.check_invariants(&inst).unwrap();
            assert_eq!(t.levels, vec![0.0, 0.5, 1.0, 2.0, 8.0]);
            assert!(t.opening_cost <= t.opening_cost_original);
        }
    }
}
