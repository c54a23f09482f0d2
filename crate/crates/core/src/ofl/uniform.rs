//! Uniform-cost runners: the capped auxiliary-cost rule and the naive rule
//! that computes marginals from true distances.

use crate::norms::Norm;
use crate::ofl::{bisection_done, step_uniform, OflError, OflInstance, OflStep, OflTrace, Runner, BISECTION_ITERS};
use crate::scalar::{CompensatedSum, Scalar};

/// Result of [`cap_root`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapRoot<T> {
    pub value: T,
    /// Whether the cost constraint was binding.
    pub capped: bool,
}

const MAX_DOUBLINGS: usize = 2048;

/// Largest `z <= upper` with `‖base + z e_i‖ − ‖base‖ <= f`.
///
/// `upper = None` stands for an infinite upper limit (no facility open yet).
/// `base` must vanish from index `i` on. The returned value never overshoots
/// the root, so the marginal at the result is at most `f`.
pub fn cap_root<T: Scalar>(norm: &Norm<T>, base: &[T], i: usize, f: T, upper: Option<T>) -> Result<CapRoot<T>, OflError> {
    norm.marginal(base, i, T::zero())?;
    let m = |z: T| norm.marginal_unchecked(base, i, z);
    let mut hi = match upper {
        Some(u) => {
            if m(u) <= f {
                return Ok(CapRoot { value: u, capped: false });
            }
            u
        }
        None => {
            let mut h = T::one();
            let mut k = 0;
            while m(h) <= f {
                h = h * T::of(2.0);
                k += 1;
                if k > MAX_DOUBLINGS || h.is_infinite() {
                    return Err(OflError::NoBracket { step: i });
                }
            }
            h
        }
    };
    let mut lo = T::zero();
    let (mut m_lo, mut m_hi) = (m(lo), m(hi));
    for _ in 0..BISECTION_ITERS {
        if bisection_done(lo, hi) {
            break;
        }
        let mid = lo + (hi - lo) / T::of(2.0);
        let m_mid = m(mid);
        if m_mid < m_lo || m_mid > m_hi {
            return Err(OflError::NonMonotone {
                step: i,
                dump: format!("marginal({lo}) = {m_lo}, marginal({mid}) = {m_mid}, marginal({hi}) = {m_hi}"),
            });
        }
        if m_mid <= f {
            lo = mid;
            m_lo = m_mid;
        } else {
            hi = mid;
            m_hi = m_mid;
        }
    }
    Ok(CapRoot { value: lo, capped: true })
}

fn uniform_cost<T: Scalar>(instance: &OflInstance<T>) -> Result<T, OflError> {
    let f = instance.uniform_cost().ok_or(OflError::NotUniform)?;
    if !(f > T::zero()) {
        return Err(OflError::InvalidCost {
            index: 0,
            value: f.to_f64_lossy(),
        });
    }
    Ok(f)
}

/// Uniform-cost rule with auxiliary distances capped so each marginal stays at most `f`.
pub fn run_uniform<T: Scalar>(instance: &OflInstance<T>, seed: u64) -> Result<OflTrace<T>, OflError> {
    run(instance, seed, false)
}

/// Uniform-cost rule with marginals taken on the true distance vector.
///
/// This runner keeps no auxiliary distances; the traced `dhat` equals `d`.
pub fn run_naive_uniform<T: Scalar>(instance: &OflInstance<T>, seed: u64) -> Result<OflTrace<T>, OflError> {
    run(instance, seed, true)
}

fn run<T: Scalar>(instance: &OflInstance<T>, seed: u64, naive: bool) -> Result<OflTrace<T>, OflError> {
    let f = uniform_cost(instance)?;
    let norm = instance.norm();
    let metric = instance.metric();
    let n = instance.n_requests();
    let mut dhat = vec![T::zero(); n];
    let mut d = vec![T::zero(); n];
    let mut facilities: Vec<usize> = Vec::new();
    let mut steps = Vec::with_capacity(n);
    let mut marginals = CompensatedSum::new();

    for (i, &x) in instance.requests().iter().enumerate() {
        let nearest = metric.nearest(x, facilities.iter().copied());
        let upper = nearest.map(|(_, dist)| dist);
        let (aux, delta, prob, tau) = if naive {
            let delta = upper.map_or(T::infinity(), |u| norm.marginal_unchecked(&d, i, u));
            (None, delta, (delta / f).min(T::one()), None)
        } else {
            let cap = cap_root(norm, &dhat, i, f, upper)?;
            let delta = norm.marginal_unchecked(&dhat, i, cap.value);
            let prob = if cap.capped { T::one() } else { (delta / f).min(T::one()) };
            (Some(cap.value), delta, prob, cap.capped.then_some(cap.value))
        };

        let facilities_before = facilities.len();
        let open = step_uniform(seed, i) < prob.to_f64_lossy();
        let (opened, served_by, d_i) = match nearest {
            Some((q, dist)) if !open || dist == T::zero() => (None, q, dist),
            _ => {
                facilities.push(x);
                (Some(x), x, T::zero())
            }
        };
        d[i] = d_i;
        let dhat_i = aux.unwrap_or(d_i);
        marginals.add(norm.marginal_unchecked(&dhat, i, dhat_i));
        dhat[i] = dhat_i;
        steps.push(OflStep {
            step: i,
            request: x,
            opened,
            served_by,
            level: usize::from(opened.is_some()),
            d: d_i,
            dhat: dhat_i,
            deltas: vec![delta],
            probs: vec![T::one() - prob, prob],
            tau,
            facilities_before,
        });
    }

    let opening_cost = f * T::of_usize(facilities.len());
    Ok(OflTrace {
        runner: if naive { Runner::NaiveUniform } else { Runner::Uniform },
        seed,
        steps,
        levels: vec![T::zero(), f],
        opening_cost,
        opening_cost_original: opening_cost,
        norm_d: norm.value(&d),
        norm_dhat: norm.value(&dhat),
        marginal_sum: marginals.value(),
        facilities,
        d,
        dhat,
    })
}
