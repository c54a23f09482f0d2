//! Ordered-norm approximation of a symmetric norm from indicator evaluations.
//!
//! With `‖e_1‖` normalized to one, level `m_j` is the least prefix length whose
//! indicator reaches norm `2^j`, for `j = 0..=⌊log₂ ρ⌋`. The approximating norm
//! is `‖x‖′ = 2 Σ_j ⟨b_j, x↓⟩` with `b_j = (‖1_{≤m_j}‖ / m_j) · 1_{≤m_j}`, and
//! satisfies `‖x‖ <= ‖x‖′ <= 2(⌊log₂ ρ⌋ + 1) ‖x‖`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::norms::oracle::Norm;
use crate::norms::submod::{MixedSampler, VectorSampler};
use crate::norms::NormError;
use crate::scalar::{floor_log2, Scalar, Tolerance};

const SYMMETRY_TRIALS: usize = 32;

#[derive(Debug, Clone)]
pub struct OrderedApprox<T> {
    pub source: Norm<T>,
    /// Prefix lengths `m_0 <= m_1 <= …`.
    pub levels: Vec<usize>,
    /// `‖1_{≤m_j}‖` for each level.
    pub level_values: Vec<T>,
    /// Descending weight vectors `b_j`.
    pub weight_vectors: Vec<Vec<T>>,
    pub rho: T,
    /// `2(⌊log₂ ρ⌋ + 1)`.
    pub factor: T,
    norm: Norm<T>,
}

impl<T: Scalar> OrderedApprox<T> {
    /// The ordered norm `‖·‖′`.
    pub fn norm(&self) -> &Norm<T> {
        &self.norm
    }

    pub fn into_norm(self) -> Norm<T> {
        self.norm
    }

    pub fn value(&self, x: &[T]) -> T {
        self.norm.value(x)
    }

    /// `‖x‖ <= ‖x‖′ <= factor·‖x‖` within the relative tolerance `rel`.
    pub fn sandwich_holds(&self, x: &[T], rel: T) -> bool {
        let lo = self.source.value(x);
        let hi = self.norm.value(x);
        let slack = rel * lo.abs().max(T::min_positive_value());
        lo <= hi + slack && hi <= self.factor * lo + self.factor * slack
    }
}

/// Sampled permutation-invariance check.
pub fn check_symmetric<T: Scalar>(norm: &Norm<T>, trials: usize, seed: u64, tol: &Tolerance<T>) -> Result<(), NormError> {
    if norm.is_structurally_symmetric() {
        return Ok(());
    }
    let n = norm.dim();
    let mut sampler = MixedSampler::new(seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..trials {
        let x: Vec<T> = sampler.vector(n);
        let mut y = x.clone();
        y.shuffle(&mut rng);
        let (a, b) = (norm.value(&x), norm.value(&y));
        if !tol.eq(a, b) {
            return Err(NormError::NotSymmetric {
                original: a.to_f64_lossy(),
                permuted: b.to_f64_lossy(),
            });
        }
    }
    // basis vectors must all agree for the e_1 normalization
    let e0 = norm.value(&unit(n, 0));
    for i in 1..n {
        let ei = norm.value(&unit(n, i));
        if !tol.eq(e0, ei) {
            return Err(NormError::NotSymmetric {
                original: e0.to_f64_lossy(),
                permuted: ei.to_f64_lossy(),
            });
        }
    }
    Ok(())
}

fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    let mut v = vec![T::zero(); n];
    v[i] = T::one();
    v
}

fn prefix<T: Scalar>(n: usize, m: usize) -> Vec<T> {
    (0..n).map(|i| if i < m { T::one() } else { T::zero() }).collect()
}

/// Builds the ordered approximation using only evaluations on prefix indicators.
pub fn ordered_approx<T: Scalar>(norm: &Norm<T>, tol: &Tolerance<T>) -> Result<OrderedApprox<T>, NormError> {
    let n = norm.dim();
    check_symmetric(norm, SYMMETRY_TRIALS, 0x0a11_5eed, tol)?;
    let e1 = norm.value(&unit(n, 0));
    if e1 <= tol.abs {
        return Err(NormError::Degenerate { index: 0 });
    }
    let indicator = |m: usize| norm.value(&prefix(n, m));
    let rho = indicator(n) / e1;
    let top = floor_log2(rho, tol);

    let mut levels = Vec::with_capacity(top as usize + 1);
    let mut level_values = Vec::with_capacity(top as usize + 1);
    let mut weight_vectors = Vec::with_capacity(top as usize + 1);
    let mut lo = 1usize;
    let mut threshold = e1;
    for _ in 0..=top {
        // least m in [lo, n] with ‖1_{≤m}‖ >= threshold; monotone in m
        let (mut a, mut b) = (lo, n);
        while a < b {
            let mid = a + (b - a) / 2;
            if tol.ge(indicator(mid), threshold) {
                b = mid;
            } else {
                a = mid + 1;
            }
        }
        let m = a;
        let value = indicator(m);
        let height = value / T::of_usize(m);
        weight_vectors.push((0..n).map(|i| if i < m { height } else { T::zero() }).collect::<Vec<T>>());
        levels.push(m);
        level_values.push(value);
        lo = m;
        threshold = threshold * T::of(2.0);
    }

    let two = T::of(2.0);
    let weights: Vec<T> = (0..n)
        .map(|i| two * weight_vectors.iter().map(|b| b[i]).sum::<T>())
        .collect();
    let approx = Norm::ordered(weights)?;
    Ok(OrderedApprox {
        source: norm.clone(),
        levels,
        level_values,
        weight_vectors,
        rho,
        factor: two * T::of_usize(top as usize + 1),
        norm: approx,
    })
}
