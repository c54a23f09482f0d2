//! Fixture norms that separate the norm classes.

use crate::norms::oracle::Norm;
use crate::norms::NormError;
use crate::scalar::Scalar;

/// `‖x‖ = max_k k^{−ε} ⟨1_{≤k}, x↓⟩`, a symmetric norm that no submodular
/// norm approximates much better than the ordered construction.
pub fn make_tightness_norm<T: Scalar>(n: usize, eps: T) -> Result<Norm<T>, NormError> {
    if !(eps > T::zero() && eps < T::of(0.5)) {
        return Err(NormError::InvalidParameter(format!("eps must lie in (0, 1/2), got {eps}")));
    }
    if n == 0 {
        return Err(NormError::InvalidParameter("dimension must be at least 1".into()));
    }
    let set = (1..=n)
        .map(|k| {
            let h = T::of_usize(k).powf(-eps);
            (0..n).map(|i| if i < k { h } else { T::zero() }).collect()
        })
        .collect();
    Norm::symmetric_max(set)
}

/// The vector `y_k = (k^ε − (k−1)^ε)/ε` on which the tightness norm equals `1/ε`.
pub fn tightness_witness<T: Scalar>(n: usize, eps: T) -> Vec<T> {
    (1..=n)
        .map(|k| (T::of_usize(k).powf(eps) - T::of_usize(k - 1).powf(eps)) / eps)
        .collect()
}

/// `‖x_A‖∞ + ‖x_B‖1` with `A` the first half and `B` the second half.
pub fn asymmetric_gap_fixture<T: Scalar>(n: usize) -> Result<Norm<T>, NormError> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(NormError::InvalidParameter(format!("n must be even and positive, got {n}")));
    }
    let h = n / 2;
    Norm::partial_sum(
        n,
        vec![
            ((0..h).collect(), Norm::linf(h)),
            ((h..n).collect(), Norm::l1(n - h)),
        ],
    )
}

/// Max over `√n` consecutive blocks of the block sum. Monotone but not submodular.
pub fn block_max_fixture<T: Scalar>(n: usize) -> Result<Norm<T>, NormError> {
    let s = perfect_sqrt(n)
        .ok_or_else(|| NormError::InvalidParameter(format!("n must be a perfect square, got {n}")))?;
    let functionals = (0..s)
        .map(|b| {
            (0..n)
                .map(|i| if i / s == b { T::one() } else { T::zero() })
                .collect()
        })
        .collect();
    Norm::max_linear(functionals)
}

/// Both gap fixtures; `n` must be an even perfect square.
pub fn make_gap_fixtures<T: Scalar>(n: usize) -> Result<(Norm<T>, Norm<T>), NormError> {
    Ok((asymmetric_gap_fixture(n)?, block_max_fixture(n)?))
}

fn perfect_sqrt(n: usize) -> Option<usize> {
    let s = (n as f64).sqrt().round() as usize;
    (s >= 1 && s * s == n).then_some(s)
}

/// Greedy witness against a candidate upper bound `upper >= block-max`.
///
/// Activates one coordinate per block, always the one with the largest gain
/// under `upper`, stopping early once `upper` reaches `√n / 2`. The returned
/// `y` has block-max value 1 (or 0 if it stopped before the first block).
pub fn greedy_block_witness<T: Scalar>(upper: &Norm<T>, n: usize) -> Result<Vec<T>, NormError> {
    let s = perfect_sqrt(n)
        .ok_or_else(|| NormError::InvalidParameter(format!("n must be a perfect square, got {n}")))?;
    if upper.dim() != n {
        return Err(NormError::DimensionMismatch {
            expected: n,
            got: upper.dim(),
        });
    }
    let target = T::of_usize(s) / T::of(2.0);
    let mut y = vec![T::zero(); n];
    for b in 0..s.div_ceil(2).max(1) {
        let current = upper.value(&y);
        if current >= target {
            break;
        }
        let mut best = (b * s, T::neg_infinity());
        for i in b * s..(b + 1) * s {
            y[i] = T::one();
            let gain = upper.value(&y) - current;
            y[i] = T::zero();
            if gain > best.1 {
                best = (i, gain);
            }
        }
        y[best.0] = T::one();
    }
    Ok(y)
}
