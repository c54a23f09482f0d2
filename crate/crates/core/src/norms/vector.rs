use crate::norms::NormError;
use crate::scalar::Scalar;

/// A vector in the non-negative orthant with fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct NonNegVec<T> {
    entries: Vec<T>,
}

impl<T: Scalar> NonNegVec<T> {
    pub fn new(entries: Vec<T>) -> Result<Self, NormError> {
        check_non_negative(&entries)?;
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![T::zero(); n],
        }
    }

    /// Indicator of the first `k` coordinates.
    pub fn prefix_ones(n: usize, k: usize) -> Self {
        let mut entries = vec![T::zero(); n];
        for e in entries.iter_mut().take(k) {
            *e = T::one();
        }
        Self { entries }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut entries = vec![T::zero(); n];
        entries[i] = T::one();
        Self { entries }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.entries
    }

    pub fn into_inner(self) -> Vec<T> {
        self.entries
    }

    /// Entries sorted in descending order.
    pub fn sorted_desc(&self) -> Vec<T> {
        sorted_desc(&self.entries)
    }
}

impl<T> AsRef<[T]> for NonNegVec<T> {
    fn as_ref(&self) -> &[T] {
        &self.entries
    }
}

pub(crate) fn check_non_negative<T: Scalar>(x: &[T]) -> Result<(), NormError> {
    match x.iter().position(|v| !(*v >= T::zero()) || v.is_nan()) {
        Some(index) => Err(NormError::NegativeEntry {
            index,
            value: x[index].to_f64_lossy(),
        }),
        None => Ok(()),
    }
}

/// Descending sort order of `x`; equal entries keep their original index order.
pub fn descending_order<T: Scalar>(x: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

pub fn sorted_desc<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v
}
