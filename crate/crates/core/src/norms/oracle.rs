use std::fmt;
use std::sync::Arc;

use crate::norms::setfn::{Matroid, SetFunction};
use crate::norms::vector::{check_non_negative, descending_order, sorted_desc};
use crate::norms::NormError;
use crate::scalar::{Scalar, Tolerance};

/// Exponent of an `ℓp` norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent<T> {
    Finite(T),
    Infinity,
}

/// Opaque evaluation callback.
pub type ValueFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

/// Whether a norm is built from closed-form families or wraps an opaque oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    ValueOracle,
}

#[derive(Clone)]
pub enum NormKind<T> {
    Lp(Exponent<T>),
    TopK(usize),
    /// `Σ a_i x↓_i` with `a` descending.
    Ordered(Vec<T>),
    /// `max_{a ∈ A} ⟨a, x↓⟩` over descending weight vectors.
    SymmetricMax(Vec<Vec<T>>),
    /// `max_{a ∈ A} ⟨a, x⟩` over arbitrary non-negative functionals.
    MaxLinear(Vec<Vec<T>>),
    Lovasz(Arc<dyn SetFunction<T>>),
    MatroidRank(Arc<dyn Matroid>),
    /// Sum of norms each acting on a subset of coordinates.
    PartialSum(Vec<(Vec<usize>, Norm<T>)>),
    Conical(Vec<(T, Norm<T>)>),
    Rescaled(Vec<T>, Box<Norm<T>>),
    ValueOracle { label: String, eval: ValueFn<T> },
}

/// A monotone norm on the non-negative orthant of `R^dim`.
///
/// Oracles are immutable and cheap to clone (sub-oracles are shared).
#[derive(Clone)]
pub struct Norm<T> {
    dim: usize,
    kind: NormKind<T>,
}

impl<T: fmt::Debug> fmt::Debug for Norm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            NormKind::Lp(Exponent::Finite(p)) => write!(f, "L{p:?}(n={})", self.dim),
            NormKind::Lp(Exponent::Infinity) => write!(f, "Linf(n={})", self.dim),
            NormKind::TopK(k) => write!(f, "Top{k}(n={})", self.dim),
            NormKind::Ordered(a) => write!(f, "Ordered({a:?})"),
            NormKind::SymmetricMax(a) => write!(f, "SymmetricMax(|A|={}, n={})", a.len(), self.dim),
            NormKind::MaxLinear(a) => write!(f, "MaxLinear(|A|={}, n={})", a.len(), self.dim),
            NormKind::Lovasz(s) => write!(f, "Lovasz({s:?})"),
            NormKind::MatroidRank(m) => write!(f, "MatroidRank({m:?})"),
            NormKind::PartialSum(p) => f.debug_list().entries(p.iter()).finish(),
            NormKind::Conical(t) => f.debug_list().entries(t.iter()).finish(),
            NormKind::Rescaled(s, inner) => write!(f, "Rescaled({s:?}, {inner:?})"),
            NormKind::ValueOracle { label, .. } => write!(f, "ValueOracle({label}, n={})", self.dim),
        }
    }
}

fn invalid(msg: impl Into<String>) -> NormError {
    NormError::InvalidParameter(msg.into())
}

fn check_descending<T: Scalar>(a: &[T]) -> Result<(), NormError> {
    check_non_negative(a)?;
    if a.windows(2).any(|w| w[1] > w[0]) {
        return Err(invalid("weight vector must be descending"));
    }
    Ok(())
}

impl<T: Scalar> Norm<T> {
    /// `ℓp` norm. Dimension zero is allowed (the norm of the empty vector is 0).
    pub fn lp(dim: usize, p: T) -> Result<Self, NormError> {
        if p.is_nan() || p < T::one() {
            return Err(invalid(format!("lp exponent must lie in [1, inf], got {p}")));
        }
        let exp = if p.is_infinite() {
            Exponent::Infinity
        } else {
            Exponent::Finite(p)
        };
        Ok(Self {
            dim,
            kind: NormKind::Lp(exp),
        })
    }

    pub fn l1(dim: usize) -> Self {
        Self::lp(dim, T::one()).expect("valid l1")
    }

    pub fn l2(dim: usize) -> Self {
        Self::lp(dim, T::of(2.0)).expect("valid l2")
    }

    pub fn linf(dim: usize) -> Self {
        Self::lp(dim, T::infinity()).expect("valid linf")
    }

    /// Sum of the `k` largest entries. `k = 1` and `k = dim` normalize to `ℓ∞` and `ℓ1`.
    pub fn top_k(dim: usize, k: usize) -> Result<Self, NormError> {
        if dim == 0 || k == 0 || k > dim {
            return Err(invalid(format!("top-k needs 1 <= k <= n (k={k}, n={dim})")));
        }
        Ok(if k == dim {
            Self::l1(dim)
        } else if k == 1 {
            Self::linf(dim)
        } else {
            Self {
                dim,
                kind: NormKind::TopK(k),
            }
        })
    }

    pub fn ordered(weights: Vec<T>) -> Result<Self, NormError> {
        check_descending(&weights)?;
        if weights.first().is_none_or(|a| *a <= T::zero()) {
            return Err(invalid("ordered norm needs a positive leading weight"));
        }
        Ok(Self {
            dim: weights.len(),
            kind: NormKind::Ordered(weights),
        })
    }

    pub fn symmetric_max(weights: Vec<Vec<T>>) -> Result<Self, NormError> {
        let dim = weights.first().map(Vec::len).ok_or_else(|| invalid("empty weight set"))?;
        for a in &weights {
            if a.len() != dim {
                return Err(NormError::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            check_descending(a)?;
        }
        if dim == 0 || weights.iter().all(|a| a[0] <= T::zero()) {
            return Err(invalid("symmetric max needs some positive leading weight"));
        }
        Ok(Self {
            dim,
            kind: NormKind::SymmetricMax(weights),
        })
    }

    /// General monotone norm `max_{a ∈ A} ⟨a, x⟩`. Every coordinate must be
    /// charged by some functional.
    pub fn max_linear(functionals: Vec<Vec<T>>) -> Result<Self, NormError> {
        let dim = functionals
            .first()
            .map(Vec::len)
            .ok_or_else(|| invalid("empty functional set"))?;
        for a in &functionals {
            if a.len() != dim {
                return Err(NormError::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            check_non_negative(a)?;
        }
        if let Some(i) = (0..dim).find(|&i| functionals.iter().all(|a| a[i] <= T::zero())) {
            return Err(NormError::Degenerate { index: i });
        }
        Ok(Self {
            dim,
            kind: NormKind::MaxLinear(functionals),
        })
    }

    /// Lovász extension of a monotone set function with `f(∅) = 0`.
    pub fn lovasz(set_fn: Arc<dyn SetFunction<T>>) -> Result<Self, NormError> {
        let dim = set_fn.ground_size();
        if dim == 0 {
            return Err(invalid("set function on empty ground set"));
        }
        let empty = set_fn.value(&vec![false; dim]);
        if !Tolerance::default().eq(empty, T::zero()) {
            return Err(invalid("Lovász extension needs f(empty) = 0"));
        }
        Ok(Self {
            dim,
            kind: NormKind::Lovasz(set_fn),
        })
    }

    pub fn matroid_rank(matroid: Arc<dyn Matroid>) -> Result<Self, NormError> {
        let dim = matroid.ground_size();
        if dim == 0 {
            return Err(invalid("matroid on empty ground set"));
        }
        Ok(Self {
            dim,
            kind: NormKind::MatroidRank(matroid),
        })
    }

    /// `Σ_k N_k(x_{S_k})`, where `N_k` has dimension `|S_k|`.
    pub fn partial_sum(dim: usize, parts: Vec<(Vec<usize>, Norm<T>)>) -> Result<Self, NormError> {
        if parts.is_empty() || dim == 0 {
            return Err(invalid("partial sum needs at least one part"));
        }
        let mut covered = vec![false; dim];
        for (idx, norm) in &parts {
            if idx.len() != norm.dim() {
                return Err(NormError::DimensionMismatch {
                    expected: idx.len(),
                    got: norm.dim(),
                });
            }
            let mut seen = vec![false; dim];
            for &i in idx {
                if i >= dim {
                    return Err(NormError::IndexOutOfRange { index: i, dim });
                }
                if seen[i] {
                    return Err(invalid(format!("index {i} repeated within a part")));
                }
                seen[i] = true;
                covered[i] = true;
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(NormError::Degenerate { index: i });
        }
        Ok(Self {
            dim,
            kind: NormKind::PartialSum(parts),
        })
    }

    pub fn conical(terms: Vec<(T, Norm<T>)>) -> Result<Self, NormError> {
        let dim = terms.first().map(|t| t.1.dim()).ok_or_else(|| invalid("empty combination"))?;
        for (c, norm) in &terms {
            if norm.dim() != dim {
                return Err(NormError::DimensionMismatch {
                    expected: dim,
                    got: norm.dim(),
                });
            }
            if !(*c >= T::zero()) {
                return Err(invalid("conical coefficients must be non-negative"));
            }
        }
        if terms.iter().all(|(c, _)| *c <= T::zero()) {
            return Err(invalid("conical combination with all-zero coefficients"));
        }
        Ok(Self {
            dim,
            kind: NormKind::Conical(terms),
        })
    }

    /// `x ↦ N(s ∘ x)` for a positive scale vector `s`.
    pub fn rescaled(scale: Vec<T>, inner: Norm<T>) -> Result<Self, NormError> {
        if scale.len() != inner.dim() {
            return Err(NormError::DimensionMismatch {
                expected: inner.dim(),
                got: scale.len(),
            });
        }
        if scale.iter().any(|s| !(*s > T::zero()) || s.is_infinite()) {
            return Err(invalid("rescaling factors must be positive and finite"));
        }
        Ok(Self {
            dim: inner.dim(),
            kind: NormKind::Rescaled(scale, Box::new(inner)),
        })
    }

    /// Wraps an opaque callback. The callback is trusted to be a monotone norm.
    pub fn value_oracle(dim: usize, label: impl Into<String>, eval: ValueFn<T>) -> Self {
        Self {
            dim,
            kind: NormKind::ValueOracle {
                label: label.into(),
                eval,
            },
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind<T> {
        &self.kind
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            NormKind::Lp(_) => "lp",
            NormKind::TopK(_) => "top_k",
            NormKind::Ordered(_) => "ordered",
            NormKind::SymmetricMax(_) => "symmetric_max",
            NormKind::MaxLinear(_) => "max_linear",
            NormKind::Lovasz(_) => "lovasz",
            NormKind::MatroidRank(_) => "matroid_rank",
            NormKind::PartialSum(_) => "partial_sum",
            NormKind::Conical(_) => "conical",
            NormKind::Rescaled(..) => "rescaled",
            NormKind::ValueOracle { .. } => "value_oracle",
        }
    }

    pub fn provenance(&self) -> Provenance {
        let opaque = match &self.kind {
            NormKind::ValueOracle { .. } => true,
            NormKind::PartialSum(p) => p.iter().any(|(_, n)| n.provenance() == Provenance::ValueOracle),
            NormKind::Conical(t) => t.iter().any(|(_, n)| n.provenance() == Provenance::ValueOracle),
            NormKind::Rescaled(_, n) => n.provenance() == Provenance::ValueOracle,
            _ => false,
        };
        if opaque {
            Provenance::ValueOracle
        } else {
            Provenance::ClosedForm
        }
    }

    /// Structurally symmetric (no sampling involved).
    pub fn is_structurally_symmetric(&self) -> bool {
        match &self.kind {
            NormKind::Lp(_) | NormKind::TopK(_) | NormKind::Ordered(_) | NormKind::SymmetricMax(_) => true,
            NormKind::Conical(t) => t.iter().all(|(_, n)| n.is_structurally_symmetric()),
            NormKind::Rescaled(s, n) => {
                s.windows(2).all(|w| w[0] == w[1]) && n.is_structurally_symmetric()
            }
            _ => false,
        }
    }

    /// Checked evaluation: validates dimension and sign.
    pub fn evaluate(&self, x: &[T]) -> Result<T, NormError> {
        if x.len() != self.dim {
            return Err(NormError::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        check_non_negative(x)?;
        Ok(self.value(x))
    }

    /// Unchecked evaluation. The caller guarantees `x.len() == dim` and `x >= 0`.
    pub fn value(&self, x: &[T]) -> T {
        debug_assert_eq!(x.len(), self.dim);
        match &self.kind {
            NormKind::Lp(Exponent::Infinity) => x.iter().fold(T::zero(), |m, &v| m.max(v)),
            NormKind::Lp(Exponent::Finite(p)) => lp_value(x, *p),
            NormKind::TopK(k) => top_k_value(x, *k),
            NormKind::Ordered(a) => dot(a, &sorted_desc(x)),
            NormKind::SymmetricMax(set) => {
                let xs = sorted_desc(x);
                set.iter().map(|a| dot(a, &xs)).fold(T::zero(), T::max)
            }
            NormKind::MaxLinear(set) => set.iter().map(|a| dot(a, x)).fold(T::zero(), T::max),
            NormKind::Lovasz(f) => lovasz_value(f.as_ref(), x),
            NormKind::MatroidRank(m) => matroid_value(m.as_ref(), x),
            NormKind::PartialSum(parts) => parts
                .iter()
                .map(|(idx, n)| {
                    let sub: Vec<T> = idx.iter().map(|&i| x[i]).collect();
                    n.value(&sub)
                })
                .sum(),
            NormKind::Conical(terms) => terms.iter().map(|(c, n)| *c * n.value(x)).sum(),
            NormKind::Rescaled(s, n) => {
                let y: Vec<T> = x.iter().zip(s).map(|(a, b)| *a * *b).collect();
                n.value(&y)
            }
            NormKind::ValueOracle { eval, .. } => eval(x),
        }
    }

    /// `‖base + z e_i‖ − ‖base‖` for a base vector supported on `[0, i)`.
    ///
    /// Indices are zero-based.
    pub fn marginal(&self, base: &[T], i: usize, z: T) -> Result<T, NormError> {
        if base.len() != self.dim {
            return Err(NormError::DimensionMismatch {
                expected: self.dim,
                got: base.len(),
            });
        }
        if i >= self.dim {
            return Err(NormError::IndexOutOfRange { index: i, dim: self.dim });
        }
        check_non_negative(base)?;
        check_non_negative(&[z])?;
        if let Some(j) = (i..self.dim).find(|&j| base[j] != T::zero()) {
            return Err(NormError::MarginalPrefix { index: j });
        }
        Ok(self.marginal_unchecked(base, i, z))
    }

    pub(crate) fn marginal_unchecked(&self, base: &[T], i: usize, z: T) -> T {
        let before = self.value(base);
        let mut with = base.to_vec();
        with[i] = z;
        (self.value(&with) - before).max(T::zero())
    }

    /// `ρ = ‖1‖ / min_i ‖e_i‖`.
    pub fn rho(&self) -> Result<T, NormError> {
        if self.dim == 0 {
            return Err(invalid("rho of a zero-dimensional norm"));
        }
        let tol = Tolerance::<T>::default();
        let mut min_basis = T::infinity();
        let mut unit = vec![T::zero(); self.dim];
        for i in 0..self.dim {
            unit[i] = T::one();
            let v = self.value(&unit);
            unit[i] = T::zero();
            if v <= tol.abs {
                return Err(NormError::Degenerate { index: i });
            }
            min_basis = min_basis.min(v);
        }
        let ones = vec![T::one(); self.dim];
        Ok(self.value(&ones) / min_basis)
    }

    /// Same norm family on the first `m` coordinates (zero-padding the rest).
    pub fn restrict_prefix(&self, m: usize) -> Result<Self, NormError> {
        if m == 0 || m > self.dim {
            return Err(invalid(format!("cannot restrict dimension {} to {m}", self.dim)));
        }
        if m == self.dim {
            return Ok(self.clone());
        }
        match &self.kind {
            NormKind::Lp(Exponent::Infinity) => Ok(Self::linf(m)),
            NormKind::Lp(Exponent::Finite(p)) => Self::lp(m, *p),
            NormKind::TopK(k) => Self::top_k(m, (*k).min(m)),
            NormKind::Ordered(a) => Self::ordered(a[..m].to_vec()),
            NormKind::SymmetricMax(set) => {
                Self::symmetric_max(set.iter().map(|a| a[..m].to_vec()).collect())
            }
            NormKind::MaxLinear(set) => {
                Self::max_linear(set.iter().map(|a| a[..m].to_vec()).collect())
            }
            NormKind::Conical(terms) => Self::conical(
                terms
                    .iter()
                    .map(|(c, n)| n.restrict_prefix(m).map(|r| (*c, r)))
                    .collect::<Result<_, _>>()?,
            ),
            NormKind::Rescaled(s, n) => Self::rescaled(s[..m].to_vec(), n.restrict_prefix(m)?),
            _ => Err(NormError::Unsupported(format!(
                "prefix restriction of {} norms",
                self.kind_name()
            ))),
        }
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn lp_value<T: Scalar>(x: &[T], p: T) -> T {
    if p == T::one() {
        return x.iter().copied().sum();
    }
    let m = x.iter().fold(T::zero(), |m, &v| m.max(v));
    if m == T::zero() {
        return T::zero();
    }
    if p == T::of(2.0) {
        let s: T = x.iter().map(|&v| (v / m) * (v / m)).sum();
        return m * s.sqrt();
    }
    let s: T = x.iter().map(|&v| (v / m).powf(p)).sum();
    m * s.powf(p.recip())
}

fn top_k_value<T: Scalar>(x: &[T], k: usize) -> T {
    let mut v = x.to_vec();
    v.select_nth_unstable_by(k - 1, |a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    v[..k].iter().copied().sum()
}

/// Telescoping sum over nested level sets in descending order.
fn lovasz_value<T: Scalar>(f: &dyn SetFunction<T>, x: &[T]) -> T {
    let order = descending_order(x);
    let mut set = vec![false; x.len()];
    let mut total = T::zero();
    for (pos, &i) in order.iter().enumerate() {
        set[i] = true;
        let next = order.get(pos + 1).map_or(T::zero(), |&j| x[j]);
        let gap = x[i] - next;
        if gap > T::zero() {
            total = total + gap * f.value(&set);
        }
    }
    total
}

fn matroid_value<T: Scalar>(m: &dyn Matroid, x: &[T]) -> T {
    let mut set = vec![false; x.len()];
    let mut total = T::zero();
    for i in descending_order(x) {
        if x[i] <= T::zero() {
            break;
        }
        set[i] = true;
        if m.is_independent(&set) {
            total = total + x[i];
        } else {
            set[i] = false;
        }
    }
    total
}
