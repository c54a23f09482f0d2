//! Set-function and matroid oracles used by Lovász-extension and
//! matroid-rank norms. Sets are passed as membership slices.

use std::fmt::Debug;
use std::sync::Arc;

use crate::norms::descriptor::{MatroidDescriptor, SetFunctionDescriptor};
use crate::norms::NormError;
use crate::scalar::Scalar;

/// Oracle for a set function `f : 2^[n] -> R+`.
pub trait SetFunction<T>: Debug + Send + Sync {
    fn ground_size(&self) -> usize;
    fn value(&self, set: &[bool]) -> T;
    /// Serializable form, when one exists.
    fn descriptor(&self) -> Option<SetFunctionDescriptor> {
        None
    }
}

/// Independence oracle of a matroid on `[n]`.
pub trait Matroid: Debug + Send + Sync {
    fn ground_size(&self) -> usize;
    fn is_independent(&self, set: &[bool]) -> bool;
    fn descriptor(&self) -> Option<MatroidDescriptor> {
        None
    }
}

/// Rank of `set` by the matroid greedy algorithm.
pub fn matroid_rank(m: &dyn Matroid, set: &[bool]) -> usize {
    let mut current = vec![false; set.len()];
    let mut rank = 0;
    for (i, &member) in set.iter().enumerate() {
        if !member {
            continue;
        }
        current[i] = true;
        if m.is_independent(&current) {
            rank += 1;
        } else {
            current[i] = false;
        }
    }
    rank
}

pub fn mask_to_set(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

pub fn set_to_mask(set: &[bool]) -> u64 {
    set.iter()
        .enumerate()
        .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformMatroid {
    n: usize,
    k: usize,
}

impl UniformMatroid {
    pub fn new(n: usize, k: usize) -> Self {
        Self { n, k }
    }
}

impl Matroid for UniformMatroid {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        set.iter().filter(|&&b| b).count() <= self.k
    }
    fn descriptor(&self) -> Option<MatroidDescriptor> {
        Some(MatroidDescriptor::Uniform {
            n: self.n,
            k: self.k,
        })
    }
}

/// Partition matroid: at most `capacities[b]` elements from block `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionMatroid {
    block_of: Vec<usize>,
    capacities: Vec<usize>,
}

impl PartitionMatroid {
    pub fn new(block_of: Vec<usize>, capacities: Vec<usize>) -> Result<Self, NormError> {
        if let Some(&b) = block_of.iter().find(|&&b| b >= capacities.len()) {
            return Err(NormError::InvalidParameter(format!(
                "partition matroid block {b} has no capacity"
            )));
        }
        Ok(Self {
            block_of,
            capacities,
        })
    }
}

impl Matroid for PartitionMatroid {
    fn ground_size(&self) -> usize {
        self.block_of.len()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        let mut used = vec![0usize; self.capacities.len()];
        for (i, &b) in set.iter().enumerate() {
            if b {
                let blk = self.block_of[i];
                used[blk] += 1;
                if used[blk] > self.capacities[blk] {
                    return false;
                }
            }
        }
        true
    }
    fn descriptor(&self) -> Option<MatroidDescriptor> {
        Some(MatroidDescriptor::Partition {
            block_of: self.block_of.clone(),
            capacities: self.capacities.clone(),
        })
    }
}

/// Graphic matroid: ground set = edges, independent = forests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphicMatroid {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl GraphicMatroid {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, NormError> {
        if edges.iter().any(|&(u, v)| u >= vertices || v >= vertices) {
            return Err(NormError::InvalidParameter(
                "graphic matroid edge endpoint out of range".into(),
            ));
        }
        Ok(Self { vertices, edges })
    }
}

impl Matroid for GraphicMatroid {
    fn ground_size(&self) -> usize {
        self.edges.len()
    }
    fn is_independent(&self, set: &[bool]) -> bool {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            if !set[e] {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
        true
    }
    fn descriptor(&self) -> Option<MatroidDescriptor> {
        Some(MatroidDescriptor::Graphic {
            vertices: self.vertices,
            edges: self.edges.clone(),
        })
    }
}

/// Weighted coverage: element `i` covers `covers[i]`; value is the weight covered.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageFunction<T> {
    weights: Vec<T>,
    covers: Vec<Vec<usize>>,
}

impl<T: Scalar> CoverageFunction<T> {
    pub fn new(weights: Vec<T>, covers: Vec<Vec<usize>>) -> Result<Self, NormError> {
        if weights.iter().any(|w| !(*w >= T::zero())) {
            return Err(NormError::InvalidParameter(
                "coverage weights must be non-negative".into(),
            ));
        }
        if covers.iter().flatten().any(|&u| u >= weights.len()) {
            return Err(NormError::InvalidParameter(
                "coverage item out of range".into(),
            ));
        }
        Ok(Self { weights, covers })
    }
}

impl<T: Scalar> SetFunction<T> for CoverageFunction<T> {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }
    fn value(&self, set: &[bool]) -> T {
        let mut covered = vec![false; self.weights.len()];
        for (i, c) in self.covers.iter().enumerate() {
            if set[i] {
                for &u in c {
                    covered[u] = true;
                }
            }
        }
        covered
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| **c)
            .map(|(_, w)| *w)
            .sum()
    }
    fn descriptor(&self) -> Option<SetFunctionDescriptor> {
        Some(SetFunctionDescriptor::Coverage {
            weights: self.weights.iter().map(|w| w.to_f64_lossy()).collect(),
            covers: self.covers.clone(),
        })
    }
}

/// `f(S) = g(|S|)` for a concave nondecreasing `g` with `g(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcaveCardinality<T> {
    values: Vec<T>,
}

impl<T: Scalar> ConcaveCardinality<T> {
    /// `values[k] = g(k)` for `k = 0..=n`.
    pub fn new(values: Vec<T>) -> Result<Self, NormError> {
        let tol = crate::scalar::Tolerance::<T>::default();
        if values.len() < 2 || !tol.eq(values[0], T::zero()) {
            return Err(NormError::InvalidParameter(
                "concave cardinality needs g(0) = 0 and n >= 1".into(),
            ));
        }
        let inc: Vec<T> = values.windows(2).map(|w| w[1] - w[0]).collect();
        if inc.iter().any(|d| *d < -tol.slack(*d))
            || inc.windows(2).any(|w| w[1] > w[0] + tol.slack(w[0]))
        {
            return Err(NormError::InvalidParameter(
                "cardinality profile must be nondecreasing and concave".into(),
            ));
        }
        Ok(Self { values })
    }
}

impl<T: Scalar> SetFunction<T> for ConcaveCardinality<T> {
    fn ground_size(&self) -> usize {
        self.values.len() - 1
    }
    fn value(&self, set: &[bool]) -> T {
        self.values[set.iter().filter(|&&b| b).count()]
    }
    fn descriptor(&self) -> Option<SetFunctionDescriptor> {
        Some(SetFunctionDescriptor::ConcaveCardinality {
            values: self.values.iter().map(|w| w.to_f64_lossy()).collect(),
        })
    }
}

/// Explicit value table indexed by bitmask (bit `i` = element `i`).
#[derive(Debug, Clone, PartialEq)]
pub struct TableSetFunction<T> {
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> TableSetFunction<T> {
    pub fn new(n: usize, values: Vec<T>) -> Result<Self, NormError> {
        if n > 20 || values.len() != 1 << n {
            return Err(NormError::InvalidParameter(format!(
                "table set function needs 2^n values with n <= 20 (got {} for n={n})",
                values.len()
            )));
        }
        Ok(Self { n, values })
    }

    /// Monotone and submodular over all pairs of masks, within tolerance.
    pub fn is_monotone_submodular(&self) -> bool {
        let tol = crate::scalar::Tolerance::<T>::default();
        let full = 1usize << self.n;
        for a in 0..full {
            for i in 0..self.n {
                if a >> i & 1 == 0 && !tol.le(self.values[a], self.values[a | 1 << i]) {
                    return false;
                }
            }
            for b in 0..full {
                let lhs = self.values[a | b] + self.values[a & b];
                let rhs = self.values[a] + self.values[b];
                if !tol.le(lhs, rhs) {
                    return false;
                }
            }
        }
        true
    }
}

impl<T: Scalar> SetFunction<T> for TableSetFunction<T> {
    fn ground_size(&self) -> usize {
        self.n
    }
    fn value(&self, set: &[bool]) -> T {
        self.values[set_to_mask(set) as usize]
    }
    fn descriptor(&self) -> Option<SetFunctionDescriptor> {
        Some(SetFunctionDescriptor::Table {
            n: self.n,
            values: self.values.iter().map(|w| w.to_f64_lossy()).collect(),
        })
    }
}

/// Rank function of a matroid, as a set function.
#[derive(Debug, Clone)]
pub struct MatroidRankFunction {
    matroid: Arc<dyn Matroid>,
}

impl MatroidRankFunction {
    pub fn new(matroid: Arc<dyn Matroid>) -> Self {
        Self { matroid }
    }
}

impl<T: Scalar> SetFunction<T> for MatroidRankFunction {
    fn ground_size(&self) -> usize {
        self.matroid.ground_size()
    }
    fn value(&self, set: &[bool]) -> T {
        T::of_usize(matroid_rank(self.matroid.as_ref(), set))
    }
    fn descriptor(&self) -> Option<SetFunctionDescriptor> {
        self.matroid
            .descriptor()
            .map(|m| SetFunctionDescriptor::MatroidRank { matroid: m })
    }
}
