use crate::ofl::OflError;
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, PartialEq)]
enum Repr<T> {
    Matrix(Vec<Vec<T>>),
    Euclidean(Vec<Vec<T>>),
    Tree {
        parent: Vec<Option<usize>>,
        length: Vec<T>,
        depth: Vec<usize>,
        root_dist: Vec<T>,
    },
}

/// Finite metric space over points `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpace<T> {
    repr: Repr<T>,
}

impl<T: Scalar> MetricSpace<T> {
    /// Explicit distance matrix; symmetry, zero diagonal and the triangle
    /// inequality are verified.
    pub fn from_matrix(dist: Vec<Vec<T>>) -> Result<Self, OflError> {
        let n = dist.len();
        let tol = Tolerance::<T>::default();
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(OflError::InvalidMetric(format!("row {i} has length {}", row.len())));
            }
            if row[i] != T::zero() {
                return Err(OflError::InvalidMetric(format!("non-zero diagonal at {i}")));
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= T::zero()) || d.is_infinite() {
                    return Err(OflError::InvalidMetric(format!("bad distance d({i},{j}) = {d}")));
                }
                if !tol.eq(d, dist[j][i]) {
                    return Err(OflError::InvalidMetric(format!("asymmetric at ({i},{j})")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if !tol.le(dist[i][j], dist[i][k] + dist[k][j]) {
                        return Err(OflError::InvalidMetric(format!(
                            "triangle inequality fails for ({i},{j}) via {k}"
                        )));
                    }
                }
            }
        }
        Ok(Self {
            repr: Repr::Matrix(dist),
        })
    }

    pub fn euclidean(points: Vec<Vec<T>>) -> Result<Self, OflError> {
        if let Some(first) = points.first() {
            let dim = first.len();
            if points.iter().any(|p| p.len() != dim || p.iter().any(|c| !c.is_finite())) {
                return Err(OflError::InvalidMetric("inconsistent euclidean points".into()));
            }
        }
        Ok(Self {
            repr: Repr::Euclidean(points),
        })
    }

    /// Rooted tree: `parent[v]` is `None` exactly for the root, `length[v]` is the
    /// length of the edge from `v` to its parent (ignored for the root).
    pub fn tree(parent: Vec<Option<usize>>, length: Vec<T>) -> Result<Self, OflError> {
        let n = parent.len();
        if length.len() != n {
            return Err(OflError::InvalidMetric("parent/length size mismatch".into()));
        }
        if parent.iter().filter(|p| p.is_none()).count() != 1 {
            return Err(OflError::InvalidMetric("tree needs exactly one root".into()));
        }
        let mut depth = vec![usize::MAX; n];
        let mut root_dist = vec![T::zero(); n];
        for v in 0..n {
            // walk up until a resolved ancestor, then fill the path back down
            let mut path = Vec::new();
            let mut u = v;
            while depth[u] == usize::MAX {
                path.push(u);
                if path.len() > n {
                    return Err(OflError::InvalidMetric("cycle in parent array".into()));
                }
                match parent[u] {
                    Some(p) if p < n => u = p,
                    Some(p) => {
                        return Err(OflError::InvalidMetric(format!("parent {p} out of range")))
                    }
                    None => {
                        depth[u] = 0;
                        root_dist[u] = T::zero();
                        path.pop();
                        break;
                    }
                }
            }
            for &w in path.iter().rev() {
                let p = parent[w].expect("non-root has a parent");
                if !(length[w] >= T::zero()) {
                    return Err(OflError::InvalidMetric(format!("negative edge length at {w}")));
                }
                depth[w] = depth[p] + 1;
                root_dist[w] = root_dist[p] + length[w];
            }
        }
        Ok(Self {
            repr: Repr::Tree {
                parent,
                length,
                depth,
                root_dist,
            },
        })
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Matrix(d) => d.len(),
            Repr::Euclidean(p) => p.len(),
            Repr::Tree { parent, .. } => parent.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dist(&self, a: usize, b: usize) -> T {
        match &self.repr {
            Repr::Matrix(d) => d[a][b],
            Repr::Euclidean(p) => p[a]
                .iter()
                .zip(&p[b])
                .map(|(x, y)| (*x - *y) * (*x - *y))
                .sum::<T>()
                .sqrt(),
            Repr::Tree {
                parent,
                depth,
                root_dist,
                ..
            } => {
                let (mut u, mut v) = (a, b);
                while depth[u] > depth[v] {
                    u = parent[u].expect("deeper node has parent");
                }
                while depth[v] > depth[u] {
                    v = parent[v].expect("deeper node has parent");
                }
                while u != v {
                    u = parent[u].expect("non-root");
                    v = parent[v].expect("non-root");
                }
                root_dist[a] + root_dist[b] - T::of(2.0) * root_dist[u]
            }
        }
    }

    /// Nearest point of `candidates` to `x`, ties broken by lowest point index.
    pub fn nearest(&self, x: usize, candidates: impl IntoIterator<Item = usize>) -> Option<(usize, T)> {
        let mut best: Option<(usize, T)> = None;
        for q in candidates {
            let d = self.dist(x, q);
            best = match best {
                None => Some((q, d)),
                Some((bq, bd)) if d < bd || (d == bd && q < bq) => Some((q, d)),
                keep => keep,
            };
        }
        best
    }

    pub fn as_matrix(&self) -> Option<&[Vec<T>]> {
        match &self.repr {
            Repr::Matrix(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_points(&self) -> Option<&[Vec<T>]> {
        match &self.repr {
            Repr::Euclidean(p) => Some(p),
            _ => None,
        }
    }

    /// `(parent, length)` for tree metrics.
    pub fn as_tree(&self) -> Option<(&[Option<usize>], &[T])> {
        match &self.repr {
            Repr::Tree { parent, length, .. } => Some((parent, length)),
            _ => None,
        }
    }

    pub fn depth(&self, v: usize) -> Option<usize> {
        match &self.repr {
            Repr::Tree { depth, .. } => Some(depth[v]),
            _ => None,
        }
    }

    /// Brute-force triangle check over all triples (any representation).
    pub fn check_triangle(&self) -> bool {
        let tol = Tolerance::<T>::default();
        let n = self.len();
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| tol.le(self.dist(i, j), self.dist(i, k) + self.dist(k, j))))
        })
    }
}
