//! Seeded instance generators. Every generator validates its output through
//! the owning module's constructor before returning it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::harness::Error;
use crate::norms::Norm;
use crate::ofl::{FacilityCosts, MetricSpace, OflInstance};
use crate::probing::{DiscreteDistribution, FeasibleFamily, ProbingInstance};
use crate::scalar::{Scalar, Tolerance};

/// Star `K_{1,n}`: point 0 is the centre, points `1..=n` are the leaves and the requests.
pub fn gen_star<T: Scalar>(n: usize, f: T, norm: Norm<T>) -> Result<OflInstance<T>, Error> {
    if n == 0 {
        return Err(Error::Config("a star needs at least one leaf".into()));
    }
    let dist = (0..=n)
        .map(|a| {
            (0..=n)
                .map(|b| match (a, b) {
                    _ if a == b => T::zero(),
                    (0, _) | (_, 0) => T::one(),
                    _ => T::of(2.0),
                })
                .collect()
        })
        .collect();
    let metric = MetricSpace::from_matrix(dist)?;
    Ok(OflInstance::new(metric, (1..=n).collect(), FacilityCosts::Uniform(f), &[0], norm)?)
}

/// How [`gen_random_euclidean`] assigns facility costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostSpec {
    Uniform(f64),
    /// Independent `2^e` with `e` uniform in `min_exp..=max_exp`.
    RandomPow2 { min_exp: i32, max_exp: i32 },
}

/// `n_points` uniform points in `[0,1]^dim`, all openable, and
/// `n_requests` requests drawn from them with repetition.
pub fn gen_random_euclidean<T: Scalar>(
    n_points: usize,
    n_requests: usize,
    dim: usize,
    costs: CostSpec,
    norm: Norm<T>,
    seed: u64,
) -> Result<OflInstance<T>, Error> {
    if n_points == 0 || dim == 0 {
        return Err(Error::Config("need at least one point and one dimension".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<T>> = (0..n_points)
        .map(|_| (0..dim).map(|_| T::of(rng.gen::<f64>())).collect())
        .collect();
    let requests: Vec<usize> = (0..n_requests).map(|_| rng.gen_range(0..n_points)).collect();
    let costs = match costs {
        CostSpec::Uniform(f) => FacilityCosts::Uniform(T::of(f)),
        CostSpec::RandomPow2 { min_exp, max_exp } => {
            if min_exp > max_exp {
                return Err(Error::Config("min_exp exceeds max_exp".into()));
            }
            FacilityCosts::PerPoint(
                (0..n_points)
                    .map(|_| T::of(2f64.powi(rng.gen_range(min_exp..=max_exp))))
                    .collect(),
            )
        }
    };
    let metric = MetricSpace::euclidean(points)?;
    let all: Vec<usize> = (0..n_points).collect();
    Ok(OflInstance::new(metric, requests, costs, &all, norm)?)
}

/// Random probing instance: two- or three-point distributions (`support_size`
/// in {2, 3}), the downward closure of random generator sets, and Top-2
/// (`ℓ∞` for n < 3) as objective.
pub fn gen_random_probing<T: Scalar>(n: usize, support_size: usize, seed: u64) -> Result<ProbingInstance<T>, Error> {
    if n == 0 || !(2..=3).contains(&support_size) {
        return Err(Error::Config(format!("need n >= 1 and support size 2 or 3, got n={n}, support={support_size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = |x: f64| (x * 1000.0).round() / 1000.0;
    let mut dists = Vec::with_capacity(n);
    for _ in 0..n {
        let mut support: Vec<f64> = Vec::with_capacity(support_size);
        while support.len() < support_size {
            let v = grid(rng.gen::<f64>());
            if !support.contains(&v) {
                support.push(v);
            }
        }
        support.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        let raw: Vec<f64> = (0..support_size).map(|_| 1.0 + rng.gen_range(0..8) as f64).collect();
        let total: f64 = raw.iter().sum();
        let mut probs: Vec<f64> = raw.iter().map(|r| r / total).collect();
        let head: f64 = probs[..support_size - 1].iter().sum();
        probs[support_size - 1] = 1.0 - head;
        dists.push(DiscreteDistribution::new(
            support.into_iter().map(T::of).collect(),
            probs.into_iter().map(T::of).collect(),
        )?);
    }
    let generators: Vec<u64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..1u64 << n)).collect();
    let family = FeasibleFamily::closure(n, generators)?;
    let norm = if n >= 3 { Norm::top_k(n, 2)? } else { Norm::linf(n) };
    Ok(ProbingInstance::new(dists, family, norm)?)
}

/// Complete `N`-ary tree of height `k` with demands along a random root-leaf path.
#[derive(Debug, Clone)]
pub struct TreeLowerBoundInstance<T> {
    pub instance: OflInstance<T>,
    pub k: usize,
    pub arity: usize,
    /// `σ = ‖1‖ / max_i ‖e_i‖` of the input norm.
    pub sigma: T,
    /// Node ids `v_0 (root), ..., v_k (leaf)`.
    pub path: Vec<usize>,
    /// `m_j`: least `m` with `‖1_{≤m}‖ ≥ k^j` (norm scaled so its largest basis value is 1).
    pub m: Vec<usize>,
    /// Number of copies of `v_j`: `m_0`, then `m_j − m_{j−1}`.
    pub multiplicities: Vec<usize>,
}

/// Largest tree the generator will build.
pub const MAX_TREE_NODES: usize = 2_000_000;

/// Lower-bound instance for a norm of dimension `n`: edges below depth `j`
/// have length `k^{−j}`, every facility costs `k`, and `v_j` is requested
/// `m_j − m_{j−1}` times in depth order.
pub fn gen_lower_bound_tree<T: Scalar>(norm: &Norm<T>, arity: usize, seed: u64) -> Result<TreeLowerBoundInstance<T>, Error> {
    let n = norm.dim();
    if arity < 2 {
        return Err(Error::Config(format!("tree arity must be at least 2, got {arity}")));
    }
    if n == 0 {
        return Err(Error::Config("norm has dimension 0".into()));
    }
    let tol = Tolerance::<T>::default();
    let mut unit = vec![T::zero(); n];
    let mut max_basis = T::zero();
    for i in 0..n {
        unit[i] = T::one();
        max_basis = max_basis.max(norm.value(&unit));
        unit[i] = T::zero();
    }
    let prefix = |m: usize| {
        let x: Vec<T> = (0..n).map(|i| if i < m { T::one() } else { T::zero() }).collect();
        norm.value(&x) / max_basis
    };
    let sigma = prefix(n);
    let mut k = 1usize;
    while tol.le(T::of_usize(k + 1).powi(k as i32 + 1), sigma) {
        k += 1;
    }
    if k < 2 {
        return Err(Error::Config(format!("σ = {sigma} is below 4, so the tree height would be below 2")));
    }
    let kt = T::of_usize(k);
    let mut m = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let target = kt.powi(j as i32);
        // least m >= 1 with prefix(m) >= target; prefix is nondecreasing
        let (mut lo, mut hi) = (1usize, n);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if tol.ge(prefix(mid), target) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        m.push(lo);
    }
    let multiplicities: Vec<usize> = (0..=k).map(|j| if j == 0 { m[0] } else { m[j] - m[j - 1] }).collect();

    let mut nodes = 1usize;
    let mut level = 1usize;
    for _ in 0..k {
        level = level.saturating_mul(arity);
        nodes = nodes.saturating_add(level);
    }
    if nodes > MAX_TREE_NODES {
        return Err(Error::Config(format!("tree would have {nodes} nodes (limit {MAX_TREE_NODES})")));
    }
    // breadth-first ids: children of u are u*N+1 ..= u*N+N
    let mut parent = vec![None; nodes];
    let mut length = vec![T::zero(); nodes];
    let mut depth = vec![0usize; nodes];
    for v in 1..nodes {
        let p = (v - 1) / arity;
        parent[v] = Some(p);
        depth[v] = depth[p] + 1;
        length[v] = kt.powi(-(depth[p] as i32));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = vec![0usize];
    for _ in 0..k {
        let u = *path.last().expect("non-empty path");
        path.push(u * arity + 1 + rng.gen_range(0..arity));
    }
    let requests: Vec<usize> = path
        .iter()
        .zip(&multiplicities)
        .flat_map(|(&v, &c)| std::iter::repeat_n(v, c))
        .collect();
    let inst_norm = if m[k] < n { norm.restrict_prefix(m[k])? } else { norm.clone() };
    let metric = MetricSpace::tree(parent, length)?;
    let instance = OflInstance::new(metric, requests, FacilityCosts::Uniform(kt), &path, inst_norm)?;
    Ok(TreeLowerBoundInstance {
        instance,
        k,
        arity,
        sigma,
        path,
        m,
        multiplicities,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofl::offline_opt_openable;

    #[test]
    fn star_shape() {
        let s = gen_star(3, 1.0f64, Norm::linf(3)).unwrap();
        let m = s.metric();
        assert_eq!((m.dist(1, 2), m.dist(1, 0), m.dist(3, 3)), (2.0, 1.0, 0.0));
        assert_eq!(s.requests(), &[1, 2, 3]);
        assert_eq!(s.openable(), vec![0, 1, 2, 3]);
        let one = gen_star(1, 1.0f64, Norm::l1(1)).unwrap();
        assert_eq!(one.metric().dist(0, 1), 1.0);
        assert!(gen_star(0, 1.0f64, Norm::l1(0)).is_err());
    }

    #[test]
    fn lower_bound_tree_l1() {
        let t = gen_lower_bound_tree(&Norm::<f64>::l1(256), 8, 1).unwrap();
        assert_eq!(t.k, 4);
        assert_eq!(t.m, vec![1, 4, 16, 64, 256]);
        assert_eq!(t.multiplicities, vec![1, 3, 12, 48, 192]);
        assert_eq!(t.instance.n_requests(), 256);
        assert_eq!(t.instance.metric().len(), 4681);
        let leaf = t.path[4];
        assert!((t.instance.metric().dist(0, leaf) - (1.0 + 0.25 + 1.0 / 16.0 + 1.0 / 64.0)).abs() < 1e-12);

        let small = gen_lower_bound_tree(&Norm::<f64>::l1(4), 8, 0).unwrap();
        assert_eq!(small.k, 2);
        assert_eq!(small.multiplicities, vec![1, 1, 2]);
        let opt = crate::ofl::offline_opt(&small.instance, &small.path).unwrap();
        assert!(opt.cost <= 2.0 * 2.0 + 2.0);
        assert!(gen_lower_bound_tree(&Norm::<f64>::l1(3), 8, 0).is_err());
        assert!(gen_lower_bound_tree(&Norm::<f64>::l1(4), 1, 0).is_err());
        let _ = offline_opt_openable(&small.instance).unwrap();
    }

    #[test]
    fn lower_bound_tree_restricts_the_norm() {
        // L2 on 64 coordinates: σ = 8, k = 2, m = (1, 4, 16)
        let t = gen_lower_bound_tree(&Norm::<f64>::l2(64), 4, 0).unwrap();
        assert_eq!(t.k, 2);
        assert_eq!(t.m, vec![1, 4, 16]);
        assert_eq!(t.instance.norm().dim(), 16);
    }

    #[test]
    fn generators_are_deterministic_and_valid() {
        let a = gen_random_euclidean(8, 10, 2, CostSpec::RandomPow2 { min_exp: -1, max_exp: 2 }, Norm::<f64>::l1(10), 42).unwrap();
        let b = gen_random_euclidean(8, 10, 2, CostSpec::RandomPow2 { min_exp: -1, max_exp: 2 }, Norm::<f64>::l1(10), 42).unwrap();
        assert_eq!(a.requests(), b.requests());
        assert_eq!(a.costs(), b.costs());
        assert!(a.metric().check_triangle());
        assert_eq!(a.openable().len(), 8);
        for seed in 0..20 {
            let p = gen_random_probing::<f64>(3, 2 + (seed as usize % 2), seed).unwrap();
            p.family().verify_downward_closed().unwrap();
        }
    }
}
