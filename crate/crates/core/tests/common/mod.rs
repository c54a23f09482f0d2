//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subnorm::loadbal::LoadBalInstance;
use subnorm::norms::{ConcaveCardinality, CoverageFunction, Norm};
use subnorm::ofl::OflInstance;
use subnorm::probing::{DiscreteDistribution, FeasibleFamily, ProbingInstance};

/// Minimum of `Σ f(q) + ‖d‖` over all non-empty subsets of `candidates`,
/// recomputing each distance vector directly from the metric.
pub fn brute_force_ofl(instance: &OflInstance<f64>, candidates: &[usize]) -> f64 {
    let k = candidates.len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << k) {
        let open: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| candidates[b]).collect();
        let opening: f64 = open.iter().map(|&q| instance.cost(q)).sum();
        let d: Vec<f64> = instance
            .requests()
            .iter()
            .map(|&x| open.iter().map(|&q| instance.metric().dist(x, q)).fold(f64::INFINITY, f64::min))
            .collect();
        best = best.min(opening + instance.norm().value(&d));
    }
    best
}

/// Explicit adaptive decision tree.
#[derive(Clone, Debug)]
pub enum Tree {
    Stop,
    Probe(usize, Vec<Tree>),
}

/// Every decision tree whose root-to-leaf probe sets stay in the family.
pub fn all_trees(inst: &ProbingInstance<f64>, mask: u64) -> Vec<Tree> {
    let mut out = vec![Tree::Stop];
    for e in 0..inst.n() {
        let next = mask | 1 << e;
        if mask >> e & 1 == 1 || !inst.family().contains(next) {
            continue;
        }
        let sub = all_trees(inst, next);
        let s = inst.distributions()[e].len();
        // all s-tuples of subtrees
        let mut idx = vec![0usize; s];
        loop {
            out.push(Tree::Probe(e, idx.iter().map(|&i| sub[i].clone()).collect()));
            let mut p = 0;
            while p < s {
                idx[p] += 1;
                if idx[p] < sub.len() {
                    break;
                }
                idx[p] = 0;
                p += 1;
            }
            if p == s {
                break;
            }
        }
    }
    out
}

/// All joint outcomes `(support index per element, probability)`.
pub fn joint_outcomes(inst: &ProbingInstance<f64>) -> Vec<(Vec<usize>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for d in inst.distributions() {
        let mut next = Vec::new();
        for (idx, p) in &out {
            for k in 0..d.len() {
                let mut v = idx.clone();
                v.push(k);
                next.push((v, p * d.probs()[k]));
            }
        }
        out = next;
    }
    out
}

/// Probed set a tree reaches on one joint outcome.
pub fn tree_probes(tree: &Tree, outcome: &[usize]) -> u64 {
    let mut node = tree;
    let mut set = 0u64;
    while let Tree::Probe(e, children) = node {
        set |= 1 << e;
        node = &children[outcome[*e]];
    }
    set
}

/// Objective of the observed values on `set` for one joint outcome.
pub fn value_on(inst: &ProbingInstance<f64>, set: u64, outcome: &[usize]) -> f64 {
    let x: Vec<f64> = (0..inst.n())
        .map(|i| if set >> i & 1 == 1 { inst.distributions()[i].support()[outcome[i]] } else { 0.0 })
        .collect();
    inst.norm().value(&x)
}

pub fn tree_value(inst: &ProbingInstance<f64>, tree: &Tree, outcomes: &[(Vec<usize>, f64)]) -> f64 {
    outcomes.iter().map(|(o, p)| p * value_on(inst, tree_probes(tree, o), o)).sum()
}

/// Best adaptive value by enumerating every decision tree.
pub fn brute_force_adaptive(inst: &ProbingInstance<f64>) -> f64 {
    let outcomes = joint_outcomes(inst);
    all_trees(inst, 0)
        .iter()
        .map(|t| tree_value(inst, t, &outcomes))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Best fixed set over all 2^n masks in the family.
pub fn brute_force_nonadaptive(inst: &ProbingInstance<f64>) -> f64 {
    let outcomes = joint_outcomes(inst);
    (0u64..1 << inst.n())
        .filter(|&s| inst.family().contains(s))
        .map(|s| outcomes.iter().map(|(o, p)| p * value_on(inst, s, o)).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Probing objectives used by the random instance generator below.
pub fn probing_norm(n: usize, which: usize) -> Norm<f64> {
    match which % 5 {
        0 => Norm::l1(n),
        1 => Norm::l2(n),
        2 => Norm::linf(n),
        3 => {
            // coverage of the element pairs {i, i+1}
            let w = (0..=n).map(|u| 1.0 + u as f64).collect();
            let covers = (0..n).map(|i| vec![i, i + 1]).collect();
            Norm::lovasz(Arc::new(CoverageFunction::new(w, covers).unwrap())).unwrap()
        }
        _ => {
            if n >= 2 {
                Norm::top_k(n, 2).unwrap()
            } else {
                let v = (0..=n).map(|k| (k as f64).sqrt()).collect();
                Norm::lovasz(Arc::new(ConcaveCardinality::new(v).unwrap())).unwrap()
            }
        }
    }
}

/// Random instance with `n` elements, two- or three-point distributions,
/// the downward closure of random generators, and one of the norms above.
pub fn random_probing(n: usize, seed: u64) -> ProbingInstance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dists = (0..n)
        .map(|_| {
            let s = rng.gen_range(2..=3);
            let mut vals: Vec<f64> = (0..s).map(|_| (rng.gen_range(0..=20) as f64) / 10.0).collect();
            vals.sort_by(f64::total_cmp);
            vals.dedup();
            let raw: Vec<f64> = vals.iter().map(|_| rng.gen_range(1..=9) as f64).collect();
            let total: f64 = raw.iter().sum();
            let probs = raw.iter().map(|r| r / total).collect();
            DiscreteDistribution::new(vals, probs).unwrap()
        })
        .collect();
    let gens: Vec<u64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..1u64 << n)).collect();
    let family = FeasibleFamily::closure(n, gens).unwrap();
    ProbingInstance::new(dists, family, probing_norm(n, rng.gen_range(0..5))).unwrap()
}

/// Exact optimum by depth-first enumeration of all assignments.
pub fn brute_force_loadbal(inst: &LoadBalInstance<f64>) -> f64 {
    fn dfs(inst: &LoadBalInstance<f64>, j: usize, vectors: &mut Vec<Vec<f64>>, best: &mut f64) {
        let (m, n) = (inst.machines(), inst.jobs());
        if j == n {
            let cost: f64 = (0..m).map(|i| inst.inner_norms()[i].value(&vectors[i])).sum();
            *best = best.min(cost);
            return;
        }
        for i in 0..m {
            vectors[i][j] = inst.times()[i][j];
            dfs(inst, j + 1, vectors, best);
            vectors[i][j] = 0.0;
        }
    }
    let mut best = f64::INFINITY;
    dfs(inst, 0, &mut vec![vec![0.0; inst.jobs()]; inst.machines()], &mut best);
    best
}

/// Processing times uniform in `[0.1, 1]` on a 0.01 grid.
pub fn random_times(m: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..m).map(|_| (0..n).map(|_| rng.gen_range(10..=100) as f64 / 100.0).collect()).collect()
}

/// Upper quantile of the chi-square distribution (Wilson–Hilferty), `z` standard normal quantile.
pub fn chi2_quantile(df: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * df);
    df * (1.0 - a + z * a.sqrt()).powi(3)
}
