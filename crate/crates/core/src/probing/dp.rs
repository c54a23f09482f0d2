//! Exact adaptive and non-adaptive optima.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::probing::{Policy, PolicyNode, ProbingError, ProbingInstance};
use crate::scalar::{CompensatedSum, Scalar};

/// Enumeration limits checked before any work starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProbingBudget {
    pub max_elements: usize,
    pub max_support: usize,
    /// Limit on `Π (|support_i| + 1)`, the size of the memo table.
    pub max_states: usize,
}

impl Default for ProbingBudget {
    fn default() -> Self {
        Self {
            max_elements: 8,
            max_support: 3,
            max_states: 1 << 20,
        }
    }
}

impl ProbingBudget {
    /// Returns the memo table size, or the reason the instance is over budget.
    pub fn check<T: Scalar>(&self, instance: &ProbingInstance<T>) -> Result<usize, ProbingError> {
        let n = instance.n();
        if n > self.max_elements {
            return Err(ProbingError::Budget(format!("{n} elements exceed the limit of {}", self.max_elements)));
        }
        if let Some((i, d)) = instance.distributions().iter().enumerate().find(|(_, d)| d.len() > self.max_support) {
            return Err(ProbingError::Budget(format!(
                "element {i} has {} support points, limit {}",
                d.len(),
                self.max_support
            )));
        }
        let mut states = 1usize;
        for d in instance.distributions() {
            states = states
                .checked_mul(d.len() + 1)
                .filter(|&s| s <= self.max_states)
                .ok_or_else(|| ProbingError::Budget(format!("state space exceeds {} entries", self.max_states)))?;
        }
        Ok(states)
    }
}

const STOP: usize = usize::MAX;

struct Dp<'a, T> {
    inst: &'a ProbingInstance<T>,
    stride: Vec<usize>,
    memo: Vec<Option<(T, usize)>>,
}

impl<T: Scalar> Dp<'_, T> {
    /// State: probed set `mask`, mixed-radix `key` (digit 0 = unprobed,
    /// digit k+1 = k-th support value), realized vector `x`.
    fn solve(&mut self, key: usize, mask: u64, x: &mut Vec<T>) -> T {
        if let Some((v, _)) = self.memo[key] {
            return v;
        }
        let mut best = (self.inst.norm().value(x), STOP);
        for i in 0..self.inst.n() {
            let next = mask | 1 << i;
            if mask >> i & 1 == 1 || !self.inst.family().contains(next) {
                continue;
            }
            let d = &self.inst.distributions()[i];
            let mut acc = CompensatedSum::new();
            for k in 0..d.len() {
                x[i] = d.support()[k];
                acc.add(d.probs()[k] * self.solve(key + (k + 1) * self.stride[i], next, x));
            }
            x[i] = T::zero();
            if acc.value() > best.0 {
                best = (acc.value(), i);
            }
        }
        self.memo[key] = Some(best);
        best.0
    }

    fn extract(&self, key: usize) -> PolicyNode {
        match self.memo[key] {
            Some((_, STOP)) | None => PolicyNode::Stop,
            Some((_, e)) => PolicyNode::Probe {
                element: e,
                children: (0..self.inst.distributions()[e].len())
                    .map(|k| self.extract(key + (k + 1) * self.stride[e]))
                    .collect(),
            },
        }
    }
}

/// Optimal adaptive policy by memoized recursion over (probed set, realized values).
pub fn adaptive_opt<T: Scalar>(instance: &ProbingInstance<T>, budget: &ProbingBudget) -> Result<Policy<T>, ProbingError> {
    let states = budget.check(instance)?;
    let mut stride = Vec::with_capacity(instance.n());
    let mut s = 1usize;
    for d in instance.distributions() {
        stride.push(s);
        s *= d.len() + 1;
    }
    let mut dp = Dp {
        inst: instance,
        stride,
        memo: vec![None; states],
    };
    let value = dp.solve(0, 0, &mut vec![T::zero(); instance.n()]);
    Ok(Policy {
        root: dp.extract(0),
        value,
    })
}

/// `E[f(X_S)]` by enumerating the product distribution over `S`.
pub fn expected_on_set<T: Scalar>(instance: &ProbingInstance<T>, set: u64) -> T {
    fn rec<T: Scalar>(inst: &ProbingInstance<T>, elems: &[usize], x: &mut Vec<T>, weight: T, acc: &mut CompensatedSum<T>) {
        match elems.split_first() {
            None => acc.add(weight * inst.norm().value(x)),
            Some((&i, rest)) => {
                let d = &inst.distributions()[i];
                for k in 0..d.len() {
                    if d.probs()[k] > T::zero() {
                        x[i] = d.support()[k];
                        rec(inst, rest, x, weight * d.probs()[k], acc);
                    }
                }
                x[i] = T::zero();
            }
        }
    }
    let elems: Vec<usize> = (0..instance.n()).filter(|i| set >> i & 1 == 1).collect();
    let mut acc = CompensatedSum::new();
    rec(instance, &elems, &mut vec![T::zero(); instance.n()], T::one(), &mut acc);
    acc.value()
}

/// Best fixed probe set: `max_{S ∈ F} E[f(X_S)]`, scanning every member.
pub fn nonadaptive_opt<T: Scalar>(instance: &ProbingInstance<T>, budget: &ProbingBudget) -> Result<(Vec<usize>, T), ProbingError> {
    budget.check(instance)?;
    let mut best = (0u64, T::neg_infinity());
    for s in instance.family().members() {
        let v = expected_on_set(instance, s);
        if v > best.1 {
            best = (s, v);
        }
    }
    let set = (0..instance.n()).filter(|i| best.0 >> i & 1 == 1).collect();
    Ok((set, best.1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapReport<T> {
    pub adaptive: T,
    pub nonadaptive: T,
    pub nonadaptive_set: Vec<usize>,
    /// `adaptive / nonadaptive`, 1 when both vanish.
    pub ratio: T,
}

/// Both optima and their ratio; asserts `Adap >= NA`.
pub fn adaptivity_gap<T: Scalar>(instance: &ProbingInstance<T>, budget: &ProbingBudget) -> Result<GapReport<T>, ProbingError> {
    let adaptive = adaptive_opt(instance, budget)?.value;
    let (nonadaptive_set, nonadaptive) = nonadaptive_opt(instance, budget)?;
    let tol = T::of(1e-9);
    if adaptive < nonadaptive - tol * nonadaptive.max(T::one()) {
        return Err(ProbingError::Internal(format!("adaptive value {adaptive} below non-adaptive {nonadaptive}")));
    }
    let ratio = if nonadaptive > T::zero() {
        (adaptive / nonadaptive).max(T::one())
    } else if adaptive <= T::of(1e-12) {
        T::one()
    } else {
        return Err(ProbingError::Internal(format!("non-adaptive value is zero but adaptive is {adaptive}")));
    };
    Ok(GapReport {
        adaptive,
        nonadaptive,
        nonadaptive_set,
        ratio,
    })
}

/// Runs `policy` on one sample of `X` to pick `S`, then scores `S` on an independent sample.
pub fn sample_path_strategy<T: Scalar>(policy: &Policy<T>, instance: &ProbingInstance<T>, seed: u64) -> (Vec<usize>, T) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node = &policy.root;
    let mut set = Vec::new();
    while let PolicyNode::Probe { element, children } = node {
        set.push(*element);
        let k = instance.distributions()[*element].sample_index(&mut rng);
        node = &children[k];
    }
    set.sort_unstable();
    let mut x = vec![T::zero(); instance.n()];
    for &i in &set {
        let d = &instance.distributions()[i];
        x[i] = d.support()[d.sample_index(&mut rng)];
    }
    let value = instance.norm().value(&x);
    (set, value)
}
