use crate::probing::ProbingInstance;
use crate::scalar::{CompensatedSum, Scalar};

/// Node of an adaptive probing decision tree.
#[derive(Debug, Clone, PartialEq)]
pub enum PolicyNode {
    Stop,
    /// Probe `element`, then continue in `children[k]` when the `k`-th support value is observed.
    Probe { element: usize, children: Vec<PolicyNode> },
}

/// Deterministic adaptive policy with its expected objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy<T> {
    pub root: PolicyNode,
    pub value: T,
}

impl PolicyNode {
    pub fn node_count(&self) -> usize {
        match self {
            Self::Stop => 1,
            Self::Probe { children, .. } => 1 + children.iter().map(Self::node_count).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Stop => 0,
            Self::Probe { children, .. } => 1 + children.iter().map(Self::depth).max().unwrap_or(0),
        }
    }
}

impl<T: Scalar> Policy<T> {
    /// Checks that every root-to-leaf probe set is feasible and no element repeats.
    pub fn validate(&self, instance: &ProbingInstance<T>) -> Result<(), String> {
        fn walk<T: Scalar>(node: &PolicyNode, set: u64, inst: &ProbingInstance<T>) -> Result<(), String> {
            match node {
                PolicyNode::Stop => Ok(()),
                PolicyNode::Probe { element, children } => {
                    let e = *element;
                    if e >= inst.n() {
                        return Err(format!("element {e} out of range"));
                    }
                    if set >> e & 1 == 1 {
                        return Err(format!("element {e} probed twice on a path"));
                    }
                    let next = set | 1 << e;
                    if !inst.family().contains(next) {
                        return Err(format!("probe set {next:#b} is infeasible"));
                    }
                    if children.len() != inst.distributions()[e].len() {
                        return Err(format!("element {e} has {} children", children.len()));
                    }
                    children.iter().try_for_each(|c| walk(c, next, inst))
                }
            }
        }
        walk(&self.root, 0, instance)
    }

    /// Expected objective of the tree, recomputed from scratch.
    pub fn expected_value(&self, instance: &ProbingInstance<T>) -> T {
        fn walk<T: Scalar>(node: &PolicyNode, x: &mut Vec<T>, inst: &ProbingInstance<T>) -> T {
            match node {
                PolicyNode::Stop => inst.norm().value(x),
                PolicyNode::Probe { element, children } => {
                    let d = &inst.distributions()[*element];
                    let mut acc = CompensatedSum::new();
                    for (k, child) in children.iter().enumerate() {
                        x[*element] = d.support()[k];
                        acc.add(d.probs()[k] * walk(child, x, inst));
                    }
                    x[*element] = T::zero();
                    acc.value()
                }
            }
        }
        walk(&self.root, &mut vec![T::zero(); instance.n()], instance)
    }
}
