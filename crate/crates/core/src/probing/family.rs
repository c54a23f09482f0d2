use std::fmt;
use std::sync::Arc;

use crate::norms::setfn::mask_to_set;
use crate::norms::Matroid;
use crate::probing::ProbingError;

/// Largest ground set a feasible family may have.
pub const MAX_GROUND: usize = 24;

/// Downward-closed family of feasible probe sets over `[n]`, with sets as bitmasks.
#[derive(Clone)]
pub enum FeasibleFamily {
    /// Explicit member list, sorted, verified downward-closed.
    Explicit { n: usize, sets: Vec<u64> },
    /// All sets of size at most `k`.
    Cardinality { n: usize, k: usize },
    /// Independent sets of a matroid.
    Matroid(Arc<dyn Matroid>),
}

impl fmt::Debug for FeasibleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Explicit { n, sets } => f.debug_struct("Explicit").field("n", n).field("sets", sets).finish(),
            Self::Cardinality { n, k } => f.debug_struct("Cardinality").field("n", n).field("k", k).finish(),
            Self::Matroid(m) => f.debug_tuple("Matroid").field(m).finish(),
        }
    }
}

impl FeasibleFamily {
    /// Explicit family; every subset of every member must also be listed.
    pub fn explicit(n: usize, sets: impl IntoIterator<Item = u64>) -> Result<Self, ProbingError> {
        check_ground(n)?;
        let mut sets: Vec<u64> = sets.into_iter().collect();
        sets.sort_unstable();
        sets.dedup();
        if sets.is_empty() {
            return Err(ProbingError::InvalidFamily("family has no members".into()));
        }
        if let Some(&s) = sets.iter().find(|&&s| s >> n != 0) {
            return Err(ProbingError::InvalidFamily(format!("set {s:#b} exceeds the ground set of size {n}")));
        }
        for &s in &sets {
            for i in 0..n {
                if s >> i & 1 == 1 && sets.binary_search(&(s & !(1 << i))).is_err() {
                    return Err(ProbingError::NotDownwardClosed {
                        set: set_string(s, n),
                        missing: set_string(s & !(1 << i), n),
                    });
                }
            }
        }
        Ok(Self::Explicit { n, sets })
    }

    /// Downward closure of the given sets.
    pub fn closure(n: usize, generators: impl IntoIterator<Item = u64>) -> Result<Self, ProbingError> {
        check_ground(n)?;
        let mut all = vec![0u64];
        for g in generators {
            let mut sub = g;
            loop {
                all.push(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & g;
            }
        }
        Self::explicit(n, all)
    }

    pub fn cardinality(n: usize, k: usize) -> Result<Self, ProbingError> {
        check_ground(n)?;
        Ok(Self::Cardinality { n, k: k.min(n) })
    }

    pub fn matroid(m: Arc<dyn Matroid>) -> Result<Self, ProbingError> {
        check_ground(m.ground_size())?;
        Ok(Self::Matroid(m))
    }

    pub fn ground_size(&self) -> usize {
        match self {
            Self::Explicit { n, .. } | Self::Cardinality { n, .. } => *n,
            Self::Matroid(m) => m.ground_size(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Explicit { .. } => "explicit",
            Self::Cardinality { .. } => "cardinality",
            Self::Matroid(_) => "matroid",
        }
    }

    pub fn contains(&self, set: u64) -> bool {
        match self {
            Self::Explicit { sets, .. } => sets.binary_search(&set).is_ok(),
            Self::Cardinality { n, k } => set >> n == 0 && set.count_ones() as usize <= *k,
            Self::Matroid(m) => {
                let n = m.ground_size();
                set >> n == 0 && m.is_independent(&mask_to_set(set, n))
            }
        }
    }

    /// All members in increasing mask order.
    pub fn members(&self) -> Vec<u64> {
        match self {
            Self::Explicit { sets, .. } => sets.clone(),
            _ => (0..1u64 << self.ground_size()).filter(|&s| self.contains(s)).collect(),
        }
    }

    /// Inclusion-maximal members.
    pub fn maximal_members(&self) -> Vec<u64> {
        let n = self.ground_size();
        self.members()
            .into_iter()
            .filter(|&s| (0..n).all(|i| s >> i & 1 == 1 || !self.contains(s | 1 << i)))
            .collect()
    }

    /// Exhaustive downward-closedness check (by construction for the structural kinds).
    pub fn verify_downward_closed(&self) -> Result<(), ProbingError> {
        match self {
            Self::Explicit { n, sets } => Self::explicit(*n, sets.iter().copied()).map(|_| ()),
            _ => {
                let n = self.ground_size();
                for s in self.members() {
                    for i in 0..n {
                        if s >> i & 1 == 1 && !self.contains(s & !(1 << i)) {
                            return Err(ProbingError::NotDownwardClosed {
                                set: set_string(s, n),
                                missing: set_string(s & !(1 << i), n),
                            });
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Compact label listing the maximal members, e.g. `{0,1}|{2}`.
    pub fn label(&self) -> String {
        match self {
            Self::Cardinality { n, k } => format!("card(n={n},k={k})"),
            _ => {
                let n = self.ground_size();
                let max: Vec<String> = self.maximal_members().into_iter().map(|s| set_string(s, n)).collect();
                max.join("|")
            }
        }
    }
}

fn check_ground(n: usize) -> Result<(), ProbingError> {
    if n > MAX_GROUND {
        return Err(ProbingError::InvalidFamily(format!("ground set of size {n} exceeds {MAX_GROUND}")));
    }
    Ok(())
}

pub fn set_string(s: u64, n: usize) -> String {
    let items: Vec<String> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(","))
}

/// Every non-empty downward-closed family on `n <= 4` elements.
pub fn downward_closed_families(n: usize) -> Result<Vec<FeasibleFamily>, ProbingError> {
    if n > 4 {
        return Err(ProbingError::InvalidFamily(format!("enumerating families on {n} > 4 elements")));
    }
    let subsets = 1usize << n;
    let mut out = Vec::new();
    // a family is a bitmask over the 2^n subsets; non-empty downward-closed families contain ∅
    for fam in (1u64..1u64 << subsets).filter(|f| f & 1 == 1) {
        let closed = (0..subsets).filter(|s| fam >> s & 1 == 1).all(|s| {
            (0..n).all(|i| s >> i & 1 == 0 || fam >> (s & !(1 << i)) & 1 == 1)
        });
        if closed {
            let sets = (0..subsets as u64).filter(|&s| fam >> s & 1 == 1);
            out.push(FeasibleFamily::explicit(n, sets)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::UniformMatroid;

    #[test]
    fn explicit_requires_closure() {
        assert!(FeasibleFamily::explicit(2, [0, 1, 2, 3]).is_ok());
        let err = FeasibleFamily::explicit(2, [0, 3]).unwrap_err();
        assert!(matches!(err, ProbingError::NotDownwardClosed { .. }));
        assert!(FeasibleFamily::explicit(2, Vec::<u64>::new()).is_err());
        let c = FeasibleFamily::closure(3, [0b011, 0b100]).unwrap();
        assert_eq!(c.members(), vec![0, 1, 2, 3, 4]);
        assert_eq!(c.label(), "{0,1}|{2}");
    }

    #[test]
    fn family_counts() {
        // Dedekind numbers minus the empty family
        assert_eq!(downward_closed_families(1).unwrap().len(), 2);
        assert_eq!(downward_closed_families(2).unwrap().len(), 5);
        assert_eq!(downward_closed_families(3).unwrap().len(), 19);
    }

    #[test]
    fn structural_families() {
        let card = FeasibleFamily::cardinality(3, 2).unwrap();
        assert!(card.contains(0b011) && !card.contains(0b111));
        card.verify_downward_closed().unwrap();
        let mat = FeasibleFamily::matroid(Arc::new(UniformMatroid::new(3, 2))).unwrap();
        assert_eq!(mat.members(), card.members());
        mat.verify_downward_closed().unwrap();
        assert_eq!(card.maximal_members(), vec![3, 5, 6]);
    }
}
