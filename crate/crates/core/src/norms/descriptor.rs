//! JSON descriptors for norms, set functions and matroids.
//!
//! A descriptor is a plain serde value tagged by `"kind"`. Weights are
//! stored as `f64`, which serde_json prints in shortest round-trip form.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::norms::oracle::{Exponent, Norm, NormKind};
use crate::norms::setfn::{
    ConcaveCardinality, CoverageFunction, GraphicMatroid, Matroid, MatroidRankFunction,
    PartitionMatroid, SetFunction, TableSetFunction, UniformMatroid,
};
use crate::norms::NormError;
use crate::scalar::Scalar;

/// `ℓp` exponent: a number, or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PValue {
    Number(f64),
    Named(String),
}

impl PValue {
    fn to_f64(&self) -> Result<f64, NormError> {
        match self {
            PValue::Number(p) => Ok(*p),
            PValue::Named(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => {
                Ok(f64::INFINITY)
            }
            PValue::Named(s) => Err(NormError::InvalidParameter(format!("bad exponent {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormDescriptor {
    Lp { dim: usize, p: PValue },
    TopK { dim: usize, k: usize },
    Ordered { weights: Vec<f64> },
    SymmetricMax { weights: Vec<Vec<f64>> },
    MaxLinear { functionals: Vec<Vec<f64>> },
    Lovasz { set_function: SetFunctionDescriptor },
    MatroidRank { matroid: MatroidDescriptor },
    PartialSum { dim: usize, parts: Vec<PartDescriptor> },
    Conical { terms: Vec<TermDescriptor> },
    Rescaled { scale: Vec<f64>, norm: Box<NormDescriptor> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartDescriptor {
    pub indices: Vec<usize>,
    pub norm: NormDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDescriptor {
    pub coef: f64,
    pub norm: NormDescriptor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetFunctionDescriptor {
    Coverage { weights: Vec<f64>, covers: Vec<Vec<usize>> },
    ConcaveCardinality { values: Vec<f64> },
    Table { n: usize, values: Vec<f64> },
    MatroidRank { matroid: MatroidDescriptor },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MatroidDescriptor {
    Uniform { n: usize, k: usize },
    Partition { block_of: Vec<usize>, capacities: Vec<usize> },
    Graphic { vertices: usize, edges: Vec<(usize, usize)> },
}

fn conv<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::of(x)).collect()
}

fn back<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

impl MatroidDescriptor {
    pub fn build(&self) -> Result<Arc<dyn Matroid>, NormError> {
        Ok(match self {
            MatroidDescriptor::Uniform { n, k } => Arc::new(UniformMatroid::new(*n, *k)),
            MatroidDescriptor::Partition {
                block_of,
                capacities,
            } => Arc::new(PartitionMatroid::new(block_of.clone(), capacities.clone())?),
            MatroidDescriptor::Graphic { vertices, edges } => {
                Arc::new(GraphicMatroid::new(*vertices, edges.clone())?)
            }
        })
    }
}

impl SetFunctionDescriptor {
    pub fn build<T: Scalar>(&self) -> Result<Arc<dyn SetFunction<T>>, NormError> {
        Ok(match self {
            SetFunctionDescriptor::Coverage { weights, covers } => {
                Arc::new(CoverageFunction::new(conv(weights), covers.clone())?)
            }
            SetFunctionDescriptor::ConcaveCardinality { values } => {
                Arc::new(ConcaveCardinality::new(conv(values))?)
            }
            SetFunctionDescriptor::Table { n, values } => {
                Arc::new(TableSetFunction::new(*n, conv(values))?)
            }
            SetFunctionDescriptor::MatroidRank { matroid } => {
                Arc::new(MatroidRankFunction::new(matroid.build()?))
            }
        })
    }
}

impl NormDescriptor {
    pub fn build<T: Scalar>(&self) -> Result<Norm<T>, NormError> {
        match self {
            NormDescriptor::Lp { dim, p } => Norm::lp(*dim, T::of(p.to_f64()?)),
            NormDescriptor::TopK { dim, k } => Norm::top_k(*dim, *k),
            NormDescriptor::Ordered { weights } => Norm::ordered(conv(weights)),
            NormDescriptor::SymmetricMax { weights } => {
                Norm::symmetric_max(weights.iter().map(|a| conv(a)).collect())
            }
            NormDescriptor::MaxLinear { functionals } => {
                Norm::max_linear(functionals.iter().map(|a| conv(a)).collect())
            }
            NormDescriptor::Lovasz { set_function } => Norm::lovasz(set_function.build()?),
            NormDescriptor::MatroidRank { matroid } => Norm::matroid_rank(matroid.build()?),
            NormDescriptor::PartialSum { dim, parts } => Norm::partial_sum(
                *dim,
                parts
                    .iter()
                    .map(|p| p.norm.build().map(|n| (p.indices.clone(), n)))
                    .collect::<Result<_, _>>()?,
            ),
            NormDescriptor::Conical { terms } => Norm::conical(
                terms
                    .iter()
                    .map(|t| t.norm.build().map(|n| (T::of(t.coef), n)))
                    .collect::<Result<_, _>>()?,
            ),
            NormDescriptor::Rescaled { scale, norm } => Norm::rescaled(conv(scale), norm.build()?),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, NormError> {
        serde_json::from_str(s).map_err(|e| NormError::Json(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptor serializes")
    }
}

impl<T: Scalar> Norm<T> {
    /// Serializable descriptor. Fails for opaque value oracles.
    pub fn descriptor(&self) -> Result<NormDescriptor, NormError> {
        let not_ser = || NormError::NotSerializable(self.kind_name().to_string());
        Ok(match self.kind() {
            NormKind::Lp(Exponent::Infinity) => NormDescriptor::Lp {
                dim: self.dim(),
                p: PValue::Named("inf".into()),
            },
            NormKind::Lp(Exponent::Finite(p)) => NormDescriptor::Lp {
                dim: self.dim(),
                p: PValue::Number(p.to_f64_lossy()),
            },
            NormKind::TopK(k) => NormDescriptor::TopK {
                dim: self.dim(),
                k: *k,
            },
            NormKind::Ordered(a) => NormDescriptor::Ordered { weights: back(a) },
            NormKind::SymmetricMax(set) => NormDescriptor::SymmetricMax {
                weights: set.iter().map(|a| back(a)).collect(),
            },
            NormKind::MaxLinear(set) => NormDescriptor::MaxLinear {
                functionals: set.iter().map(|a| back(a)).collect(),
            },
            NormKind::Lovasz(f) => NormDescriptor::Lovasz {
                set_function: f.descriptor().ok_or_else(not_ser)?,
            },
            NormKind::MatroidRank(m) => NormDescriptor::MatroidRank {
                matroid: m.descriptor().ok_or_else(not_ser)?,
            },
            NormKind::PartialSum(parts) => NormDescriptor::PartialSum {
                dim: self.dim(),
                parts: parts
                    .iter()
                    .map(|(idx, n)| {
                        n.descriptor().map(|d| PartDescriptor {
                            indices: idx.clone(),
                            norm: d,
                        })
                    })
                    .collect::<Result<_, _>>()?,
            },
            NormKind::Conical(terms) => NormDescriptor::Conical {
                terms: terms
                    .iter()
                    .map(|(c, n)| {
                        n.descriptor().map(|d| TermDescriptor {
                            coef: c.to_f64_lossy(),
                            norm: d,
                        })
                    })
                    .collect::<Result<_, _>>()?,
            },
            NormKind::Rescaled(s, n) => NormDescriptor::Rescaled {
                scale: back(s),
                norm: Box::new(n.descriptor()?),
            },
            NormKind::ValueOracle { .. } => return Err(not_ser()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_forms() {
        let d = NormDescriptor::from_json(r#"{"kind":"lp","dim":4,"p":"inf"}"#).unwrap();
        let n: Norm<f64> = d.build().unwrap();
        assert_eq!(n.value(&[1.0, 3.0, 2.0, 0.0]), 3.0);

        let d = NormDescriptor::from_json(
            r#"{"kind":"partial_sum","dim":4,"parts":[
                {"indices":[0,1],"norm":{"kind":"lp","dim":2,"p":"inf"}},
                {"indices":[2,3],"norm":{"kind":"lp","dim":2,"p":1}}]}"#,
        )
        .unwrap();
        let n: Norm<f64> = d.build().unwrap();
        assert_eq!(n.value(&[1.0, 1.0, 1.0, 1.0]), 3.0);

        let d = NormDescriptor::from_json(
            r#"{"kind":"lovasz","set_function":{"kind":"matroid_rank","matroid":{"kind":"uniform","n":3,"k":2}}}"#,
        )
        .unwrap();
        assert_eq!(d.build::<f64>().unwrap().value(&[3.0, 1.0, 2.0]), 5.0);
    }

    #[test]
    fn rejects_unknown_kind_and_bad_exponent() {
        assert!(NormDescriptor::from_json(r#"{"kind":"banana"}"#).is_err());
        let d = NormDescriptor::from_json(r#"{"kind":"lp","dim":2,"p":"huge"}"#).unwrap();
        assert!(d.build::<f64>().is_err());
    }

    #[test]
    fn value_oracle_not_serializable() {
        let n = Norm::value_oracle(2, "sum", Arc::new(|x: &[f64]| x[0] + x[1]));
        assert!(matches!(n.descriptor(), Err(NormError::NotSerializable(_))));
    }
}
