//! Versioned JSON instance files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::harness::Error;
use crate::loadbal::LoadBalInstance;
use crate::norms::{MatroidDescriptor, NormDescriptor};
use crate::ofl::{FacilityCosts, MetricSpace, OflInstance};
use crate::probing::{DiscreteDistribution, FeasibleFamily, ProbingInstance};
use crate::scalar::Scalar;

pub const SCHEMA_VERSION: u64 = 1;

fn check_schema(schema: u64) -> Result<(), Error> {
    if schema == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Schema(schema))
    }
}

fn default_schema() -> u64 {
    SCHEMA_VERSION
}

fn to_f64s<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn from_f64s<T: Scalar>(v: &[f64]) -> Vec<T> {
    v.iter().map(|&x| T::of(x)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MetricFile {
    Matrix { dist: Vec<Vec<f64>> },
    Euclidean { points: Vec<Vec<f64>> },
    /// `parent[v]` is `null` for the root; `length[v]` is the edge to the parent.
    Tree { parent: Vec<Option<usize>>, length: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OflCostsFile {
    Uniform(f64),
    PerPoint(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OflInstanceFile {
    #[serde(default = "default_schema")]
    pub schema: u64,
    pub metric: MetricFile,
    pub requests: Vec<usize>,
    pub costs: OflCostsFile,
    /// Openable points; request locations are openable whether listed or not.
    #[serde(default)]
    pub openable: Vec<usize>,
    pub norm: NormDescriptor,
}

impl OflInstanceFile {
    pub fn from_instance<T: Scalar>(inst: &OflInstance<T>) -> Result<Self, Error> {
        let m = inst.metric();
        let metric = if let Some(d) = m.as_matrix() {
            MetricFile::Matrix {
                dist: d.iter().map(|r| to_f64s(r)).collect(),
            }
        } else if let Some(p) = m.as_points() {
            MetricFile::Euclidean {
                points: p.iter().map(|r| to_f64s(r)).collect(),
            }
        } else {
            let (parent, length) = m.as_tree().expect("three metric representations");
            MetricFile::Tree {
                parent: parent.to_vec(),
                length: to_f64s(length),
            }
        };
        let costs = match inst.costs() {
            FacilityCosts::Uniform(f) => OflCostsFile::Uniform(f.to_f64_lossy()),
            FacilityCosts::PerPoint(c) => OflCostsFile::PerPoint(to_f64s(c)),
        };
        Ok(Self {
            schema: SCHEMA_VERSION,
            metric,
            requests: inst.requests().to_vec(),
            costs,
            openable: inst.openable(),
            norm: inst.norm().descriptor()?,
        })
    }

    pub fn build<T: Scalar>(&self) -> Result<OflInstance<T>, Error> {
        check_schema(self.schema)?;
        let metric = match &self.metric {
            MetricFile::Matrix { dist } => MetricSpace::from_matrix(dist.iter().map(|r| from_f64s(r)).collect())?,
            MetricFile::Euclidean { points } => MetricSpace::euclidean(points.iter().map(|r| from_f64s(r)).collect())?,
            MetricFile::Tree { parent, length } => MetricSpace::tree(parent.clone(), from_f64s(length))?,
        };
        let costs = match &self.costs {
            OflCostsFile::Uniform(f) => FacilityCosts::Uniform(T::of(*f)),
            OflCostsFile::PerPoint(c) => FacilityCosts::PerPoint(from_f64s(c)),
        };
        Ok(OflInstance::new(metric, self.requests.clone(), costs, &self.openable, self.norm.build()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionFile {
    pub support: Vec<f64>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyFile {
    /// Every member listed; the list must be downward closed.
    Explicit { n: usize, sets: Vec<Vec<usize>> },
    Cardinality { n: usize, k: usize },
    Matroid { matroid: MatroidDescriptor },
}

impl FamilyFile {
    pub fn from_family(f: &FeasibleFamily) -> Result<Self, Error> {
        Ok(match f {
            FeasibleFamily::Explicit { n, sets } => FamilyFile::Explicit {
                n: *n,
                sets: sets.iter().map(|&s| (0..*n).filter(|i| s >> i & 1 == 1).collect()).collect(),
            },
            FeasibleFamily::Cardinality { n, k } => FamilyFile::Cardinality { n: *n, k: *k },
            FeasibleFamily::Matroid(m) => FamilyFile::Matroid {
                matroid: m
                    .descriptor()
                    .ok_or_else(|| Error::Config("matroid family has no descriptor".into()))?,
            },
        })
    }

    pub fn build(&self) -> Result<FeasibleFamily, Error> {
        Ok(match self {
            FamilyFile::Explicit { n, sets } => {
                let mut masks = Vec::with_capacity(sets.len());
                for s in sets {
                    let mut mask = 0u64;
                    for &i in s {
                        if i >= *n {
                            return Err(Error::Config(format!("family member mentions element {i} >= n = {n}")));
                        }
                        mask |= 1 << i;
                    }
                    masks.push(mask);
                }
                FeasibleFamily::explicit(*n, masks)?
            }
            FamilyFile::Cardinality { n, k } => FeasibleFamily::cardinality(*n, *k)?,
            FamilyFile::Matroid { matroid } => FeasibleFamily::matroid(matroid.build()?)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbingInstanceFile {
    #[serde(default = "default_schema")]
    pub schema: u64,
    pub distributions: Vec<DistributionFile>,
    pub family: FamilyFile,
    pub norm: NormDescriptor,
}

impl ProbingInstanceFile {
    pub fn from_instance<T: Scalar>(inst: &ProbingInstance<T>) -> Result<Self, Error> {
        Ok(Self {
            schema: SCHEMA_VERSION,
            distributions: inst
                .distributions()
                .iter()
                .map(|d| DistributionFile {
                    support: to_f64s(d.support()),
                    probs: to_f64s(d.probs()),
                })
                .collect(),
            family: FamilyFile::from_family(inst.family())?,
            norm: inst.norm().descriptor()?,
        })
    }

    pub fn build<T: Scalar>(&self) -> Result<ProbingInstance<T>, Error> {
        check_schema(self.schema)?;
        let dists = self
            .distributions
            .iter()
            .map(|d| DiscreteDistribution::new(from_f64s(&d.support), from_f64s(&d.probs)))
            .collect::<Result<_, _>>()?;
        Ok(ProbingInstance::new(dists, self.family.build()?, self.norm.build()?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoadBalFile {
    #[serde(default = "default_schema")]
    pub schema: u64,
    pub p: Vec<Vec<f64>>,
    pub inner_norms: Vec<NormDescriptor>,
}

impl LoadBalFile {
    pub fn from_instance<T: Scalar>(inst: &LoadBalInstance<T>) -> Result<Self, Error> {
        Ok(Self {
            schema: SCHEMA_VERSION,
            p: inst.times().iter().map(|r| to_f64s(r)).collect(),
            inner_norms: inst.inner_norms().iter().map(|n| n.descriptor()).collect::<Result<_, _>>()?,
        })
    }

    pub fn build<T: Scalar>(&self) -> Result<LoadBalInstance<T>, Error> {
        check_schema(self.schema)?;
        let norms = self.inner_norms.iter().map(|d| d.build()).collect::<Result<_, _>>()?;
        Ok(LoadBalInstance::new(self.p.iter().map(|r| from_f64s(r)).collect(), norms)?)
    }
}

fn read_to_string(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_ofl_instance<T: Scalar>(path: &Path) -> Result<OflInstance<T>, Error> {
    serde_json::from_str::<OflInstanceFile>(&read_to_string(path)?)?.build()
}

pub fn read_probing_instance<T: Scalar>(path: &Path) -> Result<ProbingInstance<T>, Error> {
    serde_json::from_str::<ProbingInstanceFile>(&read_to_string(path)?)?.build()
}

pub fn read_loadbal_instance<T: Scalar>(path: &Path) -> Result<LoadBalInstance<T>, Error> {
    serde_json::from_str::<LoadBalFile>(&read_to_string(path)?)?.build()
}

/// Writes `contents` to a temporary sibling and renames it over `path`.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<(), Error> {
    let io = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("{} is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents).map_err(io)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        io(e)
    })
}

/// Pretty JSON with a trailing newline.
pub fn to_json<S: Serialize>(value: &S) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), Error> {
    atomic_write(path, to_json(value)?.as_bytes())
}
