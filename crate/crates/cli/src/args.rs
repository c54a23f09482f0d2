//! Argument parsing helpers.

use std::path::{Path, PathBuf};

use subnorm::harness::{CostSpec, Error};
use subnorm::norms::{Norm, NormDescriptor};

/// Norm given as a JSON descriptor (`{...}`), a descriptor file (`@path`),
/// or a shorthand (`l1`, `l2`, `linf`, `lp:P`, `topk:K`) whose dimension
/// comes from context.
#[derive(Debug, Clone)]
pub enum NormArg {
    Descriptor(NormDescriptor),
    Shorthand(String),
}

impl std::str::FromStr for NormArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.starts_with('{') {
            return NormDescriptor::from_json(s).map(NormArg::Descriptor).map_err(|e| e.to_string());
        }
        if let Some(path) = s.strip_prefix('@') {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            return NormDescriptor::from_json(&text).map(NormArg::Descriptor).map_err(|e| e.to_string());
        }
        let lower = s.to_ascii_lowercase();
        let known = matches!(lower.as_str(), "l1" | "l2" | "linf")
            || lower.strip_prefix("lp:").is_some_and(|p| p == "inf" || p.parse::<f64>().is_ok())
            || lower.strip_prefix("topk:").is_some_and(|k| k.parse::<usize>().is_ok());
        if known {
            Ok(NormArg::Shorthand(lower))
        } else {
            Err(format!("unknown norm {s:?}; use l1, l2, linf, lp:P, topk:K, a JSON descriptor or @file"))
        }
    }
}

impl NormArg {
    /// Builds the norm, checking or supplying the dimension.
    pub fn build(&self, dim: usize) -> Result<Norm<f64>, Error> {
        let norm = match self {
            NormArg::Descriptor(d) => d.build()?,
            NormArg::Shorthand(s) => match s.as_str() {
                "l1" => Norm::l1(dim),
                "l2" => Norm::l2(dim),
                "linf" => Norm::linf(dim),
                _ => {
                    if let Some(p) = s.strip_prefix("lp:") {
                        if p == "inf" {
                            Norm::linf(dim)
                        } else {
                            Norm::lp(dim, p.parse().expect("validated"))?
                        }
                    } else {
                        let k = s.strip_prefix("topk:").expect("validated").parse().expect("validated");
                        Norm::top_k(dim, k)?
                    }
                }
            },
        };
        if norm.dim() != dim {
            return Err(Error::Config(format!("norm has dimension {} but {dim} is needed", norm.dim())));
        }
        Ok(norm)
    }

    /// Builds the norm when the dimension is implied by the descriptor or given explicitly.
    pub fn build_free(&self, dim: Option<usize>) -> Result<Norm<f64>, Error> {
        match (self, dim) {
            (NormArg::Descriptor(d), None) => Ok(d.build()?),
            (_, Some(n)) => self.build(n),
            (NormArg::Shorthand(s), None) => Err(Error::Config(format!("norm {s:?} needs --dim"))),
        }
    }
}

/// `uniform:F` or `pow2:MIN:MAX`.
pub fn parse_costs(s: &str) -> Result<CostSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["uniform", f] => f.parse().map(CostSpec::Uniform).map_err(|e| format!("{f}: {e}")),
        ["pow2", a, b] => Ok(CostSpec::RandomPow2 {
            min_exp: a.parse().map_err(|e| format!("{a}: {e}"))?,
            max_exp: b.parse().map_err(|e| format!("{b}: {e}"))?,
        }),
        _ => Err(format!("bad costs {s:?}; use uniform:F or pow2:MIN:MAX")),
    }
}

/// Comma-separated list of integers.
#[derive(Debug, Clone)]
pub struct IndexList(pub Vec<usize>);

impl std::str::FromStr for IndexList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t}: {e}")))
            .collect::<Result<_, _>>()
            .map(IndexList)
    }
}

/// Writes to `out` atomically, or to stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => subnorm::harness::atomic_write(p, text.as_bytes()),
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(text.as_bytes()) {
                // a closed pipe (e.g. `| head`) is not an error
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Io {
                    path: "<stdout>".into(),
                    message: e.to_string(),
                }),
                _ => Ok(()),
            }
        }
    }
}

pub fn opt_path(p: &Option<PathBuf>) -> Option<&Path> {
    p.as_deref()
}
