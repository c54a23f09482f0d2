//! Experiment drivers shared by the CLI and the acceptance tests.

use rayon::prelude::*;

use crate::harness::{gen_lower_bound_tree, Error, ExperimentConfig};
use crate::norms::Norm;
use crate::ofl::{
    mean_stderr, offline_opt, run_ensemble, verify_bounds, BoundReport, OflError, OflInstance, OflTrace, OfflineOpt, Runner,
    Variant,
};
use crate::scalar::Scalar;

/// Candidate sites for the offline optimum: every openable point when they
/// fit the limit, otherwise only the declared sites that are not request
/// locations. The flag is false in the second case, where the optimum is
/// taken over a restricted set and is an upper bound on the true one.
pub fn default_candidates<T: Scalar>(instance: &OflInstance<T>, limit: usize) -> Result<(Vec<usize>, bool), Error> {
    let all = instance.openable();
    if all.len() <= limit {
        return Ok((all, true));
    }
    let extra = instance.extra_sites();
    if extra.is_empty() || extra.len() > limit {
        return Err(OflError::Budget {
            candidates: all.len(),
            limit,
        }
        .into());
    }
    Ok((extra, false))
}

/// Bound report, offline optimum and traces of one ensemble.
pub type EnsembleOutcome<T> = (BoundReport<T>, OfflineOpt<T>, Vec<OflTrace<T>>);

/// Ensemble of `config.runs` traces, the exact offline optimum over
/// `candidates`, and the bound report for the matching variant.
pub fn ofl_bound_report<T: Scalar>(
    instance: &OflInstance<T>,
    runner: Runner,
    candidates: &[usize],
    config: &ExperimentConfig,
    with_stages: bool,
) -> Result<EnsembleOutcome<T>, Error> {
    if candidates.len() > config.candidate_limit {
        return Err(OflError::Budget {
            candidates: candidates.len(),
            limit: config.candidate_limit,
        }
        .into());
    }
    let opt = offline_opt(instance, candidates)?;
    let traces = run_ensemble(instance, runner, &config.seeds())?;
    let variant = match runner {
        Runner::NonUniform => Variant::NonUniform,
        Runner::Uniform | Runner::NaiveUniform => Variant::Uniform,
    };
    let report = verify_bounds(&traces, &opt, instance, variant, with_stages)?;
    Ok((report, opt, traces))
}

/// One tree height of the lower-bound experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundRow {
    pub k: usize,
    pub n: usize,
    pub arity: usize,
    pub runs: usize,
    /// Offline optimum (identical for every sampled path).
    pub opt: f64,
    pub mean_alg: f64,
    pub mean_ratio: f64,
    pub stderr: f64,
}

const ALG_SEED_MIX: u64 = 0x9E37_79B9_7F4A_7C15;

/// For each norm, builds the tree instance per seed (fresh random path),
/// runs the uniform rule on it and averages the ratio to the offline optimum.
/// The optimum is computed over the path nodes.
pub fn lower_bound_experiment(norms: &[Norm<f64>], arity: usize, config: &ExperimentConfig) -> Result<Vec<LowerBoundRow>, Error> {
    norms
        .iter()
        .map(|norm| {
            let per_seed: Vec<(f64, f64)> = config
                .seeds()
                .par_iter()
                .map(|&s| {
                    let tree = gen_lower_bound_tree(norm, arity, s)?;
                    let opt = offline_opt(&tree.instance, &tree.path)?;
                    let trace = crate::ofl::run_uniform(&tree.instance, s ^ ALG_SEED_MIX)?;
                    Ok((trace.total_cost(), opt.cost))
                })
                .collect::<Result<_, Error>>()?;
            let tree = gen_lower_bound_tree(norm, arity, config.seed)?;
            let ratios: Vec<f64> = per_seed.iter().map(|(a, o)| a / o).collect();
            let algs: Vec<f64> = per_seed.iter().map(|(a, _)| *a).collect();
            let (mean_ratio, stderr) = mean_stderr(&ratios);
            Ok(LowerBoundRow {
                k: tree.k,
                n: norm.dim(),
                arity,
                runs: per_seed.len(),
                opt: per_seed.first().map_or(0.0, |p| p.1),
                mean_alg: mean_stderr(&algs).0,
                mean_ratio,
                stderr,
            })
        })
        .collect()
}
