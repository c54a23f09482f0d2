mod args;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use args::{emit, opt_path, parse_costs, IndexList, NormArg};
use subnorm::harness::csv::{ensemble_csv, loadbal_csv, lower_bound_csv, sweep_csv, trace_csv};
use subnorm::harness::{
    default_candidates, gen_lower_bound_tree, gen_random_euclidean, gen_random_probing, gen_star, lower_bound_experiment,
    ofl_bound_report, read_loadbal_instance, read_ofl_instance, read_probing_instance, to_json, CostSpec, Error,
    ExperimentConfig, OflInstanceFile, ProbingInstanceFile,
};
use subnorm::loadbal::{brute_force_assign, greedy_assign, symmetric_reduction};
use subnorm::norms::{check_dr_submodular, check_submodular, ordered_approx, Characterization, MixedSampler, Norm};
use subnorm::ofl::{offline_opt, FacilityCosts, Runner, MAX_CANDIDATES};
use subnorm::probing::{
    adaptive_opt, adaptivity_gap, default_objectives, nonadaptive_opt, run_sweep, two_point_grid, PolicyNode,
    SweepConfig,
};
use subnorm::scalar::Tolerance;

#[derive(Parser)]
#[command(name = "subnorm", version, about = "Submodular-norm toolkit: norm checks, online facility location, stochastic probing, load balancing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm oracles: submodularity checks, ordered approximation, rho.
    #[command(subcommand)]
    Norms(NormsCmd),
    /// Online facility location.
    #[command(subcommand)]
    Ofl(OflCmd),
    /// Stochastic probing.
    #[command(subcommand)]
    Probe(ProbeCmd),
    /// Load balancing.
    #[command(subcommand)]
    Loadbal(LoadbalCmd),
    /// Instance generators.
    #[command(subcommand)]
    Gen(GenCmd),
}

#[derive(Args)]
struct NormSpec {
    /// l1, l2, linf, lp:P, topk:K, inline JSON descriptor, or @file.
    #[arg(long)]
    norm: NormArg,
    /// Dimension for shorthand norms.
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Args)]
struct Output {
    /// Output file (written atomically); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum NormsCmd {
    /// Randomized submodularity check of all characterizations plus DR.
    Check {
        #[command(flatten)]
        norm: NormSpec,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Ordered-norm approximation of a symmetric norm.
    Approx {
        #[command(flatten)]
        norm: NormSpec,
        #[command(flatten)]
        out: Output,
    },
    /// rho = ‖1‖ / min_i ‖e_i‖.
    Rho {
        #[command(flatten)]
        norm: NormSpec,
    },
}

#[derive(Args)]
struct Ensemble {
    #[arg(long)]
    instance: PathBuf,
    /// Ensemble size.
    #[arg(long, default_value_t = 1)]
    seeds: usize,
    /// First seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the trace of the first run as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Split the cost into short- and long-distance stages.
    #[arg(long)]
    stages: bool,
    #[command(flatten)]
    candidates: Candidates,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Candidates {
    /// Candidate sites for the offline optimum (comma-separated); default: all
    /// openable points, or the non-request sites when those exceed the limit.
    #[arg(long)]
    candidates: Option<IndexList>,
}

impl Candidates {
    fn resolve(&self, instance: &subnorm::ofl::OflInstance<f64>) -> Result<Vec<usize>, Error> {
        if let Some(c) = &self.candidates {
            return Ok(c.0.clone());
        }
        let (c, exact) = default_candidates(instance, MAX_CANDIDATES)?;
        if !exact {
            eprintln!(
                "warning: {} openable points exceed the limit of {MAX_CANDIDATES}; the optimum is taken over the {} non-request sites",
                instance.openable().len(),
                c.len()
            );
        }
        Ok(c)
    }
}

#[derive(Subcommand)]
enum OflCmd {
    /// Randomized algorithm (uniform or non-uniform, chosen by the costs); ensemble CSV.
    Run(Ensemble),
    /// Deterministic rule using true distances; ensemble CSV.
    Naive(Ensemble),
    /// Exact offline optimum over the openable points; JSON.
    Opt {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        candidates: Candidates,
        #[command(flatten)]
        out: Output,
    },
    /// Ensemble CSV with stage breakdown for a chosen runner.
    Bounds {
        #[command(flatten)]
        ensemble: Ensemble,
        /// uniform, naive or nonuniform; chosen by the costs if absent.
        #[arg(long)]
        runner: Option<String>,
    },
    /// Lower-bound tree experiment; CSV with one row per height.
    Lowerbound {
        /// Tree heights; the norm dimension is k^k.
        #[arg(long, default_value = "2,3,4")]
        k: IndexList,
        /// Shorthand norm applied at each dimension.
        #[arg(long, default_value = "l1")]
        norm: NormArg,
        #[arg(long, default_value_t = 8)]
        arity: usize,
        #[arg(long, default_value_t = 500)]
        seeds: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum ProbeCmd {
    /// Optimal adaptive policy; JSON.
    Adap {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Optimal non-adaptive set; JSON.
    Na {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Adaptive and non-adaptive optima and their ratio; JSON.
    Gap {
        #[arg(long)]
        instance: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Exhaustive gap table over all downward-closed families on n elements; CSV.
    Sweep {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct LoadbalArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Process jobs in a random order drawn from this seed.
    #[arg(long)]
    shuffle: Option<u64>,
    /// Replace each inner norm by its ordered approximation first.
    #[arg(long)]
    reduce: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Subcommand)]
enum LoadbalCmd {
    /// Greedy min-marginal assignment; CSV.
    Greedy(LoadbalArgs),
    /// Greedy and exhaustive optimum; CSV.
    Opt(LoadbalArgs),
}

#[derive(Subcommand)]
enum GenCmd {
    /// Star K_{1,n} with uniform cost f.
    Star {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        f: f64,
        #[arg(long, default_value = "linf")]
        norm: NormArg,
        #[command(flatten)]
        out: Output,
    },
    /// Lower-bound tree with a random demand path.
    Tree {
        #[command(flatten)]
        norm: NormSpec,
        #[arg(long, default_value_t = 8)]
        arity: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Random points in the unit cube.
    Euclid {
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        requests: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// uniform:F or pow2:MIN:MAX.
        #[arg(long, value_parser = parse_costs, default_value = "uniform:1")]
        costs: CostSpec,
        #[arg(long, default_value = "l1")]
        norm: NormArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Random probing instance with two- or three-point distributions.
    Probing {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        support: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Norms(c) => norms(c),
        Command::Ofl(c) => ofl(c),
        Command::Probe(c) => probe(c),
        Command::Loadbal(c) => loadbal(c),
        Command::Gen(c) => generate(c),
    }
}

fn json_out(out: &Output, v: &Value) -> Result<(), Error> {
    emit(opt_path(&out.out), &to_json(v)?)
}

fn norms(cmd: NormsCmd) -> Result<(), Error> {
    match cmd {
        NormsCmd::Check { norm, trials, seed, tol, out } => {
            let norm = norm.norm.build_free(norm.dim)?;
            let mut results = Vec::new();
            for (k, c) in Characterization::ALL.iter().enumerate() {
                let mut sampler = MixedSampler::new(seed.wrapping_add(k as u64));
                results.push(serde_json::to_value(check_submodular(&norm, &mut sampler, trials, tol, *c))?);
            }
            let mut sampler = MixedSampler::new(seed.wrapping_add(4));
            let dr = check_dr_submodular(&norm, &mut sampler, trials, tol);
            let submodular = results.iter().all(|r| r["violations"].as_array().is_some_and(|v| v.is_empty()));
            json_out(
                &out,
                &json!({
                    "kind": norm.kind_name(),
                    "dim": norm.dim(),
                    "submodular": submodular,
                    "dr_submodular": dr.passed(),
                    "checks": results,
                    "dr": dr,
                }),
            )
        }
        NormsCmd::Approx { norm, out } => {
            let norm = norm.norm.build_free(norm.dim)?;
            let a = ordered_approx(&norm, &Tolerance::default())?;
            json_out(
                &out,
                &json!({
                    "dim": norm.dim(),
                    "rho": a.rho,
                    "factor": a.factor,
                    "levels": a.levels,
                    "level_values": a.level_values,
                    "weights": a.weight_vectors,
                }),
            )
        }
        NormsCmd::Rho { norm } => {
            let norm = norm.norm.build_free(norm.dim)?;
            emit(None, &format!("{}\n", subnorm::harness::csv::fmt_num(norm.rho()?)))
        }
    }
}

fn auto_runner(costs: &FacilityCosts<f64>) -> Runner {
    match costs {
        FacilityCosts::Uniform(_) => Runner::Uniform,
        FacilityCosts::PerPoint(_) => Runner::NonUniform,
    }
}

fn ensemble(e: &Ensemble, runner: Option<Runner>, stages: bool) -> Result<(), Error> {
    let instance = read_ofl_instance::<f64>(&e.instance)?;
    let runner = runner.unwrap_or_else(|| auto_runner(instance.costs()));
    let config = ExperimentConfig::new(e.seed).with_runs(e.seeds.max(1));
    let candidates = e.candidates.resolve(&instance)?;
    let (report, _, traces) = ofl_bound_report(&instance, runner, &candidates, &config, stages)?;
    if let Some(path) = &e.trace {
        subnorm::harness::atomic_write(path, trace_csv(&traces[0]).as_bytes())?;
    }
    let label = e.instance.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    emit(opt_path(&e.out.out), &ensemble_csv(&[(label, runner, report)]))
}

fn ofl(cmd: OflCmd) -> Result<(), Error> {
    match cmd {
        OflCmd::Run(e) => {
            let stages = e.stages;
            ensemble(&e, None, stages)
        }
        OflCmd::Naive(e) => {
            let stages = e.stages;
            ensemble(&e, Some(Runner::NaiveUniform), stages)
        }
        OflCmd::Bounds { ensemble: e, runner } => {
            let runner = match runner.as_deref() {
                None => None,
                Some("uniform") => Some(Runner::Uniform),
                Some("naive") => Some(Runner::NaiveUniform),
                Some("nonuniform") => Some(Runner::NonUniform),
                Some(other) => return Err(Error::Config(format!("unknown runner {other:?}"))),
            };
            ensemble(&e, runner, true)
        }
        OflCmd::Opt { instance, candidates, out } => {
            let instance = read_ofl_instance::<f64>(&instance)?;
            let opt = offline_opt(&instance, &candidates.resolve(&instance)?)?;
            json_out(
                &out,
                &json!({
                    "facilities": opt.facilities,
                    "clusters": opt.clusters,
                    "distances": opt.distances,
                    "opening_cost": opt.opening_cost,
                    "connection_cost": opt.connection_cost,
                    "cost": opt.cost,
                }),
            )
        }
        OflCmd::Lowerbound { k, norm, arity, seeds, seed, out } => {
            let norms = k
                .0
                .iter()
                .map(|&k| {
                    let n = k.checked_pow(k as u32).ok_or_else(|| Error::Config(format!("k = {k} too large")))?;
                    norm.build(n)
                })
                .collect::<Result<Vec<Norm<f64>>, Error>>()?;
            let config = ExperimentConfig::new(seed).with_runs(seeds);
            let rows = lower_bound_experiment(&norms, arity, &config)?;
            emit(opt_path(&out.out), &lower_bound_csv(&rows))
        }
    }
}

fn policy_json(node: &PolicyNode) -> Value {
    match node {
        PolicyNode::Stop => Value::String("stop".into()),
        PolicyNode::Probe { element, children } => json!({
            "probe": element,
            "children": children.iter().map(policy_json).collect::<Vec<_>>(),
        }),
    }
}

fn probe(cmd: ProbeCmd) -> Result<(), Error> {
    let budget = Default::default();
    match cmd {
        ProbeCmd::Adap { instance, out } => {
            let inst = read_probing_instance::<f64>(&instance)?;
            let p = adaptive_opt(&inst, &budget)?;
            json_out(&out, &json!({ "value": p.value, "policy": policy_json(&p.root) }))
        }
        ProbeCmd::Na { instance, out } => {
            let inst = read_probing_instance::<f64>(&instance)?;
            let (set, value) = nonadaptive_opt(&inst, &budget)?;
            json_out(&out, &json!({ "set": set, "value": value }))
        }
        ProbeCmd::Gap { instance, out } => {
            let inst = read_probing_instance::<f64>(&instance)?;
            let g = adaptivity_gap(&inst, &budget)?;
            json_out(
                &out,
                &json!({
                    "adaptive": g.adaptive,
                    "nonadaptive": g.nonadaptive,
                    "nonadaptive_set": g.nonadaptive_set,
                    "ratio": g.ratio,
                }),
            )
        }
        ProbeCmd::Sweep { n, out } => {
            let config = SweepConfig {
                n,
                distributions: two_point_grid(&[0.0, 0.5, 1.0], &[0.25, 0.5, 0.75])?,
                objectives: default_objectives(n)?,
            };
            let rows = run_sweep(&config, &budget)?;
            emit(opt_path(&out.out), &sweep_csv(&rows))
        }
    }
}

fn loadbal(cmd: LoadbalCmd) -> Result<(), Error> {
    let (a, with_opt) = match cmd {
        LoadbalCmd::Greedy(a) => (a, false),
        LoadbalCmd::Opt(a) => (a, true),
    };
    let mut instance = read_loadbal_instance::<f64>(&a.instance)?;
    let mut factors = None;
    if a.reduce {
        let (reduced, f) = symmetric_reduction(&instance, a.shuffle.unwrap_or(0))?;
        instance = reduced;
        factors = Some(f);
    }
    let order = a.shuffle.map(|s| {
        let mut order: Vec<usize> = (0..instance.jobs()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
        order
    });
    let greedy = greedy_assign(&instance, order.as_deref())?;
    let opt = if with_opt { Some(brute_force_assign(&instance)?) } else { None };
    emit(opt_path(&a.out.out), &loadbal_csv(&greedy, opt.as_ref(), factors.as_deref()))
}

fn generate(cmd: GenCmd) -> Result<(), Error> {
    match cmd {
        GenCmd::Star { n, f, norm, out } => {
            let inst = gen_star(n, f, norm.build(n)?)?;
            emit(opt_path(&out.out), &to_json(&OflInstanceFile::from_instance(&inst)?)?)
        }
        GenCmd::Tree { norm, arity, seed, out } => {
            let norm = norm.norm.build_free(norm.dim)?;
            let tree = gen_lower_bound_tree(&norm, arity, seed)?;
            emit(opt_path(&out.out), &to_json(&OflInstanceFile::from_instance(&tree.instance)?)?)
        }
        GenCmd::Euclid {
            points,
            requests,
            dim,
            costs,
            norm,
            seed,
            out,
        } => {
            let inst = gen_random_euclidean(points, requests, dim, costs, norm.build(requests)?, seed)?;
            emit(opt_path(&out.out), &to_json(&OflInstanceFile::from_instance(&inst)?)?)
        }
        GenCmd::Probing { n, support, seed, out } => {
            let inst = gen_random_probing::<f64>(n, support, seed)?;
            emit(opt_path(&out.out), &to_json(&ProbingInstanceFile::from_instance(&inst)?)?)
        }
    }
}
