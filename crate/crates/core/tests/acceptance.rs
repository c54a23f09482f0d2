//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use subnorm::harness::{gen_random_euclidean, gen_star, lower_bound_experiment, CostSpec, ExperimentConfig};
use subnorm::loadbal::{brute_force_assign, greedy_assign, LoadBalInstance};
use subnorm::norms::{
    check_dr_submodular, check_submodular, exhaustive_grid_check, block_max_fixture, ordered_approx,
    Characterization, ConcaveCardinality, CoverageFunction, GraphicMatroid, MixedSampler, Norm, PartitionMatroid,
    UniformMatroid, VectorSampler, Witness,
};
use subnorm::ofl::{
    offline_opt, run_ensemble, run_naive_uniform, verify_bounds, OflInstance, Runner, Variant,
};
use subnorm::probing::{
    adaptive_opt, default_objectives, run_sweep, two_point_grid, ProbingBudget, SweepConfig,
};
use subnorm::scalar::Tolerance;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    check(t < limit, format!("runtime {t:.1?} exceeds {limit:?}"))
}

// 1. Star separation on K_{1,100}, f = 1, linf.
const STAR_LEAVES: usize = 100;
const STAR_RUNS: u64 = 1000;
const STAR_EXPECTED_MEAN: f64 = 8.0;

/// Closed form over all subsets of the star: only whether the center is open
/// and how many leaves are open matter.
fn star_opt_closed_form(n: usize) -> f64 {
    let mut best = f64::INFINITY;
    for center in [false, true] {
        for leaves in 0..=n {
            if !center && leaves == 0 {
                continue;
            }
            let far = if leaves == n { 0.0 } else if center { 1.0 } else { 2.0 };
            best = best.min(leaves as f64 + f64::from(u8::from(center)) + far);
        }
    }
    best
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let inst = gen_star::<f64>(STAR_LEAVES, 1.0, Norm::linf(STAR_LEAVES)).map_err(|e| e.to_string())?;
    let naive = run_naive_uniform(&inst, 0).map_err(|e| e.to_string())?;
    check(naive.total_cost() == STAR_LEAVES as f64, format!("naive cost {} != {STAR_LEAVES}", naive.total_cost()))?;
    // the center plus 19 leaves: any solution with more leaves already costs more than 20
    let candidates: Vec<usize> = (0..20).collect();
    let opt = offline_opt(&inst, &candidates).map_err(|e| e.to_string())?;
    check(opt.cost == 2.0, format!("offline optimum {} != 2", opt.cost))?;
    check(star_opt_closed_form(STAR_LEAVES) == 2.0, "closed form disagrees")?;
    let seeds: Vec<u64> = (0..STAR_RUNS).collect();
    let traces = run_ensemble(&inst, Runner::Uniform, &seeds).map_err(|e| e.to_string())?;
    let report = verify_bounds(&traces, &opt, &inst, Variant::Uniform, false).map_err(|e| e.to_string())?;
    check(report.bound == 10.0, format!("bound {} != 10", report.bound))?;
    check(report.mean <= report.bound + 3.0 * report.stderr, format!("mean {} above bound", report.mean))?;
    check(report.mean <= STAR_EXPECTED_MEAN, format!("mean {} above the expected {STAR_EXPECTED_MEAN}", report.mean))?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "naive {} | opt {} | uniform mean {:.4} (stderr {:.4}) <= bound {}",
        naive.total_cost(),
        opt.cost,
        report.mean,
        report.stderr,
        report.bound
    ))
}

// 2. Ordered-approximation sandwich.
const SANDWICH_VECTORS: usize = 10_000;
const SANDWICH_REL_TOL: f64 = 1e-9;

fn random_symmetric_max(n: usize, rng: &mut ChaCha8Rng) -> Norm<f64> {
    let weights = (0..5)
        .map(|_| {
            let mut w: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            w.sort_by(|a, b| b.total_cmp(a));
            w[0] += 0.01;
            w
        })
        .collect();
    Norm::symmetric_max(weights).unwrap()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0usize;
    let mut violations = 0usize;
    for n in [4usize, 16, 64] {
        let norms = vec![
            Norm::l1(n),
            Norm::l2(n),
            Norm::linf(n),
            Norm::top_k(n, 1).unwrap(),
            Norm::top_k(n, 3).unwrap(),
            Norm::top_k(n, n).unwrap(),
            random_symmetric_max(n, &mut rng),
        ];
        for norm in &norms {
            let approx = ordered_approx(norm, &Tolerance::default()).map_err(|e| e.to_string())?;
            let rho = norm.rho().map_err(|e| e.to_string())?;
            let factor = 2.0 * (rho.log2() + 1e-12).floor() + 2.0;
            check((approx.factor - factor).abs() < 1e-12, format!("factor {} != {factor}", approx.factor))?;
            let mut sampler = MixedSampler::new(n as u64);
            for _ in 0..SANDWICH_VECTORS {
                let x: Vec<f64> = sampler.vector(n);
                let lo = norm.value(&x);
                let hi = approx.value(&x);
                let slack = SANDWICH_REL_TOL * lo;
                if hi < lo - slack || hi > factor * lo + factor * slack {
                    violations += 1;
                }
                checked += 1;
            }
        }
    }
    check(violations == 0, format!("{violations} sandwich violations"))?;
    within(start, Duration::from_secs(30))?;
    Ok(format!("{checked} vectors, 0 violations"))
}

// 3. Adaptivity gap sweep.
const GAP_LIMIT: f64 = 2.0 + 1e-9;
const GAP_ORDER_TOL: f64 = 1e-9;

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let config = SweepConfig {
        n: 3,
        distributions: two_point_grid(&[0.0, 0.5, 1.0], &[0.25, 0.5, 0.75]).map_err(|e| e.to_string())?,
        objectives: default_objectives(3).map_err(|e| e.to_string())?,
    };
    let rows = run_sweep(&config, &ProbingBudget::default()).map_err(|e| e.to_string())?;
    check(rows.len() == 19 * 9 * 9 * 9 * 5, format!("{} rows", rows.len()))?;
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let worst = rows.iter().map(|r| r.adaptive - r.nonadaptive).fold(f64::INFINITY, f64::min);
    check(max <= GAP_LIMIT, format!("max ratio {max}"))?;
    check(worst >= -GAP_ORDER_TOL, format!("Adap below NA by {}", -worst))?;
    within(start, Duration::from_secs(300))?;
    Ok(format!("{} instances, max Adap/NA = {max:.6}", rows.len()))
}

// 4. Submodularity engine.
const SUBMOD_TRIALS: usize = 10_000;
const SUBMOD_TOL: f64 = 1e-9;

fn submodular_builtins(n: usize) -> Vec<(String, Norm<f64>)> {
    let half = n / 2;
    let mut out: Vec<(String, Norm<f64>)> = [1.0, 1.5, 2.0, 3.0]
        .iter()
        .map(|&p| (format!("lp({p})"), Norm::lp(n, p).unwrap()))
        .collect();
    out.push(("linf".into(), Norm::linf(n)));
    out.push(("top_k(3)".into(), Norm::top_k(n, 3).unwrap()));
    out.push(("ordered".into(), Norm::ordered((0..n).map(|i| 1.0 / (i + 1) as f64).collect()).unwrap()));
    let weights = (0..=n).map(|u| 1.0 + u as f64 / 3.0).collect();
    let covers = (0..n).map(|i| vec![i, (i + 3) % (n + 1)]).collect();
    out.push((
        "lovasz(coverage)".into(),
        Norm::lovasz(Arc::new(CoverageFunction::new(weights, covers).unwrap())).unwrap(),
    ));
    out.push((
        "lovasz(concave)".into(),
        Norm::lovasz(Arc::new(ConcaveCardinality::new((0..=n).map(|k| (k as f64).ln_1p()).collect()).unwrap())).unwrap(),
    ));
    out.push(("matroid(uniform)".into(), Norm::matroid_rank(Arc::new(UniformMatroid::new(n, 3))).unwrap()));
    out.push((
        "matroid(partition)".into(),
        Norm::matroid_rank(Arc::new(PartitionMatroid::new((0..n).map(|i| i % 3).collect(), vec![1, 2, 1]).unwrap())).unwrap(),
    ));
    // 8 edges on 5 vertices
    let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2), (1, 3), (2, 4)];
    out.push(("matroid(graphic)".into(), Norm::matroid_rank(Arc::new(GraphicMatroid::new(5, edges).unwrap())).unwrap()));
    out.push((
        "partial_sum".into(),
        Norm::partial_sum(n, vec![((0..half).collect(), Norm::l2(half)), ((half..n).collect(), Norm::top_k(n - half, 2).unwrap())])
            .unwrap(),
    ));
    out.push((
        "conical".into(),
        Norm::conical(vec![(0.5, Norm::l2(n)), (2.0, Norm::linf(n)), (1.0, Norm::top_k(n, 2).unwrap())]).unwrap(),
    ));
    out.push((
        "rescaled".into(),
        Norm::rescaled((0..n).map(|i| 1.0 + i as f64).collect(), Norm::l2(n)).unwrap(),
    ));
    out
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let n = 8;
    let norms = submodular_builtins(n);
    for (k, (name, norm)) in norms.iter().enumerate() {
        for (c, ch) in Characterization::ALL.iter().enumerate() {
            let mut sampler = MixedSampler::new(1000 * k as u64 + c as u64);
            let rep = check_submodular(norm, &mut sampler, SUBMOD_TRIALS, SUBMOD_TOL, *ch);
            check(
                rep.passed() && rep.trials == SUBMOD_TRIALS,
                format!("{name}: {} violations of {ch:?}", rep.violations.len()),
            )?;
        }
    }
    // block-max on n = 4: the exhaustive 0/1 scan must contain the stored pair
    let block = block_max_fixture::<f64>(4).map_err(|e| e.to_string())?;
    let rep = exhaustive_grid_check(&block, Characterization::Lattice, &[0.0, 1.0], SUBMOD_TOL);
    let stored = rep.violations.iter().any(|v| {
        matches!(&v.witness, Witness::Lattice { x, y } if x == &[1.0, 0.0, 1.0, 0.0] && y == &[0.0, 1.0, 1.0, 0.0])
            && v.lhs == 3.0
            && v.rhs == 2.0
    });
    check(stored, "block-max counterexample (1,0,1,0), (0,1,1,0) not found")?;
    let mut sampler = MixedSampler::new(44);
    let dr1 = check_dr_submodular(&Norm::<f64>::l1(n), &mut sampler, SUBMOD_TRIALS, SUBMOD_TOL);
    check(dr1.passed(), format!("DR check fails for l1 ({} violations)", dr1.violations.len()))?;
    let mut sampler = MixedSampler::new(45);
    let l2 = Norm::<f64>::l2(n);
    let dr2 = check_dr_submodular(&l2, &mut sampler, SUBMOD_TRIALS, SUBMOD_TOL);
    let witness_ok = dr2.violations.first().is_some_and(|v| match &v.witness {
        Witness::Diminishing { x, w, i, a } => {
            let bump = |y: &[f64]| {
                let mut y = y.to_vec();
                y[*i] += a;
                y
            };
            let gain_w = l2.value(&bump(w)) - l2.value(w);
            let gain_x = l2.value(&bump(x)) - l2.value(x);
            x.iter().zip(w).all(|(p, q)| p <= q) && gain_w > gain_x
        }
        _ => false,
    });
    check(witness_ok, "no verified DR witness for l2")?;
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} norms x 4 characterizations clean; block-max pair found; DR: l1 clean, l2 witness",
        norms.len()
    ))
}

// 5. Exact rho values.
const RHO_TOL: f64 = 1e-12;

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for (p, expect) in [(1.0, 16.0), (2.0, 4.0), (4.0, 2.0), (f64::INFINITY, 1.0)] {
        let rho = Norm::lp(16, p).map_err(|e| e.to_string())?.rho().map_err(|e| e.to_string())?;
        check((rho - 16f64.powf(1.0 / p)).abs() <= RHO_TOL, format!("rho(L{p}) = {rho}"))?;
        worst = worst.max((rho - expect).abs());
    }
    for k in [1usize, 5, 20] {
        let rho = Norm::<f64>::top_k(20, k).map_err(|e| e.to_string())?.rho().map_err(|e| e.to_string())?;
        check((rho - k as f64).abs() <= RHO_TOL, format!("rho(top_{k}) = {rho}"))?;
        worst = worst.max((rho - k as f64).abs());
    }
    Ok(format!("7 values, max error {worst:e}"))
}

// 6 and 7. Cost bounds on random Euclidean instances.
const BOUND_INSTANCES: u64 = 20;
const BOUND_REQUESTS: usize = 10;
const BOUND_CANDIDATES: usize = 8;
const BOUND_RUNS: u64 = 1000;
const UNIFORM_COST: f64 = 0.5;
const POW2_COSTS: CostSpec = CostSpec::RandomPow2 { min_exp: -3, max_exp: 1 };

fn bound_norms() -> Vec<(&'static str, Norm<f64>)> {
    vec![
        ("l1", Norm::l1(BOUND_REQUESTS)),
        ("linf", Norm::linf(BOUND_REQUESTS)),
        ("top_k(3)", Norm::top_k(BOUND_REQUESTS, 3).unwrap()),
    ]
}

fn bound_criterion(variant: Variant) -> Outcome {
    let start = Instant::now();
    let (runner, costs) = match variant {
        Variant::Uniform => (Runner::Uniform, CostSpec::Uniform(UNIFORM_COST)),
        Variant::NonUniform => (Runner::NonUniform, POW2_COSTS),
    };
    let seeds: Vec<u64> = (0..BOUND_RUNS).collect();
    let mut worst_ratio = 0.0f64;
    let mut count = 0;
    for (name, norm) in bound_norms() {
        for s in 0..BOUND_INSTANCES {
            let inst: OflInstance<f64> =
                gen_random_euclidean(BOUND_CANDIDATES, BOUND_REQUESTS, 2, costs, norm.clone(), 600 + s)
                    .map_err(|e| e.to_string())?;
            let cand = inst.openable();
            check(cand.len() == BOUND_CANDIDATES, "candidate count")?;
            let opt = offline_opt(&inst, &cand).map_err(|e| e.to_string())?;
            let traces = run_ensemble(&inst, runner, &seeds).map_err(|e| e.to_string())?;
            let report = verify_bounds(&traces, &opt, &inst, variant, false).map_err(|e| e.to_string())?;
            // bound recomputed from the optimum
            let rho = norm.rho().unwrap();
            let expect = match variant {
                Variant::Uniform => {
                    2.0 * ((rho.log2() - 1e-12).ceil() + 1.0) * opt.facilities.len() as f64 * UNIFORM_COST
                        + 8.0 * opt.connection_cost
                }
                Variant::NonUniform => 36.0 * opt.connection_cost + 48.0 * (rho.log2() + 1.0) * opt.opening_cost,
            };
            check(
                (report.bound - expect).abs() <= 1e-9 * expect,
                format!("{name}/{s}: bound {} != {expect}", report.bound),
            )?;
            check(
                report.mean <= expect + 3.0 * report.stderr,
                format!("{name}/{s}: mean {} > {expect} + 3·{}", report.mean, report.stderr),
            )?;
            worst_ratio = worst_ratio.max(report.mean / expect);
            count += 1;
        }
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("{count} instance/norm pairs x {BOUND_RUNS} runs, max mean/bound = {worst_ratio:.4}"))
}

// 8. Lower-bound trend.
const LB_ARITY: usize = 8;
const LB_RUNS: usize = 500;

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let ks = [2usize, 3, 4];
    let norms: Vec<Norm<f64>> = ks.iter().map(|&k| Norm::l1(k.pow(k as u32))).collect();
    let config = ExperimentConfig::new(8).with_runs(LB_RUNS);
    let rows = lower_bound_experiment(&norms, LB_ARITY, &config).map_err(|e| e.to_string())?;
    for (r, &k) in rows.iter().zip(&ks) {
        check(r.k == k, format!("tree height {} for n = {}", r.k, r.n))?;
        check(r.opt <= 2.0 * k as f64 + 2.0 + 1e-9, format!("OPT {} above 2k+2", r.opt))?;
        check(r.mean_ratio >= k as f64 / 4.0, format!("k={k}: ratio {} < k/4", r.mean_ratio))?;
    }
    for w in rows.windows(2) {
        check(w[1].mean_ratio >= w[0].mean_ratio, format!("ratio decreases from k={} to k={}", w[0].k, w[1].k))?;
    }
    within(start, Duration::from_secs(120))?;
    let desc: Vec<String> = rows.iter().map(|r| format!("k={}: {:.3}", r.k, r.mean_ratio)).collect();
    Ok(format!("mean ratios {} (finite-N estimate)", desc.join(", ")))
}

// 9. Probing DP against decision-tree enumeration.
const DP_INSTANCES: u64 = 100;
const DP_TOL: f64 = 1e-12;

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for s in 0..DP_INSTANCES {
        let n = 1 + (s % 3) as usize;
        let inst = common::random_probing(n, 900 + s);
        let dp = adaptive_opt(&inst, &ProbingBudget::default()).map_err(|e| e.to_string())?.value;
        let reference = common::brute_force_adaptive(&inst);
        let err = (dp - reference).abs();
        check(err <= DP_TOL, format!("instance {s}: {dp} vs {reference}"))?;
        worst = worst.max(err);
    }
    Ok(format!("{DP_INSTANCES} instances, max |DP - enumeration| = {worst:e}"))
}

// 10. Load balancing.
const LB_L1_INSTANCES: u64 = 50;
const LB_MIXED_INSTANCES: u64 = 50;
const LB_ORACLE_INSTANCES: u64 = 10;
const LB_TIE_TOL: f64 = 1e-12;

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for s in 0..LB_L1_INSTANCES {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=6));
        let inst = LoadBalInstance::new(common::random_times(m, n, &mut rng), vec![Norm::l1(n); m]).unwrap();
        let g = greedy_assign(&inst, None).map_err(|e| e.to_string())?;
        let o = brute_force_assign(&inst).map_err(|e| e.to_string())?;
        check((g.total_cost - o.total_cost).abs() <= LB_TIE_TOL, format!("l1 instance {s}: {} vs {}", g.total_cost, o.total_cost))?;
    }
    let mut worst = 0.0f64;
    for s in 0..LB_MIXED_INSTANCES {
        let (m, n) = (rng.gen_range(1..=3), rng.gen_range(1..=6));
        let inner = (0..m)
            .map(|_| if rng.gen_bool(0.5) { Norm::top_k(n, 2.min(n)).unwrap() } else { Norm::l2(n) })
            .collect();
        let inst = LoadBalInstance::new(common::random_times(m, n, &mut rng), inner).unwrap();
        let g = greedy_assign(&inst, None).map_err(|e| e.to_string())?;
        let o = brute_force_assign(&inst).map_err(|e| e.to_string())?;
        let ratio = g.total_cost / o.total_cost;
        let limit = 4.0 * (1.0 + (n as f64).ln());
        check(ratio <= limit, format!("instance {s}: greedy/OPT {ratio} > {limit}"))?;
        worst = worst.max(ratio);
    }
    for s in 0..LB_ORACLE_INSTANCES {
        let (m, n) = (3, 6);
        let inner = (0..m).map(|i| [Norm::l2(n), Norm::top_k(n, 2).unwrap(), Norm::linf(n)][i].clone()).collect();
        let inst = LoadBalInstance::new(common::random_times(m, n, &mut rng), inner).unwrap();
        let o = brute_force_assign(&inst).map_err(|e| e.to_string())?;
        let reference = common::brute_force_loadbal(&inst);
        check((o.total_cost - reference).abs() <= LB_TIE_TOL, format!("oracle instance {s}: {} vs {reference}", o.total_cost))?;
    }
    Ok(format!("l1 greedy optimal on {LB_L1_INSTANCES}; worst greedy/OPT {worst:.4}; oracle agrees on {LB_ORACLE_INSTANCES}"))
}

fn main() {
    type Criterion = fn() -> Outcome;
    let criteria: [(&str, Criterion); 10] = [
        ("star separation", criterion_1),
        ("ordered-approximation sandwich", criterion_2),
        ("adaptivity gap sweep", criterion_3),
        ("submodularity engine", criterion_4),
        ("exact rho values", criterion_5),
        ("uniform-cost bound", || bound_criterion(Variant::Uniform)),
        ("non-uniform bound", || bound_criterion(Variant::NonUniform)),
        ("lower-bound trend", criterion_8),
        ("probing DP oracle", criterion_9),
        ("load balancing", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {}: {name}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {label} ({secs:.1}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label} ({secs:.1}s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
