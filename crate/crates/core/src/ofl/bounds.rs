//! Empirical check of ensemble cost against the explicit competitive bounds,
//! with an optional split into short- and long-distance stages.

use crate::ofl::nonuniform::round_down_pow2;
use crate::ofl::{OflError, OflInstance, OflTrace, OfflineOpt};
use crate::scalar::{ceil_log2, CompensatedSum, Scalar, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Uniform,
    NonUniform,
}

/// Inflation of the ring radius defining the non-uniform long-distance stage.
pub const RING_INFLATION: f64 = 5.0;

/// Mean ensemble cost split by stage, with the bound for each stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageBreakdown<T> {
    pub short_distance_mean: T,
    pub long_distance_mean: T,
    pub short_distance_bound: T,
    pub long_distance_bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T> {
    pub variant: Variant,
    pub runs: usize,
    pub mean: T,
    pub stderr: T,
    pub bound: T,
    pub rho: T,
    pub opt_cost: T,
    /// `mean / opt_cost`, or 1 when both vanish.
    pub ratio: T,
    /// `mean <= bound + 3 stderr`.
    pub pass: bool,
    pub stages: Option<StageBreakdown<T>>,
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr<T: Scalar>(xs: &[T]) -> (T, T) {
    if xs.is_empty() {
        return (T::zero(), T::zero());
    }
    let n = T::of_usize(xs.len());
    let mean = xs.iter().copied().collect::<CompensatedSum<T>>().value() / n;
    if xs.len() < 2 {
        return (mean, T::zero());
    }
    let ss = xs.iter().map(|&x| (x - mean) * (x - mean)).collect::<CompensatedSum<T>>().value();
    let var = ss / (n - T::one());
    (mean, (var / n).sqrt())
}

/// Compares the mean algorithm cost of `traces` with the explicit bound for `variant`.
///
/// The algorithm is charged its own (rounded on the non-uniform path) costs,
/// while the bound is taken at the original costs of the optimum.
pub fn verify_bounds<T: Scalar>(
    traces: &[OflTrace<T>],
    opt: &OfflineOpt<T>,
    instance: &OflInstance<T>,
    variant: Variant,
    with_stages: bool,
) -> Result<BoundReport<T>, OflError> {
    let costs: Vec<T> = traces.iter().map(|t| t.total_cost()).collect();
    let (mean, stderr) = mean_stderr(&costs);
    let n = instance.n_requests();
    let rho = if n == 0 { T::one() } else { instance.norm().rho()? };
    let tol = Tolerance::<T>::default();
    let ceil_l = T::of(f64::from(ceil_log2(rho, &tol)));
    let two = T::of(2.0);
    let opt_norm = opt.connection_cost;
    let (sd_bound, ld_bound) = match variant {
        Variant::Uniform => {
            let f = instance.uniform_cost().ok_or(OflError::NotUniform)?;
            let k = T::of_usize(opt.facilities.len());
            (T::of(8.0) * opt_norm, two * (ceil_l + T::one()) * k * f)
        }
        Variant::NonUniform => (
            T::of(36.0) * opt_norm,
            T::of(48.0) * (rho.log2() + T::one()) * opt.opening_cost,
        ),
    };
    let bound = sd_bound + ld_bound;
    let ratio = if opt.cost > T::zero() {
        mean / opt.cost
    } else if mean == T::zero() {
        T::one()
    } else {
        T::infinity()
    };
    let stages = (with_stages && n > 0).then(|| {
        let mut sd = Vec::with_capacity(traces.len());
        let mut ld = Vec::with_capacity(traces.len());
        for t in traces {
            let (s, l) = stage_costs(t, opt, instance, variant, rho);
            sd.push(s);
            ld.push(l);
        }
        StageBreakdown {
            short_distance_mean: mean_stderr(&sd).0,
            long_distance_mean: mean_stderr(&ld).0,
            short_distance_bound: sd_bound,
            long_distance_bound: ld_bound,
        }
    });
    Ok(BoundReport {
        variant,
        runs: traces.len(),
        mean,
        stderr,
        bound,
        rho,
        opt_cost: opt.cost,
        ratio,
        pass: mean <= bound + T::of(3.0) * stderr + tol.slack(bound),
        stages,
    })
}

/// Ring index of a request at distance `d` from its optimal facility.
fn ring<T: Scalar>(d: T, r: T, max_ring: u32, tol: &Tolerance<T>) -> u32 {
    if d <= r || r == T::zero() {
        0
    } else {
        ceil_log2(d / r, tol).min(max_ring)
    }
}

/// Splits one trace's cost into short- and long-distance stage totals.
///
/// A step's cost is its opening cost plus its increment of `‖d‖`.
fn stage_costs<T: Scalar>(
    trace: &OflTrace<T>,
    opt: &OfflineOpt<T>,
    instance: &OflInstance<T>,
    variant: Variant,
    rho: T,
) -> (T, T) {
    let tol = Tolerance::<T>::default();
    let norm = instance.norm();
    let n = instance.n_requests();
    let ones = vec![T::one(); n];
    let r = opt.connection_cost / norm.value(&ones);
    let max_ring = ceil_log2(rho, &tol);
    let metric = instance.metric();
    let (mut sd, mut ld) = (CompensatedSum::new(), CompensatedSum::new());
    let mut prefix = vec![T::zero(); n];
    for s in &trace.steps {
        let i = s.step;
        let radius = T::of(2.0).powi(ring(opt.distances[i], r, max_ring, &tol) as i32) * r;
        let long = match variant {
            Variant::Uniform => {
                let center = opt.clusters[i];
                let gap = trace.facilities[..s.facilities_before]
                    .iter()
                    .map(|&q| metric.dist(center, q))
                    .fold(T::infinity(), T::min);
                gap > radius
            }
            Variant::NonUniform => s.dhat > (T::of(RING_INFLATION) + T::one()) * radius,
        };
        let opening = s.opened.map_or(T::zero(), |q| match variant {
            Variant::Uniform => instance.cost(q),
            Variant::NonUniform => round_down_pow2(instance.cost(q)),
        });
        let connection = norm.marginal_unchecked(&prefix, i, s.d);
        prefix[i] = s.d;
        if long {
            ld.add(opening + connection);
        } else {
            sd.add(opening + connection);
        }
    }
    (sd.value(), ld.value())
}
