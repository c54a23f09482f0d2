//! Plot-ready CSV output. Numbers use '.' as decimal separator and 15
//! significant digits with trailing zeros removed.

use crate::harness::LowerBoundRow;
use crate::loadbal::Assignment;
use crate::ofl::{BoundReport, OflTrace, Runner, Variant};
use crate::probing::SweepRow;
use crate::scalar::Scalar;

/// Formats a number with at most 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-5..15).contains(&mag) {
        let decimals = (14 - mag).max(0) as usize;
        trim(format!("{x:.decimals$}"))
    } else {
        let s = format!("{x:.14e}");
        let (mant, exp) = s.split_once('e').expect("exponent form");
        format!("{}e{exp}", trim(mant.to_string()))
    }
}

fn trim(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn num<T: Scalar>(x: T) -> String {
    fmt_num(x.to_f64_lossy())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn runner_name(r: Runner) -> &'static str {
    match r {
        Runner::Uniform => "uniform",
        Runner::NaiveUniform => "naive",
        Runner::NonUniform => "nonuniform",
    }
}

/// One row per step: `step,opened,level,d,dhat,tau,p0..pm`.
///
/// `opened` is empty when nothing was built; `tau` is `inf` for uncapped steps.
pub fn trace_csv<T: Scalar>(trace: &OflTrace<T>) -> String {
    let m = trace.levels.len() - 1;
    let mut out = String::from("step,opened,level,d,dhat,tau");
    for j in 0..=m {
        out.push_str(&format!(",p{j}"));
    }
    out.push('\n');
    for s in &trace.steps {
        let opened = s.opened.map(|q| q.to_string()).unwrap_or_default();
        let tau = s.tau.map_or_else(|| "inf".to_string(), num);
        out.push_str(&format!("{},{opened},{},{},{},{tau}", s.step, s.level, num(s.d), num(s.dhat)));
        for p in &s.probs {
            out.push(',');
            out.push_str(&num(*p));
        }
        out.push('\n');
    }
    out
}

pub const ENSEMBLE_HEADER: &str =
    "instance,runner,runs,mean,stderr,bound,opt,ratio,rho,pass,sd_mean,ld_mean,sd_bound,ld_bound";

/// One ensemble summary row (stage columns empty when not computed).
pub fn ensemble_row<T: Scalar>(label: &str, runner: Runner, r: &BoundReport<T>) -> String {
    let stages = r.stages.as_ref().map_or_else(
        || ",,,".to_string(),
        |s| {
            format!(
                "{},{},{},{}",
                num(s.short_distance_mean),
                num(s.long_distance_mean),
                num(s.short_distance_bound),
                num(s.long_distance_bound)
            )
        },
    );
    format!(
        "{},{},{},{},{},{},{},{},{},{},{stages}",
        csv_field(label),
        runner_name(runner),
        r.runs,
        num(r.mean),
        num(r.stderr),
        num(r.bound),
        num(r.opt_cost),
        num(r.ratio),
        num(r.rho),
        r.pass
    )
}

pub fn ensemble_csv<T: Scalar>(rows: &[(String, Runner, BoundReport<T>)]) -> String {
    let mut out = format!("{ENSEMBLE_HEADER}\n");
    for (label, runner, r) in rows {
        out.push_str(&ensemble_row(label, *runner, r));
        out.push('\n');
    }
    out
}

pub fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Uniform => "uniform",
        Variant::NonUniform => "nonuniform",
    }
}

/// `id,adap,na,ratio,norm_kind,family_kind,max_ratio`; the last column repeats the sweep maximum.
pub fn sweep_csv<T: Scalar>(rows: &[SweepRow<T>]) -> String {
    let max = rows.iter().map(|r| r.ratio).fold(T::zero(), T::max);
    let mut out = String::from("id,adap,na,ratio,norm_kind,family_kind,max_ratio\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.id,
            num(r.adaptive),
            num(r.nonadaptive),
            num(r.ratio),
            csv_field(&r.norm_kind),
            csv_field(&r.family_kind),
            num(max)
        ));
    }
    out
}

/// `greedy_cost,opt_cost,ratio,factors`; `factors` joins the per-machine factors with ';'.
pub fn loadbal_csv<T: Scalar>(greedy: &Assignment<T>, opt: Option<&Assignment<T>>, factors: Option<&[T]>) -> String {
    let (opt_s, ratio_s) = match opt {
        Some(o) if o.total_cost > T::zero() => (num(o.total_cost), num(greedy.total_cost / o.total_cost)),
        Some(o) => (num(o.total_cost), "1".to_string()),
        None => (String::new(), String::new()),
    };
    let factors = factors.map_or_else(String::new, |f| f.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";"));
    format!("greedy_cost,opt_cost,ratio,factors\n{},{opt_s},{ratio_s},{factors}\n", num(greedy.total_cost))
}

pub fn lower_bound_csv(rows: &[LowerBoundRow]) -> String {
    let mut out = String::from("k,n,arity,runs,opt,mean_alg,mean_ratio,stderr,k_over_4\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.k,
            r.n,
            r.arity,
            r.runs,
            fmt_num(r.opt),
            fmt_num(r.mean_alg),
            fmt_num(r.mean_ratio),
            fmt_num(r.stderr),
            fmt_num(r.k as f64 / 4.0)
        ));
    }
    out
}
