//! Solve, exact and compare reports.

use std::io::Write;
use std::time::Instant;

use divmax_core::baselines::{brute_force_opt, greedy_insertion, local_search, BRUTE_FORCE_MAX};
use divmax_core::relaxation::solve_slice;
use divmax_core::rounding::{round_relaxation, StepEvent};
use divmax_core::{
    guarantee_factor, tol, Instance, NegTypeCertificate, Problem, RelaxationResult, RoundOptions, SliceOptions, Verdict,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::CliError;

/// Largest ground set for which `solve` also runs the exact baseline.
const SOLVE_EXACT_MAX: usize = 16;

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub verdict: &'static str,
    pub min_eigenvalue: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_value: Option<f64>,
}

impl From<&NegTypeCertificate> for CertificateReport {
    fn from(c: &NegTypeCertificate) -> Self {
        CertificateReport {
            verdict: match c.verdict {
                Verdict::NegativeType => "negative_type",
                Verdict::NotNegativeType => "not_negative_type",
            },
            min_eigenvalue: c.min_eigenvalue,
            tolerance: c.tolerance,
            witness: c.witness.clone(),
            witness_value: c.witness_value,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SliceRow {
    pub alpha: usize,
    pub value: f64,
    pub gap: f64,
    pub upper_bound: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepRow {
    pub inc: usize,
    pub dec: usize,
    pub eps: f64,
    pub event: &'static str,
    pub value_after: f64,
    pub loss: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundingSummary {
    pub iterations: usize,
    pub erased: usize,
    pub refined: usize,
    pub total_loss: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<Vec<StepRow>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Baselines {
    pub greedy: f64,
    pub local_search: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundChecks {
    pub basis_independent: bool,
    pub guarantee_factor: f64,
    /// `factor · g(x*) − τ`; satisfied when the basis value reaches it.
    pub guaranteed_value: f64,
    pub guarantee_satisfied: bool,
    /// `g(x*) − (1 − factor) · x*ᵀDx*`, the budget charged only to the
    /// quadratic term.
    pub quadratic_budget_value: f64,
    pub quadratic_budget_satisfied: bool,
    pub step_bounds_satisfied: bool,
    pub upper_bound_dominates: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub certify_ms: f64,
    pub relax_ms: f64,
    pub round_ms: f64,
    pub baselines_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub n: usize,
    pub rank: usize,
    pub certificate: CertificateReport,
    /// Set when certification failed and `--force` was given.
    pub forced: bool,
    pub slices: Vec<SliceRow>,
    pub opt_upper_bound: f64,
    pub best_alpha: usize,
    pub x_star: Vec<f64>,
    pub x_star_value: f64,
    pub rounding: RoundingSummary,
    pub basis: Vec<usize>,
    pub value: f64,
    pub baselines: Baselines,
    pub bounds: BoundChecks,
    pub timings: Timings,
}

#[derive(Debug, Clone)]
pub struct SolveConfig {
    pub gap_tol: f64,
    pub force: bool,
    pub trace: bool,
    pub threads: Option<usize>,
    pub exact: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            gap_tol: SliceOptions::default().gap_tol,
            force: false,
            trace: false,
            threads: None,
            exact: true,
        }
    }
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Solves every slice, in parallel on `threads` workers (all cores if `None`).
pub fn sweep_parallel(p: &Problem, opts: &SliceOptions, threads: Option<usize>) -> Result<RelaxationResult, CliError> {
    let rank = p.rank();
    let run = || -> divmax_core::Result<Vec<_>> {
        if rank == 0 {
            return Ok(vec![solve_slice(p, 0, opts)?]);
        }
        (1..=rank).into_par_iter().map(|a| solve_slice(p, a, opts)).collect()
    };
    let slices = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Internal(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    Ok(RelaxationResult::from_slices(slices)?)
}

pub fn certify(inst: &Instance) -> CertificateReport {
    let p = Problem::assume_negative_type(inst.clone());
    CertificateReport::from(p.certificate())
}

pub fn solve(inst: Instance, cfg: &SolveConfig) -> Result<SolveReport, CliError> {
    if !(cfg.gap_tol > 0.0 && cfg.gap_tol.is_finite()) {
        return Err(CliError::Invalid("gap tolerance must be positive".into()));
    }
    let t = Instant::now();
    let p = Problem::assume_negative_type(inst);
    let forced = !p.certificate().is_negative_type();
    if forced && !cfg.force {
        return Err(CliError::Certification(format!(
            "distance is not of negative type (minimum eigenvalue {:e}); --force skips this check and voids the guarantees",
            p.certificate().min_eigenvalue
        )));
    }
    let certify_ms = ms(t);

    let t = Instant::now();
    let opts = SliceOptions {
        gap_tol: cfg.gap_tol,
        ..SliceOptions::default()
    };
    let relax = sweep_parallel(&p, &opts, cfg.threads)?;
    let relax_ms = ms(t);

    let t = Instant::now();
    let (x_star, rounded) = round_relaxation(&p, &relax, &RoundOptions::default())?;
    let round_ms = ms(t);

    let t = Instant::now();
    let inst = p.instance();
    let greedy = greedy_insertion(inst);
    let local = local_search(inst, &greedy.set)?;
    let exact = if cfg.exact && inst.n() <= SOLVE_EXACT_MAX {
        Some(brute_force_opt(inst)?.value)
    } else {
        None
    };
    let baselines_ms = ms(t);

    let trace = &rounded.trace;
    let bounds = trace.step_bounds();
    let steps = cfg.trace.then(|| {
        trace
            .steps
            .iter()
            .zip(&bounds)
            .map(|(s, &bound)| StepRow {
                inc: s.inc,
                dec: s.dec,
                eps: s.eps,
                event: match s.event {
                    StepEvent::Erased => "erased",
                    StepEvent::Refined => "refined",
                },
                value_after: s.value_after,
                loss: s.loss,
                bound,
            })
            .collect()
    });
    let erased = trace.steps.iter().filter(|s| s.event == StepEvent::Erased).count();
    let mut report = SolveReport {
        n: inst.n(),
        rank: p.rank(),
        certificate: p.certificate().into(),
        forced,
        slices: relax
            .slices
            .iter()
            .map(|s| SliceRow {
                alpha: s.alpha,
                value: s.value,
                gap: s.gap,
                upper_bound: s.upper_bound,
                iterations: s.iterations,
                converged: s.converged,
            })
            .collect(),
        opt_upper_bound: relax.opt_upper_bound,
        best_alpha: relax.best().alpha,
        x_star,
        x_star_value: 0.0,
        rounding: RoundingSummary {
            iterations: trace.steps.len(),
            erased,
            refined: trace.steps.len() - erased,
            total_loss: trace.total_loss,
            steps,
        },
        basis: rounded.basis,
        value: 0.0,
        baselines: Baselines {
            greedy: greedy.value,
            local_search: local.value,
            exact,
        },
        bounds: BoundChecks {
            basis_independent: false,
            guarantee_factor: 0.0,
            guaranteed_value: 0.0,
            guarantee_satisfied: false,
            quadratic_budget_value: 0.0,
            quadratic_budget_satisfied: false,
            step_bounds_satisfied: false,
            upper_bound_dominates: false,
        },
        timings: Timings {
            certify_ms,
            relax_ms,
            round_ms,
            baselines_ms,
        },
    };
    report.recompute(inst, trace.steps.iter().map(|s| s.loss).collect())?;
    Ok(report)
}

impl SolveReport {
    /// Fills the value fields and every bound check from the raw basis,
    /// fractional point and step losses.
    fn recompute(&mut self, inst: &Instance, losses: Vec<f64>) -> Result<(), CliError> {
        let n = inst.n();
        let k = self.rank;
        self.value = inst.set_value(&self.basis);
        self.x_star_value = inst.value(&self.x_star);
        let quadratic = inst.quadratic_value(&self.x_star);
        let factor = guarantee_factor(k);
        let tau = tol::NUM * (1.0 + self.x_star_value.abs());
        let independent = inst.matroid().is_independent(&self.basis)? && self.basis.len() == k;
        let steps = losses.len();
        let step_ok = losses.iter().enumerate().all(|(t, &loss)| {
            let m = (steps - t) as f64;
            let kf = k.max(1) as f64;
            loss <= (2.0 / (m * kf)).min(2.0 / (m * m)) * quadratic + tau
        });
        let budget = self.x_star_value - (1.0 - factor) * quadratic;
        let best_known = self.baselines.exact.unwrap_or(self.value).max(self.value);
        self.bounds = BoundChecks {
            basis_independent: independent && self.basis.iter().all(|&e| e < n),
            guarantee_factor: factor,
            guaranteed_value: factor * self.x_star_value - tau,
            guarantee_satisfied: self.value >= factor * self.x_star_value - tau,
            quadratic_budget_value: budget,
            quadratic_budget_satisfied: self.value >= budget - tau,
            step_bounds_satisfied: step_ok,
            upper_bound_dominates: self.opt_upper_bound >= best_known - 1e-6 * (1.0 + best_known),
        };
        Ok(())
    }

    pub fn write_slices_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.slices {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExactReport {
    pub n: usize,
    pub set: Vec<usize>,
    pub value: f64,
}

pub fn exact(inst: &Instance) -> Result<ExactReport, CliError> {
    if inst.n() > BRUTE_FORCE_MAX {
        return Err(CliError::Invalid(format!(
            "exact search supports at most {BRUTE_FORCE_MAX} elements, instance has {}",
            inst.n()
        )));
    }
    let best = brute_force_opt(inst)?;
    Ok(ExactReport {
        n: inst.n(),
        set: best.set,
        value: best.value,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub method: &'static str,
    pub value: f64,
    /// `value / upper bound`.
    pub ratio_to_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio_to_exact: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub n: usize,
    pub rank: usize,
    pub upper_bound: f64,
    pub fractional_value: f64,
    pub guarantee_satisfied: bool,
    pub rows: Vec<CompareRow>,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        1.0
    }
}

pub fn compare(inst: Instance, cfg: &SolveConfig) -> Result<CompareReport, CliError> {
    let n = inst.n();
    let exact = if n <= BRUTE_FORCE_MAX {
        Some(brute_force_opt(&inst)?.value)
    } else {
        None
    };
    let report = solve(
        inst,
        &SolveConfig {
            exact: false,
            trace: false,
            ..cfg.clone()
        },
    )?;
    let ub = report.opt_upper_bound;
    let mut raw = vec![
        ("relaxation_upper_bound", ub),
        ("fractional", report.x_star_value),
        ("chain_rounding", report.value),
        ("local_search", report.baselines.local_search),
        ("greedy", report.baselines.greedy),
    ];
    if let Some(e) = exact {
        raw.push(("exact", e));
    }
    let rows = raw
        .into_iter()
        .map(|(method, value)| CompareRow {
            method,
            value,
            ratio_to_bound: ratio(value, ub),
            ratio_to_exact: exact.map(|e| ratio(value, e)),
        })
        .collect();
    Ok(CompareReport {
        n,
        rank: report.rank,
        upper_bound: ub,
        fractional_value: report.x_star_value,
        guarantee_satisfied: report.bounds.guarantee_satisfied,
        rows,
    })
}

impl CompareReport {
    pub fn table(&self) -> String {
        let mut s = format!("{:<24} {:>16} {:>10} {:>10}\n", "method", "value", "/bound", "/exact");
        for r in &self.rows {
            let exact = r.ratio_to_exact.map_or("-".to_string(), |v| format!("{v:.6}"));
            s += &format!(
                "{:<24} {:>16.6} {:>10.6} {:>10}\n",
                r.method, r.value, r.ratio_to_bound, exact
            );
        }
        s += &format!("guarantee satisfied: {}\n", self.guarantee_satisfied);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use divmax_core::lab;

    #[test]
    fn integrality_gap_report() {
        let inst = lab::integrality_gap(4, 2).unwrap().build().unwrap();
        let r = solve(
            inst,
            &SolveConfig {
                trace: true,
                threads: Some(2),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        assert!((r.x_star_value - 3.0).abs() <= 1e-6);
        assert_eq!(r.value, 2.0);
        assert_eq!(r.basis.len(), 2);
        assert!(r.bounds.guarantee_satisfied && r.bounds.basis_independent && r.bounds.step_bounds_satisfied);
        assert_eq!(r.rounding.steps.as_ref().unwrap().len(), r.rounding.iterations);
        assert_eq!(r.baselines.exact, Some(2.0));
        let mut csv = Vec::new();
        r.write_slices_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("alpha,value,gap,upper_bound,iterations,converged\n"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let g = lab::random_points(
            10,
            2,
            lab::PointCloud::Gaussian,
            divmax_core::geometry::PointMetric::L2,
            &lab::MatroidChoice::Uniform { k: 4 },
            5,
        )
        .unwrap();
        let one = solve(
            g.build().unwrap(),
            &SolveConfig {
                threads: Some(1),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        let many = solve(
            g.build().unwrap(),
            &SolveConfig {
                threads: Some(4),
                ..SolveConfig::default()
            },
        )
        .unwrap();
        assert_eq!(one.basis, many.basis);
        assert_eq!(one.x_star, many.x_star);
    }

    #[test]
    fn compare_ratios_follow_raw_values() {
        let inst = lab::integrality_gap(6, 3).unwrap().build().unwrap();
        let c = compare(inst, &SolveConfig::default()).unwrap();
        for r in &c.rows {
            assert!((r.ratio_to_bound - r.value / c.upper_bound).abs() < 1e-12);
        }
        assert!(c.table().contains("chain_rounding"));
    }
}
