//! Sharpness probes: drive an inequality's lhs/rhs ratio toward 1 along a
//! mollified extremizer sequence, and check the pointwise Hölder-equality
//! condition that the extremizers satisfy exactly.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::calculus;
use crate::functions::{central_axes, cutoff_extremizer, extremizer, CutoffFamily};
use crate::group::StratifiedGroup;
use crate::math;
use crate::quad::{DomainSpec, QuadratureSpec};
use crate::suite::{
    check_badiale_tarantello, check_ckn, check_hardy, check_weighted_hardy, CheckContext,
    InequalityCase, SuiteError,
};

/// One probe step.
#[derive(Clone, Copy, Debug)]
pub struct TraceEntry {
    pub j: usize,
    pub eps: f64,
    pub outer: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// lhs/rhs with the sharp constant folded into lhs, so 1 is sharp.
    pub ratio: f64,
    pub quad_err: f64,
}

/// The full trace of a probe.
#[derive(Clone, Debug)]
pub struct RatioTrace {
    pub entries: Vec<TraceEntry>,
    pub sharpness_tol: f64,
    /// Final ratio reached 1 - sharpness_tol.
    pub sharp_reached: bool,
    /// Ratios nondecreasing in j up to twice the quadrature error.
    pub monotone: bool,
    /// Some step failed to converge; the trace stops there.
    pub truncated: bool,
}

impl RatioTrace {
    pub fn final_ratio(&self) -> Option<f64> {
        self.entries.last().map(|e| e.ratio)
    }

    /// Largest amount by which any ratio exceeds 1 beyond twice its
    /// quadrature error; nonpositive when the inequality bounds the trace.
    pub fn max_excess(&self) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for e in &self.entries {
            let rel_err = if e.rhs.abs() > 0.0 {
                e.quad_err / e.rhs.abs()
            } else {
                0.0
            };
            worst = worst.max(e.ratio - 1.0 - 2.0 * rel_err);
        }
        worst
    }
}

/// Relative residual of the Hölder-equality condition
/// |p/(N-γ)|^p |∇_H g|^p / |x'|^{αp} = |g|^p / |x'|^{βp/(p-1)}
/// for the extremizer g at the point x.
pub fn equality_condition_residual(
    g: &StratifiedGroup,
    alpha: f64,
    beta: f64,
    p: f64,
    x: &[f64],
) -> Result<f64, SuiteError> {
    let n1 = g.n_first();
    let r = g.first_stratum_norm(x);
    if !(r > 0.0) {
        return Err(SuiteError::Config("x' = 0 is outside the domain".to_string()));
    }
    let n = n1 as f64;
    let gamma = alpha + beta + 1.0;
    let ext = extremizer(alpha, beta, p, n1, g.total_dim())
        .map_err(|e| SuiteError::Config(format!("{e}")))?;
    let grad = calculus::horizontal_gradient_norm(g, &ext, x)?;
    let value = ext.eval(x);
    let lhs = math::powf(p / math::abs(n - gamma), p) * math::powf(grad, p)
        / math::powf(r, alpha * p);
    let rhs = math::powf(math::abs(value), p) / math::powf(r, beta * p / (p - 1.0));
    Ok(math::abs(lhs - rhs) / math::abs(rhs).max(1e-300))
}

/// CKN-style parameters (α, β) of the supported probe cases.
fn probe_params(case: &InequalityCase) -> Result<(f64, f64, f64), SuiteError> {
    match *case {
        InequalityCase::Ckn { alpha, beta, p } => Ok((alpha, beta, p)),
        InequalityCase::WeightedHardy { alpha, p } => Ok((alpha, (alpha + 1.0) * (p - 1.0), p)),
        InequalityCase::Hardy { p } => Ok((0.0, p - 1.0, p)),
        InequalityCase::BadialeTarantello { alpha, beta, p, .. } => Ok((alpha, beta, p)),
        _ => Err(SuiteError::Config(format!(
            "sharpness probes cover ckn, weighted-hardy, hardy and badiale-tarantello; got {}",
            case.name()
        ))),
    }
}

/// Evaluate `case` on the cutoff extremizers for j = 1..j_max and record the
/// normalized ratios. `dom` must contain the largest member's support; the
/// per-step integration runs over that member's own box.
pub fn sharpness_probe(
    group: &StratifiedGroup,
    case: &InequalityCase,
    fam: &CutoffFamily,
    j_max: usize,
    sharpness_tol: f64,
    dom: &DomainSpec,
    quad: &QuadratureSpec,
) -> Result<RatioTrace, SuiteError> {
    let (alpha, beta, p) = probe_params(case)?;
    let (n_first, dim, bt) = match *case {
        InequalityCase::BadialeTarantello { n, n_first, .. } => (n_first, n, true),
        _ => (group.n_first(), group.total_dim(), false),
    };
    let n = n_first as f64;
    let gamma = alpha + beta + 1.0;
    if math::abs(gamma - n) < 1e-12 {
        return Err(SuiteError::Config(
            "γ = N has a degenerate constant; no sharpness probe".to_string(),
        ));
    }
    let axes: Vec<usize> = if bt {
        (n_first..dim).collect()
    } else {
        central_axes(group)
    };
    let mut entries = Vec::new();
    let mut truncated = false;
    for j in 1..=j_max {
        let f = cutoff_extremizer(alpha, beta, p, n_first, dim, &axes, fam, j)
            .map_err(|e| SuiteError::Config(format!("{e}")))?;
        let bounds = f
            .support()
            .bounds
            .clone()
            .expect("cutoff extremizers are compactly supported");
        if !f.support().contained_in(&dom.bounds) {
            return Err(SuiteError::Config(format!(
                "probe domain does not contain the step-{j} support; widen the box"
            )));
        }
        let step_dom = DomainSpec::new(bounds);
        let report = if bt {
            check_badiale_tarantello(dim, n_first, &f, alpha, beta, p, &step_dom, quad)?
        } else {
            let ctx = CheckContext::new(group, &step_dom, quad);
            match *case {
                InequalityCase::Hardy { .. } => check_hardy(&ctx, &f, p)?,
                InequalityCase::WeightedHardy { .. } => check_weighted_hardy(&ctx, &f, alpha, p)?,
                _ => check_ckn(&ctx, &f, alpha, beta, p)?,
            }
        };
        let entry = TraceEntry {
            j,
            eps: fam.eps(j),
            outer: fam.outer(j),
            lhs: report.lhs,
            rhs: report.rhs,
            ratio: if report.rhs.abs() > 0.0 {
                report.lhs / report.rhs
            } else {
                0.0
            },
            quad_err: report.quad_err,
        };
        entries.push(entry);
        if !report.converged {
            truncated = true;
            break;
        }
    }
    let mut monotone = true;
    for w in entries.windows(2) {
        let rel = 2.0 * (w[0].quad_err / w[0].rhs.abs().max(1e-300)
            + w[1].quad_err / w[1].rhs.abs().max(1e-300));
        if w[1].ratio + rel < w[0].ratio {
            monotone = false;
        }
    }
    let sharp_reached = entries
        .last()
        .map(|e| e.ratio >= 1.0 - sharpness_tol)
        .unwrap_or(false)
        && !truncated;
    Ok(RatioTrace {
        entries,
        sharpness_tol,
        sharp_reached,
        monotone,
        truncated,
    })
}
