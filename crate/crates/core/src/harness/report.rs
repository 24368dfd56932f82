//! Experiment reports with normal-approximation confidence intervals.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    /// `successes / trials`.
    Rate,
    /// `|2 · successes / trials − 1|`, successes being correct guesses.
    Advantage,
    /// Worst per-group violation fraction.
    MaxViolation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    AtLeast,
    AtMost,
    /// The interval contains the bound.
    Contains,
    /// The point estimate equals the bound; the interval is ignored.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportVerdict {
    Pass,
    Fail,
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub name: String,
    pub metric: Metric,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_halfwidth: f64,
    pub z: f64,
    pub analytic_bound: Option<f64>,
    pub bound_kind: Option<BoundKind>,
    pub verdict: ReportVerdict,
}

pub fn wald_halfwidth(p: f64, trials: usize, z: f64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    z * (p * (1.0 - p) / trials as f64).sqrt()
}

impl ExperimentReport {
    fn raw(metric: Metric, trials: usize, successes: usize, rate: f64, ci_halfwidth: f64) -> Self {
        assert!(successes <= trials, "{successes} successes in {trials} trials");
        Self {
            name: String::new(),
            metric,
            trials,
            successes,
            rate,
            ci_halfwidth,
            z: Z_99,
            analytic_bound: None,
            bound_kind: None,
            verdict: ReportVerdict::Informational,
        }
    }

    pub fn rate(trials: usize, successes: usize) -> Self {
        let p = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        Self::raw(Metric::Rate, trials, successes, p, wald_halfwidth(p, trials, Z_99))
    }

    pub fn advantage(trials: usize, correct: usize) -> Self {
        let p = if trials == 0 {
            0.5
        } else {
            correct as f64 / trials as f64
        };
        Self::raw(
            Metric::Advantage,
            trials,
            correct,
            (2.0 * p - 1.0).abs(),
            2.0 * wald_halfwidth(p, trials, Z_99),
        )
    }

    /// `violations` out of `trials` in total; `worst` of `group_size` in
    /// the worst group.
    pub fn max_violation(trials: usize, violations: usize, worst: usize, group_size: usize) -> Self {
        let p = if group_size == 0 {
            0.0
        } else {
            worst as f64 / group_size as f64
        };
        Self::raw(
            Metric::MaxViolation,
            trials,
            violations,
            p,
            wald_halfwidth(p, group_size, Z_99),
        )
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Rescales the interval to a different normal quantile.
    pub fn with_z(mut self, z: f64) -> Self {
        self.ci_halfwidth *= z / self.z;
        self.z = z;
        self.rejudge()
    }

    pub fn with_bound(mut self, kind: BoundKind, bound: f64) -> Self {
        self.bound_kind = Some(kind);
        self.analytic_bound = Some(bound);
        self.rejudge()
    }

    /// Attaches a bound for display only.
    pub fn with_reference(mut self, bound: f64) -> Self {
        self.analytic_bound = Some(bound);
        self
    }

    fn rejudge(mut self) -> Self {
        let (Some(kind), Some(b)) = (self.bound_kind, self.analytic_bound) else {
            return self;
        };
        let (r, h) = (self.rate, self.ci_halfwidth);
        let ok = match kind {
            BoundKind::AtLeast => r + h >= b,
            BoundKind::AtMost => r - h <= b,
            BoundKind::Contains => r - h <= b && b <= r + h,
            BoundKind::Exact => r == b,
        };
        self.verdict = if ok { ReportVerdict::Pass } else { ReportVerdict::Fail };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != ReportVerdict::Fail
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// Fixed-width plain-text summary.
pub fn render_table(reports: &[ExperimentReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(0).max(10);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<width$}  {:>8}  {:>9}  {:>9}  {:>9}  {:<8}  verdict",
        "experiment", "trials", "estimate", "±ci", "bound", "kind"
    );
    for r in reports {
        let bound = r.analytic_bound.map_or("-".to_string(), |b| format!("{b:.5}"));
        let kind = match r.bound_kind {
            None => "-",
            Some(BoundKind::AtLeast) => ">=",
            Some(BoundKind::AtMost) => "<=",
            Some(BoundKind::Contains) => "contains",
            Some(BoundKind::Exact) => "==",
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>9.5}  {:>9.5}  {:>9}  {:<8}  {:?}",
            r.name, r.trials, r.rate, r.ci_halfwidth, bound, kind, r.verdict
        );
    }
    out
}
