//! Log-log order fitting and the convergence report every sweep emits.

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 3 points to fit an order, got {0}")]
    TooFewPoints(usize),
    #[error("error value at point {index} is not positive ({value})")]
    NonPositiveError { index: usize, value: f64 },
    #[error("parameter values must be positive and strictly monotone")]
    NotMonotone,
}

/// Least-squares line through `(ln param, ln error)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
}

/// Fits `error ≈ exp(intercept) · param^slope`.
///
/// Parameters must be positive and strictly monotone (increasing step counts
/// and decreasing step sizes are both accepted).
pub fn fit_order(points: &[(f64, f64)]) -> Result<OrderFit, FitError> {
    if points.len() < 3 {
        return Err(FitError::TooFewPoints(points.len()));
    }
    if let Some((index, &(_, value))) = points
        .iter()
        .enumerate()
        .find(|(_, (_, e))| !(*e > 0.0 && e.is_finite()))
    {
        return Err(FitError::NonPositiveError { index, value });
    }
    if points.iter().any(|(p, _)| !(*p > 0.0 && p.is_finite())) {
        return Err(FitError::NotMonotone);
    }
    let increasing = points.windows(2).all(|w| w[1].0 > w[0].0);
    let decreasing = points.windows(2).all(|w| w[1].0 < w[0].0);
    if !(increasing || decreasing) {
        return Err(FitError::NotMonotone);
    }

    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|(p, e)| (p.ln(), e.ln())).collect();
    let mean_x = logs.iter().map(|(x, _)| x).sum::<f64>() / n;
    let mean_y = logs.iter().map(|(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mean_x).powi(2)).sum();
    let sxy: f64 = logs
        .iter()
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = logs
        .iter()
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(OrderFit {
        slope,
        intercept,
        residual: (ss_res / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedOrder {
    pub slope: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub parameter: String,
    pub points: Vec<(f64, f64)>,
    /// `None` when the points cannot be fitted (e.g. an error is exactly zero).
    pub fit: Option<OrderFit>,
    pub expected: Option<ExpectedOrder>,
    pub pass: bool,
}

impl ConvergenceReport {
    pub fn new(
        parameter: impl Into<String>,
        points: Vec<(f64, f64)>,
        expected: Option<ExpectedOrder>,
    ) -> Self {
        let fit = fit_order(&points).ok();
        let pass = match (expected, fit) {
            (None, _) => true,
            (Some(exp), Some(fit)) => (fit.slope - exp.slope).abs() <= exp.tolerance,
            (Some(_), None) => false,
        };
        Self {
            parameter: parameter.into(),
            points,
            fit,
            expected,
            pass,
        }
    }

    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }

    pub fn max_error(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(0.0, f64::max)
    }

    /// `param,error` rows followed by `#` footer lines with the fit.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,error\n");
        for (p, e) in &self.points {
            let _ = writeln!(out, "{},{}", format_f64(*p), format_f64(*e));
        }
        let _ = writeln!(out, "# parameter={}", self.parameter);
        match self.fit {
            Some(fit) => {
                let _ = writeln!(
                    out,
                    "# slope={} intercept={} residual={}",
                    format_f64(fit.slope),
                    format_f64(fit.intercept),
                    format_f64(fit.residual)
                );
            }
            None => out.push_str("# slope=unavailable\n"),
        }
        if let Some(exp) = self.expected {
            let _ = writeln!(
                out,
                "# expected_slope={} tolerance={} pass={}",
                format_f64(exp.slope),
                format_f64(exp.tolerance),
                self.pass
            );
        }
        out
    }

    /// One-line human summary, e.g. for CLI pass/fail output.
    pub fn summary_line(&self) -> String {
        let slope = self
            .slope()
            .map(|s| format!("{s:.4}"))
            .unwrap_or_else(|| "n/a".into());
        match self.expected {
            Some(exp) => format!(
                "{} slope={} expected={}±{} {}",
                self.parameter,
                slope,
                exp.slope,
                exp.tolerance,
                if self.pass { "PASS" } else { "FAIL" }
            ),
            None => format!("{} slope={}", self.parameter, slope),
        }
    }
}

/// Fixed 17-significant-digit formatting used by every CSV writer.
pub fn format_f64(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else if value.is_nan() {
        "nan".to_string()
    } else if value > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_cubic_data() {
        let pts: Vec<_> = (0..5)
            .map(|j| {
                let p = 0.1 * 0.5f64.powi(j);
                (p, p.powi(3))
            })
            .collect();
        let fit = fit_order(&pts).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-10);
        assert!(fit.intercept.abs() < 1e-10);
        assert!(fit.residual < 1e-10);
    }

    #[test]
    fn exact_linear_data_increasing_params() {
        let pts: Vec<_> = [16.0, 32.0, 64.0, 128.0]
            .iter()
            .map(|&n| (n, 3.0 / n))
            .collect();
        let fit = fit_order(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            fit_order(&[(1.0, 1.0), (0.5, 0.5)]),
            Err(FitError::TooFewPoints(2))
        );
        assert!(matches!(
            fit_order(&[(1.0, 1.0), (0.5, 0.0), (0.25, 0.1)]),
            Err(FitError::NonPositiveError { index: 1, .. })
        ));
        assert_eq!(
            fit_order(&[(1.0, 1.0), (0.5, 0.5), (0.7, 0.1)]),
            Err(FitError::NotMonotone)
        );
    }

    #[test]
    fn report_pass_flag_and_csv_footer() {
        let pts: Vec<_> = (0..4)
            .map(|j| {
                let p = 0.1 * 0.5f64.powi(j);
                (p, 2.0 * p.powi(3))
            })
            .collect();
        let ok = ConvergenceReport::new(
            "eps",
            pts.clone(),
            Some(ExpectedOrder {
                slope: 3.0,
                tolerance: 0.2,
            }),
        );
        assert!(ok.pass);
        let bad = ConvergenceReport::new(
            "eps",
            pts,
            Some(ExpectedOrder {
                slope: 2.0,
                tolerance: 0.2,
            }),
        );
        assert!(!bad.pass);
        let csv = ok.to_csv();
        assert!(csv.starts_with("param,error\n"));
        assert!(csv.lines().any(|l| l.starts_with("# slope=")));
        assert!(csv.contains("pass=true"));
    }

    #[test]
    fn zero_error_gives_no_fit() {
        let r = ConvergenceReport::new("n", vec![(1.0, 0.0), (2.0, 0.0), (4.0, 0.0)], None);
        assert!(r.fit.is_none());
        assert!(r.pass);
    }

    #[test]
    fn float_format_is_seventeen_digits() {
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
        assert_eq!(format_f64(-0.1), "-1.0000000000000001e-1");
        assert_eq!(format_f64(f64::NAN), "nan");
    }
}
