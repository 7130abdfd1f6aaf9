//! Least-squares fits on transformed data.
//!
//! The decay helpers drop the first [`TRANSIENT_POINTS`] samples, which sit in
//! the short-distance regime before the asymptotic form sets in.

use crate::error::{Error, Result};

pub const TRANSIENT_POINTS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares `y ≈ slope·x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!("a line fit needs at least 2 points, got {n}")));
    }
    if let Some(v) = xs.iter().chain(ys).find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {v}")));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit { slope, intercept, r_squared, points: n })
}

fn logs(vs: &[f64], what: &str) -> Result<Vec<f64>> {
    vs.iter()
        .map(|&v| if v > 0.0 { Ok(v.ln()) } else { Err(Error::InvalidArgument(format!("{what} must be positive, got {v}"))) })
        .collect()
}

fn skip_transient<'a>(xs: &'a [f64], ys: &'a [f64]) -> Result<(&'a [f64], &'a [f64])> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch { expected: xs.len(), got: ys.len() });
    }
    if xs.len() < TRANSIENT_POINTS + 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least {} points, got {}",
            TRANSIENT_POINTS + 2,
            xs.len()
        )));
    }
    Ok((&xs[TRANSIENT_POINTS..], &ys[TRANSIENT_POINTS..]))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// `y ∝ x^{−exponent}`.
    pub exponent: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

pub fn power_law_fit(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    let (xs, ys) = skip_transient(xs, ys)?;
    let line = linear_fit(&logs(xs, "abscissa")?, &logs(ys, "ordinate")?)?;
    Ok(PowerLawFit { exponent: -line.slope, prefactor: line.intercept.exp(), r_squared: line.r_squared })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    /// `y ∝ e^{−x/ξ}`.
    pub correlation_length: f64,
    pub prefactor: f64,
    pub r_squared: f64,
}

pub fn exponential_fit(xs: &[f64], ys: &[f64]) -> Result<ExponentialFit> {
    let (xs, ys) = skip_transient(xs, ys)?;
    let line = linear_fit(xs, &logs(ys, "ordinate")?)?;
    Ok(ExponentialFit { correlation_length: -1.0 / line.slope, prefactor: line.intercept.exp(), r_squared: line.r_squared })
}
