//! Shot-level simulation of the two Hadamard-test circuits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::variance::{moments, VarianceCost};
use super::{EstimateReport, Mode};
use crate::densop::DensityMatrix;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Total shot budget, split evenly between numerator and denominator, and
/// the RNG coordinates `(seed, stream)` that make a run reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotPlan {
    pub total_shots: u64,
    pub seed: u64,
    pub stream: u64,
}

impl ShotPlan {
    pub fn per_circuit(&self) -> u64 {
        self.total_shots / 2
    }
}

/// Mean and unbiased variance of `m` ±1 outcomes with success probability
/// `(1 + expectation)/2`.
fn sample_pm1(rng: &mut ChaCha8Rng, m: u64, expectation: f64) -> Result<(f64, f64)> {
    let prob = ((1.0 + expectation) / 2.0).clamp(0.0, 1.0);
    let dist = Binomial::new(m, prob).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let plus = dist.sample(rng) as f64;
    let mf = m as f64;
    let mean = (2.0 * plus - mf) / mf;
    let var = if m > 1 { (1.0 - mean * mean) * mf / (mf - 1.0) } else { 0.0 };
    Ok((mean, var.max(0.0)))
}

/// Samples both circuits and reports the ratio estimate. `bias` and `mse`
/// use the exact ratio the protocol converges to, measured against
/// `reference`; `variance` is the empirical delta-method estimate.
pub fn shot_simulate(
    rho: &DensityMatrix,
    p: &PauliString,
    n: u32,
    mode: Mode<'_>,
    plan: ShotPlan,
    reference: f64,
) -> Result<EstimateReport> {
    if plan.total_shots < 2 {
        return Err(Error::InvalidArgument("at least one shot per circuit is required".into()));
    }
    let (t1, t2) = moments(rho, p, n, mode)?;
    let exact = VarianceCost::from_moments(t1, t2)?;
    let m = plan.per_circuit();
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    rng.set_stream(plan.stream);
    let (mean_num, var_num) = sample_pm1(&mut rng, m, t1)?;
    let (mean_den, var_den) = sample_pm1(&mut rng, m, t2)?;
    if mean_den <= 0.0 {
        return Err(Error::DenominatorEstimateZero(mean_den));
    }
    let value = mean_num / mean_den;
    let variance = var_num / mean_den.powi(2) + mean_num.powi(2) * var_den / mean_den.powi(4);
    let bias = exact.ratio() - reference;
    Ok(EstimateReport {
        value,
        variance,
        cost: exact.cost,
        bias,
        mse: super::mse(bias, variance, m),
        n_copies: n,
        n_shot: m,
    })
}
