//! Exact Curie-Weiss sampling through the auxiliary-variable representation.
//!
//! For `Q = theta/n` off the diagonal with `theta > 0`, a Hubbard-
//! Stratonovich decoupling writes the Gibbs measure as a mixture: an
//! auxiliary scalar `Z` has density proportional to `exp(-f(z))` with
//!
//! ```text
//! f(z) = n theta z^2 / 2 - sum_i log cosh(theta z + mu_i),
//! ```
//!
//! and given `Z = z` the spins are independent with
//! `P(X_i = +1) = (1 + tanh(mu_i + theta z)) / 2`. Sampling `Z` by inverse
//! CDF on a dense grid and then the spins conditionally is exact up to grid
//! resolution; the grid is chosen so the truncated tails carry relative mass
//! below `e^{-40}`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{SignalVector, SpinConfiguration};
use crate::theory;

const GRID_POINTS: usize = 4096;
/// The grid is widened until the potential at both ends exceeds its minimum
/// by this much, so each truncated tail weighs at most `e^{-40}` relative to
/// the mode.
const TAIL_LOG_WEIGHT: f64 = 40.0;

/// Discretized law of the auxiliary variable: a dense grid with a
/// piecewise-linear inverse CDF.
#[derive(Clone, Debug)]
pub struct AuxGrid {
    z: Vec<f64>,
    potential: Vec<f64>,
    cdf: Vec<f64>,
}

impl AuxGrid {
    /// Tabulate the auxiliary density for `(n, theta, mu)`; requires `theta > 0`.
    pub fn build(n: usize, theta: f64, mu: &SignalVector) -> Result<AuxGrid> {
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::SamplerNotApplicable(format!(
                "auxiliary-variable sampler requires theta > 0, got {theta}"
            )));
        }
        if mu.n() != n {
            return Err(Error::invalid(format!(
                "signal has {} sites but n = {n}",
                mu.n()
            )));
        }
        if n < 2 {
            return Err(Error::invalid(format!("need n >= 2, got {n}")));
        }
        // Start from the spontaneous magnetization (the mode location at
        // mu = 0) plus unit padding, and double until both tails are dead.
        let m0 = theory::solve_spontaneous_magnetization(theta)?.root;
        let mut z_star = m0.abs() + 1.0;
        for _ in 0..64 {
            let (z, potential) = tabulate(n, theta, mu, z_star);
            let fmin = potential.iter().cloned().fold(f64::INFINITY, f64::min);
            if potential[0] - fmin >= TAIL_LOG_WEIGHT
                && potential[GRID_POINTS - 1] - fmin >= TAIL_LOG_WEIGHT
            {
                let cdf = trapezoid_cdf(&potential, fmin);
                return Ok(AuxGrid { z, potential, cdf });
            }
            z_star *= 2.0;
        }
        Err(Error::invalid(
            "auxiliary grid failed to localize the density".to_string(),
        ))
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.z[0], self.z[GRID_POINTS - 1])
    }

    pub fn grid(&self) -> &[f64] {
        &self.z
    }

    /// Potential values `f(z_k)` on the grid.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Normalized cumulative distribution on the grid; starts at 0, ends at 1.
    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    /// Inverse-CDF draw with linear interpolation inside grid cells.
    pub fn sample_z<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>();
        let idx = self.cdf.partition_point(|&c| c < u);
        if idx == 0 {
            return self.z[0];
        }
        let idx = idx.min(GRID_POINTS - 1);
        let span = self.cdf[idx] - self.cdf[idx - 1];
        if span <= 0.0 {
            return self.z[idx];
        }
        let frac = (u - self.cdf[idx - 1]) / span;
        self.z[idx - 1] + frac * (self.z[idx] - self.z[idx - 1])
    }
}

fn tabulate(n: usize, theta: f64, mu: &SignalVector, z_star: f64) -> (Vec<f64>, Vec<f64>) {
    let step = 2.0 * z_star / (GRID_POINTS - 1) as f64;
    let z: Vec<f64> = (0..GRID_POINTS).map(|k| -z_star + k as f64 * step).collect();
    let potential: Vec<f64> = z.iter().map(|&zk| theory::aux_potential(zk, n, theta, mu)).collect();
    (z, potential)
}

fn trapezoid_cdf(potential: &[f64], fmin: f64) -> Vec<f64> {
    let w: Vec<f64> = potential.iter().map(|&f| (-(f - fmin)).exp()).collect();
    let mut cum = vec![0.0f64; w.len()];
    for k in 1..w.len() {
        // Uniform grid: the constant cell width cancels in the normalization.
        cum[k] = cum[k - 1] + 0.5 * (w[k - 1] + w[k]);
    }
    let total = cum[w.len() - 1];
    for c in cum.iter_mut() {
        *c /= total;
    }
    cum
}

/// Exact Curie-Weiss sampler: reusable grid plus conditional spin draws.
#[derive(Clone, Debug)]
pub struct CurieWeissSampler {
    n: usize,
    theta: f64,
    mu: SignalVector,
    grid: AuxGrid,
}

impl CurieWeissSampler {
    pub fn new(n: usize, theta: f64, mu: &SignalVector) -> Result<Self> {
        let grid = AuxGrid::build(n, theta, mu)?;
        Ok(CurieWeissSampler { n, theta, mu: mu.clone(), grid })
    }

    pub fn grid(&self) -> &AuxGrid {
        &self.grid
    }

    /// Draw one configuration.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        self.draw_with_aux(rng).0
    }

    /// Draw a configuration together with the auxiliary variable that
    /// generated it (needed by checks of the conditional representation).
    pub fn draw_with_aux<R: Rng + ?Sized>(&self, rng: &mut R) -> (SpinConfiguration, f64) {
        let z = self.grid.sample_z(rng);
        // Only two distinct conditional probabilities exist: on and off the
        // signal support.
        let p_signal = 0.5 * (1.0 + (self.theta * z + self.mu.strength()).tanh());
        let p_null = 0.5 * (1.0 + (self.theta * z).tanh());
        let support = self.mu.support();
        let mut next_support = 0usize;
        let spins = (0..self.n)
            .map(|i| {
                let on_signal = next_support < support.len() && support[next_support] == i;
                if on_signal {
                    next_support += 1;
                }
                let p = if on_signal { p_signal } else { p_null };
                if rng.random::<f64>() < p {
                    1i8
                } else {
                    -1i8
                }
            })
            .collect();
        (SpinConfiguration::from_unchecked(spins), z)
    }
}

/// One draw of the auxiliary variable alone (builds a fresh grid; use
/// [`AuxGrid`] directly for repeated draws).
pub fn sample_aux_z<R: Rng + ?Sized>(
    n: usize,
    theta: f64,
    mu: &SignalVector,
    rng: &mut R,
) -> Result<f64> {
    Ok(AuxGrid::build(n, theta, mu)?.sample_z(rng))
}

/// One exact Curie-Weiss draw (builds a fresh sampler; use
/// [`CurieWeissSampler`] for repeated draws).
pub fn sample_curie_weiss<R: Rng + ?Sized>(
    n: usize,
    theta: f64,
    mu: &SignalVector,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    Ok(CurieWeissSampler::new(n, theta, mu)?.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_signal, Placement};
    use crate::rng;

    #[test]
    fn grid_cdf_is_a_valid_distribution() {
        for (theta, s, b) in [(0.5, 0, 0.0), (1.0, 3, 0.7), (1.5, 10, 0.3)] {
            let mu = make_signal(100, s, b, Placement::Prefix, None).unwrap();
            let grid = AuxGrid::build(100, theta, &mu).unwrap();
            let cdf = grid.cdf();
            assert_eq!(cdf[0], 0.0);
            assert!((cdf[cdf.len() - 1] - 1.0).abs() < 1e-12);
            assert!(cdf.windows(2).all(|w| w[1] >= w[0]));
            let (lo, hi) = grid.domain();
            assert!(lo < 0.0 && hi > 0.0);
            // Tails are dead by construction.
            let fmin = grid.potential().iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(grid.potential()[0] - fmin >= TAIL_LOG_WEIGHT);
        }
    }

    #[test]
    fn supercritical_grid_covers_both_wells() {
        // theta = 1.5 at mu = 0: the density is bimodal at roughly +-0.8586.
        let grid = AuxGrid::build(400, 1.5, &SignalVector::null(400)).unwrap();
        let (lo, hi) = grid.domain();
        assert!(lo < -0.86 && hi > 0.86);
        let mut rng = rng::stream(3, rng::role::VERIFY, 0);
        let draws: Vec<f64> = (0..4000).map(|_| grid.sample_z(&mut rng)).collect();
        let frac_positive = draws.iter().filter(|&&z| z > 0.0).count() as f64 / 4000.0;
        // Symmetric two-well density: both signs occur in fair proportion.
        assert!((frac_positive - 0.5).abs() < 0.05, "frac = {frac_positive}");
        // Draws concentrate near the wells, not near zero.
        let near_zero = draws.iter().filter(|&&z| z.abs() < 0.3).count() as f64 / 4000.0;
        assert!(near_zero < 0.01, "near zero: {near_zero}");
    }

    #[test]
    fn rejects_non_positive_theta() {
        assert!(AuxGrid::build(50, 0.0, &SignalVector::null(50)).is_err());
        assert!(AuxGrid::build(50, -0.5, &SignalVector::null(50)).is_err());
        assert!(CurieWeissSampler::new(50, -1.0, &SignalVector::null(50)).is_err());
    }

    #[test]
    fn draws_are_seed_deterministic() {
        let mu = make_signal(60, 4, 0.5, Placement::Prefix, None).unwrap();
        let sampler = CurieWeissSampler::new(60, 0.8, &mu).unwrap();
        let a = sampler.draw(&mut rng::stream(11, rng::role::VERIFY, 5));
        let b = sampler.draw(&mut rng::stream(11, rng::role::VERIFY, 5));
        assert_eq!(a, b);
    }

    #[test]
    fn signal_sites_lean_positive() {
        // Strong signal on half the sites: conditional probabilities differ
        // on and off the support, and the signal half should dominate.
        let mu = make_signal(40, 20, 1.5, Placement::Prefix, None).unwrap();
        let sampler = CurieWeissSampler::new(40, 0.5, &mu).unwrap();
        let mut rng = rng::stream(2, rng::role::VERIFY, 0);
        let mut on = 0i64;
        let mut off = 0i64;
        for _ in 0..2000 {
            let x = sampler.draw(&mut rng);
            for i in 0..20 {
                on += x.spin(i) as i64;
                off += x.spin(20 + i) as i64;
            }
        }
        assert!(on > 20_000, "signal half total {on}");
        assert!(off.abs() < on / 2, "null half total {off}");
    }
}
