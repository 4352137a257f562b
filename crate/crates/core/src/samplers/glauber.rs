//! Glauber dynamics for arbitrary couplings.
//!
//! Single-site heat-bath updates: site `i` is refreshed to `+1` with
//! probability `(1 + tanh(m_i(x) + mu_i)) / 2` where `m_i` is the local
//! field. The chain is reversible with the Gibbs measure as its stationary
//! law; a draw here is one chain run from a uniform random start for a fixed
//! number of burn-in sweeps, so unlike the enumeration / auxiliary-variable /
//! transfer samplers the output is only approximately stationary. Curie-Weiss
//! and cycle couplings get O(1)-per-update field maintenance; everything else
//! pays the dense O(n) per update.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{CouplingKind, CouplingMatrix, SignalVector, SpinConfiguration};

/// Order in which sites are refreshed within one sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scan {
    /// Sites 0, 1, ..., n-1 in order.
    Systematic,
    /// n independently uniform site choices per sweep.
    Random,
}

/// Chain-length / scan-order policy for [`GlauberSampler`].
#[derive(Clone, Copy, Debug)]
pub struct GlauberConfig {
    pub burn_in_sweeps: usize,
    pub scan: Scan,
}

impl GlauberConfig {
    /// Default burn-in for size `n`: `max(200, 20 * ceil(log2 n))` sweeps of
    /// systematic scan.
    pub fn default_for(n: usize) -> Self {
        let log2_ceil = (n.max(2) as f64).log2().ceil() as usize;
        GlauberConfig {
            burn_in_sweeps: (20 * log2_ceil).max(200),
            scan: Scan::Systematic,
        }
    }
}

/// Reusable Glauber chain for one `(Q, mu)` model.
#[derive(Clone, Debug)]
pub struct GlauberSampler {
    q: CouplingMatrix,
    mu_dense: Vec<f64>,
    config: GlauberConfig,
}

impl GlauberSampler {
    pub fn new(q: &CouplingMatrix, mu: &SignalVector, config: GlauberConfig) -> Result<Self> {
        if mu.n() != q.n() {
            return Err(Error::invalid(format!(
                "signal has {} sites but coupling has {}",
                mu.n(),
                q.n()
            )));
        }
        if config.burn_in_sweeps == 0 {
            return Err(Error::invalid("burn-in must be at least one sweep".to_string()));
        }
        Ok(GlauberSampler { q: q.clone(), mu_dense: mu.to_dense(), config })
    }

    pub fn config(&self) -> GlauberConfig {
        self.config
    }

    /// Run one fresh chain from a uniform random start and return its final
    /// state.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        self.draw_with_dense_field(&self.mu_dense, rng)
    }

    /// Like [`draw`](Self::draw), but with the stored field replaced by
    /// `mu`. Lets per-replicate signal policies reuse one prebuilt chain
    /// instead of cloning the coupling for every draw.
    pub fn draw_with_signal<R: Rng + ?Sized>(
        &self,
        mu: &SignalVector,
        rng: &mut R,
    ) -> Result<SpinConfiguration> {
        if mu.n() != self.q.n() {
            return Err(Error::invalid(format!(
                "signal has {} sites but coupling has {}",
                mu.n(),
                self.q.n()
            )));
        }
        Ok(self.draw_with_dense_field(&mu.to_dense(), rng))
    }

    fn draw_with_dense_field<R: Rng + ?Sized>(&self, mu: &[f64], rng: &mut R) -> SpinConfiguration {
        let n = self.q.n();
        let mut x: Vec<i8> =
            (0..n).map(|_| if rng.random_bool(0.5) { 1 } else { -1 }).collect();

        match self.q.kind() {
            CouplingKind::CurieWeiss => {
                let scale = self.q.theta() / n as f64;
                let mut total: i64 = x.iter().map(|&s| s as i64).sum();
                self.run(rng, n, |rng, x, i| {
                    let field = scale * (total - x[i] as i64) as f64;
                    let new = heat_bath(rng, field + mu[i]);
                    total += (new - x[i]) as i64;
                    x[i] = new;
                }, &mut x);
            }
            CouplingKind::Cycle => {
                let half = self.q.theta() / 2.0;
                self.run(rng, n, |rng, x, i| {
                    let left = x[(i + n - 1) % n] as f64;
                    let right = x[(i + 1) % n] as f64;
                    let new = heat_bath(rng, half * (left + right) + mu[i]);
                    x[i] = new;
                }, &mut x);
            }
            _ => {
                self.run(rng, n, |rng, x, i| {
                    let row = self.q.row(i);
                    let field: f64 =
                        row.iter().zip(x.iter()).map(|(&qij, &s)| qij * s as f64).sum();
                    let new = heat_bath(rng, field + mu[i]);
                    x[i] = new;
                }, &mut x);
            }
        }
        SpinConfiguration::new(x).expect("glauber state stays in {-1,+1}")
    }

    fn run<R: Rng + ?Sized, F: FnMut(&mut R, &mut [i8], usize)>(
        &self,
        rng: &mut R,
        n: usize,
        mut update: F,
        x: &mut [i8],
    ) {
        for _ in 0..self.config.burn_in_sweeps {
            match self.config.scan {
                Scan::Systematic => {
                    for i in 0..n {
                        update(rng, x, i);
                    }
                }
                Scan::Random => {
                    for _ in 0..n {
                        let i = rng.random_range(0..n);
                        update(rng, x, i);
                    }
                }
            }
        }
    }
}

#[inline]
fn heat_bath<R: Rng + ?Sized>(rng: &mut R, field: f64) -> i8 {
    let p_plus = 0.5 * (1.0 + field.tanh());
    if rng.random::<f64>() < p_plus {
        1
    } else {
        -1
    }
}

/// One Glauber draw (clones the coupling; use [`GlauberSampler`] for
/// repeated draws).
pub fn sample_glauber<R: Rng + ?Sized>(
    q: &CouplingMatrix,
    mu: &SignalVector,
    config: GlauberConfig,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    Ok(GlauberSampler::new(q, mu, config)?.draw(rng))
}
