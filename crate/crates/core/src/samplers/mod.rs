//! Samplers for Ising models.
//!
//! Three exact routes and one MCMC route:
//!
//! * [`enumerate_model`] / [`ExactModel`] — brute force for `n <= 20`; the
//!   ground truth everything else is validated against.
//! * [`CurieWeissSampler`] — exact draws for ferromagnetic Curie-Weiss models
//!   via the scalar auxiliary-variable representation.
//! * [`CycleSampler`] — exact draws on the cycle via conditioned
//!   forward-backward transfer recursions.
//! * [`GlauberSampler`] — heat-bath dynamics for arbitrary couplings
//!   (approximate: fixed burn-in from a random start).
//!
//! [`IndependentSampler`] covers the degenerate `Q = 0` case where spins are
//! independent coin flips tilted by the field.

mod aux;
mod cycle;
mod exact;
mod glauber;

pub use aux::{sample_aux_z, sample_curie_weiss, AuxGrid, CurieWeissSampler};
pub use cycle::{sample_cycle, CycleSampler};
pub use exact::{enumerate_model, sample_from_exact, ExactModel};
pub use glauber::{sample_glauber, GlauberConfig, GlauberSampler, Scan};

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{SignalVector, SpinConfiguration};

/// Independent spins: `P(X_i = +1) = (1 + tanh(mu_i)) / 2`. Exact for
/// `Q = 0` (equivalently theta = 0 in any of the structured families).
#[derive(Clone, Debug)]
pub struct IndependentSampler {
    p_plus: Vec<f64>,
}

impl IndependentSampler {
    pub fn new(n: usize, mu: &SignalVector) -> Result<Self> {
        if mu.n() != n {
            return Err(Error::invalid(format!(
                "signal has {} sites but n = {n}",
                mu.n()
            )));
        }
        if n == 0 {
            return Err(Error::invalid("need n >= 1".to_string()));
        }
        let p_plus = (0..n).map(|i| 0.5 * (1.0 + mu.field_at(i).tanh())).collect();
        Ok(IndependentSampler { p_plus })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        SpinConfiguration::from_unchecked(
            self.p_plus
                .iter()
                .map(|&p| if rng.random::<f64>() < p { 1i8 } else { -1i8 })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_signal, Placement};
    use crate::rng;

    #[test]
    fn independent_sampler_matches_coin_bias() {
        let mu = make_signal(4, 2, 1.0, Placement::Prefix, None).unwrap();
        let sampler = IndependentSampler::new(4, &mu).unwrap();
        let mut rng = rng::stream(1, rng::role::VERIFY, 0);
        let draws = 50_000;
        let mut plus = [0usize; 4];
        for _ in 0..draws {
            let x = sampler.draw(&mut rng);
            for i in 0..4 {
                if x.spin(i) == 1 {
                    plus[i] += 1;
                }
            }
        }
        let p_signal = 0.5 * (1.0 + 1.0f64.tanh());
        for i in 0..2 {
            assert!((plus[i] as f64 / draws as f64 - p_signal).abs() < 0.01);
        }
        for i in 2..4 {
            assert!((plus[i] as f64 / draws as f64 - 0.5).abs() < 0.01);
        }
    }
}
