//! Brute-force enumeration of small systems.
//!
//! For `n <= 20` we walk all `2^n` configurations in Gray-code order,
//! maintaining the local fields incrementally (one spin flips per step, so
//! the update is O(n) and the whole walk O(2^n * n)). The result caches the
//! log-partition function, the exact distribution of the total spin, and a
//! per-configuration CDF for inverse-CDF sampling. This is the ground truth
//! every approximate sampler is checked against.

use rand::Rng;

use crate::error::{Error, Result};
use crate::model::{CouplingMatrix, SignalVector, SpinConfiguration, ENUMERATION_LIMIT};

/// Exact finite-system quantities produced by [`enumerate_model`].
#[derive(Clone, Debug)]
pub struct ExactModel {
    n: usize,
    log_partition: f64,
    /// `pmf[k]` = probability of exactly `k` sites at `+1`.
    pmf: Vec<f64>,
    mean_total_spin: f64,
    var_total_spin: f64,
    /// Cumulative probabilities over configuration bitmasks `0..2^n`;
    /// bit `i` set means spin `i` is `+1`. Last entry is exactly 1.
    cdf: Vec<f64>,
}

/// Enumerate the Gibbs measure for `(Q, mu)` exactly.
pub fn enumerate_model(q: &CouplingMatrix, mu: &SignalVector) -> Result<ExactModel> {
    let n = q.n();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLargeToEnumerate { n, limit: ENUMERATION_LIMIT });
    }
    if mu.n() != n {
        return Err(Error::invalid(format!(
            "signal has {} sites but coupling has {n}",
            mu.n()
        )));
    }
    let size = 1usize << n;
    let mu_dense = mu.to_dense();

    // State for the Gray-code walk, starting at the all-minus configuration.
    let mut x = vec![-1.0f64; n];
    let mut fields: Vec<f64> = (0..n)
        .map(|i| q.row(i).iter().zip(x.iter()).map(|(&a, &b)| a * b).sum())
        .collect();
    let mut mu_dot: f64 = mu_dense.iter().map(|v| -v).sum();

    let mut logw = vec![0.0f64; size];
    let energy = |x: &[f64], fields: &[f64], mu_dot: f64| -> f64 {
        let quad: f64 = x.iter().zip(fields.iter()).map(|(&a, &b)| a * b).sum();
        0.5 * quad + mu_dot
    };
    logw[0] = energy(&x, &fields, mu_dot);
    let mut gray = 0usize;
    for k in 1..size {
        let i = k.trailing_zeros() as usize;
        gray ^= 1 << i;
        x[i] = -x[i];
        let delta = 2.0 * x[i];
        // Q has zero diagonal, so fields[i] needs no correction.
        let row = q.row(i);
        for (f, &qji) in fields.iter_mut().zip(row.iter()) {
            *f += delta * qji;
        }
        mu_dot += delta * mu_dense[i];
        logw[gray] = energy(&x, &fields, mu_dot);
    }

    let max_logw = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0f64;
    let mut pmf = vec![0.0f64; n + 1];
    for (g, &lw) in logw.iter().enumerate() {
        let w = (lw - max_logw).exp();
        total += w;
        pmf[g.count_ones() as usize] += w;
    }
    for p in pmf.iter_mut() {
        *p /= total;
    }
    // Same accumulation order as `total`, so the final entry is exactly 1.
    let mut cdf = vec![0.0f64; size];
    let mut acc = 0.0f64;
    for (g, &lw) in logw.iter().enumerate() {
        acc += (lw - max_logw).exp();
        cdf[g] = acc / total;
    }

    let mut mean = 0.0f64;
    let mut second = 0.0f64;
    for (k, &p) in pmf.iter().enumerate() {
        let t = (2 * k as i64 - n as i64) as f64;
        mean += t * p;
        second += t * t * p;
    }

    Ok(ExactModel {
        n,
        log_partition: max_logw + total.ln(),
        pmf,
        mean_total_spin: mean,
        var_total_spin: second - mean * mean,
        cdf,
    })
}

/// Draw one configuration from an enumerated model by inverse CDF.
pub fn sample_from_exact<R: Rng + ?Sized>(model: &ExactModel, rng: &mut R) -> SpinConfiguration {
    model.sample(rng)
}

impl ExactModel {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `log Z(Q, mu)`.
    pub fn log_partition(&self) -> f64 {
        self.log_partition
    }

    /// Distribution of the number of `+1` sites, indexed `0..=n`.
    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// Distribution of the total spin `T = 2k - n`, as `(t, probability)` pairs.
    pub fn magnetization_pmf(&self) -> Vec<(i64, f64)> {
        self.pmf
            .iter()
            .enumerate()
            .map(|(k, &p)| (2 * k as i64 - self.n as i64, p))
            .collect()
    }

    pub fn mean_total_spin(&self) -> f64 {
        self.mean_total_spin
    }

    pub fn var_total_spin(&self) -> f64 {
        self.var_total_spin
    }

    /// Probability of one concrete configuration bitmask.
    fn config_probability(&self, g: usize) -> f64 {
        if g == 0 {
            self.cdf[0]
        } else {
            self.cdf[g] - self.cdf[g - 1]
        }
    }

    /// Exact expectation of an arbitrary functional (test oracle; O(2^n * n)).
    pub fn expectation<F: Fn(&SpinConfiguration) -> f64>(&self, f: F) -> f64 {
        let mut acc = 0.0;
        for g in 0..self.cdf.len() {
            acc += self.config_probability(g) * f(&decode(g, self.n));
        }
        acc
    }

    /// Inverse-CDF draw over all `2^n` configurations.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        let u = rng.random::<f64>();
        let g = self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1);
        decode(g, self.n)
    }
}

fn decode(g: usize, n: usize) -> SpinConfiguration {
    SpinConfiguration::from_unchecked(
        (0..n).map(|i| if g >> i & 1 == 1 { 1i8 } else { -1i8 }).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_signal, Placement};
    use crate::rng;

    #[test]
    fn two_site_curie_weiss_partition_function() {
        // Z = 2 e^{1/2} + 2 e^{-1/2} = 4 cosh(1/2).
        let q = CouplingMatrix::curie_weiss(2, 1.0).unwrap();
        let m = enumerate_model(&q, &SignalVector::null(2)).unwrap();
        assert!((m.log_partition() - 1.506408868078168).abs() < 1e-12);
        assert!((m.log_partition() - (4.0 * 0.5f64.cosh()).ln()).abs() < 1e-12);
        // Symmetric model: T = -2, 0, +2 with probabilities e^{1/2}, 2e^{-1/2}, e^{1/2} over Z.
        let z = 4.0 * 0.5f64.cosh();
        assert!((m.pmf()[0] - 0.5f64.exp() / z).abs() < 1e-14);
        assert!((m.pmf()[1] - 2.0 * (-0.5f64).exp() / z).abs() < 1e-14);
        assert!(m.mean_total_spin().abs() < 1e-14);
    }

    #[test]
    fn three_site_curie_weiss_closed_form() {
        // n=3, theta=0.6: Z = 2e^{0.9} + 6e^{-0.1}; P(T=3), P(T=1), E T^2 follow.
        let q = CouplingMatrix::curie_weiss(3, 0.6).unwrap();
        let m = enumerate_model(&q, &SignalVector::null(3)).unwrap();
        assert!((m.log_partition() - 8.556622119248908f64.ln()).abs() < 1e-12);
        assert!((m.pmf()[3] - 0.21294837787583082).abs() < 1e-12);
        assert!((m.pmf()[2] - 0.2870516221241692).abs() < 1e-12);
        let second = m.var_total_spin() + m.mean_total_spin().powi(2);
        assert!((second - 4.407174046013292).abs() < 1e-10);
    }

    #[test]
    fn cycle_partition_function() {
        // n=3 cycle at theta=0.5: Z = 2e^{3/4} + 6e^{-1/4}.
        let q = CouplingMatrix::cycle(3, 0.5).unwrap();
        let m = enumerate_model(&q, &SignalVector::null(3)).unwrap();
        assert!((m.log_partition() - 8.906804731653779f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn independent_sites_with_field() {
        // Q = 0, mu_i = b: sites are i.i.d. with P(+1) = e^b / (2 cosh b),
        // so the +1 count is Binomial(n, p).
        let n = 6;
        let b = 0.7;
        let q = CouplingMatrix::custom(n, vec![0.0; n * n]).unwrap();
        let mu = SignalVector::uniform(n, b);
        let m = enumerate_model(&q, &mu).unwrap();
        let p = b.exp() / (2.0 * b.cosh());
        for k in 0..=n {
            let binom = (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
                * p.powi(k as i32)
                * (1.0 - p).powi((n - k) as i32);
            assert!((m.pmf()[k] - binom).abs() < 1e-12, "k = {k}");
        }
        assert!((m.log_partition() - n as f64 * (2.0 * b.cosh()).ln()).abs() < 1e-12);
    }

    #[test]
    fn signal_shifts_mean_upward() {
        let q = CouplingMatrix::curie_weiss(8, 0.5).unwrap();
        let null = enumerate_model(&q, &SignalVector::null(8)).unwrap();
        let mu = make_signal(8, 2, 0.8, Placement::Prefix, None).unwrap();
        let alt = enumerate_model(&q, &mu).unwrap();
        assert!(null.mean_total_spin().abs() < 1e-12);
        assert!(alt.mean_total_spin() > 0.1);
    }

    #[test]
    fn sampling_matches_pmf() {
        let q = CouplingMatrix::cycle(6, 0.8).unwrap();
        let mu = make_signal(6, 1, 0.5, Placement::Prefix, None).unwrap();
        let m = enumerate_model(&q, &mu).unwrap();
        let mut rng = rng::stream(7, rng::role::VERIFY, 0);
        let draws = 40_000;
        let mut counts = vec![0usize; 7];
        for _ in 0..draws {
            let x = m.sample(&mut rng);
            counts[x.spins().iter().filter(|&&s| s == 1).count()] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(m.pmf().iter())
            .map(|(&c, &p)| (c as f64 / draws as f64 - p).abs())
            .sum::<f64>()
            / 2.0;
        assert!(tv < 0.02, "tv = {tv}");
    }

    #[test]
    fn expectation_of_total_spin_matches_cached_mean() {
        let q = CouplingMatrix::curie_weiss(7, 1.2).unwrap();
        let mu = make_signal(7, 2, 0.4, Placement::Prefix, None).unwrap();
        let m = enumerate_model(&q, &mu).unwrap();
        let e = m.expectation(|x| x.total_spin() as f64);
        assert!((e - m.mean_total_spin()).abs() < 1e-10);
    }

    #[test]
    fn rejects_oversized_systems() {
        let q = CouplingMatrix::curie_weiss(21, 0.5).unwrap();
        assert!(matches!(
            enumerate_model(&q, &SignalVector::null(21)),
            Err(Error::TooLargeToEnumerate { .. })
        ));
    }
}
