//! Monte Carlo calibration and power/risk estimation.
//!
//! A [`ModelSpec`] bundles a coupling, a signal policy, and a sampler
//! backend. Calibration draws `m_null` null configurations, evaluates the
//! chosen statistic, and takes the `ceil((1-alpha) m_null)`-th ascending
//! order statistic as the critical value; the test rejects when a statistic
//! is `>=` that value (closed rejection region, so a `+inf` critical value
//! retains everything). Power and risk are estimated on fresh replicates.
//!
//! Replicates are embarrassingly parallel: replicate `i` always uses the
//! stream derived from `(seed, role, i)`, so estimates are identical for any
//! worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    make_signal, CouplingKind, CouplingMatrix, Placement, SignalVector, SpinConfiguration,
    ENUMERATION_LIMIT,
};
use crate::rng;
use crate::samplers::{
    enumerate_model, CurieWeissSampler, CycleSampler, ExactModel, GlauberConfig, GlauberSampler,
    IndependentSampler,
};
use crate::statistics::{evaluate_statistic, StatTag, StatisticKind};

/// Which sampling algorithm realizes a model. `Auto` picks the exact sampler
/// that fits the coupling: the auxiliary-variable representation for
/// ferromagnetic Curie-Weiss, transfer sampling for the cycle, independent
/// coins for zero coupling, enumeration for other couplings up to 14 sites,
/// and Glauber dynamics beyond that.
#[derive(Clone, Copy, Debug)]
pub enum SamplerBackend {
    Auto,
    Enumeration,
    CurieWeissAux,
    CycleTransfer,
    Glauber(GlauberConfig),
    Independent,
}

/// How the external field is chosen for each replicate.
#[derive(Clone, Debug)]
pub enum SignalPolicy {
    /// `mu = 0`.
    Null,
    /// One fixed signal vector shared by all replicates.
    Fixed(SignalVector),
    /// A fresh uniformly-placed (or prefix) support drawn per replicate from
    /// the replicate's own stream.
    Resampled { s: usize, strength: f64, placement: Placement },
}

/// A sampleable model: coupling + signal policy + backend.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    pub coupling: CouplingMatrix,
    pub signal: SignalPolicy,
    pub backend: SamplerBackend,
}

impl ModelSpec {
    pub fn null_model(coupling: CouplingMatrix, backend: SamplerBackend) -> ModelSpec {
        ModelSpec { coupling, signal: SignalPolicy::Null, backend }
    }

    pub fn with_signal(&self, signal: SignalPolicy) -> ModelSpec {
        ModelSpec { coupling: self.coupling.clone(), signal, backend: self.backend }
    }

    pub fn n(&self) -> usize {
        self.coupling.n()
    }

    /// Resolve the backend and prebuild whatever the signal policy allows.
    pub fn prepare(&self) -> Result<PreparedModel> {
        let resolved = resolve_backend(&self.coupling, self.backend)?;
        let inner = match &self.signal {
            SignalPolicy::Null => {
                build_fixed(&self.coupling, &SignalVector::null(self.n()), resolved)?
            }
            SignalPolicy::Fixed(mu) => build_fixed(&self.coupling, mu, resolved)?,
            SignalPolicy::Resampled { s, strength, placement } => {
                if *s > self.n() {
                    return Err(Error::invalid(format!(
                        "support size {s} exceeds n = {}",
                        self.n()
                    )));
                }
                // Validate strength eagerly.
                make_signal(self.n(), *s, *strength, Placement::Prefix, None)?;
                let backend = match resolved {
                    Resolved::Enumeration => ResampledBackend::Enumeration,
                    Resolved::Aux => ResampledBackend::Aux,
                    Resolved::Cycle => ResampledBackend::Cycle,
                    Resolved::Independent => ResampledBackend::Independent,
                    Resolved::Glauber(config) => ResampledBackend::Glauber(GlauberSampler::new(
                        &self.coupling,
                        &SignalVector::null(self.n()),
                        config,
                    )?),
                };
                PreparedInner::Resampled { s: *s, strength: *strength, placement: *placement, backend }
            }
        };
        Ok(PreparedModel { coupling: self.coupling.clone(), inner })
    }
}

#[derive(Clone, Copy, Debug)]
enum Resolved {
    Enumeration,
    Aux,
    Cycle,
    Glauber(GlauberConfig),
    Independent,
}

fn is_zero_coupling(q: &CouplingMatrix) -> bool {
    match q.kind() {
        CouplingKind::CurieWeiss
        | CouplingKind::Cycle
        | CouplingKind::RegularCirculant { .. }
        | CouplingKind::ErdosRenyi { .. } => q.theta() == 0.0,
        CouplingKind::Custom => q.entries().iter().all(|&v| v == 0.0),
    }
}

/// Largest size `Auto` will enumerate rather than fall back to Glauber.
const AUTO_ENUMERATION_LIMIT: usize = 14;

fn resolve_backend(q: &CouplingMatrix, backend: SamplerBackend) -> Result<Resolved> {
    match backend {
        SamplerBackend::Auto => Ok(match q.kind() {
            CouplingKind::CurieWeiss if q.theta() > 0.0 => Resolved::Aux,
            CouplingKind::Cycle => Resolved::Cycle,
            _ if is_zero_coupling(q) => Resolved::Independent,
            _ if q.n() <= AUTO_ENUMERATION_LIMIT => Resolved::Enumeration,
            _ => Resolved::Glauber(GlauberConfig::default_for(q.n())),
        }),
        SamplerBackend::Enumeration => {
            if q.n() > ENUMERATION_LIMIT {
                Err(Error::TooLargeToEnumerate { n: q.n(), limit: ENUMERATION_LIMIT })
            } else {
                Ok(Resolved::Enumeration)
            }
        }
        SamplerBackend::CurieWeissAux => {
            if q.kind() == CouplingKind::CurieWeiss && q.theta() > 0.0 {
                Ok(Resolved::Aux)
            } else {
                Err(Error::SamplerNotApplicable(format!(
                    "auxiliary-variable sampling needs a ferromagnetic Curie-Weiss coupling, got {} with theta = {}",
                    q.kind(),
                    q.theta()
                )))
            }
        }
        SamplerBackend::CycleTransfer => {
            if q.kind() == CouplingKind::Cycle {
                Ok(Resolved::Cycle)
            } else {
                Err(Error::SamplerNotApplicable(format!(
                    "transfer sampling applies to cycle couplings, got {}",
                    q.kind()
                )))
            }
        }
        SamplerBackend::Glauber(config) => Ok(Resolved::Glauber(config)),
        SamplerBackend::Independent => {
            if is_zero_coupling(q) {
                Ok(Resolved::Independent)
            } else {
                Err(Error::SamplerNotApplicable(
                    "independent sampling requires zero coupling".to_string(),
                ))
            }
        }
    }
}

fn build_fixed(
    q: &CouplingMatrix,
    mu: &SignalVector,
    resolved: Resolved,
) -> Result<PreparedInner> {
    Ok(match resolved {
        Resolved::Enumeration => PreparedInner::Exact(enumerate_model(q, mu)?),
        Resolved::Aux => PreparedInner::Aux(CurieWeissSampler::new(q.n(), q.theta(), mu)?),
        Resolved::Cycle => PreparedInner::Cycle(CycleSampler::new(q.n(), q.theta(), mu)?),
        Resolved::Glauber(config) => {
            PreparedInner::Glauber(GlauberSampler::new(q, mu, config)?)
        }
        Resolved::Independent => PreparedInner::Independent(IndependentSampler::new(q.n(), mu)?),
    })
}

#[derive(Clone, Debug)]
enum ResampledBackend {
    Enumeration,
    Aux,
    Cycle,
    Glauber(GlauberSampler),
    Independent,
}

#[derive(Clone, Debug)]
enum PreparedInner {
    Exact(ExactModel),
    Aux(CurieWeissSampler),
    Cycle(CycleSampler),
    Glauber(GlauberSampler),
    Independent(IndependentSampler),
    Resampled { s: usize, strength: f64, placement: Placement, backend: ResampledBackend },
}

/// A model ready to draw from. Cheap to share across threads (`&self` draws).
#[derive(Clone, Debug)]
pub struct PreparedModel {
    coupling: CouplingMatrix,
    inner: PreparedInner,
}

impl PreparedModel {
    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    /// Draw one configuration using the caller's stream.
    pub fn draw<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> Result<SpinConfiguration> {
        match &self.inner {
            PreparedInner::Exact(m) => Ok(m.sample(rng)),
            PreparedInner::Aux(s) => Ok(s.draw(rng)),
            PreparedInner::Cycle(s) => Ok(s.draw(rng)),
            PreparedInner::Glauber(s) => Ok(s.draw(rng)),
            PreparedInner::Independent(s) => Ok(s.draw(rng)),
            PreparedInner::Resampled { s, strength, placement, backend } => {
                let n = self.coupling.n();
                // The signal is part of the replicate's randomness: derive
                // its placement seed from the replicate stream itself.
                let mu = match placement {
                    Placement::Prefix => make_signal(n, *s, *strength, Placement::Prefix, None)?,
                    Placement::UniformRandom => {
                        let seed = rng.random::<u64>();
                        make_signal(n, *s, *strength, Placement::UniformRandom, Some(seed))?
                    }
                };
                match backend {
                    ResampledBackend::Enumeration => {
                        Ok(enumerate_model(&self.coupling, &mu)?.sample(rng))
                    }
                    ResampledBackend::Aux => {
                        Ok(CurieWeissSampler::new(n, self.coupling.theta(), &mu)?.draw(rng))
                    }
                    ResampledBackend::Cycle => {
                        Ok(CycleSampler::new(n, self.coupling.theta(), &mu)?.draw(rng))
                    }
                    ResampledBackend::Glauber(g) => g.draw_with_signal(&mu, rng),
                    ResampledBackend::Independent => {
                        Ok(IndependentSampler::new(n, &mu)?.draw(rng))
                    }
                }
            }
        }
    }
}

/// A calibrated rejection threshold for one statistic.
#[derive(Clone, Copy, Debug)]
pub struct CriticalValue {
    pub stat: StatTag,
    pub alpha: f64,
    pub m_null: usize,
    pub value: f64,
    pub seed: u64,
}

/// Outcome of one test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Reject,
    Retain,
}

/// Monte Carlo calibration: the `ceil((1-alpha) m_null)`-th ascending order
/// statistic of `m_null` null draws. Requires `alpha` in `(0, 0.5]` and
/// `m_null >= 100`.
pub fn calibrate(
    model: &ModelSpec,
    kind: &StatisticKind,
    alpha: f64,
    m_null: usize,
    seed: u64,
) -> Result<CriticalValue> {
    Ok(calibrate_with_tail(model, kind, alpha, m_null, seed)?.0)
}

/// Like [`calibrate`], but also returns the fraction of the calibration
/// sample at or above the returned critical value. For a statistic with
/// continuous null support this is `ceil((1-alpha) m_null)` complements,
/// essentially `alpha`; for a lattice-valued statistic (any statistic that is
/// a function of the integer spin total) it exceeds `alpha` by up to the
/// point mass at the critical value, and is the natural reference point for
/// the achieved level of the `>=` rejection rule.
pub fn calibrate_with_tail(
    model: &ModelSpec,
    kind: &StatisticKind,
    alpha: f64,
    m_null: usize,
    seed: u64,
) -> Result<(CriticalValue, f64)> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(Error::invalid(format!("alpha must lie in (0, 0.5], got {alpha}")));
    }
    if m_null < 100 {
        return Err(Error::invalid(format!("m_null must be at least 100, got {m_null}")));
    }
    let prepared = model.prepare()?;
    let mut values = (0..m_null)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::role::CALIBRATE, i as u64);
            let x = prepared.draw(&mut rng)?;
            evaluate_statistic(kind, &x)
        })
        .collect::<Result<Vec<f64>>>()?;
    values.sort_by(f64::total_cmp);
    let rank = ((1.0 - alpha) * m_null as f64).ceil() as usize;
    let value = values[rank.clamp(1, m_null) - 1];
    let first_at = values.partition_point(|&v| v < value);
    let tail = (m_null - first_at) as f64 / m_null as f64;
    Ok((CriticalValue { stat: kind.tag(), alpha, m_null, value, seed }, tail))
}

/// Apply a calibrated test to one configuration: reject iff the statistic is
/// `>=` the critical value. A `+inf` critical value therefore never rejects.
pub fn run_test(
    x: &SpinConfiguration,
    kind: &StatisticKind,
    crit: &CriticalValue,
) -> Result<Decision> {
    check_tags(kind, crit)?;
    let stat = evaluate_statistic(kind, x)?;
    Ok(if stat >= crit.value { Decision::Reject } else { Decision::Retain })
}

fn check_tags(kind: &StatisticKind, crit: &CriticalValue) -> Result<()> {
    if kind.tag() != crit.stat {
        return Err(Error::StatisticMismatch {
            expected: crit.stat.to_string(),
            actual: kind.tag().to_string(),
        });
    }
    Ok(())
}

/// Rejection-rate estimate with a 95% normal-approximation half-width.
#[derive(Clone, Copy, Debug)]
pub struct PowerEstimate {
    pub rejections: usize,
    pub replicates: usize,
    pub p_hat: f64,
    pub ci_halfwidth: f64,
}

impl PowerEstimate {
    fn from_counts(rejections: usize, replicates: usize) -> PowerEstimate {
        let p_hat = rejections as f64 / replicates as f64;
        PowerEstimate {
            rejections,
            replicates,
            p_hat,
            ci_halfwidth: 1.96 * (p_hat * (1.0 - p_hat) / replicates as f64).sqrt(),
        }
    }
}

/// Estimate the rejection probability of a calibrated test under `model`.
pub fn estimate_power(
    model: &ModelSpec,
    kind: &StatisticKind,
    crit: &CriticalValue,
    replicates: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    check_tags(kind, crit)?;
    if replicates == 0 {
        return Err(Error::invalid("need at least one replicate".to_string()));
    }
    let prepared = model.prepare()?;
    let rejections = (0..replicates)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::role::POWER, i as u64);
            let x = prepared.draw(&mut rng)?;
            Ok::<usize, Error>(usize::from(evaluate_statistic(kind, &x)? >= crit.value))
        })
        .try_reduce(|| 0usize, |a, b| Ok(a + b))?;
    Ok(PowerEstimate::from_counts(rejections, replicates))
}

/// Testing risk (type I + type II) of the calibrated test against an
/// `(s, B)` alternative.
#[derive(Clone, Copy, Debug)]
pub struct RiskEstimate {
    pub type_one: f64,
    pub type_two: f64,
    pub risk: f64,
}

/// Calibrate on the null model, then estimate type I error on the null and
/// type II error against the `(s, strength)` alternative. The alternative
/// keeps the null's coupling and backend; its support is the prefix for
/// exchangeable (Curie-Weiss) couplings and uniformly re-randomized per
/// replicate otherwise.
#[allow(clippy::too_many_arguments)]
pub fn estimate_risk(
    null_model: &ModelSpec,
    s: usize,
    strength: f64,
    kind: &StatisticKind,
    alpha: f64,
    m_null: usize,
    replicates: usize,
    seed: u64,
) -> Result<RiskEstimate> {
    if !matches!(null_model.signal, SignalPolicy::Null) {
        return Err(Error::invalid(
            "estimate_risk expects a null model; the alternative is built internally".to_string(),
        ));
    }
    let crit = calibrate(null_model, kind, alpha, m_null, seed)?;
    let type_one = estimate_power(
        null_model,
        kind,
        &crit,
        replicates,
        rng::derive(seed, rng::role::RISK_NULL, &[1]),
    )?;
    let alt_signal = match null_model.coupling.kind() {
        CouplingKind::CurieWeiss => {
            SignalPolicy::Fixed(make_signal(null_model.n(), s, strength, Placement::Prefix, None)?)
        }
        _ => SignalPolicy::Resampled { s, strength, placement: Placement::UniformRandom },
    };
    let alt = null_model.with_signal(alt_signal);
    let power = estimate_power(
        &alt,
        kind,
        &crit,
        replicates,
        rng::derive(seed, rng::role::RISK_NULL, &[2]),
    )?;
    let type_two = 1.0 - power.p_hat;
    Ok(RiskEstimate { type_one: type_one.p_hat, type_two, risk: type_one.p_hat + type_two })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw_spec(n: usize, theta: f64) -> ModelSpec {
        ModelSpec::null_model(
            CouplingMatrix::curie_weiss(n, theta).unwrap(),
            SamplerBackend::Auto,
        )
    }

    #[test]
    fn calibrate_matches_asymptotic_quantile() {
        // Curie-Weiss theta = 0.5, n = 1000: sqrt(n) Xbar is close to
        // N(0, 2), whose 95% quantile is 2.326.
        let spec = cw_spec(1000, 0.5);
        let crit = calibrate(&spec, &StatisticKind::SqrtNMean, 0.05, 5000, 42).unwrap();
        assert!(
            (crit.value - 2.326).abs() < 0.15,
            "critical value {} too far from 2.326",
            crit.value
        );
        assert_eq!(crit.stat, StatTag::SqrtNMean);
    }

    #[test]
    fn calibrate_validates_inputs() {
        let spec = cw_spec(50, 0.5);
        assert!(calibrate(&spec, &StatisticKind::SqrtNMean, 0.0, 500, 0).is_err());
        assert!(calibrate(&spec, &StatisticKind::SqrtNMean, 0.6, 500, 0).is_err());
        assert!(calibrate(&spec, &StatisticKind::SqrtNMean, 0.05, 99, 0).is_err());
    }

    #[test]
    fn calibration_is_deterministic_across_pool_sizes() {
        let spec = cw_spec(100, 0.8);
        let kind = StatisticKind::SqrtNMean;
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let crit = calibrate(&spec, &kind, 0.1, 200, 7).unwrap();
                let alt = spec.with_signal(SignalPolicy::Resampled {
                    s: 10,
                    strength: 0.4,
                    placement: Placement::UniformRandom,
                });
                let p = estimate_power(&alt, &kind, &crit, 100, 7).unwrap();
                (crit.value, p.rejections)
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn run_test_checks_tags_and_sentinel() {
        let q = CouplingMatrix::curie_weiss(16, 0.5).unwrap();
        let x = SpinConfiguration::all_plus(16);
        let crit = CriticalValue {
            stat: StatTag::SqrtNMean,
            alpha: 0.05,
            m_null: 100,
            value: 2.0,
            seed: 0,
        };
        assert_eq!(run_test(&x, &StatisticKind::SqrtNMean, &crit).unwrap(), Decision::Reject);
        assert!(run_test(&x, &StatisticKind::CondCentered(q), &crit).is_err());
        let inf = CriticalValue { value: f64::INFINITY, ..crit };
        // +inf threshold: the all-plus configuration maximizes the statistic
        // and is still retained.
        assert_eq!(run_test(&x, &StatisticKind::SqrtNMean, &inf).unwrap(), Decision::Retain);
    }

    #[test]
    fn power_is_monotone_in_signal_strength() {
        let spec = cw_spec(100, 0.5);
        let kind = StatisticKind::SqrtNMean;
        let crit = calibrate(&spec, &kind, 0.1, 400, 11).unwrap();
        let mut prev = -1.0;
        // s = 30 of 100 sites: strong enough that the mean-field power at
        // b = 1.5 is ~0.99 (with s = 10 it plateaus near 0.45 at this n).
        for b in [0.0, 0.3, 0.6, 1.0, 1.5] {
            let alt = spec.with_signal(SignalPolicy::Fixed(
                make_signal(100, 30, b, Placement::Prefix, None).unwrap(),
            ));
            let p = estimate_power(&alt, &kind, &crit, 400, 13).unwrap();
            // Two binomial standard errors of slack (~0.05 at 400 reps).
            assert!(
                p.p_hat >= prev - 0.05,
                "power dropped from {prev} to {} at b = {b}",
                p.p_hat
            );
            prev = p.p_hat;
        }
        assert!(prev > 0.9, "strong signal should be detected, got {prev}");
    }

    #[test]
    fn exchangeable_placement_does_not_matter_for_curie_weiss() {
        let spec = cw_spec(80, 0.6);
        let kind = StatisticKind::SqrtNMean;
        let crit = calibrate(&spec, &kind, 0.1, 500, 3).unwrap();
        let fixed = spec.with_signal(SignalPolicy::Fixed(
            make_signal(80, 8, 0.6, Placement::Prefix, None).unwrap(),
        ));
        let random = spec.with_signal(SignalPolicy::Resampled {
            s: 8,
            strength: 0.6,
            placement: Placement::UniformRandom,
        });
        let a = estimate_power(&fixed, &kind, &crit, 800, 5).unwrap();
        let b = estimate_power(&random, &kind, &crit, 800, 6).unwrap();
        assert!(
            (a.p_hat - b.p_hat).abs() <= 2.0 * (a.ci_halfwidth + b.ci_halfwidth),
            "prefix {} vs uniform {}",
            a.p_hat,
            b.p_hat
        );
    }

    #[test]
    fn risk_behaves_at_the_extremes() {
        // Strong dense signal: near-perfect detection, risk ~ alpha.
        let spec = cw_spec(100, 0.5);
        let kind = StatisticKind::SqrtNMean;
        let low = estimate_risk(&spec, 50, 1.0, &kind, 0.05, 400, 400, 17).unwrap();
        assert!(low.risk < 0.15, "risk = {}", low.risk);
        assert!(low.type_two < 0.05);
        // Vanishing signal: the test is blind, risk ~ 1.
        let high = estimate_risk(&spec, 1, 0.01, &kind, 0.05, 400, 400, 19).unwrap();
        assert!(high.risk > 0.8, "risk = {}", high.risk);
        // Risk is measured from a null spec only.
        let alt = spec.with_signal(SignalPolicy::Fixed(
            make_signal(100, 5, 0.5, Placement::Prefix, None).unwrap(),
        ));
        assert!(estimate_risk(&alt, 5, 0.5, &kind, 0.05, 400, 400, 0).is_err());
    }

    #[test]
    fn backend_resolution_enforces_applicability() {
        let cw = CouplingMatrix::curie_weiss(10, 0.5).unwrap();
        let cy = CouplingMatrix::cycle(10, 0.5).unwrap();
        assert!(ModelSpec::null_model(cw.clone(), SamplerBackend::CycleTransfer)
            .prepare()
            .is_err());
        assert!(ModelSpec::null_model(cy.clone(), SamplerBackend::CurieWeissAux)
            .prepare()
            .is_err());
        assert!(ModelSpec::null_model(cw.clone(), SamplerBackend::Independent)
            .prepare()
            .is_err());
        // Antiferromagnetic Curie-Weiss: Auto avoids the auxiliary sampler.
        let anti = CouplingMatrix::curie_weiss(10, -0.5).unwrap();
        assert!(ModelSpec::null_model(anti, SamplerBackend::Auto).prepare().is_ok());
        // Zero coupling resolves to independent sampling.
        let zero = CouplingMatrix::curie_weiss(10, 0.0).unwrap();
        assert!(ModelSpec::null_model(zero, SamplerBackend::Independent).prepare().is_ok());
        let big = CouplingMatrix::curie_weiss(30, 0.5).unwrap();
        assert!(ModelSpec::null_model(big, SamplerBackend::Enumeration).prepare().is_err());
    }

    #[test]
    fn resampled_glauber_reuses_prebuilt_chain() {
        // Erdos-Renyi with per-replicate signal and Glauber backend: the
        // prepared model must draw without error and deterministically.
        let q = CouplingMatrix::erdos_renyi(30, 0.6, 0.3, 77).unwrap();
        let spec = ModelSpec {
            coupling: q,
            signal: SignalPolicy::Resampled {
                s: 5,
                strength: 0.8,
                placement: Placement::UniformRandom,
            },
            backend: SamplerBackend::Glauber(GlauberConfig { burn_in_sweeps: 50, scan: crate::samplers::Scan::Systematic }),
        };
        let prepared = spec.prepare().unwrap();
        let a = prepared.draw(&mut rng::stream(1, rng::role::VERIFY, 0)).unwrap();
        let b = prepared.draw(&mut rng::stream(1, rng::role::VERIFY, 0)).unwrap();
        assert_eq!(a, b);
    }
}
