//! Self-checking suite: closed-form identities, sampler-vs-enumeration
//! oracles, limit-law goodness of fit, concentration sweeps, and level
//! control, reported as named pass/fail entries with measured values.
//!
//! Two scales. `Quick` runs the identity battery, small-`n` oracle TV
//! checks, and one level-control probe — seconds of wall time. `Full` adds
//! enumeration oracles at 10^5 draws, Kolmogorov-Smirnov tests against the
//! three null limit laws, the tail-bound sweep at n = 200, and a
//! level-control battery across every sampler family.
//!
//! Nothing here aborts on a failed check: a failure (or an error raised
//! while measuring) becomes a report entry, so one broken invariant still
//! leaves the rest of the evidence readable.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::Result;
use crate::model::{make_signal, CouplingMatrix, Placement, SignalVector};
use crate::rng;
use crate::samplers::{enumerate_model, CurieWeissSampler, ExactModel};
use crate::statistics::{f_statistic, StatTag, StatisticKind};
use crate::testing::{calibrate_with_tail, estimate_power, ModelSpec, SamplerBackend};
use crate::theory::{
    aux_potential, concentration_bound, conditional_variance, cycle_mgf, detection_boundary,
    likelihood_ratio_profile, null_limit, quartic_normalizer_closed_form, solve_aux_mode,
    solve_spontaneous_magnetization, solve_tilted_fixed_point, QuarticW,
};

/// How much evidence to gather.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyScale {
    Quick,
    Full,
}

impl std::str::FromStr for VerifyScale {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(VerifyScale::Quick),
            "full" => Ok(VerifyScale::Full),
            other => Err(crate::error::Error::invalid(format!(
                "unknown scale '{other}' (expected quick or full)"
            ))),
        }
    }
}

/// One named check with its measured evidence.
#[derive(Clone, Debug)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything the suite measured.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub scale: VerifyScale,
    pub entries: Vec<CheckEntry>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    /// One line per check plus a tally, ready for a terminal.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let mark = if e.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{mark}  {} — {}\n", e.name, e.detail));
        }
        let passed = self.entries.iter().filter(|e| e.passed).count();
        out.push_str(&format!("{passed}/{} checks passed\n", self.entries.len()));
        out
    }
}

fn run_check(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckEntry {
    match f() {
        Ok((passed, detail)) => CheckEntry { name: name.to_string(), passed, detail },
        Err(e) => CheckEntry {
            name: name.to_string(),
            passed: false,
            detail: format!("error while measuring: {e}"),
        },
    }
}

// ---------------------------------------------------------------------------
// Measurement helpers (shared with the integration tests).

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted: Vec<f64> = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let mut d = 0.0_f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / m).abs());
        d = d.max((f - (i as f64 + 1.0) / m).abs());
    }
    d
}

/// Total variation distance between the empirical law of the total spin and
/// the enumerated one.
pub fn magnetization_tv(totals: &[i64], exact: &ExactModel) -> f64 {
    let m = totals.len() as f64;
    let mut empirical: BTreeMap<i64, f64> = BTreeMap::new();
    for &t in totals {
        *empirical.entry(t).or_insert(0.0) += 1.0 / m;
    }
    let mut l1 = 0.0;
    for (t, p) in exact.magnetization_pmf() {
        l1 += (p - empirical.remove(&t).unwrap_or(0.0)).abs();
    }
    // Empirical mass on magnetizations the exact law excludes (impossible
    // for a correct sampler, but the metric stays honest if it happens).
    l1 += empirical.values().sum::<f64>();
    l1 / 2.0
}

/// Draw `draws` configurations from `(coupling, backend)` at `mu = 0` and
/// measure the magnetization TV distance against full enumeration.
pub fn sampler_magnetization_tv(
    q: &CouplingMatrix,
    backend: SamplerBackend,
    draws: usize,
    seed: u64,
) -> Result<f64> {
    let exact = enumerate_model(q, &SignalVector::null(q.n()))?;
    let prepared = ModelSpec::null_model(q.clone(), backend).prepare()?;
    let totals = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::role::VERIFY, i as u64);
            Ok(prepared.draw(&mut rng)?.total_spin())
        })
        .collect::<Result<Vec<i64>>>()?;
    Ok(magnetization_tv(&totals, &exact))
}

/// Empirical tail frequency of `|f|` at one level versus the theoretical
/// bound.
#[derive(Clone, Copy, Debug)]
pub struct TailCheck {
    pub t: f64,
    pub empirical: f64,
    pub bound: f64,
}

impl TailCheck {
    pub fn violated(&self) -> bool {
        self.empirical > self.bound
    }
}

/// Null draws of the centered-field functional `f` against the
/// concentration bound on a grid of tail levels.
pub fn lemma_tail_sweep(
    q: &CouplingMatrix,
    draws: usize,
    t_grid: &[f64],
    seed: u64,
) -> Result<Vec<TailCheck>> {
    let mu = SignalVector::null(q.n());
    let prepared = ModelSpec::null_model(q.clone(), SamplerBackend::Auto).prepare()?;
    let abs_f = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::role::VERIFY, i as u64);
            let x = prepared.draw(&mut rng)?;
            Ok(f_statistic(&x, q, &mu)?.abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    t_grid
        .iter()
        .map(|&t| {
            let hits = abs_f.iter().filter(|&&v| v >= t).count();
            Ok(TailCheck {
                t,
                empirical: hits as f64 / draws as f64,
                bound: concentration_bound(q, t)?,
            })
        })
        .collect()
}

/// Monte Carlo estimate of `E[(sum_i (X_i - tanh(theta Z + mu_i)))^2]` under
/// the joint auxiliary representation; returns `(mean, standard error)`.
pub fn aux_second_moment(
    n: usize,
    theta: f64,
    mu: &SignalVector,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let sampler = CurieWeissSampler::new(n, theta, mu)?;
    let values = (0..draws)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, rng::role::VERIFY, i as u64);
            let (x, z) = sampler.draw_with_aux(&mut rng);
            let s: f64 = x
                .spins()
                .iter()
                .enumerate()
                .map(|(j, &sp)| sp as f64 - (theta * z + mu.field_at(j)).tanh())
                .sum();
            s * s
        })
        .collect::<Vec<f64>>();
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    Ok((mean, (var / m).sqrt()))
}

/// One calibrate-then-test measurement of the type-I error.
///
/// `level` is the fresh-sample rejection rate; `cal_tail` is the calibration
/// sample's own mass at or above the critical value, which is what the `>=`
/// rejection rule achieves by construction. For a continuous statistic
/// `cal_tail` is pinned at `ceil((1-alpha) m)/m`; for a lattice-valued
/// statistic it carries the overshoot of the atom the critical value landed
/// on, so `level - cal_tail` stays a pure-noise quantity either way.
#[derive(Clone, Copy, Debug)]
pub struct LevelProbe {
    pub level: f64,
    pub cal_tail: f64,
    pub se_fresh: f64,
    pub se_paired: f64,
}

/// Calibrate at level `alpha` and measure the type-I error on fresh seeds.
///
/// `se_fresh` is the binomial standard error at `alpha` for the fresh sample
/// alone; `se_paired` is the standard error of `level - cal_tail`, combining
/// both samples at the calibrated tail mass.
pub fn level_control_probe(
    q: &CouplingMatrix,
    backend: SamplerBackend,
    tag: StatTag,
    alpha: f64,
    m_null: usize,
    fresh: usize,
    seed: u64,
) -> Result<LevelProbe> {
    let kind = StatisticKind::from_tag(tag, q);
    let spec = ModelSpec::null_model(q.clone(), backend);
    let (crit, cal_tail) = calibrate_with_tail(
        &spec,
        &kind,
        alpha,
        m_null,
        rng::derive(seed, rng::role::VERIFY, &[1]),
    )?;
    let p = estimate_power(
        &spec,
        &kind,
        &crit,
        fresh,
        rng::derive(seed, rng::role::VERIFY, &[2]),
    )?;
    let se_fresh = (alpha * (1.0 - alpha) / fresh as f64).sqrt();
    let p_ref = cal_tail.max(alpha);
    let se_paired =
        (p_ref * (1.0 - p_ref) * (1.0 / m_null as f64 + 1.0 / fresh as f64)).sqrt();
    Ok(LevelProbe { level: p.p_hat, cal_tail, se_fresh, se_paired })
}

// ---------------------------------------------------------------------------
// Individual checks.

fn check_fixed_points() -> CheckEntry {
    run_check("fixed_point_residuals", || {
        let mut worst = 0.0_f64;
        for theta in [1.1, 1.5, 2.0, 3.0] {
            let r = solve_spontaneous_magnetization(theta)?;
            if !(r.root > 0.0 && r.root < 1.0) {
                return Ok((false, format!("root {} out of (0,1) at theta={theta}", r.root)));
            }
            worst = worst.max(r.residual.abs());
        }
        for (theta, p, b) in [(1.0, 0.1, 0.5), (1.0, 0.5, 1.0), (1.5, 0.2, 0.7), (0.5, 0.3, 1.0)] {
            worst = worst.max(solve_tilted_fixed_point(theta, p, b)?.residual.abs());
        }
        Ok((worst < 1e-12, format!("max |residual| = {worst:.3e} (tolerance 1e-12)")))
    })
}

fn check_detection_boundary() -> CheckEntry {
    run_check("detection_boundary_exactness", || {
        let grid: Vec<f64> = (1..20).map(|k| k as f64 / 20.0).collect();
        for &a in &grid {
            for theta in [0.5, 1.5, 2.0] {
                if detection_boundary(theta, a)?.exponent() != 0.5 - a {
                    return Ok((false, format!("off-critical mismatch at theta={theta}, a={a}")));
                }
            }
            if detection_boundary(1.0, a)?.exponent() != 0.75 - a {
                return Ok((false, format!("critical mismatch at a={a}")));
            }
        }
        Ok((true, format!("r = 1/2 - a and r = 3/4 - a exact on {} grid points", grid.len())))
    })
}

fn check_quartic_law() -> CheckEntry {
    run_check("quartic_law_normalization", || {
        let w = QuarticW::new();
        let closed = quartic_normalizer_closed_form();
        let rel = ((w.normalizer() - closed) / closed).abs();
        if rel > 1e-8 {
            return Ok((false, format!("normalizer off by {rel:.3e} relative")));
        }
        if (w.cdf(0.0) - 0.5).abs() > 1e-9 {
            return Ok((false, format!("cdf(0) = {}", w.cdf(0.0))));
        }
        let mut worst = 0.0_f64;
        for p in [0.01, 0.05, 0.5, 0.95, 0.99] {
            worst = worst.max((w.cdf(w.quantile(p)) - p).abs());
        }
        Ok((
            worst < 1e-6,
            format!("normalizer rel err {rel:.2e}, worst quantile round trip {worst:.2e}"),
        ))
    })
}

fn check_null_limit_quantiles() -> CheckEntry {
    run_check("null_limit_quantiles", || {
        // Known quantile: theta = 0.5 gives N(0, 2).
        let sub = null_limit(0.5)?;
        let want = 1.6448536269514722 * 2.0_f64.sqrt();
        if (sub.quantile(0.95)? - want).abs() > 1e-9 {
            return Ok((false, format!("95% quantile {} != {want}", sub.quantile(0.95)?)));
        }
        // Supercritical center/variance agree with the fixed point.
        let sup = null_limit(1.5)?;
        let m = solve_spontaneous_magnetization(1.5)?.root;
        if (sup.center() - m).abs() > 1e-12 {
            return Ok((false, "conditional center != m(theta)".to_string()));
        }
        if (sup.variance().unwrap_or(f64::NAN) - conditional_variance(1.5)?).abs() > 1e-12 {
            return Ok((false, "conditional variance mismatch".to_string()));
        }
        // CDF/quantile consistency across all three regimes.
        let mut worst = 0.0_f64;
        for theta in [0.3, 0.5, 1.0, 1.5] {
            let law = null_limit(theta)?;
            for p in [0.05, 0.25, 0.5, 0.9, 0.99] {
                worst = worst.max((law.cdf(law.quantile(p)?) - p).abs());
            }
        }
        Ok((worst < 1e-6, format!("worst cdf/quantile round trip {worst:.2e}")))
    })
}

fn check_cycle_mgf_identity() -> CheckEntry {
    run_check("cycle_mgf_identity", || {
        let mut worst = 0.0_f64;
        let mut arg = (0usize, 0.0, 0.0);
        for n in 3..=14usize {
            for theta in [0.2, 0.8, 1.5] {
                // Per-edge weight theta means strength parameter 2 theta.
                let q = CouplingMatrix::cycle(n, 2.0 * theta)?;
                let norm = n as f64 * (std::f64::consts::LN_2 + theta.cosh().ln());
                for k in -4..=4i32 {
                    let t = k as f64 / 2.0;
                    let h = t / (n as f64).sqrt();
                    let exact = enumerate_model(&q, &SignalVector::uniform(n, h))?;
                    let want = (exact.log_partition() - norm).exp();
                    let got = cycle_mgf(theta, t, n)?;
                    let rel = ((got - want) / want).abs();
                    if rel > worst {
                        worst = rel;
                        arg = (n, theta, t);
                    }
                }
            }
        }
        Ok((
            worst < 1e-10,
            format!(
                "worst relative error {worst:.3e} at (n, theta, t) = ({}, {}, {})",
                arg.0, arg.1, arg.2
            ),
        ))
    })
}

fn check_lr_profile() -> CheckEntry {
    run_check("likelihood_ratio_monotone", || {
        for n in [8usize, 12] {
            for s in [1usize, 4, 12] {
                let s = s.min(n);
                for b in [0.3, 1.0] {
                    let profile = likelihood_ratio_profile(n, s, b)?;
                    if let Some(w) = profile.windows(2).find(|w| w[1] <= w[0]) {
                        return Ok((
                            false,
                            format!("not increasing at (n={n}, s={s}, b={b}): {} -> {}", w[0], w[1]),
                        ));
                    }
                }
                // Zero strength: likelihood ratio identically one.
                let flat = likelihood_ratio_profile(n, s, 0.0)?;
                if flat.iter().any(|v| (v - 1.0).abs() > 1e-12) {
                    return Ok((false, format!("b=0 profile not flat at (n={n}, s={s})")));
                }
            }
        }
        Ok((true, "strictly increasing in k for B > 0; flat at B = 0".to_string()))
    })
}

fn check_tanh_inequality(seed: u64) -> CheckEntry {
    run_check("tanh_difference_inequality", || {
        use rand::Rng;
        let mut rng = rng::stream(seed, rng::role::VERIFY, 7001);
        let mut min_margin = f64::INFINITY;
        let mut worst_identity = 0.0_f64;
        for _ in 0..10_000 {
            let x = rng.random::<f64>() * 5.0;
            let y = (1.0 - rng.random::<f64>()) * 5.0; // (0, 5]
            let lhs = (x + y).tanh() - x.tanh();
            min_margin = min_margin.min(lhs - (1.0 - x.tanh()) * y.tanh());
            // The exact difference identity behind the bound.
            let ident =
                (1.0 - x.tanh().powi(2)) * y.tanh() / (1.0 + x.tanh() * y.tanh());
            worst_identity = worst_identity.max((lhs - ident).abs());
        }
        Ok((
            min_margin >= -1e-14 && worst_identity < 1e-12,
            format!("min margin {min_margin:.3e}, identity gap {worst_identity:.3e} on 10^4 pairs"),
        ))
    })
}

fn check_aux_mode() -> CheckEntry {
    run_check("critical_potential_mode", || {
        let n = 1000;
        let mu = make_signal(n, 100, 1.0, Placement::Prefix, None)?;
        let mode = solve_aux_mode(n, 1.0, &mu)?;
        if !(mode.root > 0.0 && mode.root <= 1.0) {
            return Ok((false, format!("mode {} outside (0, 1]", mode.root)));
        }
        if mode.residual.abs() > 1e-9 {
            return Ok((false, format!("stationarity residual {:.3e}", mode.residual)));
        }
        let a_mu = 100.0 * 1.0_f64.tanh() / n as f64;
        let ratio = mode.root.powi(3) / a_mu;
        if !(0.1..=10.0).contains(&ratio) {
            return Ok((false, format!("m^3 / A(mu) = {ratio:.4} outside [0.1, 10]")));
        }
        // Convexity witness at theta = 1: the numerical second derivative of
        // the potential must match sum tanh^2(z + mu_i) and stay nonnegative.
        let h = 1e-3;
        let mut worst_gap = 0.0_f64;
        for k in -20..=20 {
            let z = k as f64 / 10.0;
            let fd = (aux_potential(z - h, n, 1.0, &mu) - 2.0 * aux_potential(z, n, 1.0, &mu)
                + aux_potential(z + h, n, 1.0, &mu))
                / (h * h);
            let formula = 900.0 * z.tanh().powi(2) + 100.0 * (z + 1.0).tanh().powi(2);
            if fd < -1e-6 {
                return Ok((false, format!("second difference {fd:.3e} < 0 at z = {z}")));
            }
            worst_gap = worst_gap.max((fd - formula).abs() / formula.max(1.0));
        }
        Ok((
            worst_gap < 1e-3,
            format!(
                "mode {:.6}, m^3/A = {ratio:.3}, worst f'' relative gap {worst_gap:.2e}",
                mode.root
            ),
        ))
    })
}

fn check_aux_second_moment(scale: VerifyScale, seed: u64) -> CheckEntry {
    run_check("aux_centered_second_moment", || {
        let draws = match scale {
            VerifyScale::Quick => 4_000,
            VerifyScale::Full => 20_000,
        };
        let cases: [(usize, f64, usize, f64); 3] =
            [(1000, 1.0, 100, 1.0), (400, 0.5, 20, 0.5), (400, 1.5, 0, 0.0)];
        let mut details = Vec::new();
        for (i, &(n, theta, s, b)) in cases.iter().enumerate() {
            let mu = make_signal(n, s, b, Placement::Prefix, None)?;
            let (mean, se) =
                aux_second_moment(n, theta, &mu, draws, rng::derive(seed, rng::role::VERIFY, &[3, i as u64]))?;
            if mean > n as f64 + 3.0 * se {
                return Ok((
                    false,
                    format!(
                        "E S^2 = {mean:.2} > n + 3 se = {:.2} at (n={n}, theta={theta}, s={s})",
                        n as f64 + 3.0 * se
                    ),
                ));
            }
            details.push(format!("(theta={theta}: {:.3}n)", mean / n as f64));
        }
        Ok((true, format!("second moments below n: {}", details.join(" "))))
    })
}

fn sampler_battery(n: usize) -> Result<Vec<(String, CouplingMatrix, SamplerBackend)>> {
    let glauber = |q: &CouplingMatrix| {
        SamplerBackend::Glauber(crate::samplers::GlauberConfig::default_for(q.n()))
    };
    let cw_sub = CouplingMatrix::curie_weiss(n, 0.5)?;
    let cw_sup = CouplingMatrix::curie_weiss(n, 1.5)?;
    let cycle = CouplingMatrix::cycle(n, 0.8)?;
    let er = CouplingMatrix::erdos_renyi(n, 0.6, 0.5, 7)?;
    let circ = CouplingMatrix::regular_circulant(n, 0.9, 2)?;
    Ok(vec![
        (format!("curie_weiss(0.5) aux n={n}"), cw_sub.clone(), SamplerBackend::CurieWeissAux),
        (format!("curie_weiss(0.5) glauber n={n}"), cw_sub.clone(), glauber(&cw_sub)),
        (format!("curie_weiss(1.5) aux n={n}"), cw_sup.clone(), SamplerBackend::CurieWeissAux),
        (format!("curie_weiss(1.5) glauber n={n}"), cw_sup.clone(), glauber(&cw_sup)),
        (format!("cycle(0.8) transfer n={n}"), cycle.clone(), SamplerBackend::CycleTransfer),
        (format!("cycle(0.8) glauber n={n}"), cycle.clone(), glauber(&cycle)),
        (format!("erdos_renyi(0.6, 0.5) glauber n={n}"), er.clone(), glauber(&er)),
        (format!("circulant(0.9, d=2) glauber n={n}"), circ.clone(), glauber(&circ)),
    ])
}

fn check_sampler_oracles(scale: VerifyScale, seed: u64) -> Vec<CheckEntry> {
    let (sizes, draws): (&[usize], usize) = match scale {
        VerifyScale::Quick => (&[8], 20_000),
        VerifyScale::Full => (&[4, 8, 12], 100_000),
    };
    let mut entries = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        let battery = match sampler_battery(n) {
            Ok(b) => b,
            Err(e) => {
                entries.push(CheckEntry {
                    name: format!("sampler_oracle_tv n={n}"),
                    passed: false,
                    detail: format!("error building battery: {e}"),
                });
                continue;
            }
        };
        for (bi, (label, q, backend)) in battery.into_iter().enumerate() {
            entries.push(run_check(&format!("sampler_oracle_tv {label}"), || {
                let tv = sampler_magnetization_tv(
                    &q,
                    backend,
                    draws,
                    rng::derive(seed, rng::role::VERIFY, &[4, si as u64, bi as u64]),
                )?;
                Ok((tv <= 0.03, format!("TV = {tv:.4} over {draws} draws (bound 0.03)")))
            }));
        }
    }
    entries
}

fn check_level_control(scale: VerifyScale, seed: u64) -> Vec<CheckEntry> {
    // Magnetization statistics on the complete graph are functions of the
    // integer spin total, so their null laws are lattices with point masses
    // ~0.005-0.015 near the 95% quantile at n=500. The achieved level of the
    // `>=` rejection rule is then alpha plus the overshoot of whichever atom
    // the critical value lands on (e.g. attainable levels 0.047/0.053/0.060
    // for the subcritical mean), and a fixed band around alpha would fail a
    // few percent of seeds by construction rather than by defect. The gate
    // therefore compares the fresh rejection rate against the calibration
    // sample's own tail mass at the critical value -- the two estimate the
    // same quantity for any null law, discrete or continuous, so their
    // difference is pure binomial noise -- and separately requires that tail
    // mass to sit in `[alpha, alpha + 0.025]`, which a correct order
    // statistic guarantees (the upper slack covers the largest lattice atom
    // in the battery) while a wrong quantile rank misses it immediately.
    // The quick probe uses the cycle with the conditionally-centered
    // statistic, whose support is effectively continuous.
    let probes: Vec<(String, CouplingMatrix, SamplerBackend, StatTag)> = match scale {
        VerifyScale::Quick => match CouplingMatrix::cycle(500, 0.8) {
            Ok(q) => {
                vec![("cycle(0.8) n=500".to_string(), q, SamplerBackend::Auto, StatTag::CondCentered)]
            }
            Err(_) => vec![],
        },
        VerifyScale::Full => {
            let build = || -> Result<Vec<(String, CouplingMatrix, SamplerBackend, StatTag)>> {
                Ok(vec![
                    (
                        "curie_weiss(0.5) n=500 sqrt_n_mean".to_string(),
                        CouplingMatrix::curie_weiss(500, 0.5)?,
                        SamplerBackend::Auto,
                        StatTag::SqrtNMean,
                    ),
                    (
                        "curie_weiss(1.0) n=500 quarter_root_mean".to_string(),
                        CouplingMatrix::curie_weiss(500, 1.0)?,
                        SamplerBackend::Auto,
                        StatTag::QuarterRootMean,
                    ),
                    (
                        "curie_weiss(1.5) n=500 cond_centered".to_string(),
                        CouplingMatrix::curie_weiss(500, 1.5)?,
                        SamplerBackend::Auto,
                        StatTag::CondCentered,
                    ),
                    (
                        "cycle(0.8) n=500 cond_centered".to_string(),
                        CouplingMatrix::cycle(500, 0.8)?,
                        SamplerBackend::Auto,
                        StatTag::CondCentered,
                    ),
                    (
                        "erdos_renyi(0.6, 0.3) n=64 glauber cond_centered".to_string(),
                        CouplingMatrix::erdos_renyi(64, 0.6, 0.3, 11)?,
                        SamplerBackend::Glauber(crate::samplers::GlauberConfig::default_for(64)),
                        StatTag::CondCentered,
                    ),
                ])
            };
            match build() {
                Ok(v) => v,
                Err(_) => vec![],
            }
        }
    };
    let (m_null, fresh) = match scale {
        VerifyScale::Quick => (4000, 1000),
        VerifyScale::Full => (8000, 2000),
    };
    let alpha = 0.05;
    probes
        .into_iter()
        .enumerate()
        .map(|(i, (label, q, backend, tag))| {
            run_check(&format!("level_control {label}"), || {
                let probe = level_control_probe(
                    &q,
                    backend,
                    tag,
                    alpha,
                    m_null,
                    fresh,
                    rng::derive(seed, rng::role::VERIFY, &[5, i as u64]),
                )?;
                let paired_ok = (probe.level - probe.cal_tail).abs() <= 3.0 * probe.se_paired;
                let tail_ok = probe.cal_tail >= alpha && probe.cal_tail <= alpha + 0.025;
                Ok((
                    paired_ok && tail_ok,
                    format!(
                        "type I = {:.4} vs calibrated tail {:.4} (+- {:.4}); tail window [{alpha:.3}, {:.3}]",
                        probe.level,
                        probe.cal_tail,
                        3.0 * probe.se_paired,
                        alpha + 0.025,
                    ),
                ))
            })
        })
        .collect()
}

fn check_limit_law_gof(seed: u64) -> Vec<CheckEntry> {
    let mut entries = Vec::new();
    let n = 1000usize;
    let draw_stats = |theta: f64, draws: usize, sub: u64| -> Result<Vec<f64>> {
        let q = CouplingMatrix::curie_weiss(n, theta)?;
        let prepared = ModelSpec::null_model(q, SamplerBackend::Auto).prepare()?;
        (0..draws)
            .into_par_iter()
            .map(|i| {
                let mut rng =
                    rng::stream(rng::derive(seed, rng::role::VERIFY, &[6, sub]), rng::role::VERIFY, i as u64);
                Ok(prepared.draw(&mut rng)?.total_spin() as f64 / n as f64)
            })
            .collect()
    };

    entries.push(run_check("gof_subcritical_normal", || {
        let means = draw_stats(0.5, 2000, 1)?;
        let law = null_limit(0.5)?;
        let stats: Vec<f64> = means.iter().map(|m| m * (n as f64).sqrt()).collect();
        let d = ks_distance(&stats, |x| law.cdf(x));
        Ok((d < 0.06, format!("KS(sqrt(n) Xbar, Normal(0, 2)) = {d:.4} over 2000 draws")))
    }));

    entries.push(run_check("gof_critical_quartic", || {
        let means = draw_stats(1.0, 2000, 2)?;
        let w = QuarticW::new();
        let stats: Vec<f64> = means.iter().map(|m| m * (n as f64).powf(0.25)).collect();
        let d = ks_distance(&stats, |x| w.cdf(x));
        Ok((d < 0.06, format!("KS(n^(1/4) Xbar, quartic law) = {d:.4} over 2000 draws")))
    }));

    entries.push(run_check("gof_supercritical_conditional_normal", || {
        let means = draw_stats(1.5, 4200, 3)?;
        let m_theta = solve_spontaneous_magnetization(1.5)?.root;
        let sd = conditional_variance(1.5)?.sqrt();
        let law = statrs::distribution::Normal::new(0.0, sd).map_err(|e| {
            crate::error::Error::invalid(format!("normal construction failed: {e}"))
        })?;
        let stats: Vec<f64> = means
            .iter()
            .filter(|&&m| m > 0.0)
            .map(|m| (m - m_theta) * (n as f64).sqrt())
            .collect();
        use statrs::distribution::ContinuousCDF;
        let d = ks_distance(&stats, |x| law.cdf(x));
        Ok((
            d < 0.08,
            format!(
                "KS(sqrt(n)(Xbar - m), Normal(0, {:.4})) = {d:.4} over {} positive-phase draws",
                sd * sd,
                stats.len()
            ),
        ))
    }));

    entries
}

fn check_concentration_sweep(seed: u64) -> Vec<CheckEntry> {
    let models: Vec<(String, Result<CouplingMatrix>)> = vec![
        ("curie_weiss(0.5) n=200".to_string(), CouplingMatrix::curie_weiss(200, 0.5)),
        ("curie_weiss(1.5) n=200".to_string(), CouplingMatrix::curie_weiss(200, 1.5)),
        ("cycle(0.8) n=200".to_string(), CouplingMatrix::cycle(200, 0.8)),
    ];
    models
        .into_iter()
        .enumerate()
        .map(|(i, (label, q))| {
            run_check(&format!("concentration_tail_bound {label}"), || {
                let q = q?;
                // Ten levels spanning the bound from near 1 down to ~1e-8.
                let norm = q.condition_report().inf_norm;
                let t_max = (1.0 + norm) * (4.0 * (2e8_f64).ln() / q.n() as f64).sqrt();
                let t_grid: Vec<f64> = (1..=10).map(|k| k as f64 * t_max / 10.0).collect();
                let sweep = lemma_tail_sweep(
                    &q,
                    100_000,
                    &t_grid,
                    rng::derive(seed, rng::role::VERIFY, &[8, i as u64]),
                )?;
                let violations: Vec<&TailCheck> = sweep.iter().filter(|c| c.violated()).collect();
                if let Some(v) = violations.first() {
                    return Ok((
                        false,
                        format!(
                            "{} violations; first at t = {:.4}: empirical {:.2e} > bound {:.2e}",
                            violations.len(),
                            v.t,
                            v.empirical,
                            v.bound
                        ),
                    ));
                }
                let slack = sweep
                    .iter()
                    .map(|c| c.bound - c.empirical)
                    .fold(f64::INFINITY, f64::min);
                Ok((true, format!("0 violations on 10 levels; min slack {slack:.3e}")))
            })
        })
        .collect()
}

/// Run the suite. All randomness derives from `master_seed`; the report is
/// identical for any thread count.
/// The closed-form / small-sample identity checks: likelihood-ratio
/// monotonicity, the tanh difference inequality, fixed-point residuals, the
/// auxiliary second-moment bound, and the critical-potential mode. Exposed
/// separately so callers can run them without the Monte Carlo batteries.
pub fn theory_checks(scale: VerifyScale, master_seed: u64) -> Vec<CheckEntry> {
    vec![
        check_fixed_points(),
        check_lr_profile(),
        check_tanh_inequality(master_seed),
        check_aux_mode(),
        check_aux_second_moment(scale, master_seed),
    ]
}

pub fn verify_suite(scale: VerifyScale, master_seed: u64) -> Result<VerifyReport> {
    let pool = crate::experiments::thread_pool()?;
    pool.install(|| {
        let mut entries = vec![
            check_detection_boundary(),
            check_quartic_law(),
            check_null_limit_quantiles(),
            check_cycle_mgf_identity(),
        ];
        entries.extend(theory_checks(scale, master_seed));
        entries.extend(check_sampler_oracles(scale, master_seed));
        entries.extend(check_level_control(scale, master_seed));
        if scale == VerifyScale::Full {
            entries.extend(check_limit_law_gof(master_seed));
            entries.extend(check_concentration_sweep(master_seed));
        }
        Ok(VerifyReport { scale, entries })
    })
}
