//! Reference theory: fixed points, limit laws, boundaries, and bounds.
//!
//! Everything here is deterministic numerics — no sampling. These are the
//! quantities the Monte Carlo machinery is validated against:
//!
//! * spontaneous magnetization `m(theta)` (largest root of `z = tanh(theta z)`)
//!   and its tilted variant with a sparse field;
//! * the null limit law of the scaled magnetization: `N(0, 1/(1-theta))` for
//!   `theta < 1`, the quartic law `W` (density proportional to
//!   `exp(-x^4/12)`) at `theta = 1`, and, conditionally on the positive
//!   phase, `N(0, (1-m^2)/(1-theta(1-m^2)))` for `theta > 1`;
//! * the sparsity/strength detection boundary `r = 1/2 - a`
//!   (`3/4 - a` at the critical temperature);
//! * a Hoeffding-type tail bound for the centered-field functional `f`;
//! * the closed-form moment generating function of the magnetization on the
//!   cycle, from transfer-matrix eigenvalues;
//! * the auxiliary-variable potential, its critical-temperature mode, and
//!   exact likelihood-ratio profiles for independent spins.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::model::{CouplingMatrix, SignalVector};

/// Root of a scalar equation together with convergence diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct FixedPointResult {
    pub root: f64,
    /// Value of the defining equation at the root (0 for exact roots).
    pub residual: f64,
    pub iterations: u32,
}

/// `log cosh x`, stable for large `|x|`.
pub(crate) fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Largest solution of `z = tanh(theta z)` on `[0, 1]`.
///
/// Zero for `theta <= 1`; strictly positive above the critical temperature.
/// Requires `theta >= 0`.
pub fn solve_spontaneous_magnetization(theta: f64) -> Result<FixedPointResult> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::invalid(format!(
            "spontaneous magnetization needs theta >= 0, got {theta}"
        )));
    }
    if theta <= 1.0 {
        return Ok(FixedPointResult { root: 0.0, residual: 0.0, iterations: 0 });
    }
    // g(z) = tanh(theta z) - z is positive just above 0 and negative at 1;
    // bisect to machine precision.
    let g = |z: f64| (theta * z).tanh() - z;
    let mut lo = 1e-12;
    let mut hi = 1.0;
    let mut iterations = 0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(FixedPointResult { root, residual: g(root), iterations })
}

/// Largest solution of `z = p tanh(theta z + b) + (1 - p) tanh(theta z)` on
/// `[0, 1]`, the magnetization of a tilted model where a fraction `p` of
/// sites carries field `b >= 0`.
pub fn solve_tilted_fixed_point(theta: f64, p: f64, b: f64) -> Result<FixedPointResult> {
    if !theta.is_finite() {
        return Err(Error::invalid(format!("theta must be finite, got {theta}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("fraction p must lie in [0, 1], got {p}")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("field b must be finite and >= 0, got {b}")));
    }
    let g = |z: f64| p * (theta * z + b).tanh() + (1.0 - p) * (theta * z).tanh() - z;
    // March down from 1 until g >= 0. For theta > 0 the map is concave on
    // [0, 1], so {g >= 0} is an interval and the first hit brackets the
    // largest root; for theta <= 0 the equation is monotone.
    const STEPS: usize = 1000;
    let mut bracket = None;
    for k in 0..=STEPS {
        let z = (STEPS - k) as f64 / STEPS as f64;
        if g(z) >= 0.0 {
            bracket = Some(z);
            break;
        }
    }
    let Some(lo0) = bracket else {
        // g < 0 everywhere on the grid including z = 0; the root is 0 up to
        // roundoff (g(0) = p tanh b >= 0 analytically).
        return Ok(FixedPointResult { root: 0.0, residual: g(0.0), iterations: STEPS as u32 });
    };
    let mut lo = lo0;
    let mut hi = lo0 + 1.0 / STEPS as f64;
    let mut iterations = STEPS as u32;
    if lo >= 1.0 {
        // Largest root could only be 1 itself; g(1) < 1 strictly, never hit.
        hi = 1.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(FixedPointResult { root, residual: g(root), iterations })
}

/// Variance of the conditional central limit law for `theta > 1`:
/// `(1 - m^2) / (1 - theta (1 - m^2))` at `m = m(theta)`.
pub fn conditional_variance(theta: f64) -> Result<f64> {
    if !(theta > 1.0) {
        return Err(Error::invalid(format!(
            "conditional variance is defined for theta > 1, got {theta}"
        )));
    }
    let m = solve_spontaneous_magnetization(theta)?.root;
    let chi = 1.0 - m * m;
    Ok(chi / (1.0 - theta * chi))
}

/// The alternative normalization `1 / (1 - theta (1 - m^2))` sometimes
/// quoted for the same limit; kept for comparison. It differs from
/// [`conditional_variance`] by the factor `1 - m^2` and does not match
/// finite-n sampling (see the verification suite).
pub fn conditional_variance_alt(theta: f64) -> Result<f64> {
    if !(theta > 1.0) {
        return Err(Error::invalid(format!(
            "conditional variance is defined for theta > 1, got {theta}"
        )));
    }
    let m = solve_spontaneous_magnetization(theta)?.root;
    Ok(1.0 / (1.0 - theta * (1.0 - m * m)))
}

/// Outcome of the detection-boundary computation: the exponent `r` such that
/// signals with strength `B = artanh(n^{-r'})` are detectable for `r' < r`.
/// Nonpositive exponents mean no polynomial signal strength suffices at that
/// sparsity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Boundary {
    Detectable(f64),
    Undetectable(f64),
}

impl Boundary {
    /// The raw exponent, regardless of detectability.
    pub fn exponent(&self) -> f64 {
        match self {
            Boundary::Detectable(r) | Boundary::Undetectable(r) => *r,
        }
    }

    pub fn is_detectable(&self) -> bool {
        matches!(self, Boundary::Detectable(_))
    }
}

/// Critical strength exponent at sparsity exponent `a` (support size
/// `s = n^{1-a}`): `r = 1/2 - a` off criticality, `3/4 - a` at `theta = 1`
/// exactly. Requires `theta >= 0` and `a` in `(0, 1)`.
pub fn detection_boundary(theta: f64, a: f64) -> Result<Boundary> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::invalid(format!("theta must be >= 0, got {theta}")));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::invalid(format!("sparsity exponent must lie in (0, 1), got {a}")));
    }
    let r = if theta == 1.0 { 0.75 - a } else { 0.5 - a };
    if r > 0.0 {
        Ok(Boundary::Detectable(r))
    } else {
        Ok(Boundary::Undetectable(r))
    }
}

/// Null limit law of the appropriately scaled magnetization.
#[derive(Clone, Debug)]
pub enum LimitDistribution {
    /// `sqrt(n) Xbar -> N(0, variance)` for `theta < 1`.
    Normal { variance: f64 },
    /// `n^{1/4} Xbar -> W` at `theta = 1`, density proportional to `exp(-x^4/12)`.
    QuarticW(QuarticW),
    /// For `theta > 1`, conditionally on the positive phase
    /// `sqrt(n) (Xbar - m) -> N(0, variance)`. The cdf/quantile refer to the
    /// centered variable; `center` records `m(theta)`.
    ConditionalNormal { center: f64, variance: f64 },
}

impl LimitDistribution {
    /// CDF of the (centered, where applicable) limit variable.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            LimitDistribution::Normal { variance }
            | LimitDistribution::ConditionalNormal { variance, .. } => {
                Normal::new(0.0, variance.sqrt()).expect("positive variance").cdf(x)
            }
            LimitDistribution::QuarticW(w) => w.cdf(x),
        }
    }

    /// Quantile of the (centered, where applicable) limit variable;
    /// `p` must lie in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::invalid(format!("quantile level must lie in (0,1), got {p}")));
        }
        Ok(match self {
            LimitDistribution::Normal { variance }
            | LimitDistribution::ConditionalNormal { variance, .. } => {
                Normal::new(0.0, variance.sqrt()).expect("positive variance").inverse_cdf(p)
            }
            LimitDistribution::QuarticW(w) => w.quantile(p),
        })
    }

    /// Variance of the limit (None for the quartic law, whose variance the
    /// crate does not need).
    pub fn variance(&self) -> Option<f64> {
        match self {
            LimitDistribution::Normal { variance }
            | LimitDistribution::ConditionalNormal { variance, .. } => Some(*variance),
            LimitDistribution::QuarticW(_) => None,
        }
    }

    /// Phase center `m(theta)` for the conditional law, 0 otherwise.
    pub fn center(&self) -> f64 {
        match self {
            LimitDistribution::ConditionalNormal { center, .. } => *center,
            _ => 0.0,
        }
    }
}

/// Null limit of the scaled magnetization at inverse temperature `theta >= 0`.
pub fn null_limit(theta: f64) -> Result<LimitDistribution> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::invalid(format!("theta must be >= 0, got {theta}")));
    }
    if theta < 1.0 {
        Ok(LimitDistribution::Normal { variance: 1.0 / (1.0 - theta) })
    } else if theta == 1.0 {
        Ok(LimitDistribution::QuarticW(QuarticW::new()))
    } else {
        let m = solve_spontaneous_magnetization(theta)?.root;
        Ok(LimitDistribution::ConditionalNormal {
            center: m,
            variance: conditional_variance(theta)?,
        })
    }
}

/// The quartic limit law at the critical temperature: density
/// `exp(-x^4/12) / normalizer` with `normalizer = 12^{1/4} Gamma(1/4) / 2`.
///
/// Tabulated once on `[-6, 6]` (the mass outside is below `1e-48`) with
/// adaptive-Simpson cell integrals; cdf/quantile interpolate the table with
/// one extra partial integral, giving ~1e-12 accuracy.
#[derive(Clone, Debug)]
pub struct QuarticW {
    step: f64,
    /// `raw_cum[i]` = integral of exp(-x^4/12) from -6 to the i-th knot.
    raw_cum: Vec<f64>,
    normalizer: f64,
}

const W_HALF_WIDTH: f64 = 6.0;
const W_CELLS: usize = 1200;

fn w_density_raw(x: f64) -> f64 {
    (-x.powi(4) / 12.0).exp()
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, eps: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * eps {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * eps, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * eps, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, eps, 40)
}

impl QuarticW {
    pub fn new() -> QuarticW {
        let step = 2.0 * W_HALF_WIDTH / W_CELLS as f64;
        let mut raw_cum = Vec::with_capacity(W_CELLS + 1);
        raw_cum.push(0.0);
        let mut acc = 0.0;
        for k in 0..W_CELLS {
            let a = -W_HALF_WIDTH + k as f64 * step;
            acc += adaptive_simpson(&w_density_raw, a, a + step, 1e-14);
            raw_cum.push(acc);
        }
        QuarticW { step, normalizer: acc, raw_cum }
    }

    /// Normalizing constant `integral of exp(-x^4/12)` (= `12^{1/4} Gamma(1/4) / 2`).
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn density(&self, x: f64) -> f64 {
        w_density_raw(x) / self.normalizer
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= -W_HALF_WIDTH {
            return 0.0;
        }
        if x >= W_HALF_WIDTH {
            return 1.0;
        }
        let pos = (x + W_HALF_WIDTH) / self.step;
        let cell = (pos.floor() as usize).min(W_CELLS - 1);
        let knot = -W_HALF_WIDTH + cell as f64 * self.step;
        let partial = if x > knot {
            adaptive_simpson(&w_density_raw, knot, x, 1e-14)
        } else {
            0.0
        };
        ((self.raw_cum[cell] + partial) / self.normalizer).clamp(0.0, 1.0)
    }

    /// Quantile by bisection on the tabulated cdf; `p` in `(0, 1)`.
    pub fn quantile(&self, p: f64) -> f64 {
        let mut lo = -W_HALF_WIDTH;
        let mut hi = W_HALF_WIDTH;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

impl Default for QuarticW {
    fn default() -> Self {
        QuarticW::new()
    }
}

/// Closed form of the quartic normalizer via the gamma function, used to
/// cross-check the tabulated integral.
pub fn quartic_normalizer_closed_form() -> f64 {
    12.0f64.powf(0.25) * gamma(0.25) / 2.0
}

/// Hoeffding-type tail bound for the centered-field functional:
/// `P(|f| >= t) <= 2 exp(-n t^2 / (4 (1 + |||Q|||)^2))`, capped at 1,
/// where `|||Q|||` is the l-inf operator norm. Requires `t > 0`.
pub fn concentration_bound(q: &CouplingMatrix, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("tail level t must be > 0, got {t}")));
    }
    let norm = q.condition_report().inf_norm;
    let n = q.n() as f64;
    let bound = 2.0 * (-n * t * t / (4.0 * (1.0 + norm).powi(2))).exp();
    Ok(bound.min(1.0))
}

/// Moment generating function of `sum_i X_i / sqrt(n)` on the `n`-cycle, in
/// the transfer-matrix normalization: with `h = t / sqrt(n)`,
///
/// ```text
/// lambda_{1,2} = ( e^theta cosh h +- sqrt(e^{2 theta} sinh^2 h + e^{-2 theta}) )
///                / (e^theta + e^{-theta}),
/// mgf = lambda_1^n + lambda_2^n.
/// ```
///
/// At `t = 0` this equals `1 + tanh(theta)^n` (not 1): the normalization by
/// `(2 cosh theta)^n` absorbs the ring's partition function only up to that
/// factor. Equivalently, `mgf = Z(Q', h 1) / (2 cosh theta)^n` where `Q'` is
/// the cycle coupling with per-edge weight `theta` (i.e. built with strength
/// parameter `2 theta`) — the identity the enumeration oracle checks.
/// Requires `n >= 3`.
pub fn cycle_mgf(theta: f64, t: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid(format!("cycle mgf requires n >= 3, got {n}")));
    }
    if !theta.is_finite() || !t.is_finite() {
        return Err(Error::invalid("theta and t must be finite".to_string()));
    }
    let h = t / (n as f64).sqrt();
    // Scale numerator and denominator by e^{-|theta|} to avoid overflow.
    let (lambda1, lambda2) = if theta >= 0.0 {
        let r = (-2.0 * theta).exp();
        let disc = (h.sinh().powi(2) + r * r).sqrt();
        ((h.cosh() + disc) / (1.0 + r), (h.cosh() - disc) / (1.0 + r))
    } else {
        let q = (2.0 * theta).exp();
        let disc = (q * q * h.sinh().powi(2) + 1.0).sqrt();
        ((q * h.cosh() + disc) / (1.0 + q), (q * h.cosh() - disc) / (1.0 + q))
    };
    debug_assert!(lambda1 > 0.0);
    let log1 = lambda1.ln();
    let lead = (n as f64 * log1).exp();
    if lambda2 == 0.0 {
        return Ok(lead);
    }
    let ratio_pow = (n as f64 * (lambda2.abs().ln() - log1)).exp();
    // lambda2 can be negative (theta < 0); its n-th power carries sign (-1)^n.
    let sign = if lambda2 < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    Ok(lead * (1.0 + sign * ratio_pow))
}

/// Potential of the Curie-Weiss auxiliary variable:
/// `f(z) = n theta z^2 / 2 - sum_i log cosh(theta z + mu_i)`.
pub fn aux_potential(z: f64, n: usize, theta: f64, mu: &SignalVector) -> f64 {
    let s = mu.s() as f64;
    let off = n as f64 - s;
    n as f64 * theta * z * z / 2.0
        - off * ln_cosh(theta * z)
        - s * ln_cosh(theta * z + mu.strength())
}

/// Positive mode of the auxiliary density at the critical temperature
/// (`theta` must equal 1): the root of
/// `n z = (n - s) tanh(z) + s tanh(z + B)`. Zero when the signal vanishes.
pub fn solve_aux_mode(n: usize, theta: f64, mu: &SignalVector) -> Result<FixedPointResult> {
    if theta != 1.0 {
        return Err(Error::invalid(format!(
            "the mode solver applies at the critical temperature theta = 1, got {theta}"
        )));
    }
    if mu.n() != n {
        return Err(Error::invalid(format!("signal has {} sites but n = {n}", mu.n())));
    }
    if mu.is_null() {
        return Ok(FixedPointResult { root: 0.0, residual: 0.0, iterations: 0 });
    }
    let nf = n as f64;
    let s = mu.s() as f64;
    let b = mu.strength();
    // d(z) = n z - (n-s) tanh z - s tanh(z + B): negative at 0+ (slope of the
    // potential is downhill), positive at 1; bisect.
    let d = |z: f64| nf * z - (nf - s) * z.tanh() - s * (z + b).tanh();
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut iterations = 0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        if d(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    Ok(FixedPointResult { root, residual: d(root) / nf, iterations })
}

/// Likelihood-ratio profile over the number of positive spins, for
/// independent spins and a size-`s` exchangeable signal of strength `b`:
///
/// `profile[k] = E[exp(b (2 J - s))]` with `J` hypergeometric — the number
/// of signal sites among `k` positives. Exact in O(n^2); `n <= 10^4`.
pub fn likelihood_ratio_profile(n: usize, s: usize, b: f64) -> Result<Vec<f64>> {
    const LIMIT: usize = 10_000;
    if n == 0 || n > LIMIT {
        return Err(Error::invalid(format!("need 1 <= n <= {LIMIT}, got {n}")));
    }
    if s > n {
        return Err(Error::invalid(format!("support size {s} exceeds n = {n}")));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::invalid(format!("strength must be finite and >= 0, got {b}")));
    }
    // ln k! table.
    let mut ln_fact = vec![0.0f64; n + 1];
    for k in 1..=n {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let ln_choose = |a: usize, c: usize| ln_fact[a] - ln_fact[c] - ln_fact[a - c];

    let mut profile = Vec::with_capacity(n + 1);
    let mut terms: Vec<f64> = Vec::with_capacity(s + 1);
    for k in 0..=n {
        terms.clear();
        let j_lo = k.saturating_sub(n - s);
        let j_hi = s.min(k);
        for j in j_lo..=j_hi {
            terms.push(
                ln_choose(s, j) + ln_choose(n - s, k - j) - ln_choose(n, k)
                    + b * (2.0 * j as f64 - s as f64),
            );
        }
        let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = terms.iter().map(|&t| (t - max).exp()).sum();
        profile.push((max + sum.ln()).exp());
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{make_signal, CouplingKind, Placement};

    #[test]
    fn spontaneous_magnetization_values() {
        // Subcritical and critical: zero root, exactly.
        for theta in [0.0, 0.3, 1.0] {
            let r = solve_spontaneous_magnetization(theta).unwrap();
            assert_eq!(r.root, 0.0);
            assert_eq!(r.residual, 0.0);
        }
        // Frozen supercritical roots.
        for (theta, want) in [
            (1.2, 0.658569660405754),
            (1.5, 0.85855963664011036),
            (2.0, 0.95750402407726874),
        ] {
            let r = solve_spontaneous_magnetization(theta).unwrap();
            assert!((r.root - want).abs() < 1e-12, "theta={theta}: {}", r.root);
            assert!(r.residual.abs() < 1e-12);
            assert!(r.iterations > 0);
        }
        // Continuity across the transition: root -> 0 as theta -> 1+.
        assert!(solve_spontaneous_magnetization(1.0001).unwrap().root < 0.02);
        assert!(solve_spontaneous_magnetization(1.0 + 1e-6).unwrap().root < 2e-3);
        assert!(solve_spontaneous_magnetization(-0.1).is_err());
    }

    #[test]
    fn tilted_fixed_point_values() {
        for ((theta, p, b), want) in [
            ((1.0, 0.01, 1.0), 0.26364903210676394),
            ((0.5, 0.1, 0.5), 0.0902903607953601),
            ((1.5, 0.1, 0.5), 0.8722405709824764),
        ] {
            let r = solve_tilted_fixed_point(theta, p, b).unwrap();
            assert!((r.root - want).abs() < 1e-9, "({theta},{p},{b}): {}", r.root);
            assert!(r.residual.abs() < 1e-10);
        }
        // b = 0 reduces to the spontaneous magnetization. At theta = 1 the
        // map is tangent to the identity at 0 (g(z) ~ -z^3/3), so tanh(z)
        // rounds to z itself for z below ~2.6e-8 and any point in that band
        // is a floating-point root; allow for that flatness.
        for theta in [0.5, 1.0, 1.5] {
            let tilted = solve_tilted_fixed_point(theta, 0.3, 0.0).unwrap();
            let plain = solve_spontaneous_magnetization(theta).unwrap();
            assert!((tilted.root - plain.root).abs() < 1e-7, "theta = {theta}");
        }
        // Monotone in b.
        let lo = solve_tilted_fixed_point(0.8, 0.2, 0.2).unwrap().root;
        let hi = solve_tilted_fixed_point(0.8, 0.2, 0.8).unwrap().root;
        assert!(hi > lo);
        assert!(solve_tilted_fixed_point(0.8, 1.2, 0.2).is_err());
        assert!(solve_tilted_fixed_point(0.8, 0.2, -0.1).is_err());
    }

    #[test]
    fn conditional_variance_values() {
        assert!((conditional_variance(1.5).unwrap() - 0.4340118929399151).abs() < 1e-12);
        assert!((conditional_variance_alt(1.5).unwrap() - 1.6510178394098727).abs() < 1e-12);
        // alt = main / (1 - m^2).
        let m = solve_spontaneous_magnetization(1.5).unwrap().root;
        let ratio = conditional_variance(1.5).unwrap() / conditional_variance_alt(1.5).unwrap();
        assert!((ratio - (1.0 - m * m)).abs() < 1e-12);
        assert!(conditional_variance(0.9).is_err());
    }

    #[test]
    fn detection_boundary_examples() {
        let b = detection_boundary(0.5, 0.2).unwrap();
        assert_eq!(b, Boundary::Detectable(0.3));
        let c = detection_boundary(1.0, 0.2).unwrap();
        assert_eq!(c, Boundary::Detectable(0.55));
        let u = detection_boundary(0.5, 0.5).unwrap();
        assert!(!u.is_detectable());
        assert_eq!(u.exponent(), 0.0);
        assert!(detection_boundary(0.5, 0.0).is_err());
        assert!(detection_boundary(0.5, 1.0).is_err());
        assert!(detection_boundary(-0.5, 0.2).is_err());
        // The critical boundary sits strictly above the off-critical one.
        for a in [0.1, 0.3, 0.6] {
            assert!(
                detection_boundary(1.0, a).unwrap().exponent()
                    > detection_boundary(0.99, a).unwrap().exponent()
            );
        }
    }

    #[test]
    fn null_limit_branches() {
        match null_limit(0.0).unwrap() {
            LimitDistribution::Normal { variance } => assert_eq!(variance, 1.0),
            other => panic!("wrong branch: {other:?}"),
        }
        match null_limit(0.5).unwrap() {
            LimitDistribution::Normal { variance } => assert!((variance - 2.0).abs() < 1e-12),
            other => panic!("wrong branch: {other:?}"),
        }
        assert!(matches!(null_limit(1.0).unwrap(), LimitDistribution::QuarticW(_)));
        match null_limit(1.5).unwrap() {
            LimitDistribution::ConditionalNormal { center, variance } => {
                assert!((center - 0.85855963664011036).abs() < 1e-12);
                assert!((variance - 0.4340118929399151).abs() < 1e-12);
            }
            other => panic!("wrong branch: {other:?}"),
        }
        assert!(null_limit(-0.2).is_err());
        // N(0, 2) upper quantile, frozen.
        let q = null_limit(0.5).unwrap().quantile(0.95).unwrap();
        assert!((q - 2.3261743073533476).abs() < 1e-9);
    }

    #[test]
    fn quartic_law_matches_frozen_table() {
        let w = QuarticW::new();
        assert!((w.normalizer() - 3.3740101978000252).abs() < 1e-9);
        assert!((w.normalizer() - quartic_normalizer_closed_form()).abs() < 1e-8);
        for (p, want) in [
            (0.75, 0.8508452185147691),
            (0.90, 1.4447658380528192),
            (0.95, 1.7322775879175814),
            (0.975, 1.952100059247409),
            (0.99, 2.1814211760993913),
        ] {
            assert!((w.quantile(p) - want).abs() < 1e-8, "p = {p}: {}", w.quantile(p));
        }
        assert!((w.cdf(1.0) - 0.7915556786961051).abs() < 1e-9);
        assert!((w.cdf(0.5) - 0.6480374658049404).abs() < 1e-9);
        // Symmetry.
        assert!(w.quantile(0.5).abs() < 1e-9);
        assert!((w.quantile(0.25) + w.quantile(0.75)).abs() < 1e-9);
        for x in [0.3, 1.1, 2.5] {
            assert!((w.cdf(x) + w.cdf(-x) - 1.0).abs() < 1e-12);
        }
        // Quantile inverts the cdf.
        for p in [0.1, 0.42, 0.9] {
            assert!((w.cdf(w.quantile(p)) - p).abs() < 1e-10);
        }
        // Heavier shoulders, lighter tails than the matching normal at 95%.
        assert!(w.quantile(0.95) < 2.0);
    }

    #[test]
    fn concentration_bound_examples() {
        // Zero coupling, n = 100, t = 0.6: 2 exp(-9).
        let q = CouplingMatrix::custom(100, vec![0.0; 100 * 100]).unwrap();
        let b = concentration_bound(&q, 0.6).unwrap();
        assert!((b - 2.0 * (-9.0f64).exp()).abs() < 1e-16);
        // Frozen Curie-Weiss value.
        let cw = CouplingMatrix::curie_weiss(200, 0.5).unwrap();
        assert!((concentration_bound(&cw, 0.3).unwrap() - 0.2688676064442173).abs() < 1e-12);
        // Small t: the cap at 1 engages.
        assert_eq!(concentration_bound(&cw, 1e-6).unwrap(), 1.0);
        assert!(concentration_bound(&cw, 0.0).is_err());
        assert!(concentration_bound(&cw, -1.0).is_err());
        // Monotone decreasing in t.
        assert!(
            concentration_bound(&cw, 0.5).unwrap() < concentration_bound(&cw, 0.3).unwrap()
        );
    }

    #[test]
    fn cycle_mgf_identities() {
        // t = 0: 1 + tanh(theta)^n.
        for (theta, n) in [(0.5, 5), (0.8, 10), (-0.7, 6), (1.5, 3)] {
            let got = cycle_mgf(theta, 0.0, n).unwrap();
            let want = 1.0 + theta.tanh().powi(n as i32);
            assert!((got - want).abs() < 1e-14, "theta={theta} n={n}: {got} vs {want}");
        }
        // theta = 0: cosh(t/sqrt(n))^n (independent spins).
        for n in [3usize, 8] {
            let got = cycle_mgf(0.0, 1.3, n).unwrap();
            let want = (1.3 / (n as f64).sqrt()).cosh().powi(n as i32);
            assert!((got - want).abs() < 1e-14);
        }
        assert!(cycle_mgf(0.5, 1.0, 2).is_err());
        // Symmetry in t.
        let a = cycle_mgf(0.9, 1.7, 7).unwrap();
        let b = cycle_mgf(0.9, -1.7, 7).unwrap();
        assert!((a - b).abs() < 1e-12);
        // mgf > mgf(0) for t != 0 (even, convex in t).
        assert!(a > cycle_mgf(0.9, 0.0, 7).unwrap());
    }

    #[test]
    fn cycle_mgf_matches_enumeration() {
        // Partition-ratio identity: mgf(theta, t, n) == Z(cycle with
        // per-edge weight theta, uniform field t/sqrt(n)) / (2 cosh theta)^n.
        // The per-edge weight theta corresponds to strength parameter
        // 2*theta in the coupling constructor.
        use crate::samplers::enumerate_model;
        for (theta, t, n) in [
            (0.8f64, 1.0f64, 10usize),
            (0.5, 0.0, 5),
            (0.5, 2.0, 8),
            (-0.6, 1.5, 7),
            (1.2, -0.7, 9),
        ] {
            let q = crate::model::build_coupling(CouplingKind::Cycle, n, 2.0 * theta, None)
                .unwrap();
            let h = t / (n as f64).sqrt();
            let mu = SignalVector::uniform(n, h);
            let exact = enumerate_model(&q, &mu).unwrap();
            let log_want = exact.log_partition()
                - n as f64 * (std::f64::consts::LN_2 + theta.cosh().ln());
            let got = cycle_mgf(theta, t, n).unwrap();
            let rel = (got.ln() - log_want).abs();
            assert!(rel < 1e-10, "theta={theta} t={t} n={n}: log gap {rel}");
        }
    }

    #[test]
    fn aux_potential_and_mode() {
        // Quadratic-minus-logcosh shape: symmetric at mu = 0.
        let mu0 = SignalVector::null(50);
        let f = |z: f64| aux_potential(z, 50, 1.2, &mu0);
        assert!((f(0.4) - f(-0.4)).abs() < 1e-12);
        // Signal tilts the potential: downhill to the right of 0.
        let mu = make_signal(50, 5, 0.8, Placement::Prefix, None).unwrap();
        assert!(aux_potential(0.2, 50, 1.2, &mu) < aux_potential(-0.2, 50, 1.2, &mu));

        // Frozen mode at the critical temperature.
        let mu_big = make_signal(1000, 100, 1.0, Placement::Prefix, None).unwrap();
        let r = solve_aux_mode(1000, 1.0, &mu_big).unwrap();
        assert!((r.root - 0.5227682213752957).abs() < 1e-10, "{}", r.root);
        assert!(r.residual.abs() < 1e-12);
        // Cube-root scaling: root^3 comparable to s tanh(B) / n.
        let a = 100.0 * 1.0f64.tanh() / 1000.0;
        let ratio = r.root.powi(3) / a;
        assert!((1.0 / 6.0..=6.0).contains(&ratio), "ratio = {ratio}");

        assert_eq!(solve_aux_mode(20, 1.0, &SignalVector::null(20)).unwrap().root, 0.0);
        assert!(solve_aux_mode(20, 1.2, &SignalVector::null(20)).is_err());
    }

    #[test]
    fn likelihood_ratio_profile_closed_forms() {
        // n=2, s=1, B=0.7: e^{-B}, cosh(B), e^{B}.
        let lr = likelihood_ratio_profile(2, 1, 0.7).unwrap();
        assert!((lr[0] - 0.4965853037914095).abs() < 1e-12);
        assert!((lr[1] - 1.255169005630943).abs() < 1e-12);
        assert!((lr[2] - 2.0137527074704766).abs() < 1e-12);

        // B = 0: identically one.
        for v in likelihood_ratio_profile(40, 7, 0.0).unwrap() {
            assert!((v - 1.0).abs() < 1e-12);
        }

        // Nondecreasing in k for B >= 0.
        let lr = likelihood_ratio_profile(50, 6, 0.9).unwrap();
        assert!(lr.windows(2).all(|w| w[1] >= w[0] - 1e-12));

        // Binomial average over the null equals cosh(B)^s: the profile is
        // the conditional mean of exp(B(2J - s)) and J ~ Binomial(s, 1/2)
        // unconditionally.
        let (n, s, b) = (30usize, 7usize, 0.9f64);
        let lr = likelihood_ratio_profile(n, s, b).unwrap();
        let mut mean = 0.0;
        let mut log_binom = vec![0.0f64; n + 1];
        for k in 1..=n {
            log_binom[k] = log_binom[k - 1] + ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        for k in 0..=n {
            mean += (log_binom[k] - n as f64 * std::f64::consts::LN_2).exp() * lr[k];
        }
        assert!((mean - b.cosh().powi(s as i32)).abs() < 1e-10, "mean = {mean}");

        assert!(likelihood_ratio_profile(10_001, 5, 0.5).is_err());
        assert!(likelihood_ratio_profile(10, 11, 0.5).is_err());
    }

    #[test]
    fn tanh_cubic_lower_bound() {
        // tanh(x) >= x - x^3/3 for x >= 0 (drives the signal-mass lower
        // bounds); checked on a dense grid.
        for k in 0..=5000 {
            let x = k as f64 * 1e-3;
            assert!(x.tanh() >= x - x.powi(3) / 3.0 - 1e-12, "x = {x}");
        }
    }

    #[test]
    fn log_partition_is_monotone_in_uniform_field() {
        // t -> Z(Q, (t/sqrt n) 1) is nondecreasing on t >= 0 (by symmetry of
        // the null model and FKG-type positivity); checked by enumeration.
        use crate::samplers::enumerate_model;
        let n = 8;
        for q in [
            CouplingMatrix::curie_weiss(n, 0.9).unwrap(),
            CouplingMatrix::cycle(n, 1.4).unwrap(),
            CouplingMatrix::erdos_renyi(n, 0.7, 0.6, 5).unwrap(),
        ] {
            let mut prev = f64::NEG_INFINITY;
            for k in 0..=12 {
                let t = k as f64 * 0.25;
                let mu = SignalVector::uniform(n, t / (n as f64).sqrt());
                let lp = enumerate_model(&q, &mu).unwrap().log_partition();
                assert!(lp >= prev - 1e-12, "kind {:?} t={t}", q.kind());
                prev = lp;
            }
        }
    }
}
