//! Coupling matrices, external-field (signal) vectors, and spin configurations.
//!
//! A model is the pair `(Q, mu)` of a symmetric zero-diagonal coupling matrix
//! and an external-field vector, defining the Gibbs measure
//! `P(x) ∝ exp(x'Qx/2 + mu'x)` on `{-1,+1}^n`. The constructors here cover
//! the standard families used throughout the crate:
//!
//! * Curie-Weiss: `Q_ij = theta/n` for `i != j`;
//! * cycle: `Q_ij = theta/2` for `|i-j| = 1 (mod n)`;
//! * regular circulant: `Q_ij = theta/d` for circular distance in `1..=d/2`;
//! * Erdős–Rényi: `Q_ij = theta/(n p) * G_ij` with `G_ij ~ Bernoulli(p)`
//!   i.i.d. over `i < j` from a fixed seed;
//! * custom: any user-supplied symmetric hollow matrix.
//!
//! Signals are `s`-sparse vectors taking one common value `B >= 0` on their
//! support and `0` elsewhere, the alternative hypothesis of the detection
//! problem.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest system size the brute-force enumerator accepts.
pub const ENUMERATION_LIMIT: usize = 20;

/// Structural family of a coupling matrix. Stored alongside the entries so
/// samplers and statistics can dispatch to O(1)-per-site fast paths.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingKind {
    CurieWeiss,
    Cycle,
    RegularCirculant { degree: usize },
    ErdosRenyi { edge_prob: f64 },
    Custom,
}

impl std::fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CouplingKind::CurieWeiss => write!(f, "curie_weiss"),
            CouplingKind::Cycle => write!(f, "cycle"),
            CouplingKind::RegularCirculant { degree } => {
                write!(f, "regular_circulant(degree={degree})")
            }
            CouplingKind::ErdosRenyi { edge_prob } => write!(f, "erdos_renyi(p={edge_prob})"),
            CouplingKind::Custom => write!(f, "custom"),
        }
    }
}

/// Symmetric, zero-diagonal interaction matrix with its structural metadata.
#[derive(Clone, Debug)]
pub struct CouplingMatrix {
    kind: CouplingKind,
    n: usize,
    theta: f64,
    /// Row-major dense entries, length `n * n`.
    entries: Vec<f64>,
    /// Seed used to draw the Erdős–Rényi graph, if any.
    graph_seed: Option<u64>,
}

/// Diagnostics used by concentration bounds and sanity checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionReport {
    /// `max_i sum_j |Q_ij|`, the l-inf operator norm.
    pub inf_norm: f64,
    /// `sum_ij Q_ij^2`.
    pub frobenius_sq: f64,
    /// Largest entry in absolute value.
    pub max_abs_entry: f64,
    pub is_symmetric: bool,
    pub zero_diagonal: bool,
}

/// Build a coupling matrix of the given structural family.
///
/// `seed` is required for (and only consulted by) the Erdős–Rényi family,
/// where it fixes the random graph; the same seed always yields the same
/// matrix. For `p = 1` the result coincides entry-for-entry with the
/// Curie-Weiss matrix at the same `theta`, and the diagonal stays zero.
pub fn build_coupling(
    kind: CouplingKind,
    n: usize,
    theta: f64,
    seed: Option<u64>,
) -> Result<CouplingMatrix> {
    if !theta.is_finite() {
        return Err(Error::invalid(format!("theta must be finite, got {theta}")));
    }
    match kind {
        CouplingKind::CurieWeiss => {
            require_min_n(n, 2, "curie_weiss")?;
            let v = theta / n as f64;
            let mut entries = vec![v; n * n];
            for i in 0..n {
                entries[i * n + i] = 0.0;
            }
            Ok(CouplingMatrix { kind, n, theta, entries, graph_seed: None })
        }
        CouplingKind::Cycle => {
            require_min_n(n, 3, "cycle")?;
            let v = theta / 2.0;
            let mut entries = vec![0.0; n * n];
            for i in 0..n {
                let up = (i + 1) % n;
                let down = (i + n - 1) % n;
                entries[i * n + up] = v;
                entries[i * n + down] = v;
            }
            Ok(CouplingMatrix { kind, n, theta, entries, graph_seed: None })
        }
        CouplingKind::RegularCirculant { degree } => {
            require_min_n(n, 3, "regular_circulant")?;
            if degree < 2 || degree % 2 != 0 {
                return Err(Error::invalid(format!(
                    "circulant degree must be even and >= 2, got {degree}"
                )));
            }
            // Each site couples to d/2 neighbours on each side; cap the
            // half-width strictly below n/2 so no pair is visited twice.
            if degree / 2 > (n - 1) / 2 {
                return Err(Error::invalid(format!(
                    "circulant degree {degree} too large for n = {n}"
                )));
            }
            let v = theta / degree as f64;
            let mut entries = vec![0.0; n * n];
            for i in 0..n {
                for k in 1..=degree / 2 {
                    entries[i * n + (i + k) % n] = v;
                    entries[i * n + (i + n - k) % n] = v;
                }
            }
            Ok(CouplingMatrix { kind, n, theta, entries, graph_seed: None })
        }
        CouplingKind::ErdosRenyi { edge_prob } => {
            require_min_n(n, 2, "erdos_renyi")?;
            if !(edge_prob > 0.0 && edge_prob <= 1.0) {
                return Err(Error::invalid(format!(
                    "edge probability must lie in (0, 1], got {edge_prob}"
                )));
            }
            let seed = seed.ok_or_else(|| {
                Error::invalid("erdos_renyi requires a graph seed".to_string())
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = theta / (n as f64 * edge_prob);
            let mut entries = vec![0.0; n * n];
            // Edges are drawn in row-major upper-triangle order; this order is
            // part of the reproducibility contract.
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.random_bool(edge_prob) {
                        entries[i * n + j] = v;
                        entries[j * n + i] = v;
                    }
                }
            }
            Ok(CouplingMatrix { kind, n, theta, entries, graph_seed: Some(seed) })
        }
        CouplingKind::Custom => Err(Error::invalid(
            "custom couplings are built from explicit entries via CouplingMatrix::custom"
                .to_string(),
        )),
    }
}

fn require_min_n(n: usize, min: usize, kind: &str) -> Result<()> {
    if n < min {
        return Err(Error::invalid(format!("{kind} requires n >= {min}, got {n}")));
    }
    Ok(())
}

impl CouplingMatrix {
    /// Curie-Weiss matrix: `theta/n` everywhere off the diagonal.
    pub fn curie_weiss(n: usize, theta: f64) -> Result<Self> {
        build_coupling(CouplingKind::CurieWeiss, n, theta, None)
    }

    /// Nearest-neighbour cycle: `theta/2` at circular distance one.
    pub fn cycle(n: usize, theta: f64) -> Result<Self> {
        build_coupling(CouplingKind::Cycle, n, theta, None)
    }

    /// Circulant with `degree/2` neighbours on each side, entries `theta/degree`.
    pub fn regular_circulant(n: usize, theta: f64, degree: usize) -> Result<Self> {
        build_coupling(CouplingKind::RegularCirculant { degree }, n, theta, None)
    }

    /// Erdős–Rényi coupling with entries `theta/(n p)` on the drawn edges.
    pub fn erdos_renyi(n: usize, theta: f64, edge_prob: f64, seed: u64) -> Result<Self> {
        build_coupling(CouplingKind::ErdosRenyi { edge_prob }, n, theta, Some(seed))
    }

    /// Wrap an explicit matrix, validating symmetry, zero diagonal, and
    /// finiteness. `theta` is recorded as `max |entry|` for display only.
    pub fn custom(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid(format!("custom coupling requires n >= 2, got {n}")));
        }
        if entries.len() != n * n {
            return Err(Error::InvalidCoupling(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        let m = CouplingMatrix {
            kind: CouplingKind::Custom,
            n,
            theta: entries.iter().fold(0.0_f64, |a, &v| a.max(v.abs())),
            entries,
            graph_seed: None,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            if self.entries[i * n + i] != 0.0 {
                return Err(Error::InvalidCoupling(format!("nonzero diagonal at ({i},{i})")));
            }
            for j in 0..n {
                let v = self.entries[i * n + j];
                if !v.is_finite() {
                    return Err(Error::InvalidCoupling(format!("non-finite entry at ({i},{j})")));
                }
                if v != self.entries[j * n + i] {
                    return Err(Error::InvalidCoupling(format!("asymmetry at ({i},{j})")));
                }
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Interaction strength parameter the matrix was built from.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn graph_seed(&self) -> Option<u64> {
        self.graph_seed
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Norm and structure diagnostics.
    pub fn condition_report(&self) -> ConditionReport {
        let n = self.n;
        let mut inf_norm = 0.0_f64;
        let mut frob = 0.0_f64;
        let mut max_abs = 0.0_f64;
        let mut symmetric = true;
        let mut hollow = true;
        for i in 0..n {
            let mut row_sum = 0.0;
            for j in 0..n {
                let v = self.entries[i * n + j];
                row_sum += v.abs();
                frob += v * v;
                max_abs = max_abs.max(v.abs());
                if v != self.entries[j * n + i] {
                    symmetric = false;
                }
            }
            if self.entries[i * n + i] != 0.0 {
                hollow = false;
            }
            inf_norm = inf_norm.max(row_sum);
        }
        ConditionReport {
            inf_norm,
            frobenius_sq: frob,
            max_abs_entry: max_abs,
            is_symmetric: symmetric,
            zero_diagonal: hollow,
        }
    }

    /// Local fields `m_i(x) = sum_j Q_ij x_j`.
    ///
    /// Structured families use closed forms (O(n) total for Curie-Weiss and
    /// the cycle) instead of the dense O(n^2) product; the results agree with
    /// the dense computation to floating-point roundoff.
    pub fn local_fields(&self, x: &SpinConfiguration) -> Result<Vec<f64>> {
        if x.n() != self.n {
            return Err(Error::invalid(format!(
                "configuration has {} sites but coupling has {}",
                x.n(),
                self.n
            )));
        }
        let n = self.n;
        let spins = x.spins();
        match self.kind {
            CouplingKind::CurieWeiss => {
                let t = x.total_spin() as f64;
                let scale = self.theta / n as f64;
                Ok(spins.iter().map(|&s| scale * (t - s as f64)).collect())
            }
            CouplingKind::Cycle => {
                let half = self.theta / 2.0;
                Ok((0..n)
                    .map(|i| {
                        let left = spins[(i + n - 1) % n] as f64;
                        let right = spins[(i + 1) % n] as f64;
                        half * (left + right)
                    })
                    .collect())
            }
            CouplingKind::RegularCirculant { degree } => {
                let v = self.theta / degree as f64;
                Ok((0..n)
                    .map(|i| {
                        let mut acc = 0i64;
                        for k in 1..=degree / 2 {
                            acc += spins[(i + k) % n] as i64 + spins[(i + n - k) % n] as i64;
                        }
                        v * acc as f64
                    })
                    .collect())
            }
            _ => Ok((0..n)
                .map(|i| {
                    let row = &self.entries[i * n..(i + 1) * n];
                    row.iter()
                        .zip(spins.iter())
                        .map(|(&q, &s)| q * s as f64)
                        .sum()
                })
                .collect()),
        }
    }

    /// Dense local fields ignoring the structured fast paths (test oracle).
    pub fn local_fields_dense(&self, x: &SpinConfiguration) -> Result<Vec<f64>> {
        if x.n() != self.n {
            return Err(Error::invalid("dimension mismatch".to_string()));
        }
        let n = self.n;
        let spins = x.spins();
        Ok((0..n)
            .map(|i| {
                let row = &self.entries[i * n..(i + 1) * n];
                row.iter().zip(spins.iter()).map(|(&q, &s)| q * s as f64).sum()
            })
            .collect())
    }

    /// Write the matrix as plain-text CSV, one row per line.
    pub fn write_csv<W: std::io::Write>(&self, out: &mut W) -> Result<()> {
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Where the support of a sparse signal is placed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Placement {
    /// Sites `0..s`. Under exchangeable models (Curie-Weiss) this loses no
    /// generality and keeps runs reproducible without extra seeding.
    Prefix,
    /// A uniformly random size-`s` subset, drawn from an explicit seed.
    UniformRandom,
}

impl std::fmt::Display for Placement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Placement::Prefix => write!(f, "prefix"),
            Placement::UniformRandom => write!(f, "uniform_random"),
        }
    }
}

/// Sparse external field: one common value on a support set, zero elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SignalVector {
    n: usize,
    /// Strictly increasing site indices.
    support: Vec<usize>,
    strength: f64,
}

/// Build an `s`-sparse signal of strength `B >= 0`.
///
/// `seed` is required for (and only consulted by) `Placement::UniformRandom`.
pub fn make_signal(
    n: usize,
    s: usize,
    strength: f64,
    placement: Placement,
    seed: Option<u64>,
) -> Result<SignalVector> {
    if s > n {
        return Err(Error::invalid(format!("support size {s} exceeds n = {n}")));
    }
    if !(strength >= 0.0) || !strength.is_finite() {
        return Err(Error::invalid(format!(
            "signal strength must be finite and >= 0, got {strength}"
        )));
    }
    let support = match placement {
        Placement::Prefix => (0..s).collect(),
        Placement::UniformRandom => {
            let seed = seed.ok_or_else(|| {
                Error::invalid("uniform_random placement requires a seed".to_string())
            })?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Partial Fisher-Yates: after s swaps the prefix is a uniform
            // size-s subset in random order.
            let mut idx: Vec<usize> = (0..n).collect();
            for k in 0..s {
                let j = rng.random_range(k..n);
                idx.swap(k, j);
            }
            let mut support: Vec<usize> = idx[..s].to_vec();
            support.sort_unstable();
            support
        }
    };
    Ok(SignalVector { n, support, strength })
}

impl SignalVector {
    /// The null field: no signal anywhere.
    pub fn null(n: usize) -> Self {
        SignalVector { n, support: Vec::new(), strength: 0.0 }
    }

    /// A field taking value `b` at every site. Unlike [`make_signal`] this
    /// admits negative `b`; it exists for transfer-matrix and moment
    /// generating function cross-checks that tilt in both directions.
    pub fn uniform(n: usize, b: f64) -> Self {
        if b == 0.0 {
            return SignalVector::null(n);
        }
        SignalVector { n, support: (0..n).collect(), strength: b }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Support size `s`.
    pub fn s(&self) -> usize {
        self.support.len()
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn is_null(&self) -> bool {
        self.support.is_empty() || self.strength == 0.0
    }

    /// `mu_i`: the strength on the support, zero off it.
    pub fn field_at(&self, i: usize) -> f64 {
        if self.support.binary_search(&i).is_ok() {
            self.strength
        } else {
            0.0
        }
    }

    /// Total mass `s * B`.
    pub fn signal_mass(&self) -> f64 {
        self.support.len() as f64 * self.strength
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n];
        for &i in &self.support {
            v[i] = self.strength;
        }
        v
    }
}

/// A point of `{-1,+1}^n`, stored as `i8` spins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinConfiguration {
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn new(spins: Vec<i8>) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::invalid("empty spin configuration".to_string()));
        }
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(Error::invalid(format!("spin values must be +1 or -1, got {bad}")));
        }
        Ok(SpinConfiguration { spins })
    }

    /// All-(+1) configuration.
    pub fn all_plus(n: usize) -> Self {
        SpinConfiguration { spins: vec![1; n] }
    }

    pub(crate) fn from_unchecked(spins: Vec<i8>) -> Self {
        debug_assert!(spins.iter().all(|&s| s == 1 || s == -1));
        SpinConfiguration { spins }
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    #[inline]
    pub fn spin(&self, i: usize) -> i8 {
        self.spins[i]
    }

    /// `T(x) = sum_i x_i`, exact as an integer.
    pub fn total_spin(&self) -> i64 {
        self.spins.iter().map(|&s| s as i64).sum()
    }

    /// Sample mean of the spins.
    pub fn mean(&self) -> f64 {
        self.total_spin() as f64 / self.spins.len() as f64
    }

    /// Flip every spin (used by symmetry tests).
    pub fn negated(&self) -> Self {
        SpinConfiguration { spins: self.spins.iter().map(|&s| -s).collect() }
    }
}
