//! Test statistics for the sparse-detection problem.
//!
//! Three statistics of a configuration `x`:
//!
//! * `sqrt_n_mean`: `sqrt(n) * Xbar` — the classical scaled magnetization,
//!   appropriate away from the critical temperature;
//! * `quarter_root_mean`: `n^{1/4} * Xbar` — the critical-temperature
//!   scaling, where the magnetization lives on the `n^{-1/4}` scale;
//! * `cond_centered`: `sqrt(n) * (1/n) sum_i (x_i - tanh(m_i(x)))` — each
//!   spin centered by its conditional mean under the null (`mu = 0`), which
//!   removes the dependence-induced variance inflation.
//!
//! The conditional centering uses only the coupling matrix, never the
//! signal: it is a statistic the tester can compute. The related functional
//! [`f_statistic`] does include the field and is the quantity the
//! concentration bound controls.

use crate::error::{Error, Result};
use crate::model::{CouplingKind, CouplingMatrix, SignalVector, SpinConfiguration};

/// Statistic identity without the baggage of an owned coupling matrix; used
/// for labeling critical values and CLI/CSV round-trips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatTag {
    SqrtNMean,
    QuarterRootMean,
    CondCentered,
}

impl std::fmt::Display for StatTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StatTag::SqrtNMean => write!(f, "sqrt_n_mean"),
            StatTag::QuarterRootMean => write!(f, "quarter_root_mean"),
            StatTag::CondCentered => write!(f, "cond_centered"),
        }
    }
}

impl std::str::FromStr for StatTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "sqrt_n_mean" => Ok(StatTag::SqrtNMean),
            "quarter_root_mean" => Ok(StatTag::QuarterRootMean),
            "cond_centered" => Ok(StatTag::CondCentered),
            other => Err(Error::invalid(format!("unknown statistic '{other}'"))),
        }
    }
}

/// A fully specified statistic. Conditional centering needs the coupling
/// matrix, so that variant owns one.
#[derive(Clone, Debug)]
pub enum StatisticKind {
    SqrtNMean,
    QuarterRootMean,
    CondCentered(CouplingMatrix),
}

impl StatisticKind {
    pub fn tag(&self) -> StatTag {
        match self {
            StatisticKind::SqrtNMean => StatTag::SqrtNMean,
            StatisticKind::QuarterRootMean => StatTag::QuarterRootMean,
            StatisticKind::CondCentered(_) => StatTag::CondCentered,
        }
    }

    /// Build from a tag, attaching the coupling when centering demands it.
    pub fn from_tag(tag: StatTag, q: &CouplingMatrix) -> StatisticKind {
        match tag {
            StatTag::SqrtNMean => StatisticKind::SqrtNMean,
            StatTag::QuarterRootMean => StatisticKind::QuarterRootMean,
            StatTag::CondCentered => StatisticKind::CondCentered(q.clone()),
        }
    }
}

/// `T(x) = sum_i x_i` as a float.
pub fn total_magnetization(x: &SpinConfiguration) -> f64 {
    x.total_spin() as f64
}

/// Evaluate a statistic on one configuration.
pub fn evaluate_statistic(kind: &StatisticKind, x: &SpinConfiguration) -> Result<f64> {
    let n = x.n() as f64;
    match kind {
        StatisticKind::SqrtNMean => Ok(total_magnetization(x) / n.sqrt()),
        StatisticKind::QuarterRootMean => Ok(total_magnetization(x) / n.powf(0.75)),
        StatisticKind::CondCentered(q) => {
            if q.n() != x.n() {
                return Err(Error::invalid(format!(
                    "coupling is {}x{} but configuration has {} sites",
                    q.n(),
                    q.n(),
                    x.n()
                )));
            }
            if let CouplingKind::CurieWeiss = q.kind() {
                // Exchangeability makes the centered sum a function of the
                // total spin alone: every +1 site sees field
                // theta (T-1)/n and every -1 site theta (T+1)/n.
                let t = x.total_spin() as f64;
                let theta = q.theta();
                let n_plus = (x.n() as i64 + x.total_spin()) as f64 / 2.0;
                let n_minus = n - n_plus;
                let sum = t
                    - n_plus * (theta * (t - 1.0) / n).tanh()
                    - n_minus * (theta * (t + 1.0) / n).tanh();
                Ok(sum / n.sqrt())
            } else {
                let fields = q.local_fields(x)?;
                let sum: f64 = x
                    .spins()
                    .iter()
                    .zip(fields.iter())
                    .map(|(&s, &m)| s as f64 - m.tanh())
                    .sum();
                Ok(sum / n.sqrt())
            }
        }
    }
}

/// The centered-field functional `f(x) = (1/n) sum_i (x_i - tanh(m_i(x) + mu_i))`.
///
/// Unlike `cond_centered` this includes the external field and is normalized
/// by `n`, not `sqrt(n)`; the concentration inequality bounds its tails at
/// rate `exp(-c n t^2)`.
pub fn f_statistic(x: &SpinConfiguration, q: &CouplingMatrix, mu: &SignalVector) -> Result<f64> {
    if q.n() != x.n() || mu.n() != x.n() {
        return Err(Error::invalid(format!(
            "dimension mismatch: coupling {}, signal {}, configuration {}",
            q.n(),
            mu.n(),
            x.n()
        )));
    }
    let fields = q.local_fields(x)?;
    let sum: f64 = x
        .spins()
        .iter()
        .enumerate()
        .map(|(i, &s)| s as f64 - (fields[i] + mu.field_at(i)).tanh())
        .sum();
    Ok(sum / x.n() as f64)
}
