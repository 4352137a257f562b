//! Detection of sparse external fields in Ising models.
//!
//! The crate implements the full pipeline for studying magnetization-based
//! tests of `H0: mu = 0` against sparse alternatives (`mu_i = B > 0` on `s`
//! of `n` sites) under the Gibbs measure
//!
//! ```text
//! P(x) = exp( x'Qx/2 + mu'x ) / Z(Q, mu),    x in {-1,+1}^n,
//! ```
//!
//! with symmetric zero-diagonal coupling `Q`. The pieces:
//!
//! * [`model`] — coupling constructors (Curie-Weiss, cycle, regular
//!   circulant, Erdős–Rényi, custom), sparse signals, spin configurations;
//! * [`samplers`] — exact samplers (brute-force enumeration, the
//!   auxiliary-variable representation for Curie-Weiss, forward-backward
//!   transfer sampling on the cycle) and Glauber dynamics for general `Q`;
//! * [`statistics`] — the scaled magnetization statistics and the
//!   conditionally centered statistic;
//! * [`theory`] — fixed points, null limit laws (normal, the quartic law at
//!   the critical temperature, the conditional normal law below it),
//!   detection boundaries, concentration bounds, transfer-matrix moment
//!   generating functions, likelihood-ratio profiles;
//! * [`testing`] — Monte Carlo calibration and power/risk estimation;
//! * [`experiments`] — power surfaces over the sparsity/strength grid with
//!   CSV and PGM emission;
//! * [`verify`] — a self-check suite wiring samplers against enumeration and
//!   the statistics against their limit laws.
//!
//! Determinism: every randomized routine takes an explicit seed and derives
//! one counter-based stream per replicate ([`rng`]), so results do not depend
//! on thread scheduling. The `ISING_DETECT_THREADS` environment variable caps
//! the worker pool (unset or `0` means all cores).

pub mod error;
pub mod experiments;
pub mod model;
pub mod rng;
pub mod samplers;
pub mod statistics;
pub mod testing;
pub mod theory;
pub mod verify;

pub use error::{Error, Result};
pub use experiments::{
    emit_surface, run_power_grid, signal_strength, support_size, thread_pool, BackendLabel,
    ExperimentConfig, GridRange, KindLabel, PowerSurface, SurfaceCell,
};
pub use model::{
    build_coupling, make_signal, ConditionReport, CouplingKind, CouplingMatrix, Placement,
    SignalVector, SpinConfiguration, ENUMERATION_LIMIT,
};
pub use samplers::{
    enumerate_model, sample_aux_z, sample_curie_weiss, sample_cycle, sample_from_exact,
    sample_glauber, AuxGrid, CurieWeissSampler, CycleSampler, ExactModel, GlauberConfig,
    GlauberSampler, IndependentSampler, Scan,
};
pub use statistics::{evaluate_statistic, f_statistic, total_magnetization, StatTag, StatisticKind};
pub use testing::{
    calibrate, calibrate_with_tail, estimate_power, estimate_risk, run_test, CriticalValue,
    Decision, ModelSpec, PowerEstimate, RiskEstimate, SamplerBackend, SignalPolicy,
};
pub use theory::{
    aux_potential, concentration_bound, conditional_variance, conditional_variance_alt, cycle_mgf,
    detection_boundary, likelihood_ratio_profile, null_limit, quartic_normalizer_closed_form,
    solve_aux_mode, solve_spontaneous_magnetization, solve_tilted_fixed_point, Boundary,
    FixedPointResult, LimitDistribution, QuarticW,
};
pub use verify::{
    aux_second_moment, ks_distance, lemma_tail_sweep, level_control_probe, magnetization_tv,
    sampler_magnetization_tv, theory_checks, verify_suite, CheckEntry, LevelProbe, TailCheck,
    VerifyReport, VerifyScale,
};
