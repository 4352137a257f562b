#!/usr/bin/env python3
"""Smoke test for the ising_detect_py extension module.

Builds the module if needed (cargo build --release -p ising-detect-py),
loads it straight from the cargo target directory, and exercises the main
types and operations end to end. Exits non-zero on the first failure.
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    so = None
    for profile in ("release", "debug"):
        candidate = REPO / "target" / profile / "libising_detect_py.so"
        if candidate.exists():
            so = candidate
            break
    if so is None:
        print("extension not built yet; running cargo build --release -p ising-detect-py")
        subprocess.run(
            ["cargo", "build", "--release", "-p", "ising-detect-py"],
            cwd=REPO,
            check=True,
        )
        so = REPO / "target" / "release" / "libising_detect_py.so"
    stage = Path(tempfile.mkdtemp(prefix="ising_detect_py_"))
    shutil.copy2(so, stage / "ising_detect_py.so")
    sys.path.insert(0, str(stage))
    import ising_detect_py

    return ising_detect_py


def approx(actual, expected, tol, label):
    if abs(actual - expected) > tol:
        raise AssertionError(f"{label}: got {actual}, expected {expected} +- {tol}")


def main():
    m = load_module()
    checks = 0

    # --- coupling constructors and entries ------------------------------
    q = m.CouplingMatrix.curie_weiss(10, 0.5)
    assert q.n == 10 and abs(q.theta - 0.5) < 1e-15
    approx(q.entry(0, 1), 0.05, 1e-15, "curie_weiss entry")
    assert q.entry(3, 3) == 0.0
    rows = q.to_rows()
    assert len(rows) == 10 and len(rows[0]) == 10
    ring = m.CouplingMatrix.cycle(8, 0.8)
    approx(ring.entry(0, 1), 0.4, 1e-15, "cycle per-edge weight")
    assert ring.entry(0, 2) == 0.0
    checks += 1

    # --- signals ---------------------------------------------------------
    mu = m.SignalVector.sparse(10, 3, 0.7)
    assert mu.support == [0, 1, 2] and mu.s == 3
    dense = mu.to_dense()
    assert dense[0] == 0.7 and dense[9] == 0.0
    mu_rand = m.SignalVector.sparse(10, 3, 0.7, placement="uniform_random", seed=5)
    assert len(mu_rand.support) == 3
    checks += 1

    # --- sampling determinism and exactness ------------------------------
    draws = m.sample(q, 4000, seed=7)
    again = m.sample(q, 4000, seed=7)
    assert draws == again, "sampling is not reproducible at a fixed seed"
    assert all(s in (-1, 1) for s in draws[0])
    pmf = dict(m.exact_magnetization_pmf(q))
    approx(sum(pmf.values()), 1.0, 1e-12, "pmf normalization")
    counts = {}
    for row in draws:
        t = sum(row)
        counts[t] = counts.get(t, 0) + 1
    tv = 0.5 * sum(
        abs(counts.get(t, 0) / len(draws) - p) for t, p in pmf.items()
    )
    if tv > 0.05:
        raise AssertionError(f"sampler vs enumeration total-variation {tv:.4f} > 0.05")
    checks += 1

    # --- statistics cross-check ------------------------------------------
    spins = draws[0]
    got = m.statistic("sqrt_n_mean", spins, q)
    want = sum(spins) / math.sqrt(len(spins))
    approx(got, want, 1e-12, "sqrt_n_mean")
    f_val = m.f_stat(spins, q, mu)
    assert math.isfinite(f_val)
    checks += 1

    # --- closed-form theory ----------------------------------------------
    approx(m.boundary_exponent(0.5, 0.2), 0.3, 1e-12, "boundary exponent")
    approx(
        m.null_quantile(0.5, 0.95),
        1.6448536269514722 * math.sqrt(2.0),
        1e-9,
        "null quantile theta=0.5",
    )
    approx(m.null_cdf(0.5, m.null_quantile(0.5, 0.9)), 0.9, 1e-9, "cdf/quantile roundtrip")
    assert m.spontaneous_magnetization(0.5) == 0.0
    approx(m.spontaneous_magnetization(1.5), 0.8586, 1e-3, "m(1.5)")
    v = m.conditional_limit_variance(1.5)
    approx(v, 0.4340, 1e-3, "conditional variance at 1.5")
    bound = m.tail_bound(q, 0.5)
    assert 0.0 < bound <= 2.0
    # In the transfer-matrix normalization the t = 0 value is 1 + tanh(theta)^n.
    approx(
        m.cycle_moment_generating(0.8, 0.0, 8),
        1.0 + math.tanh(0.8) ** 8,
        1e-12,
        "cycle MGF at t=0",
    )
    checks += 1

    # --- calibrate / test / power loop ------------------------------------
    crit = m.calibrate(q, "sqrt_n_mean", alpha=0.1, m_null=2000, seed=11)
    assert crit.alpha == 0.1 and crit.m_null == 2000
    assert crit.cal_tail >= 0.1 - 1e-12
    level, _ = m.power(q, "sqrt_n_mean", crit, replicates=2000, seed=13)
    if abs(level - crit.cal_tail) > 0.035:
        raise AssertionError(
            f"fresh level {level:.4f} far from calibrated tail {crit.cal_tail:.4f}"
        )
    strong = m.SignalVector.sparse(10, 5, 1.5)
    p_alt, _ = m.power(q, "sqrt_n_mean", crit, replicates=2000, seed=17, mu=strong)
    if not p_alt > level + 0.2:
        raise AssertionError(f"power {p_alt:.4f} does not dominate level {level:.4f}")
    rejected = m.test_rejects([1] * 10, "sqrt_n_mean", crit, q)
    assert rejected, "all-plus configuration must reject"
    checks += 1

    print(f"smoke test passed ({checks} check groups)")


if __name__ == "__main__":
    main()
