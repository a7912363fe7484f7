#!/usr/bin/env python3
"""Smoke test for the locwalk_py extension module.

Builds nothing itself: it looks for the compiled cdylib under target/
(release first, then debug), exposes it under the importable name
locwalk_py, and exercises the main types and operations. Build the
library first with either

    maturin develop -m crates/locwalk-py/Cargo.toml --release

or plain cargo (which is what this script expects by default):

    cargo build -p locwalk-py --release
    python3 python/smoke_test.py
"""

import math
import os
import shutil
import sys
import tempfile


def import_module():
    try:
        import locwalk_py  # already installed (e.g. via maturin develop)
        return locwalk_py
    except ImportError:
        pass
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    candidates = [
        os.path.join(root, "target", profile, name)
        for profile in ("release", "debug")
        for name in ("liblocwalk_py.so", "locwalk_py.so", "liblocwalk_py.dylib")
    ]
    for path in candidates:
        if os.path.exists(path):
            stage = tempfile.mkdtemp(prefix="locwalk_py_")
            shutil.copy(path, os.path.join(stage, "locwalk_py.so"))
            sys.path.insert(0, stage)
            import locwalk_py
            return locwalk_py
    sys.exit(
        "locwalk_py cdylib not found; run `cargo build -p locwalk-py --release` first"
    )


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    lw = import_module()
    checks = 0

    # barrier scalar kernels
    assert lw.psi(1.5) == -0.16
    u, residual, gap = lw.solve_u([[0.0, 0.0], [0.0, 0.0]], 1, 2.0)
    approx(u, 1.0, 1e-10)
    assert gap > 0 and residual <= 1e-10
    identity = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    approx(lw.du(identity, 1, 3.0, identity), 1.0, 1e-10)
    approx(lw.d2u(identity, 2, 3.0, identity, identity), 0.0, 1e-10)
    a = [[2.0, 0.3, 0.0], [0.3, 1.5, -0.2], [0.0, -0.2, 1.0]]
    delta = [[0.5, 1.0, 0.0], [1.0, -0.7, 0.4], [0.0, 0.4, 0.2]]
    lhs, rhs, g = lw.tensor_shift_gap(a, delta, 1.2, 0.8)
    assert g >= -1e-10 and rhs >= lhs - 1e-10
    checks += 5

    # exact profiles and special functions
    g, boundary, kappa, psi_ratio = lw.gaussian_interval_profile(-10, 10, 1, 1)
    approx(g, 0.158655, 1e-6)
    approx(boundary, 0.241971, 1e-6)
    assert kappa > 0 and psi_ratio > 0
    t0, p_slab, kappa_upper, rho_upper = lw.cone_slab_profile(64, 16.0)
    approx(t0, 64 - math.sqrt(16 * 16 - 64), 1e-12)
    approx(kappa_upper, 0.526, 5e-3)
    approx(rho_upper, kappa_upper**2, 1e-12)
    assert lw.normal_cdf(0.0) == 0.5
    approx(lw.normal_cdf(1.0) + lw.normal_cdf(-1.0), 1.0, 1e-14)
    assert lw.chi2_cdf(100, 10.0) <= 1e-10
    rows = lw.small_ball_exact(25, [0.05, 0.1, 0.2])
    assert all(p <= bound for (_, p, bound) in rows)
    checks += 6

    # bodies, densities, samples
    cone = lw.Body.cone(16, 8.0)
    assert cone.contains([12.0] + [0.0] * 15)
    assert not cone.contains([4.0] + [0.0] * 15)
    assert cone.diameter == 8.0
    gauss = lw.Density.gaussian(4)
    sample = gauss.sample(20000, seed=1)
    mean, cov, degenerate = sample.mean_cov()
    assert not degenerate
    for i in range(4):
        approx(mean[i], 0.0, 0.05)
        for j in range(4):
            approx(cov[i][j], 1.0 if i == j else 0.0, 0.05)
    half = lw.Set.halfspace([1.0, 0.0, 0.0, 0.0], 0.0)
    approx(sample.set_measure(half), 0.5, 0.02)
    checks += 4

    # ball walk stays inside its body and is deterministic
    ball = lw.Body.ball(3, 1.0)
    uniform = lw.Density.uniform_on_body(ball)
    final1, proper, total = lw.run_ball_walk(uniform, [0.0, 0.0, 0.0], 0.5, 2000, seed=3)
    final2, _, _ = lw.run_ball_walk(uniform, [0.0, 0.0, 0.0], 0.5, 2000, seed=3)
    assert final1 == final2
    assert ball.contains(final1)
    assert 0 < proper <= total == 2000
    ell, se = lw.local_conductance(ball, [0.0, 0.0, 0.0], 0.1, 2000, seed=4)
    assert ell == 1.0 and se == 0.0
    checks += 3

    # localization: exact-gaussian closed form
    loc = lw.Localization(lw.Density.gaussian(4), 512, "exact-gaussian", seed=5)
    for _ in range(500):
        loc.step(1e-3)
    approx(loc.t, 0.5, 1e-9)
    scale = 1.0 / 1.5
    for i in range(4):
        approx(loc.mu[i], loc.c[i] * scale, 1e-12)
        for j in range(4):
            approx(loc.cov[i][j], scale if i == j else 0.0, 1e-12)
    g_half = loc.measure(lw.Set.halfspace([1, 0, 0, 0], 0.0))
    assert 0.0 <= g_half <= 1.0
    loc.refresh()
    assert loc.ess == 512.0
    checks += 3

    # cone experiments
    mixing = lw.cone_mixing(16, 8.0, None, 4, seed=6)
    assert len(mixing) == 4
    assert all(not censored for (_, _, _, censored) in mixing)
    drift, drift_se = lw.drift_estimate(lw.Body.cone(16, 8.0), 0.25, 12.5, 4000, seed=7)
    assert drift > 0, f"cone drift {drift} not positive"
    checks += 2

    print(f"locwalk_py smoke test: OK ({checks} check groups)")


if __name__ == "__main__":
    main()
