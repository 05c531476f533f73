"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
Run standalone with ``python tests/test_acceptance.py``.
"""
import math
import os
import sys
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest

from weiltrace.characters import character, local_factor_logderiv_check
from weiltrace.explicit import archimedean_kernel_term, gamma_line_integral, spectral_lhs_zeta, weil_rhs, weil_rhs_zeta
from weiltrace.special import gauss_weil_pv
from weiltrace.spectral import (
    SQRT3_HALF,
    MsrScalarState,
    TruncationParams,
    bound_sweep,
    g0_family,
    log_grid,
    msr_closed_form,
    msr_limit,
    positivity_scan,
    pv_term,
    rows_to_csv,
)
from weiltrace.testfn import bump, mult_convolve
from weiltrace.zeros import compute_zeros, count_deviation, rotated, lfunction

# mpmath.zetazero(1).imag
ZETA_FIRST = 14.1347251417346937904


def _record(log, n, ok, detail):
    log[n] = (bool(ok), detail)
    assert ok, detail


def test_c01_spectral_identity(acceptance_log):
    start = time.perf_counter()
    zeros = compute_zeros("zeta", 1000.0)
    worst = 0.0
    for r in (math.log(8), 1.8, 1.4, 1.0, 0.6):
        rep = weil_rhs_zeta(bump(r), "thm_1_1_sign_resolved", zeros)
        worst = max(worst, abs(rep.residual))
    elapsed = time.perf_counter() - start
    _record(acceptance_log, 1, worst <= 1e-6 and elapsed <= 120 and len(zeros) == 649,
            f"max residual {worst:.2e} (<= 1e-6), {len(zeros)} zeros, {elapsed:.1f} s (<= 120 s)")


def test_c02_dirichlet_identity(acceptance_log):
    start = time.perf_counter()
    g = bump(math.log(8))
    worst = 0.0
    for label in ("1.0", "3.1", "4.1"):
        chi = character(label)
        lid = "zeta" if chi.modulus == 1 else f"dirichlet:{label}"
        z = compute_zeros(lid, 200.0)
        rep = weil_rhs(g, chi if chi.modulus > 1 else None, z)
        worst = max(worst, abs(rep.residual))
    elapsed = time.perf_counter() - start
    _record(acceptance_log, 2, worst <= 1e-5 and elapsed <= 300,
            f"max residual {worst:.2e} (<= 1e-5), {elapsed:.1f} s (<= 300 s)")


def test_c03_archimedean_forms(acceptance_log):
    g = bump(math.log(4))
    worst = 0.0
    for a, b, M in ((0, 0, 2), (1, 0, 2), (0, 0.5, 2), (0, 0, 1)):
        k = complex(archimedean_kernel_term(g, a, b, M))
        line = complex(gamma_line_integral(g, a, b, M))
        worst = max(worst, abs(k - line))
    _record(acceptance_log, 3, worst <= 1e-8, f"max |kernel - line| {worst:.2e} (<= 1e-8)")


def test_c04_gauss_weil(acceptance_log):
    worst = 0.0
    for s in (0.5, 1, 2, 1 + 1j, 0.5 + 3j):
        ref = -2 * complex(mp.digamma(s))
        worst = max(worst, abs(gauss_weil_pv(s) - ref))
    _record(acceptance_log, 4, worst <= 1e-8, f"max |pv + 2 psi| {worst:.2e} (<= 1e-8)")


def test_c05_local_factor(acceptance_log):
    worst = 0.0
    checked = 0
    for label in ("7.5", "7.1"):
        for p, s in ((2, 1.5), (3, 1.5), (5, 2 + 1j)):
            r = local_factor_logderiv_check(p, character(label), s, terms=200)
            assert not r.ramified
            worst = max(worst, abs(r.closed_form - r.series))
            checked += 1
    _record(acceptance_log, 5, worst <= 1e-12 and checked == 6,
            f"max |closed - series| {worst:.2e} (<= 1e-12) over {checked} points")


def _squares():
    return [
        mult_convolve(bump(0.3)),
        mult_convolve(bump(0.5, 0.1)),
        mult_convolve(bump(0.2, -0.15)),
        mult_convolve(g0_family(0.8)[2]),
    ]


def test_c06_positivity(acceptance_log):
    worst = math.inf
    for g in _squares():
        J = spectral_lhs_zeta(g)
        g1 = float(g(1.0))
        for T in (1.0, 2.0, 10.0):
            pv = pv_term(g, TruncationParams(T))
            value = g1 * math.log(T) + J + pv
            scale = max(1.0, abs(g1 * math.log(T)) + abs(J) + abs(pv))
            worst = min(worst, value / scale)
    _record(acceptance_log, 6, worst >= -1e-8, f"min term/scale {worst:.3e} (>= -1e-8) over 12 cases")


def test_c07_lower_bound_sweep(acceptance_log, tmp_path_factory):
    zeros = compute_zeros("zeta", 1000.0)
    grid = log_grid(SQRT3_HALF, 100.0, 20)
    out = Path(os.environ.get("WEILTRACE_ARTIFACTS") or tmp_path_factory.mktemp("sweep"))
    out.mkdir(parents=True, exist_ok=True)
    worst = math.inf
    for i, g in enumerate(_squares()[:3]):
        rows = bound_sweep(g, zeros, grid)
        (out / f"bound_sweep_{i}.csv").write_text(rows_to_csv(rows), encoding="utf-8")
        worst = min(worst, min(r.slack for r in rows))
        bounds = [r.bound for r in rows]
        assert len(set(bounds)) == len(bounds)
    _record(acceptance_log, 7, worst >= -1e-6,
            f"min slack {worst:.3e} (>= -1e-6), 3 x {len(grid)} points, CSV in {out}")


def test_c08_weil_positivity(acceptance_log):
    zeros = compute_zeros("zeta", 1000.0)
    rows = positivity_scan([math.log(2) / 2, math.log(2)], zeros)
    positive = all(r.abs_square >= -r.tail_bound for r in rows)
    agree = max(abs(r.abs_square - r.generic) for r in rows)
    _record(acceptance_log, 8, positive and agree <= 1e-9,
            f"min W {min(r.abs_square for r in rows):.3e} over {len(rows)} cases, routes agree to {agree:.2e} (<= 1e-9)")


def test_c09_maass_selberg_limit(acceptance_log):
    ok = True
    parts = []
    for s in (0.3 + 2j, 0.5 + 1j):
        lim = msr_limit(s, 2.0)
        ratios = [abs(msr_closed_form(MsrScalarState(s + h, -s, 1.0, 1.0, 2.0)) - lim) / h for h in (1e-3, 1e-4)]
        C = ratios[0]
        ok &= all(0.8 * C <= r <= 1.2 * C for r in ratios)
        parts.append(f"s={s}: {ratios[1] / C:.4f}")
    _record(acceptance_log, 9, ok, "ratio/C at h=1e-4 " + ", ".join(parts) + " (in [0.8, 1.2])")


def test_c10_zero_machinery(acceptance_log):
    z100 = compute_zeros("zeta", 100.0)
    first = z100.gammas[0]
    lfun = lfunction("zeta")
    # the refined bracket [first - 5e-9, first + 5e-9] still changes sign
    lo, hi = rotated(np.array([first - 5e-9, first + 5e-9]), lfun)
    z = compute_zeros("zeta", 1000.0)
    g = z.gammas
    mids = np.append(0.5 * (g[1:] + g[:-1]), 1000.0)
    dev = float(np.max(np.abs(count_deviation(g, mids))))
    ok = len(z100) == 29 and lo * hi < 0 and abs(first - ZETA_FIRST) <= 1e-8 and dev <= 1
    _record(acceptance_log, 10, ok,
            f"{len(z100)} zeros to 100, first off by {abs(first - ZETA_FIRST):.1e}, max count deviation {dev:.3f}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
