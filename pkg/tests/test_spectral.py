import math

import numpy as np
import pytest

from weiltrace.errors import DomainError, ParameterError
from weiltrace.explicit import spectral_lhs_zeta, symmetrize
from weiltrace.spectral import (
    SQRT3_HALF,
    MsrScalarState,
    TruncationParams,
    bound_sweep,
    g0_family,
    log_grid,
    lower_bound_rhs,
    msr_closed_form,
    msr_closed_form_dlogT,
    msr_limit,
    positivity_scan,
    pv_term,
    rows_to_csv,
    scan_minimum,
    truncated_spectral_term,
    truncation_kernel,
    weil_functional,
)
from weiltrace.testfn import TestFunction, bump, mult_convolve
from weiltrace.zeros import zero_sum


@pytest.fixture(scope="module")
def square():
    g = mult_convolve(bump(0.3))
    return g, spectral_lhs_zeta(g)


class TestKernel:
    @pytest.mark.parametrize("T", [1.0, 1.5, 2.0, 10.0, 1000.0])
    def test_nonnegative(self, T):
        t = np.linspace(0.0, 60.0, 6001)
        assert truncation_kernel(t, T).min() >= -1e-12

    def test_negative_below_one(self):
        t = np.linspace(0.0, 10.0, 2001)
        assert truncation_kernel(t, math.sqrt(0.866)).min() < -0.1

    def test_continuous_at_zero(self):
        k = truncation_kernel(np.array([0.0, 1e-6]), 2.0)
        assert abs(k[0] - k[1]) < 1e-5

    def test_matches_limit(self):
        for t in (0.3, 2.0, 7.5):
            assert abs(truncation_kernel(t, 2.0)[0] - 0.5 * msr_limit(1j * t, 2.0)) < 1e-12


class TestTruncatedTerm:
    def test_real_for_real_g(self, square):
        g, _ = square
        gc = TestFunction(lambda x: g.evaluate(x) * (1 + 0j), g.support_lo, g.support_hi)
        v = pv_term(gc, TruncationParams(2.0))
        assert abs(complex(v).imag) <= 1e-9
        assert abs(complex(v).real - pv_term(g, TruncationParams(2.0))) < 1e-13

    @pytest.mark.parametrize("T", [1.0, 2.0, 10.0])
    def test_positive(self, square, T):
        g, J = square
        assert truncated_spectral_term(g, TruncationParams(T), spectral=J) >= -1e-8

    def test_kernel_quadrature(self, square):
        # (1/4 pi) int_0^inf K_T(t) e(t) dt with e(t) = 2 Re g^(it), by plain quadrature
        from scipy.integrate import quad
        from weiltrace.testfn import mellin
        g, J = square
        T = 2.0
        f = lambda t: truncation_kernel(t, T)[0] * 2 * mellin(g, 1j * t).value.real
        ref = sum(quad(f, a, a + 10, epsabs=1e-14, limit=400)[0] for a in range(0, 450, 10)) / (4 * math.pi)
        assert abs(truncated_spectral_term(g, TruncationParams(T), spectral=J) - ref) < 1e-9

    def test_log_derivative_at_large_T(self, square):
        g, J = square
        h = 1e-3
        up = truncated_spectral_term(g, TruncationParams(1e3 * math.exp(h)), spectral=J)
        down = truncated_spectral_term(g, TruncationParams(1e3 * math.exp(-h)), spectral=J)
        g1 = float(g(1.0))
        assert abs((up - down) / (2 * h) - g1) < 1e-2 * g1

    def test_pv_window_independent(self, square):
        g, _ = square
        a = pv_term(g, TruncationParams(2.0, pv_epsilon=1e-3))
        b = pv_term(g, TruncationParams(2.0, pv_epsilon=2e-3))
        assert abs(a - b) < 1e-11

    def test_printed_form_negative(self, square):
        g, J = square
        assert truncated_spectral_term(g, TruncationParams(1.0), "as_printed", spectral=J) < -1e-3

    def test_negative_just_above_threshold(self, square):
        g, J = square
        assert truncated_spectral_term(g, TruncationParams(0.87), spectral=J) < -1e-3

    def test_params(self):
        with pytest.raises(ParameterError):
            TruncationParams(0.0)
        with pytest.raises(ParameterError):
            TruncationParams(2.0, pv_epsilon=0.0)
        with pytest.raises(DomainError):
            TruncationParams(0.8).require_positivity_range()
        with pytest.raises(ParameterError):
            pv_term(bump(0.3), TruncationParams(2.0), form="other")


class TestLowerBound:
    @pytest.fixture(scope="class")
    @staticmethod
    def rows(square, zeta_zeros):
        g, _ = square
        return bound_sweep(g, zeta_zeros, [1.0, 2.0, 10.0, 100.0])

    def test_inequality(self, rows):
        assert all(r.slack >= -1e-6 for r in rows)

    def test_slack_is_truncated_term(self, rows):
        for r in rows:
            assert abs(r.slack - r.truncated_term) < 1e-6

    def test_bookkeeping(self, rows):
        for r in rows:
            assert r.bound == -r.explicit_terms - r.g1_log_T - r.pv
        logs = [r.g1_log_T for r in rows]
        assert logs == sorted(logs)

    def test_threshold_difference(self, square):
        g, _ = square
        T1 = SQRT3_HALF * (1 + 1e-6)
        p1 = pv_term(g, TruncationParams(T1))
        p0 = pv_term(g, TruncationParams(1.0))
        b1, b0 = lower_bound_rhs(g, T1, pv=p1), lower_bound_rhs(g, 1.0, pv=p0)
        g1 = float(g(1.0))
        assert abs((b1 - b0) - (g1 * math.log(1 / T1) - (p1 - p0))) < 1e-12

    def test_domain(self, square):
        with pytest.raises(DomainError):
            lower_bound_rhs(square[0], 0.8)

    def test_zero_sum_side(self, rows, square, zeta_zeros):
        g, _ = square
        assert rows[0].zero_sum == zero_sum(zeta_zeros, symmetrize(g)).value

    def test_csv(self, rows):
        text = rows_to_csv(rows)
        lines = text.strip().split("\n")
        assert lines[0].startswith("T,") and len(lines) == 5
        assert float(lines[1].split(",")[0]) == 1.0

    def test_log_grid(self):
        grid = log_grid(SQRT3_HALF, 100.0, 20)
        assert len(grid) == 20 and grid[0] > SQRT3_HALF and grid[-1] == pytest.approx(100.0)


class TestWeil:
    def test_routes_agree(self, zeta_zeros):
        w = weil_functional(g0_family(math.log(2) / 2)[2], zeta_zeros)
        assert w.agreement <= 1e-9
        assert abs(w.abs_square - w.explicit_side) <= 1e-9

    def test_positive_at_threshold(self, zeta_zeros):
        rows = positivity_scan([math.log(2) / 2], zeta_zeros)
        assert len(rows) == 4
        assert all(r.abs_square >= -r.tail_bound for r in rows)
        assert min(scan_minimum(rows).values()) > 0

    def test_zero_function(self, zeta_zeros):
        w = weil_functional(bump(0.3).scaled(0.0), zeta_zeros)
        assert w.abs_square == 0 and w.generic == 0

    def test_family_support(self):
        for g0 in g0_family(0.5):
            assert g0.support_hi == pytest.approx(math.exp(0.25))

    def test_rejects(self, zeta_zeros, dirichlet_zeros):
        with pytest.raises(ParameterError):
            weil_functional(bump(0.3), dirichlet_zeros["4.1"])
        b = bump(0.3)
        gc = TestFunction(lambda x: 1j * b.evaluate(x), b.support_lo, b.support_hi)
        with pytest.raises(ParameterError):
            weil_functional(gc, zeta_zeros)
        with pytest.raises(ParameterError):
            positivity_scan([0.0], zeta_zeros)


class TestMaassSelberg:
    def test_pole(self):
        with pytest.raises(DomainError):
            msr_closed_form(MsrScalarState(0.4, -0.4))
        with pytest.raises(DomainError):
            msr_limit(0.0, 2.0)

    def test_hermitian_symmetry(self):
        a = msr_closed_form(MsrScalarState(0.4, 0.2, 1.0, 1.0, 2.0))
        b = msr_closed_form(MsrScalarState(0.2, 0.4, 1.0, 1.0, 2.0))
        assert math.isfinite(abs(a))
        assert abs(a - b.conjugate()) < 1e-12
        s1, s2, p1, p2 = 0.3 + 1.1j, -0.2 + 0.4j, 1 + 2j, 0.5 - 1j
        a = msr_closed_form(MsrScalarState(s1, s2, p1, p2, 3.0))
        b = msr_closed_form(MsrScalarState(s2.conjugate(), s1.conjugate(), p2, p1, 3.0))
        assert abs(a - b.conjugate()) < 1e-12 * abs(a)

    def test_dlogT(self):
        st = MsrScalarState(0.4 + 0.3j, 0.2 - 0.1j, 1.0, 1.0, 2.0)
        h = 1e-5
        up = msr_closed_form(MsrScalarState(st.s1, st.s2, 1.0, 1.0, 2.0 * math.exp(h)))
        down = msr_closed_form(MsrScalarState(st.s1, st.s2, 1.0, 1.0, 2.0 * math.exp(-h)))
        assert abs((up - down) / (2 * h) - msr_closed_form_dlogT(st)) < 1e-8

    @pytest.mark.parametrize("s", [0.3 + 2j, 0.5 + 1j])
    def test_first_order_limit(self, s):
        errs = [abs(msr_closed_form(MsrScalarState(s + h, -s, 1.0, 1.0, 2.0)) - msr_limit(s, 2.0)) for h in (1e-3, 1e-4)]
        assert 8 <= errs[0] / errs[1] <= 12

    def test_printed_limit_diverges(self):
        s = 0.3 + 2j
        errs = [abs(msr_closed_form(MsrScalarState(s + h, -s, 1.0, 1.0, 2.0)) - msr_limit(s, 2.0, form="printed"))
                for h in (1e-3, 1e-4)]
        assert errs[1] > errs[0] > 1

    def test_real_on_imaginary_axis(self):
        s = 1.7j
        v = msr_limit(s, 2.0) + msr_limit(s.conjugate(), 2.0)
        assert abs(v.imag) < 1e-12
        assert abs(msr_limit(s, 2.0).imag) < 1e-12

    def test_log_T_coefficient(self):
        s = 0.3 + 2j
        d = msr_limit(s, 2.0, 2.0, 1.0) - msr_limit(s, 2.0 * math.e, 2.0, 1.0)
        # with phi1 conj(phi2) = 2 the log T coefficient is 8, once the T^{+-2s} terms are removed
        from weiltrace.special import m_scalar
        osc = lambda T: 2.0 * (m_scalar(-s) * T ** (2 * s) - m_scalar(s) * T ** (-2 * s)) / s
        assert abs(d - (-8.0 + osc(2.0) - osc(2.0 * math.e))) < 1e-12

    def test_unknown_form(self):
        with pytest.raises(ParameterError):
            msr_limit(0.5, 2.0, form="x")
