import math

import numpy as np
import pytest

from weiltrace.errors import ParameterError, TailError, ZeroFileError
from weiltrace.testfn import bump
from weiltrace.zeros import (
    ZeroList,
    cached_zeros,
    compute_zeros,
    count_deviation,
    hardy_z,
    lfunction,
    load_zeros,
    rvm_estimate,
    save_zeros,
    zero_sum,
)

# mpmath.zetazero(1) and the first zeros of L(s, chi_3), L(s, chi_-4) from mpmath.findroot
ZETA_FIRST = 14.1347251417346937904
CHI3_FIRST = 8.03973715568146668
CHIM4_FIRST = 6.02094890469759665


class TestCompute:
    def test_thirty(self):
        z = compute_zeros("zeta", 30)
        assert len(z) == 3
        assert abs(z.gammas[0] - ZETA_FIRST) < 1e-8
        assert z.source == "computed" and z.rh_verified

    def test_hundred(self):
        assert len(compute_zeros("zeta", 100)) == 29

    def test_dirichlet_first(self):
        assert abs(compute_zeros("dirichlet:4.1", 15).gammas[0] - CHIM4_FIRST) < 1e-8
        assert abs(compute_zeros("dirichlet:3.1", 15).gammas[0] - CHI3_FIRST) < 1e-8

    def test_count_to_thousand(self, zeta_zeros):
        g = zeta_zeros.gammas
        assert len(zeta_zeros) == 649
        mids = np.append(0.5 * (g[1:] + g[:-1]), 1000.0)
        assert np.max(np.abs(count_deviation(g, mids))) <= 1

    def test_hardy_small_at_zeros(self, zeta_zeros):
        vals = np.abs(hardy_z(zeta_zeros.gammas[::25]))
        assert np.all(vals <= 1e-6)

    def test_brackets_change_sign(self, dirichlet_zeros):
        lfun = lfunction("dirichlet:3.1")
        from weiltrace.zeros import rotated
        for g in dirichlet_zeros["3.1"].gammas[:10]:
            a, b = rotated(np.array([g - 1e-6, g + 1e-6]), lfun)
            assert a * b < 0

    def test_dirichlet_counts(self, dirichlet_zeros):
        for label, z in dirichlet_zeros.items():
            lfun = lfunction(f"dirichlet:{label}")
            assert abs(len(z) - rvm_estimate(200.0, lfun)) <= 1

    @pytest.mark.parametrize("t_max", [0, -1, 1000.5])
    def test_height_limits(self, t_max):
        with pytest.raises(ParameterError):
            compute_zeros("zeta", t_max)

    def test_unknown_id(self):
        with pytest.raises(ParameterError):
            compute_zeros("dirichlet:4.7", 10)


class TestFiles:
    def test_three(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("14.1347251417\n21.0220396388\n25.0108575801\n")
        z = load_zeros(p, "zeta")
        assert len(z) == 3 and z.height_limit == 25.0108575801 and z.source == "file"
        ref = compute_zeros("zeta", 26)
        assert np.allclose(z.gammas, ref.gammas, atol=1e-9)

    def test_empty(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("")
        z = load_zeros(p, "zeta")
        assert len(z) == 0 and z.height_limit == 0

    def test_comments(self, tmp_path):
        p = tmp_path / "z.txt"
        p.write_text("# header\n14.13\n\n# note\n21.02\n")
        assert len(load_zeros(p, "zeta")) == 2

    @pytest.mark.parametrize("text,line", [("21.0\n14.1\n", 2), ("14.1\nabc\n", 2), ("-3\n", 1), ("1\n1\n", 2)])
    def test_errors_name_line(self, tmp_path, text, line):
        p = tmp_path / "z.txt"
        p.write_text(text)
        with pytest.raises(ZeroFileError) as exc:
            load_zeros(p, "zeta")
        assert exc.value.line == line

    def test_missing(self, tmp_path):
        with pytest.raises(OSError):
            load_zeros(tmp_path / "none.txt", "zeta")

    def test_round_trip(self, tmp_path):
        z = compute_zeros("zeta", 50)
        back = load_zeros(save_zeros(z, tmp_path / "a" / "z.txt"), "zeta")
        assert np.array_equal(back.gammas, z.gammas)

    def test_cache(self, tmp_path):
        z = cached_zeros("dirichlet:4.1", 40, root=tmp_path)
        path = tmp_path / "zeros" / "dirichlet_4.1.txt"
        assert path.exists()
        again = cached_zeros("dirichlet:4.1", 30, root=tmp_path)
        assert np.array_equal(again.gammas, z.gammas[z.gammas <= 30])

    def test_cache_env(self, tmp_path, monkeypatch):
        monkeypatch.setenv("APP_CACHE", str(tmp_path))
        cached_zeros("zeta", 20)
        assert (tmp_path / "zeros" / "zeta.txt").exists()

    def test_invariant(self):
        with pytest.raises(ParameterError):
            ZeroList(np.array([2.0, 1.0]), "zeta", 3.0, "file")
        with pytest.raises(ParameterError):
            ZeroList(np.array([1.0, 2.0]), "zeta", 1.5, "file")


class TestZeroSum:
    def test_empty(self):
        z = ZeroList(np.zeros(0), "zeta", 1000.0, "file")
        r = zero_sum(z, bump(math.log(8)))
        assert r.value == 0 and r.count == 0 and r.tail_bound >= 0

    def test_doubling_within_tail(self, zeta_zeros):
        g = bump(1.0)
        lo = zero_sum(zeta_zeros.below(500.0), g)
        hi = zero_sum(zeta_zeros, g)
        assert abs(hi.value - lo.value) <= lo.tail_bound

    def test_additive(self, zeta_zeros_200):
        g = bump(1.5, 0.2)
        whole = zero_sum(zeta_zeros_200, g).value
        cut = 100.0
        low = zeta_zeros_200.below(cut)
        high = ZeroList(zeta_zeros_200.gammas[zeta_zeros_200.gammas > cut], "zeta", 200.0, "computed")
        assert abs(whole - (zero_sum(low, g).value + zero_sum(high, g).value)) < 1e-13

    def test_insufficient_height(self, zeta_zeros):
        with pytest.raises(TailError) as exc:
            zero_sum(zeta_zeros.below(60.0), bump(0.5), tol=1e-10)
        assert exc.value.needed > 60.0

    def test_unverified(self):
        from weiltrace.errors import DomainError
        z = ZeroList(np.array([14.13]), "zeta", 20.0, "file", rh_verified=False)
        with pytest.raises(DomainError):
            zero_sum(z, bump(1.0))

    def test_complex_character_needs_both_lists(self):
        z5 = compute_zeros("dirichlet:5.1", 60)
        zc = compute_zeros("dirichlet:5.2", 60)
        r = zero_sum(z5, bump(2.0), conj_zeros=zc)
        assert r.count == len(z5) + len(zc)
