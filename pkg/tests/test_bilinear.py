import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgnf.bilinear import (BilinearSymbol, SeparableTerm, apply_bilinear,
                           apply_bilinear_fast, balanced_product, chi_hh, chi_lh,
                           one_symbol, paraproduct, separable_to_symbol)
from kgnf.spectral import Field, apply_multiplier, d_op, l2_sq, make_grid, \
    reality_defect, to_spectral
from conftest import band_limited


def exp_mode(grid, k, amp=1.0):
    c = np.zeros(grid.n, dtype=complex)
    c[k % grid.n] = amp
    return Field(grid, c)


class TestCutoffs:
    def test_low_high_plateaus(self):
        assert chi_lh(1.0, 40.0) == 1.0
        assert chi_lh(5.0, 5.0) == 0.0
        assert chi_hh(5.0, 5.0) == 1.0

    def test_low_low_pairs_are_balanced(self):
        assert chi_lh(0.0, 0.0) == 0.0
        assert chi_hh(0.0, 0.0) == 1.0

    def test_transition_monotone(self):
        x2 = 100.0
        vals = chi_lh(np.linspace(0.0, 20.0, 200), x2)
        assert np.all(np.diff(vals) <= 1e-15)
        assert np.all((vals >= 0) & (vals <= 1))

    @given(x1=st.floats(-300, 300), x2=st.floats(-300, 300))
    @settings(max_examples=200, deadline=None)
    def test_partition(self, x1, x2):
        total = chi_lh(x1, x2) + chi_lh(x2, x1) + chi_hh(x1, x2)
        assert abs(total - 1.0) < 1e-15


class TestApplyBilinear:
    def test_plain_product_of_modes(self, grid64):
        f = exp_mode(grid64, 1)
        out = apply_bilinear(one_symbol(), f, f)
        assert abs(out.coeffs[2] - 1.0) < 1e-14
        assert np.sum(np.abs(out.coeffs) > 1e-14) == 1

    def test_derivative_symbol_matches_multiplier_composition(self, grid64):
        sym = BilinearSymbol(eval=lambda a, b: (a * b).astype(complex))
        f = to_spectral(np.sin(grid64.x), grid64)
        out = apply_bilinear(sym, f, f)
        # oracle: apply the derivative multiplier to each factor, then take
        # the (complex) collocation product
        df = apply_multiplier(f, d_op(grid64))
        samples = np.fft.ifft(df.coeffs * grid64.n)
        oracle = Field(grid64, np.fft.fft(samples * samples) / grid64.n)
        assert np.max(np.abs(out.coeffs - oracle.coeffs)) < 1e-13

    def test_zero_factor(self, grid64):
        f = band_limited(grid64, np.random.default_rng(0))
        z = Field(grid64, np.zeros(64, dtype=complex))
        out = apply_bilinear(one_symbol(), z, f)
        assert np.all(out.coeffs == 0)

    def test_grid_mismatch(self, grid64, grid128):
        f = band_limited(grid64, np.random.default_rng(0))
        g = band_limited(grid128, np.random.default_rng(1))
        with pytest.raises(ValueError):
            apply_bilinear(one_symbol(), f, g)

    def test_non_finite_symbol(self, grid64):
        bad = BilinearSymbol(eval=lambda a, b: (a / b).astype(complex))
        f = band_limited(grid64, np.random.default_rng(0))
        with np.errstate(divide="ignore", invalid="ignore"), pytest.raises(ValueError):
            apply_bilinear(bad, f, f)

    def test_bilinearity(self, grid64):
        rng = np.random.default_rng(9)
        f1, f2, g = (band_limited(grid64, rng) for _ in range(3))
        sym = BilinearSymbol(eval=lambda a, b: (1.0 + 0.1 * a * b).astype(complex))
        lhs = apply_bilinear(sym, Field(grid64, 2.5 * f1.coeffs + f2.coeffs), g)
        rhs = Field(grid64, 2.5 * apply_bilinear(sym, f1, g).coeffs
                    + apply_bilinear(sym, f2, g).coeffs)
        scale = np.max(np.abs(rhs.coeffs))
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-13 * scale

    def test_reality_for_admissible_symbols(self, grid64):
        rng = np.random.default_rng(4)
        f, g = band_limited(grid64, rng), band_limited(grid64, rng)
        sym = BilinearSymbol(eval=lambda a, b: a * b + 1j * (a + b), parity_real=True)
        out = apply_bilinear(sym, f, g)
        assert reality_defect(out) < 1e-12

    def test_dealias_flag_zeroes_top_third(self, grid64):
        rng = np.random.default_rng(4)
        f = band_limited(grid64, rng, kmax=30)
        out = apply_bilinear(one_symbol(), f, f, dealias=True)
        assert np.all(out.coeffs[~grid64.dealias_keep] == 0)


class TestParaproduct:
    def test_separated_pair_passes_whole(self, grid128):
        lo, hi = exp_mode(grid128, 1), exp_mode(grid128, 40)
        out = paraproduct(lo, hi)
        assert abs(out.coeffs[41] - chi_lh(1.0, 40.5)) < 1e-14
        assert abs(out.coeffs[41] - 1.0) < 1e-14

    def test_comparable_pair_blocked(self, grid128):
        lo, hi = exp_mode(grid128, 1), exp_mode(grid128, 10)
        assert np.max(np.abs(paraproduct(lo, hi).coeffs)) < 1e-14

    def test_constant_low_factor_multiplies(self, grid128):
        c = Field(grid128, np.zeros(128, dtype=complex))
        c.coeffs[0] = 3.5
        hi = exp_mode(grid128, 50)
        out = paraproduct(c, hi)
        assert np.max(np.abs(out.coeffs - 3.5 * hi.coeffs)) < 1e-13


class TestBalancedProduct:
    def test_equal_modes_pass(self, grid64):
        f = exp_mode(grid64, 1)
        out = balanced_product(f, f)
        assert abs(out.coeffs[2] - 1.0) < 1e-14

    def test_separated_pair_blocked(self, grid128):
        lo, hi = exp_mode(grid128, 1), exp_mode(grid128, 40)
        assert np.max(np.abs(balanced_product(lo, hi).coeffs)) < 1e-13

    @given(seed=st.integers(0, 2**31))
    @settings(max_examples=15, deadline=None)
    def test_decomposition_identity(self, seed):
        grid = make_grid(128, 2 * np.pi)
        rng = np.random.default_rng(seed)
        f, g = band_limited(grid, rng), band_limited(grid, rng)
        total = apply_bilinear(one_symbol(), f, g)
        resid = (total.coeffs - paraproduct(f, g).coeffs - paraproduct(g, f).coeffs
                 - balanced_product(f, g).coeffs)
        scale = np.sqrt(l2_sq(f) * l2_sq(g))
        assert np.max(np.abs(resid)) < 1e-12 * scale


class TestFastPath:
    def test_single_unit_term_equals_paraproduct(self, grid64):
        rng = np.random.default_rng(2)
        f, g = band_limited(grid64, rng), band_limited(grid64, rng)
        ones = lambda x: np.ones_like(x)
        out = apply_bilinear_fast([SeparableTerm(0, ones, ones)], f, g)
        ref = paraproduct(f, g)
        assert np.max(np.abs(out.coeffs - ref.coeffs)) < 1e-12

    def test_zero_input(self, grid64):
        f = Field(grid64, np.zeros(64, dtype=complex))
        g = band_limited(grid64, np.random.default_rng(0))
        ones = lambda x: np.ones_like(x)
        out = apply_bilinear_fast([SeparableTerm(0, ones, ones)], f, g)
        assert np.max(np.abs(out.coeffs)) == 0.0

    def test_empty_expansion_rejected(self, grid64):
        f = band_limited(grid64, np.random.default_rng(0))
        with pytest.raises(ValueError):
            apply_bilinear_fast([], f, f)

    @pytest.mark.parametrize("n", [64, 128])
    @pytest.mark.parametrize("weyl", [True, False])
    def test_oracle_equivalence(self, n, weyl):
        grid = make_grid(n, 2 * np.pi)
        rng = np.random.default_rng(n)
        f, g = band_limited(grid, rng), band_limited(grid, rng)
        terms = [SeparableTerm(1, lambda x: np.ones_like(x),
                               lambda x: np.sqrt(1.0 + x**2))]
        fast = apply_bilinear_fast(terms, f, g, weyl=weyl)
        direct = apply_bilinear(separable_to_symbol(terms, weyl=weyl), f, g)
        scale = max(np.max(np.abs(direct.coeffs)), 1e-300)
        assert np.max(np.abs(fast.coeffs - direct.coeffs)) < 1e-10 * scale


class TestRegionSoundness:
    def test_lh_operator_kills_high_first_slot(self, grid128):
        rng = np.random.default_rng(8)
        sym = BilinearSymbol(
            eval=lambda a, b: (1.0 + 0j) * chi_lh(a, b), region="lh")
        hi = Field(grid128, np.zeros(128, dtype=complex))
        for k in range(30, 60):
            hi.coeffs[k] = rng.normal()
            hi.coeffs[-k] = np.conj(hi.coeffs[k])
        lo = band_limited(grid128, rng, kmax=10)
        out = apply_bilinear(sym, hi, lo)
        assert np.max(np.abs(out.coeffs)) < 1e-14
