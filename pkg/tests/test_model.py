import numpy as np
import pytest

from kgnf.model import (GALLERY_NAMES, ModelSpec, Poly, RawModel, custom_model,
                        gallery, linearized_coefficients, normalize_metric, poly,
                        q_taylor_coeffs, quadratic_rhs, quadratic_symbols,
                        utt_from_state, utt_linear_part)
from kgnf.spectral import State, make_grid, sup_norm, to_physical, to_spectral, \
    zero_field
from conftest import band_limited


class TestPoly:
    def test_eval_and_derivatives(self):
        p = poly({"u*u": 1.0, "ut": 2.0, "u*ux": -0.5})
        assert p(2.0, 3.0, 4.0) == 4.0 + 6.0 - 4.0
        assert p.deriv("u")(2.0, 0.0, 4.0) == 4.0 - 2.0
        assert p.deriv("ut").at0() == 2.0
        assert p.deriv("u").deriv("u").at0() == 2.0

    def test_unknown_channel_rejected(self):
        with pytest.raises(ValueError):
            poly({"u*q": 1.0})


class TestGallery:
    @pytest.mark.parametrize("name", GALLERY_NAMES)
    def test_constructs_and_is_normalized(self, name):
        md = gallery(name)
        assert md.m == 1.0
        assert md.g01.at0() == 0.0
        assert md.g11.at0() == 1.0
        assert md.f.at0() == 0.0

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            gallery("nope")

    def test_generic_exercises_all_metric_channels(self):
        md = gallery("generic")
        for val in (md.g01_u, md.g01_ut, md.g01_ux, md.g11_u, md.g11_ut, md.g11_ux):
            assert val != 0.0

    def test_invalid_source_rejected(self):
        with pytest.raises(ValueError):
            ModelSpec("bad", 1.0, poly(), poly().shift(1.0), poly(u=1.0))

    def test_custom_model_table(self):
        md = custom_model({"g11.u": 0.5, "f.u*ut": 0.2})
        assert md.g11_u == 0.5
        assert md.f2("u", "ut") == 0.2
        with pytest.raises(ValueError):
            custom_model({"g77.u": 1.0})


class TestNormalizeMetric:
    def test_already_normalized_unchanged(self):
        raw = RawModel("r", 1.0, poly({"1": -1.0}), poly(ut=1.0),
                       poly(u=1.0).shift(1.0), poly())
        md = normalize_metric(raw)
        assert md.g01_ut == 1.0
        assert md.g11_u == 1.0

    def test_conformal_factor_cancels(self):
        raw = RawModel("r", 1.0, poly(u=-1.0).shift(-1.0),
                       poly(), poly(u=1.0).shift(1.0), poly())
        md = normalize_metric(raw)
        u, ut, ux = np.array([0.3, -0.2]), np.zeros(2), np.zeros(2)
        assert np.max(np.abs(md.g11(u, ut, ux) - 1.0)) < 1e-14

    def test_equation_preserved_by_mass_rebalance(self):
        # u_tt of the raw equation at a sample state must match the
        # normalized model's evaluation
        raw = RawModel("r", 1.0, poly(u=-0.5).shift(-1.0), poly(),
                       poly().shift(1.0), poly({"u*u": 0.3}))
        md = normalize_metric(raw)
        grid = make_grid(64, 2 * np.pi)
        st = State(to_spectral(0.01 * np.cos(grid.x), grid), zero_field(grid))
        got = to_physical(utt_from_state(st, md, dealias=False))
        u = 0.01 * np.cos(grid.x)
        uxx = -u
        g00 = -(1.0 + 0.5 * u)
        expected = (uxx + 0.3 * u**2 - raw.m * u) / (-g00)
        assert np.max(np.abs(got - expected)) < 1e-12

    def test_degenerate_time_component_rejected(self):
        raw = RawModel("r", 1.0, poly(), poly(), poly().shift(1.0), poly())
        with pytest.raises(ValueError):
            normalize_metric(raw)


class TestQuadraticSymbols:
    def test_mixed_metric_channel(self):
        q = quadratic_symbols(gallery("g01ut"))
        assert q.q00.eval(2.0, 3.0) == 5j
        assert q.q01.eval(1.0, 2.0) == 0
        assert q.q11.eval(1.0, 2.0) == 0

    def test_position_metric_channel(self):
        q = quadratic_symbols(gallery("g11u"))
        assert q.q11.eval(1.0, 2.0) == -2.5
        assert q.q00.eval(1.0, 2.0) == 0

    def test_flat_vanishes(self):
        q = quadratic_symbols(gallery("flat"))
        pts = np.linspace(-5, 5, 7)
        for sym in (q.q00, q.q01, q.q11):
            assert np.max(np.abs(sym.eval(pts[:, None], pts[None, :]))) == 0.0

    @pytest.mark.parametrize("name", ["g11u", "g01ut", "fu2", "fut2", "generic"])
    def test_swap_symmetry_and_reality(self, name):
        q = quadratic_symbols(gallery(name))
        rng = np.random.default_rng(1)
        x1, x2 = rng.uniform(-20, 20, 200), rng.uniform(-20, 20, 200)
        for sym in (q.q00, q.q11):
            assert np.max(np.abs(sym.eval(x1, x2) - sym.eval(x2, x1))) == 0.0
        for sym in (q.q00, q.q01, q.q11):
            assert np.max(np.abs(sym.eval(-x1, -x2) - np.conj(sym.eval(x1, x2)))) == 0.0

    @pytest.mark.parametrize("name", ["g11u", "g01ut", "fu2", "generic"])
    def test_finite_difference_oracle(self, name):
        """Second-order amplitude differences of the full nonlinearity must
        reproduce the bilinear quadratic forms."""
        md = gallery(name)
        grid = make_grid(64, 2 * np.pi)
        rng = np.random.default_rng(3)
        w = State(band_limited(grid, rng, kmax=8), band_limited(grid, rng, kmax=8))

        def nonlinearity(state):
            return to_physical(utt_from_state(state, md, dealias=False)) \
                - to_physical(utt_linear_part(state, md.m))

        h = 1e-5
        plus = nonlinearity(State(w.pos * h, w.vel * h))
        minus = nonlinearity(State(w.pos * (-h), w.vel * (-h)))
        fd_quadratic = (plus + minus) / (2.0 * h * h)
        direct = to_physical(quadratic_rhs(w, md))
        scale = max(np.max(np.abs(direct)), 1e-12)
        assert np.max(np.abs(fd_quadratic - direct)) < 1e-6 * scale


class TestTaylorTable:
    def test_displayed_entries(self):
        qc = q_taylor_coeffs(gallery("g01ut"))
        assert qc["q00_1"](3.0) == 1j
        qc11 = q_taylor_coeffs(gallery("g11u"))
        assert qc11["q11_2"](5.0) == -0.5

    def test_flat_all_zero(self):
        qc = q_taylor_coeffs(gallery("flat"))
        xi = np.linspace(-10, 10, 21)
        assert all(np.max(np.abs(fn(xi))) == 0.0 for fn in qc.values())

    @pytest.mark.parametrize("name", GALLERY_NAMES)
    def test_reconstruction_exact(self, name):
        q = quadratic_symbols(gallery(name))
        qc = q_taylor_coeffs(gallery(name))
        rng = np.random.default_rng(0)
        x1, x2 = rng.uniform(-9, 9, 64), rng.uniform(-9, 9, 64)
        r00 = q.q00.eval(x1, x2) - (qc["q00_0"](x1) + qc["q00_1"](x1) * x2)
        r11 = q.q11.eval(x1, x2) - (qc["q11_0"](x1) + qc["q11_1"](x1) * x2
                                    + qc["q11_2"](x1) * x2**2)
        r01 = q.q01.eval(x1, x2) - (qc["q01_0"](x1) + qc["q01_1"](x1) * x2
                                    + qc["q01_2"](x1) * x2**2)
        r01t = q.q01.eval(x1, x2) - (qc["q01t_0"](x2) + qc["q01t_1"](x2) * x1)
        for r in (r00, r11, r01, r01t):
            assert np.max(np.abs(r)) < 1e-12


class TestUttFromState:
    def test_flat_is_linear_operator(self, grid64):
        st = State(to_spectral(np.cos(grid64.x), grid64), zero_field(grid64))
        out = to_physical(utt_from_state(st, gallery("flat")))
        assert np.max(np.abs(out + 2.0 * np.cos(grid64.x))) < 1e-13

    def test_zero_state(self, grid64):
        st = State(zero_field(grid64), zero_field(grid64))
        assert np.max(np.abs(utt_from_state(st, gallery("generic")).coeffs)) == 0.0

    def test_symbolic_expansion_oracle(self, grid64):
        eps = 1e-3
        u = eps * np.sin(grid64.x)
        st = State(to_spectral(u, grid64), zero_field(grid64))
        got = to_physical(utt_from_state(st, gallery("g11u"), dealias=False))
        expected = -(1.0 + u) * u - u
        assert np.max(np.abs(got - expected)) < 1e-10


class TestLinearizedCoefficients:
    def test_flat_vanishes(self, grid64):
        rng = np.random.default_rng(2)
        st = State(band_limited(grid64, rng), band_limited(grid64, rng))
        co = linearized_coefficients(st, gallery("flat"))
        assert all(np.max(np.abs(c.coeffs)) == 0.0 for c in co.values())

    def test_position_metric_channel(self, grid64):
        st = State(to_spectral(0.01 * np.cos(grid64.x), grid64), zero_field(grid64))
        co = linearized_coefficients(st, gallery("g11u"))
        uxx = -0.01 * np.cos(grid64.x)
        assert np.max(np.abs(to_physical(co["F"]) - uxx)) < 1e-13
        assert np.max(np.abs(co["F0"].coeffs)) == 0.0
        assert np.max(np.abs(co["F1"].coeffs)) == 0.0

    def test_amplitude_scaling_linear(self, grid64):
        md = gallery("generic")
        base = State(to_spectral(np.cos(grid64.x), grid64),
                     to_spectral(np.sin(grid64.x), grid64))
        sizes = []
        for eps in (1e-2, 5e-3):
            st = State(base.pos * eps, base.vel * eps)
            co = linearized_coefficients(st, md)
            sizes.append(max(sup_norm(c) for c in co.values()))
        ratio = sizes[0] / sizes[1]
        assert abs(ratio - 2.0) < 0.05
