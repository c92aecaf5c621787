"""Energy functionals: quadratic base energy, the cubic-corrected
paradifferential energies at regularity one and general s, homogeneity
grading, and the linearized-flow energy.

All functionals act on Cauchy data only: second time derivatives are
systematically eliminated, through the full equation on the background slot
and through the linear paradifferential substitution on the evolved slot.
"""

from dataclasses import dataclass

import numpy as np

from .bilinear import apply_bilinear, para_with_constant, paraproduct
from .model import ModelSpec, linearized_coefficients, utt_from_state
from .normalform import _splits, apply_nf_hh, apply_nf_linearized, conjugation_correction, \
    nf_symbols
from .spectral import Field, State, apply_multiplier, bessel_mult, dx, inner, \
    l2_sq, to_spectral


def base_energy(state: State, m: float) -> float:
    """Quadratic energy (1/2) int w_t^2 + w_x^2 + m w^2 dx."""
    return 0.5 * (l2_sq(state.vel) + l2_sq(dx(state.pos)) + m * l2_sq(state.pos))


# ---------------------------------------------------------------------------
# paracoefficients
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParaCoefficients:
    """Degree-one real coefficient fields of the corrected main energy."""

    k0: Field
    k1: Field
    k2: Field


def para_coefficients(state_u: State, model: ModelSpec) -> ParaCoefficients:
    """Real coefficient fields built from the one-frequency expansion data.

    Normalized so that k2 - k0 equals half the linear part of the g11
    coefficient along the state, which ties the corrected energy to the
    quasilinear energy-momentum densities.
    """
    t = nf_symbols(model).taylor
    grid = state_u.grid
    xi = grid.xi
    u, ut = state_u.pos, state_u.vel
    uxxm = dx(state_u.pos, 2) - model.m * state_u.pos

    def mult(field, sym_vals):
        return apply_multiplier(field, np.asarray(sym_vals, dtype=complex))

    half_da0 = -0.5 * xi * t.a0(xi)
    half_dc01 = -0.5 * xi * t.c01(xi)

    k0 = (2.0 * (mult(u, half_da0) + mult(u, t.a1(xi)) + mult(uxxm, t.b0(xi)))
          + mult(ut, half_dc01) + mult(ut, t.c11(xi)) + mult(ut, t.c02(xi)))
    k1 = (2.0 * (mult(ut, -1j * t.a0(xi)) + mult(ut, 2j * t.b1(xi)))
          + mult(uxxm, -1j * t.c01(xi)) + mult(u, 2j * t.c12(xi)))
    k2 = (2.0 * (mult(u, -half_da0) + mult(u, t.a1(xi)))
          + mult(ut, -half_dc01) + mult(ut, t.c11(xi)))
    return ParaCoefficients(k0=k0, k1=k1, k2=k2)


def linear_metric_part(state_u: State, model: ModelSpec, component: str) -> Field:
    """Degree-one Taylor part of a metric component along the state."""
    u, ut = state_u.pos, state_u.vel
    ux = dx(state_u.pos)
    if component == "g11":
        return model.g11_u * u + model.g11_ut * ut + model.g11_ux * ux
    if component == "g01":
        return model.g01_u * u + model.g01_ut * ut + model.g01_ux * ux
    raise ValueError(f"unknown metric component {component!r}")


# ---------------------------------------------------------------------------
# normal-form energy (twelve cross terms)
# ---------------------------------------------------------------------------


def variable_part(func, state: State, base: float) -> Field:
    """Coefficient field with its origin value removed before transforming,
    so constant components stay exactly zero in spectral space."""
    from .model import _phys

    u, ut, ux = _phys(state)
    vals = np.asarray(func(u, ut, ux), dtype=float) - base
    return to_spectral(vals, state.grid)


def para_wtt(state_u: State, state_w: State, model: ModelSpec) -> Field:
    """Second time derivative of the evolved slot through the linear
    paradifferential flow: all coefficients enter as paraproducts with the
    constant part acting directly."""
    g01f = variable_part(model.g01, state_u, 0.0)
    g11f = variable_part(model.g11, state_u, 1.0)
    co = linearized_coefficients(state_u, model)
    w, wt = state_w.pos, state_w.vel
    wx, wxx, wtx = dx(w), dx(w, 2), dx(wt)
    return (2.0 * paraproduct(g01f, wtx)
            + wxx + paraproduct(g11f, wxx)
            + paraproduct(co["F0"], wt) + paraproduct(co["F1"], wx)
            + paraproduct(co["F"], w)
            - model.m * w)


def nf_energy(state_u: State, state_w: State, model: ModelSpec) -> float:
    """Quadratic energy of the corrected evolved slot, kept to cubic order:
    the base energy plus the twelve low-high / high-low cross terms.

    Background time derivatives are eliminated through the full equation,
    evolved-slot ones through the paradifferential substitution.
    """
    sp = _splits(model)
    A, B = sp["a"]["lh"], sp["b"]["lh"]
    Clh, Chl = sp["c"]["lh"], sp["c"]["hl"]
    m = model.m

    u, ut = state_u.pos, state_u.vel
    ux, utx = dx(u), dx(ut)
    utt = utt_from_state(state_u, model)
    w, wt = state_w.pos, state_w.vel
    wx, wtx = dx(w), dx(wt)
    wtt = para_wtt(state_u, state_w, model)

    total = base_energy(state_w, m)
    # position-position correction, weight 2 = (1/2) * 4
    total += 2.0 * (inner(wt, apply_bilinear(A, ut, w)) + inner(wt, apply_bilinear(A, u, wt)))
    total += 2.0 * (inner(wx, apply_bilinear(A, ux, w)) + inner(wx, apply_bilinear(A, u, wx)))
    total += 2.0 * m * inner(w, apply_bilinear(A, u, w))
    # velocity-velocity correction
    total += 2.0 * (inner(wt, apply_bilinear(B, utt, wt)) + inner(wt, apply_bilinear(B, ut, wtt)))
    total += 2.0 * (inner(wx, apply_bilinear(B, utx, wt)) + inner(wx, apply_bilinear(B, ut, wtx)))
    total += 2.0 * m * inner(w, apply_bilinear(B, ut, wt))
    # mixed corrections, weight 1 = (1/2) * 2
    total += inner(wt, apply_bilinear(Clh, utt, w)) + inner(wt, apply_bilinear(Clh, ut, wt))
    total += inner(wx, apply_bilinear(Clh, utx, w)) + inner(wx, apply_bilinear(Clh, ut, wx))
    total += m * inner(w, apply_bilinear(Clh, ut, w))
    total += inner(wt, apply_bilinear(Chl, wtt, u)) + inner(wt, apply_bilinear(Chl, wt, ut))
    total += inner(wx, apply_bilinear(Chl, wtx, u)) + inner(wx, apply_bilinear(Chl, wt, ux))
    total += m * inner(w, apply_bilinear(Chl, wt, u))
    return float(total)


# ---------------------------------------------------------------------------
# corrected main energy and its homogeneity grading
# ---------------------------------------------------------------------------


def main_energy(state_u: State, state_w: State, model: ModelSpec) -> float:
    """Corrected leading energy
    (1/2) int w_t T_{1+k0} w_t + T_{1+k0} w_x T_{g11} w_x
          + w_t T_{k1} w_x - T_{k1} w_x T_{g01} w_x dx,
    with Weyl-quantized paraproducts."""
    k = para_coefficients(state_u, model)
    g11var = variable_part(model.g11, state_u, 1.0)
    g01f = variable_part(model.g01, state_u, 0.0)
    w, wt = state_w.pos, state_w.vel
    wx = dx(w)

    t_wt = para_with_constant(k.k0, 1.0, wt)
    t_wx = para_with_constant(k.k0, 1.0, wx)
    k1wx = paraproduct(k.k1, wx)
    total = (inner(wt, t_wt)
             + inner(t_wx, para_with_constant(g11var, 1.0, wx))
             + inner(wt, k1wx)
             - inner(k1wx, paraproduct(g01f, wx)))
    return 0.5 * float(total)


@dataclass(frozen=True)
class GradedScalar:
    """Scalar with its decomposition by total homogeneity degree."""

    total: float
    by_degree: dict

    def low_part(self) -> float:
        """Degrees two and three."""
        return self.by_degree[2] + self.by_degree[3]


def graded_main_energy(state_u: State, state_w: State, model: ModelSpec) -> GradedScalar:
    """Multilinear expansion of the corrected main energy over coefficient
    grades: 1 + k0 carries grades {0,1}, g11 = 1 + (linear) + (remainder)
    carries {0,1,2+}, g01 = (linear) + (remainder) carries {1,2+}.

    Degrees four and higher are pooled in the degree-4 bucket.
    """
    k = para_coefficients(state_u, model)
    g11lin = linear_metric_part(state_u, model, "g11")
    g11rem = variable_part(model.g11, state_u, 1.0) - g11lin
    g01lin = linear_metric_part(state_u, model, "g01")
    g01rem = variable_part(model.g01, state_u, 0.0) - g01lin

    w, wt = state_w.pos, state_w.vel
    wx = dx(w)
    k0wt = paraproduct(k.k0, wt)
    k0wx = paraproduct(k.k0, wx)
    k1wx = paraproduct(k.k1, wx)

    deg2 = 0.5 * (inner(wt, wt) + inner(wx, wx))
    deg3 = 0.5 * (inner(wt, k0wt)
                  + inner(wx, paraproduct(g11lin, wx)) + inner(k0wx, wx)
                  + inner(wt, k1wx))
    deg4 = 0.5 * (inner(k0wx, paraproduct(g11lin, wx))
                  + inner(wx, paraproduct(g11rem, wx))
                  + inner(k0wx, paraproduct(g11rem, wx))
                  - inner(k1wx, paraproduct(g01lin, wx))
                  - inner(k1wx, paraproduct(g01rem, wx)))
    return GradedScalar(total=deg2 + deg3 + deg4,
                        by_degree={2: float(deg2), 3: float(deg3), 4: float(deg4)})


def modified_energy_h1(state_u: State, state_w: State, model: ModelSpec) -> float:
    """Cubic-corrected energy at regularity one.

    Realized as main + (normal-form energy) - (degree <= 3 part of main):
    the low-order remainder of the normal-form energy is kept in full while
    the quasilinear quartic corrections come from the main part.  Reduces
    exactly to the base energy when the background vanishes.
    """
    g = graded_main_energy(state_u, state_w, model)
    quartic = main_energy(state_u, state_w, model) - g.low_part()
    return nf_energy(state_u, state_w, model) + quartic


# ---------------------------------------------------------------------------
# general regularity index and the linearized energy
# ---------------------------------------------------------------------------


def modified_energy_s(state_u: State, model: ModelSpec, s: float,
                      skip_conjugation: bool = False) -> float:
    """Cubic-corrected energy at regularity s for the full flow.

    Pipeline: balanced-frequency correction of the Cauchy pair, then the
    <D>^(s-1) weight, then the bounded conjugation normal form that removes
    the weight-commutator sources, and finally the regularity-one corrected
    energy on the resulting pair.  ``skip_conjugation`` ablates the third
    stage.
    """
    if s < 1:
        raise ValueError("regularity index must be >= 1")
    sigma = s - 1.0
    pair = apply_nf_hh(state_u, model)
    wmult = bessel_mult(state_u.grid, sigma)
    w = apply_multiplier(pair.pos, wmult)
    wt = apply_multiplier(pair.vel, wmult)

    if sigma != 0.0 and not skip_conjugation:
        corr = conjugation_correction(sigma, model)
        u, ut = state_u.pos, state_u.vel
        utt = utt_from_state(state_u, model)
        wtt = apply_multiplier(para_wtt(state_u, pair, model), wmult)
        pos = (w + apply_bilinear(corr.a, u, w) + apply_bilinear(corr.b, ut, wt)
               + apply_bilinear(corr.c, ut, w) + apply_bilinear(corr.d, u, wt))
        vel = (wt
               + apply_bilinear(corr.a, ut, w) + apply_bilinear(corr.a, u, wt)
               + apply_bilinear(corr.b, utt, wt) + apply_bilinear(corr.b, ut, wtt)
               + apply_bilinear(corr.c, utt, w) + apply_bilinear(corr.c, ut, wt)
               + apply_bilinear(corr.d, ut, wt) + apply_bilinear(corr.d, u, wtt))
        pair = State(pos, vel, state_u.time)
    else:
        pair = State(w, wt, state_u.time)
    return modified_energy_h1(state_u, pair, model)


def linearized_energy(state_u: State, state_v: State, model: ModelSpec) -> float:
    """Cubic-corrected energy for the linearized flow: the bounded
    linearized correction followed by the regularity-one energy."""
    pair = apply_nf_linearized(state_u, state_v, model)
    return modified_energy_h1(state_u, pair, model)
