"""Normal-form symbol algebra for the quadratic Klein-Gordon interactions.

Solves the bilinear matching systems in closed form, exposes the joint
denominator, the one-frequency Taylor data of the low-high expansions,
frequency-region splits, the generalized four-symbol solver, conjugation
symbols for Sobolev-weight commutators, and the state-level application of
the resulting quadratic corrections.
"""

from dataclasses import dataclass

import numpy as np

from . import bilinear as bl
from .bilinear import BilinearSymbol, apply_bilinear
from .model import ModelSpec, q_taylor_coeffs, quadratic_rhs, quadratic_symbols, \
    utt_from_state, utt_linear_part
from .spectral import Field, State, dx, to_physical, to_spectral


# ---------------------------------------------------------------------------
# joint denominator
# ---------------------------------------------------------------------------


def delta(xi1, xi2, m: float):
    """Joint denominator -4m(xi1^2 + xi2^2 + xi1 xi2) - 3m^2.

    Strictly negative (at most -3m^2): the quadratic interactions are
    non-resonant.  This expanded form is the numerically stable one and is
    used everywhere; see :func:`delta_defining` for the product form.
    """
    if m <= 0:
        raise ValueError("mass must be positive")
    x1 = np.asarray(xi1, dtype=float)
    x2 = np.asarray(xi2, dtype=float)
    return -4.0 * m * (x1**2 + x2**2 + x1 * x2) - 3.0 * m**2


def delta_defining(xi1, xi2, m: float):
    """(m - 2 xi1 xi2)^2 - 4 (xi1^2 + m)(xi2^2 + m), the defining form.

    Agrees with :func:`delta` identically; kept as an independent oracle
    (subject to cancellation at very large frequencies).
    """
    if m <= 0:
        raise ValueError("mass must be positive")
    x1 = np.asarray(xi1, dtype=float)
    x2 = np.asarray(xi2, dtype=float)
    return (m - 2.0 * x1 * x2) ** 2 - 4.0 * (x1**2 + m) * (x2**2 + m)


# ---------------------------------------------------------------------------
# closed-form symbols
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TaylorMultipliers:
    """One-frequency coefficients of the low-high / high-low expansions.

    a ~ a0(lo) hi + a1(lo) + O(hi^-1),  b ~ b0(lo) + b1(lo)/hi + O(hi^-2),
    c_lh ~ c01(lo) hi + c11(lo) + O(hi^-1),  c_hl ~ c02(lo) + c12(lo)/hi'
    with hi' the first frequency in the high-low region.
    """

    a0: callable
    a1: callable
    b0: callable
    b1: callable
    c01: callable
    c11: callable
    c02: callable
    c12: callable


@dataclass(frozen=True)
class NfSymbols:
    """Full quadratic-correction symbols and their Taylor data."""

    m: float
    a: BilinearSymbol
    b: BilinearSymbol
    c: BilinearSymbol
    taylor: TaylorMultipliers


def nf_symbols(model: ModelSpec) -> NfSymbols:
    """Unique bilinear symbols removing the quadratic nonlinearity.

    a and c solve, together with b and the swap of c,
        q11 = (m - 2 x1 x2) a - 2 (x1^2+m)(x2^2+m) b
        q00 = (m - 2 x1 x2) b - 2 a
        q01(x1,x2) = (m - 2 x1 x2) c(x1,x2) + 2 (x2^2+m) c(x2,x1)
    pointwise in frequency, with the common denominator delta.
    """
    cached = model.cache.get("nf_symbols")
    if cached is not None:
        return cached
    m = model.m
    q = quadratic_symbols(model)

    def a_eval(x1, x2):
        return ((m - 2.0 * x1 * x2) * q.q11.eval(x1, x2)
                + 2.0 * (x1**2 + m) * (x2**2 + m) * q.q00.eval(x1, x2)) / delta(x1, x2, m)

    def b_eval(x1, x2):
        return (2.0 * q.q11.eval(x1, x2)
                + (m - 2.0 * x1 * x2) * q.q00.eval(x1, x2)) / delta(x1, x2, m)

    def c_eval(x1, x2):
        return ((m - 2.0 * x1 * x2) * q.q01.eval(x1, x2)
                - 2.0 * (x2**2 + m) * q.q01.eval(x2, x1)) / delta(x1, x2, m)

    out = NfSymbols(
        m=m,
        a=BilinearSymbol(eval=a_eval, name=f"a[{model.name}]"),
        b=BilinearSymbol(eval=b_eval, name=f"b[{model.name}]"),
        c=BilinearSymbol(eval=c_eval, name=f"c[{model.name}]"),
        taylor=taylor_multipliers(model),
    )
    model.cache["nf_symbols"] = out
    return out


def taylor_multipliers(model: ModelSpec, fault: str | None = None) -> TaylorMultipliers:
    """Leading expansion coefficients, assembled from the one-frequency
    coefficient table of the quadratic symbols.

    ``fault`` optionally injects a deliberate defect (negative-control
    fixtures): "a0_scale" multiplies a0 by 1.01.
    """
    m = model.m
    qc = q_taylor_coeffs(model)
    q00_0, q00_1 = qc["q00_0"], qc["q00_1"]
    q11_1, q11_2 = qc["q11_1"], qc["q11_2"]
    q01_1, q01_2 = qc["q01_1"], qc["q01_2"]
    q01t_0, q01t_1 = qc["q01t_0"], qc["q01t_1"]

    a0_gain = 1.01 if fault == "a0_scale" else 1.0

    def a0_pure(xi):
        return (xi * q11_2(xi) - (xi**2 + m) * q00_1(xi)) / (2.0 * m)

    def a0(xi):
        return a0_gain * a0_pure(xi)

    def a1(xi):
        lead = m * q11_2(xi) - 2.0 * xi * q11_1(xi) + 2.0 * (xi**2 + m) * q00_0(xi)
        return -lead / (4.0 * m) - xi * a0_pure(xi)

    def b0(xi):
        return (xi * q00_1(xi) - q11_2(xi)) / (2.0 * m)

    def b1(xi):
        lead = 2.0 * q11_1(xi) + m * q00_1(xi) - 2.0 * xi * q00_0(xi)
        return -lead / (4.0 * m) - xi * b0(xi)

    def c01(xi):
        return (q01_2(xi) * xi + q01t_1(xi)) / (2.0 * m)

    def c11(xi):
        lead = m * q01_2(xi) - 2.0 * xi * q01_1(xi) - 2.0 * q01t_0(xi)
        return -lead / (4.0 * m) - xi * c01(xi)

    def c02(xi):
        return (q01t_1(xi) * xi + (xi**2 + m) * q01_2(xi)) / (2.0 * m)

    def c12(xi):
        lead = m * q01t_1(xi) - 2.0 * xi * q01t_0(xi) - 2.0 * (xi**2 + m) * q01_1(xi)
        return -lead / (4.0 * m) - xi * c02(xi)

    return TaylorMultipliers(a0=a0, a1=a1, b0=b0, b1=b1,
                             c01=c01, c11=c11, c02=c02, c12=c12)


# ---------------------------------------------------------------------------
# region splits
# ---------------------------------------------------------------------------


def region_split(symbol: BilinearSymbol) -> dict:
    """Cut a symbol into low-high, high-low and balanced pieces.

    Uses the unshifted cutoffs, so the three pieces sum back to the
    original symbol exactly; the Weyl shift is reserved for paraproducts.
    """
    return {
        "lh": bl.scaled_symbol(symbol, bl.chi_lh, name=symbol.name + ".lh"),
        "hl": bl.scaled_symbol(symbol, bl.chi_hl, name=symbol.name + ".hl"),
        "hh": bl.scaled_symbol(symbol, bl.chi_hh, name=symbol.name + ".hh"),
    }


def _splits(model: ModelSpec) -> dict:
    cached = model.cache.get("nf_splits")
    if cached is None:
        sym = nf_symbols(model)
        cached = {"a": region_split(sym.a), "b": region_split(sym.b),
                  "c": region_split(sym.c)}
        model.cache["nf_splits"] = cached
    return cached


# ---------------------------------------------------------------------------
# generalized four-symbol solver
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HSystemSolution:
    a: BilinearSymbol
    b: BilinearSymbol
    c: BilinearSymbol
    d: BilinearSymbol


def solve_h_system(h00: BilinearSymbol, h01: BilinearSymbol, h10: BilinearSymbol,
                   h11: BilinearSymbol, m: float) -> HSystemSolution:
    """Solve the two decoupled 2x2 matching systems
        h11 = (m - 2 x1 x2) a - 2 (x1^2+m)(x2^2+m) b
        h00 = (m - 2 x1 x2) b - 2 a
        h01 = (m - 2 x1 x2) c + 2 (x2^2+m) d
        h10 = (m - 2 x1 x2) d + 2 (x1^2+m) c
    over the common denominator."""
    if m <= 0:
        raise ValueError("mass must be positive")

    def a_eval(x1, x2):
        return ((m - 2.0 * x1 * x2) * h11.eval(x1, x2)
                + 2.0 * (x1**2 + m) * (x2**2 + m) * h00.eval(x1, x2)) / delta(x1, x2, m)

    def b_eval(x1, x2):
        return (2.0 * h11.eval(x1, x2)
                + (m - 2.0 * x1 * x2) * h00.eval(x1, x2)) / delta(x1, x2, m)

    def c_eval(x1, x2):
        return ((m - 2.0 * x1 * x2) * h01.eval(x1, x2)
                - 2.0 * (x2**2 + m) * h10.eval(x1, x2)) / delta(x1, x2, m)

    def d_eval(x1, x2):
        return ((m - 2.0 * x1 * x2) * h10.eval(x1, x2)
                - 2.0 * (x1**2 + m) * h01.eval(x1, x2)) / delta(x1, x2, m)

    region = h00.region
    return HSystemSolution(
        a=BilinearSymbol(eval=a_eval, region=region, name="hsys.a"),
        b=BilinearSymbol(eval=b_eval, region=region, name="hsys.b"),
        c=BilinearSymbol(eval=c_eval, region=region, name="hsys.c"),
        d=BilinearSymbol(eval=d_eval, region=region, name="hsys.d"),
    )


# ---------------------------------------------------------------------------
# conjugation symbols for Sobolev-weight commutators
# ---------------------------------------------------------------------------


def weight_commutator_symbol(sigma: float):
    """Symbol of <D>^sigma [T_f, <D>^-sigma] d_x expressed against f_x:

        (<x1+x2>^sigma <x2>^-sigma - 1) chi_lh(x1, x2 + x1/2) x2 / x1,

    an order-zero low-high symbol; the x1 -> 0 limit is removable.
    """

    def ev(x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        b2 = 1.0 + x2**2
        # (<x1+x2>/<x2>)^sigma - 1, evaluated without cancellation
        growth = np.expm1(0.5 * sigma * np.log1p((x1**2 + 2.0 * x1 * x2) / b2))
        small = np.abs(x1) < 1e-9
        safe_x1 = np.where(small, 1.0, x1)
        core = np.where(small, sigma * x2**2 / b2, growth * x2 / safe_x1)
        return core * bl.chi_lh(x1, x2 + 0.5 * x1) + 0j

    return ev


def _weight_growth(sigma: float, x1, x2):
    """(<x1+x2>^sigma <x2>^-sigma - 1) chi_lh(x1, x2): the gain the Sobolev
    weight picks up across a one-sided interaction, evaluated without
    cancellation and cut to the low-high region."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    growth = np.expm1(0.5 * sigma * np.log1p((x1**2 + 2.0 * x1 * x2) / (1.0 + x2**2)))
    return growth * bl.chi_lh(x1, x2)


def conjugation_symbols(sigma: float, model: ModelSpec) -> dict:
    """Quadratic sources left over after weighting the corrected pair with
    <D>^sigma, as bilinear symbols on (low piece, high piece).

    Weighting the output of a one-sided quadratic interaction rescales it
    by <x1+x2>^sigma <x2>^-sigma relative to weighting the high input, so
    each linearized interaction symbol reappears multiplied by that gain
    minus one.  Both one-sided orientations fold onto the low-high region,
    the reversed one through the swapped mixed symbol.  All four sources
    vanish identically at sigma = 0 and gain one power of the low frequency
    over the raw interactions.
    """
    q = quadratic_symbols(model)

    def src(factor, sym, swap=False):
        def ev(x1, x2):
            vals = sym.eval(x2, x1) if swap else sym.eval(x1, x2)
            return factor * _weight_growth(sigma, x1, x2) * vals

        return ev

    tag = f"conj[{model.name},{sigma}]"
    return {
        "h00": BilinearSymbol(eval=src(2.0, q.q00), region="lh", name=tag + ".h00"),
        "h01": BilinearSymbol(eval=src(1.0, q.q01), region="lh", name=tag + ".h01"),
        "h10": BilinearSymbol(eval=src(1.0, q.q01, swap=True), region="lh",
                              name=tag + ".h10"),
        "h11": BilinearSymbol(eval=src(2.0, q.q11), region="lh", name=tag + ".h11"),
    }


def conjugation_correction(sigma: float, model: ModelSpec) -> HSystemSolution:
    """Bounded normal-form symbols removing the conjugation sources."""
    key = ("conj_nf", sigma)
    cached = model.cache.get(key)
    if cached is None:
        hs = conjugation_symbols(sigma, model)
        cached = solve_h_system(hs["h00"], hs["h01"], hs["h10"], hs["h11"], model.m)
        model.cache[key] = cached
    return cached


# ---------------------------------------------------------------------------
# state-level applications
# ---------------------------------------------------------------------------


def apply_nf_full(state: State, model: ModelSpec) -> Field:
    """Quadratic change of unknown u + A(u,u) + B(u_t,u_t) + C(u_t,u)."""
    sym = nf_symbols(model)
    u, ut = state.pos, state.vel
    return (u + apply_bilinear(sym.a, u, u) + apply_bilinear(sym.b, ut, ut)
            + apply_bilinear(sym.c, ut, u))


def apply_nf_hh(state: State, model: ModelSpec) -> State:
    """Balanced-frequency correction of the Cauchy pair.

    The position uses the hh-split symbols; the velocity is its exact time
    derivative with the second time derivative eliminated through the
    evolution equation, so the result is again a functional of Cauchy data.
    """
    sp = _splits(model)
    ahh, bhh, chh = sp["a"]["hh"], sp["b"]["hh"], sp["c"]["hh"]
    u, ut = state.pos, state.vel
    utt = utt_from_state(state, model)
    pos = (u + apply_bilinear(ahh, u, u) + apply_bilinear(bhh, ut, ut)
           + apply_bilinear(chh, ut, u))
    vel = (ut + 2.0 * apply_bilinear(ahh, ut, u) + 2.0 * apply_bilinear(bhh, utt, ut)
           + apply_bilinear(chh, utt, u) + apply_bilinear(chh, ut, ut))
    return State(pos, vel, state.time)


def apply_nf_linearized(state_u: State, state_v: State, model: ModelSpec) -> State:
    """Bounded linearized correction v + A1(u,v) + B1(u_t,v_t) + C1(u_t,v)
    + D1(u,v_t), with A1 = 2(a_hl + a_hh), B1 = 2(b_hl + b_hh) and C1 = D1 =
    c_hl + c_hh; the velocity companion eliminates v_tt via the linearized
    equation and u_tt via the full one."""
    if state_u.grid != state_v.grid:
        raise ValueError("background and linearized states live on different grids")
    sp = _splits(model)

    def hlhh(split, gain):
        return bl.BilinearSymbol(
            eval=lambda x1, x2, lo=split["hl"], hi=split["hh"], g=gain:
                g * (lo.eval(x1, x2) + hi.eval(x1, x2)),
            name=split["hl"].name + "+hh",
        )

    a1 = hlhh(sp["a"], 2.0)
    b1 = hlhh(sp["b"], 2.0)
    c1 = hlhh(sp["c"], 1.0)

    u, ut = state_u.pos, state_u.vel
    v, vt = state_v.pos, state_v.vel
    utt = utt_from_state(state_u, model)
    vtt = linearized_vtt(state_u, state_v, model)

    pos = (v + apply_bilinear(a1, u, v) + apply_bilinear(b1, ut, vt)
           + apply_bilinear(c1, ut, v) + apply_bilinear(c1, u, vt))
    vel = (vt
           + apply_bilinear(a1, ut, v) + apply_bilinear(a1, u, vt)
           + apply_bilinear(b1, utt, vt) + apply_bilinear(b1, ut, vtt)
           + apply_bilinear(c1, utt, v) + apply_bilinear(c1, ut, vt)
           + apply_bilinear(c1, ut, vt) + apply_bilinear(c1, u, vtt))
    return State(pos, vel, state_v.time)


def linearized_vtt(state_u: State, state_v: State, model: ModelSpec) -> Field:
    """v_tt from the linearized equation along the background state."""
    from .model import linearized_coefficients, _phys

    u, ut, ux = _phys(state_u)
    v_x = to_physical(dx(state_v.pos))
    v_xx = to_physical(dx(state_v.pos, 2))
    v_tx = to_physical(dx(state_v.vel))
    v = to_physical(state_v.pos)
    v_t = to_physical(state_v.vel)
    co = linearized_coefficients(state_u, model)
    vals = (
        2.0 * model.g01(u, ut, ux) * v_tx
        + model.g11(u, ut, ux) * v_xx
        - model.m * v
        + to_physical(co["F0"]) * v_t
        + to_physical(co["F1"]) * v_x
        + to_physical(co["F"]) * v
    )
    grid = state_v.grid
    out = to_spectral(vals, grid)
    return Field(grid, np.where(grid.dealias_keep, out.coeffs, 0.0))


# ---------------------------------------------------------------------------
# residual of the transformed equation
# ---------------------------------------------------------------------------


def nf_residual(state: State, model: ModelSpec, flow: str = "quadratic") -> Field:
    """Klein-Gordon operator applied to the transformed unknown.

    All time derivatives are eliminated through the chosen flow: the
    quadratically truncated equation ("quadratic") or the full one
    ("full").  By construction the result carries no quadratic part, so its
    size scales like the cube of the data.
    """
    sym = nf_symbols(model)
    u, ut = state.pos, state.vel
    m = model.m

    if flow == "quadratic":
        quads = quadratic_symbols(model)
        n2 = quadratic_rhs(state, model, quads)
        utt = utt_linear_part(state, m) + n2
        dt_n2 = (2.0 * apply_bilinear(quads.q00, utt, ut)
                 + apply_bilinear(quads.q01, utt, u)
                 + apply_bilinear(quads.q01, ut, ut)
                 + 2.0 * apply_bilinear(quads.q11, ut, u))
        uttt = dx(ut, 2) - m * ut + dt_n2
        rhs = n2
    elif flow == "full":
        utt = utt_from_state(state, model)
        uttt = _uttt_full(state, utt, model)
        rhs = utt - utt_linear_part(state, m)
    else:
        raise ValueError("flow must be 'quadratic' or 'full'")

    ubf = apply_nf_full(state, model)
    d2 = (utt
          + 2.0 * apply_bilinear(sym.a, utt, u) + 2.0 * apply_bilinear(sym.a, ut, ut)
          + 2.0 * apply_bilinear(sym.b, uttt, ut) + 2.0 * apply_bilinear(sym.b, utt, utt)
          + apply_bilinear(sym.c, uttt, u) + 2.0 * apply_bilinear(sym.c, utt, ut)
          + apply_bilinear(sym.c, ut, utt))
    return d2 - dx(ubf, 2) + m * ubf


def _uttt_full(state: State, utt: Field, model: ModelSpec) -> Field:
    """Time derivative of the full-equation u_tt expression (chain rule on
    the pointwise coefficients, spatial derivatives spectrally)."""
    from .model import _phys

    grid = state.grid
    u, ut, ux = _phys(state)
    utt_p = to_physical(utt)
    utx = to_physical(dx(state.vel))
    uxx = to_physical(dx(state.pos, 2))
    uttx = to_physical(dx(utt))
    utxx = to_physical(dx(state.vel, 2))

    def dt_coeff(func):
        return (func.deriv("u")(u, ut, ux) * ut
                + func.deriv("ut")(u, ut, ux) * utt_p
                + func.deriv("ux")(u, ut, ux) * utx)

    vals = (
        2.0 * dt_coeff(model.g01) * utx + 2.0 * model.g01(u, ut, ux) * uttx
        + dt_coeff(model.g11) * uxx + model.g11(u, ut, ux) * utxx
        + dt_coeff(model.f)
        - model.m * ut
    )
    out = to_spectral(vals, grid)
    return Field(grid, np.where(grid.dealias_keep, out.coeffs, 0.0))
