"""Equation instances: metric and source functions, their origin derivatives,
quadratic-symbol extraction and second-time-derivative elimination.

The wave operator is  u_tt - 2 g01 u_tx - g11 u_xx + m u = f  after the
time-time metric component has been normalized to -1.  Metric and source
components are smooth functions of (u, u_t, u_x); the built-in gallery uses
polynomials, and rational components arise from normalizing a variable
time-time component.
"""

from dataclasses import dataclass, field

import numpy as np

from .bilinear import BilinearSymbol
from .spectral import Field, State, dx, to_physical, to_spectral

VARS = ("u", "ut", "ux")


# ---------------------------------------------------------------------------
# smooth scalar functions of (u, u_t, u_x) with exact derivative calculus
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Poly:
    """Polynomial in (u, u_t, u_x): {(i, j, k): coeff} for u^i ut^j ux^k."""

    terms: tuple

    @staticmethod
    def from_dict(d: dict) -> "Poly":
        return Poly(tuple(sorted((k, float(v)) for k, v in d.items() if v != 0.0)))

    def __call__(self, u, ut, ux):
        out = np.zeros(np.broadcast(u, ut, ux).shape)
        for (i, j, k), c in self.terms:
            term = c
            for base, power in ((u, i), (ut, j), (ux, k)):
                if power == 1:
                    term = term * np.asarray(base)
                elif power > 1:
                    term = term * np.asarray(base) ** power
            out += term
        return out

    def deriv(self, var: str) -> "Poly":
        axis = VARS.index(var)
        d = {}
        for pows, c in self.terms:
            if pows[axis] == 0:
                continue
            new = list(pows)
            new[axis] -= 1
            key = tuple(new)
            d[key] = d.get(key, 0.0) + c * pows[axis]
        return Poly.from_dict(d)

    def at0(self) -> float:
        for pows, c in self.terms:
            if pows == (0, 0, 0):
                return c
        return 0.0

    def shift(self, delta: float) -> "Poly":
        d = dict(self.terms)
        key = (0, 0, 0)
        d[key] = d.get(key, 0.0) + delta
        return Poly.from_dict(d)

    def is_zero(self) -> bool:
        return not self.terms


def poly(d: dict | None = None, **channels) -> Poly:
    """Build a polynomial from channel strings, e.g. poly(u=1.0, **{"u*ut": 2})."""
    d = dict(d or {})
    d.update(channels)
    out = {}
    for name, c in d.items():
        pows = [0, 0, 0]
        if name not in ("", "1"):
            for factor in name.split("*"):
                if factor not in VARS:
                    raise ValueError(f"unknown variable {factor!r} in channel {name!r}")
                pows[VARS.index(factor)] += 1
        key = tuple(pows)
        out[key] = out.get(key, 0.0) + float(c)
    return Poly.from_dict(out)


@dataclass(frozen=True)
class Ratio:
    """Quotient num/den of polynomials, den bounded away from zero near 0."""

    num: Poly
    den: Poly

    def __call__(self, u, ut, ux):
        den = self.den(u, ut, ux)
        if np.any(np.abs(den) < 1e-10):
            raise FloatingPointError("normalized metric denominator vanished on the state")
        return self.num(u, ut, ux) / den

    def deriv(self, var: str) -> "Ratio":
        return Ratio(
            _poly_sub(
                _poly_mul(self.num.deriv(var), self.den),
                _poly_mul(self.num, self.den.deriv(var)),
            ),
            _poly_mul(self.den, self.den),
        )

    def at0(self) -> float:
        return self.num.at0() / self.den.at0()

    def is_zero(self) -> bool:
        return self.num.is_zero()


def _poly_mul(a: Poly, b: Poly) -> Poly:
    d = {}
    for pa, ca in a.terms:
        for pb, cb in b.terms:
            key = tuple(x + y for x, y in zip(pa, pb))
            d[key] = d.get(key, 0.0) + ca * cb
    return Poly.from_dict(d)


def _poly_sub(a: Poly, b: Poly) -> Poly:
    d = dict(a.terms)
    for pb, cb in b.terms:
        d[pb] = d.get(pb, 0.0) - cb
    return Poly.from_dict(d)


def _d1(func, var: str) -> float:
    return func.deriv(var).at0()


def _d2(func, v1: str, v2: str) -> float:
    return func.deriv(v1).deriv(v2).at0()


# ---------------------------------------------------------------------------
# model specification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    """Normalized equation data: mass, metric components g01 and g11, source f.

    The time-time component is identically -1.  Origin first derivatives of
    the metric and the origin Hessian of the source are derived exactly from
    the component calculus and cached as plain floats.
    """

    name: str
    m: float
    g01: object
    g11: object
    f: object
    cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not (self.m > 0):
            raise ValueError("mass must be positive")
        if abs(self.g01.at0()) > 1e-14 or abs(self.g11.at0() - 1.0) > 1e-14:
            raise ValueError("metric must be Minkowski at the origin")
        if abs(self.f.at0()) > 1e-14 or any(abs(_d1(self.f, v)) > 1e-14 for v in VARS):
            raise ValueError("source must vanish to second order at the origin")

    # origin derivative values ------------------------------------------------
    @property
    def g01_u(self):
        return _d1(self.g01, "u")

    @property
    def g01_ut(self):
        return _d1(self.g01, "ut")

    @property
    def g01_ux(self):
        return _d1(self.g01, "ux")

    @property
    def g11_u(self):
        return _d1(self.g11, "u")

    @property
    def g11_ut(self):
        return _d1(self.g11, "ut")

    @property
    def g11_ux(self):
        return _d1(self.g11, "ux")

    def f2(self, v1: str, v2: str) -> float:
        return _d2(self.f, v1, v2)

    def is_flat(self) -> bool:
        return self.g01.is_zero() and (self.g11.deriv("u").is_zero()
                                       and self.g11.deriv("ut").is_zero()
                                       and self.g11.deriv("ux").is_zero()) and self.f.is_zero()


@dataclass(frozen=True)
class RawModel:
    """Pre-normalization data with a general (negative) time-time component."""

    name: str
    m: float
    g00: Poly
    g01: Poly
    g11: Poly
    f: Poly


def normalize_metric(raw: RawModel) -> ModelSpec:
    """Divide through by -g00 so the time-time component becomes -1.

    The mass term m u / (-g00) is split as m u plus a correction that is
    folded into the source, keeping the equation unchanged.
    """
    if not (raw.g00.at0() < 0):
        raise ValueError("time-time component must be negative near the origin")
    den = Poly.from_dict({k: -c for k, c in raw.g00.terms})  # -g00, positive near 0
    if den.at0() != 1.0:
        raise ValueError("time-time component must equal -1 at the origin")
    den_is_one = den.terms == (((0, 0, 0), 1.0),)

    def ratio_or_poly(num: Poly):
        return num if den_is_one else Ratio(num, den)

    g01n = ratio_or_poly(raw.g01)
    g11n = ratio_or_poly(raw.g11)
    if den_is_one:
        fn = raw.f
    else:
        # f/(-g00) - m u (1/(-g00) - 1) = (f - m u (1 - (-g00))) / (-g00)
        one_minus_den = _poly_sub(poly({"1": 1.0}), den)
        fn = Ratio(_poly_sub(raw.f, _poly_mul(poly(u=raw.m), one_minus_den)), den)
    return ModelSpec(raw.name, raw.m, g01n, g11n, fn)


# ---------------------------------------------------------------------------
# built-in gallery
# ---------------------------------------------------------------------------


def _spec(name, m=1.0, g01=None, g11_extra=None, f=None) -> ModelSpec:
    return ModelSpec(
        name=name,
        m=m,
        g01=g01 or poly(),
        g11=(g11_extra or poly()).shift(1.0),
        f=f or poly(),
    )


def gallery(name: str, m: float = 1.0) -> ModelSpec:
    """Built-in models; each exercises a different channel of the quadratic
    nonlinearity, and "generic" mixes all six metric derivative channels."""
    if name == "flat":
        return _spec("flat", m)
    if name == "g11u":
        return _spec("g11u", m, g11_extra=poly(u=1.0))
    if name == "g01ut":
        return _spec("g01ut", m, g01=poly(ut=1.0))
    if name == "fu2":
        return _spec("fu2", m, f=poly({"u*u": 1.0}))
    if name == "fut2":
        return _spec("fut2", m, f=poly({"ut*ut": 1.0}))
    if name == "generic":
        return _spec(
            "generic",
            m,
            g01=poly(u=0.4, ut=0.3, ux=-0.2),
            g11_extra=poly(u=0.5, ut=-0.25, ux=0.15),
            f=poly({"u*u": 0.2, "u*ut": 0.3, "ut*ut": -0.15, "ut*ux": 0.25,
                    "u*ux": -0.1, "ux*ux": 0.1}),
        )
    raise ValueError(f"unknown model {name!r}; choose from {sorted(GALLERY_NAMES)}")


GALLERY_NAMES = ("flat", "g11u", "g01ut", "fu2", "fut2", "generic")


def custom_model(table: dict, m: float = 1.0, name: str = "custom") -> ModelSpec:
    """Model from a coefficient table {"g01.u": 0.3, "f.u*ut": 0.2, ...}.

    Keys are "<component>.<channel>" with component in {g01, g11, f} and
    channel a product of variables; g11 entries add to the flat value 1.
    """
    parts = {"g01": {}, "g11": {}, "f": {}}
    for key, value in table.items():
        comp, _, channel = key.partition(".")
        if comp not in parts or not channel:
            raise ValueError(f"bad model table key {key!r}")
        parts[comp][channel] = float(value)
    return ModelSpec(
        name=name,
        m=m,
        g01=poly(parts["g01"]),
        g11=poly(parts["g11"]).shift(1.0),
        f=poly(parts["f"]),
    )


# ---------------------------------------------------------------------------
# quadratic symbols and their one-frequency coefficient tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadSymbols:
    """Polynomial symbols of the quadratic part of the nonlinearity.

    q00 acts on (u_t, u_t), q01 on (u_t, u), q11 on (u, u); q00 and q11 are
    symmetric under swapping the two frequencies.
    """

    q00: BilinearSymbol
    q01: BilinearSymbol
    q11: BilinearSymbol


def quadratic_symbols(model: ModelSpec) -> QuadSymbols:
    """Symbols of the exact quadratic Taylor part of the nonlinearity.

    Diagonal source-Hessian entries carry the Taylor 1/2; the three
    x-derivative source channels (u ux, ut ux, ux ux) land in the symbol
    spans alongside the metric channels.  Built so that the bilinear forms
    reproduce the nonlinearity to cubic accuracy, which the correction
    symbols rely on.
    """
    fT = model.f2("ut", "ut")
    fTU = model.f2("u", "ut")
    fUU = model.f2("u", "u")
    fTX = model.f2("ut", "ux")
    fUX = model.f2("u", "ux")
    fXX = model.f2("ux", "ux")
    a01u, a01t, a01x = model.g01_u, model.g01_ut, model.g01_ux
    a11u, a11t, a11x = model.g11_u, model.g11_ut, model.g11_ux

    def q00(x1, x2):
        return 0.5 * fT + 1j * a01t * (x1 + x2) + 0.0 * x1 * x2

    def q01(x1, x2):
        return (fTU + 2j * a01u * x1 - 2.0 * a01x * x1 * x2 - a11t * x2**2
                + 1j * fTX * x2)

    def q11(x1, x2):
        # inner groupings keep the swap symmetry exact in floating point
        return (0.5 * fUU - 0.5 * a11u * (x1**2 + x2**2)
                - 0.5j * a11x * (x1 * x2**2 + x2 * x1**2)
                - 0.5 * fXX * (x1 * x2) + 0.5j * fUX * (x1 + x2))

    return QuadSymbols(
        q00=BilinearSymbol(eval=q00, name=f"q00[{model.name}]"),
        q01=BilinearSymbol(eval=q01, name=f"q01[{model.name}]"),
        q11=BilinearSymbol(eval=q11, name=f"q11[{model.name}]"),
    )


def q_taylor_coeffs(model: ModelSpec) -> dict:
    """One-frequency coefficients of the quadratic symbols.

    Entries q00_0, q00_1, q11_0..q11_2, q01_0..q01_2 expand each symbol in
    powers of the second frequency; q01t_0, q01t_1 expand q01 in powers of
    the first.  Reconstruction from these closures is exact.
    """
    fT = model.f2("ut", "ut")
    fTU = model.f2("u", "ut")
    fUU = model.f2("u", "u")
    fTX = model.f2("ut", "ux")
    fUX = model.f2("u", "ux")
    fXX = model.f2("ux", "ux")
    a01u, a01t, a01x = model.g01_u, model.g01_ut, model.g01_ux
    a11u, a11t, a11x = model.g11_u, model.g11_ut, model.g11_ux
    z = lambda xi: np.zeros(np.shape(xi), dtype=complex)
    return {
        "q00_0": lambda xi: 0.5 * fT + 1j * a01t * xi,
        "q00_1": lambda xi: 1j * a01t + z(xi),
        "q11_2": lambda xi: -0.5 * a11u - 0.5j * a11x * xi,
        "q11_1": lambda xi: -0.5j * a11x * xi**2 - 0.5 * fXX * xi + 0.5j * fUX,
        "q11_0": lambda xi: 0.5 * fUU - 0.5 * a11u * xi**2 + 0.5j * fUX * xi,
        "q01_2": lambda xi: -a11t + z(xi),
        "q01_1": lambda xi: -2.0 * a01x * xi + 1j * fTX,
        "q01_0": lambda xi: fTU + 2j * a01u * xi,
        "q01t_1": lambda xi: 2j * a01u - 2.0 * a01x * xi,
        "q01t_0": lambda xi: fTU - a11t * xi**2 + 1j * fTX * xi,
    }


# ---------------------------------------------------------------------------
# pointwise evaluation along a state
# ---------------------------------------------------------------------------


def _phys(state: State):
    u = to_physical(state.pos)
    ut = to_physical(state.vel)
    ux = to_physical(dx(state.pos))
    return u, ut, ux


def coefficient_field(func, state: State) -> Field:
    """Evaluate a smooth component function pointwise along the state."""
    u, ut, ux = _phys(state)
    vals = func(u, ut, ux)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("nonlinear coefficient evaluation produced non-finite values")
    return to_spectral(np.asarray(vals, dtype=float), state.grid)


def utt_from_state(state: State, model: ModelSpec, dealias: bool = True) -> Field:
    """Second time derivative from the evolution equation:
    u_tt = 2 g01 u_tx + g11 u_xx + f - m u, evaluated pseudospectrally."""
    grid = state.grid
    u, ut, ux = _phys(state)
    utx = to_physical(dx(state.vel))
    uxx = to_physical(dx(state.pos, 2))
    vals = (
        2.0 * model.g01(u, ut, ux) * utx
        + model.g11(u, ut, ux) * uxx
        + model.f(u, ut, ux)
        - model.m * u
    )
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("blow-up: non-finite nonlinear evaluation")
    out = to_spectral(vals, grid)
    if dealias:
        out = Field(grid, np.where(grid.dealias_keep, out.coeffs, 0.0))
    return out


def utt_linear_part(state: State, m: float) -> Field:
    """u_xx - m u, the flat-model second time derivative."""
    return dx(state.pos, 2) - m * state.pos


def linearized_coefficients(state: State, model: ModelSpec) -> dict:
    """Coefficient fields of the flow linearized along the state.

    Returns {"F0": ..., "F1": ..., "F": ...} so that the linearized equation
    reads v_tt = 2 g01 v_tx + g11 v_xx - m v + F0 v_t + F1 v_x + F v, with
    all coefficients evaluated pointwise on the background.
    """
    u, ut, ux = _phys(state)
    utx = to_physical(dx(state.vel))
    uxx = to_physical(dx(state.pos, 2))

    def channel(var):
        vals = (
            2.0 * model.g01.deriv(var)(u, ut, ux) * utx
            + model.g11.deriv(var)(u, ut, ux) * uxx
            + model.f.deriv(var)(u, ut, ux)
        )
        return to_spectral(np.asarray(vals, dtype=float), state.grid)

    return {"F0": channel("ut"), "F1": channel("ux"), "F": channel("u")}


def quadratic_rhs(state: State, model: ModelSpec, quads: QuadSymbols | None = None) -> Field:
    """Quadratic truncation of the nonlinearity, evaluated by bilinear symbols."""
    from .bilinear import apply_bilinear

    q = quads or quadratic_symbols(model)
    ut, u = state.vel, state.pos
    return (
        apply_bilinear(q.q00, ut, ut)
        + apply_bilinear(q.q01, ut, u)
        + apply_bilinear(q.q11, u, u)
    )
