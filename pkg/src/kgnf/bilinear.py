"""Translation-invariant bilinear operators B(f,g) defined by symbols b(xi1,xi2).

Provides the smooth low-high / high-high frequency cutoffs, the direct
O(n^2) evaluation (the canonical semantics every optimization is checked
against), Weyl-quantized paraproducts, the balanced product, and a fast
separable-expansion path validated against the direct sum.
"""

import threading
from dataclasses import dataclass, field

import numpy as np

from .spectral import Field, Grid, _check_same_grid, smoothstep, to_physical, to_spectral

#: ratio band of the low-high cutoff: 1 below LO, 0 above HI
CHI_LO = 1.0 / 20.0
CHI_HI = 1.0 / 10.0

_matrix_lock = threading.Lock()


def _jp(xi):
    """Japanese bracket <xi>."""
    return np.sqrt(1.0 + np.asarray(xi, dtype=float) ** 2)


def chi_lh(xi1, xi2):
    """Smooth low-high cutoff in the ratio <xi1>/<xi2>.

    Equals 1 where <xi1> <= <xi2>/20, vanishes where <xi1> >= <xi2>/10,
    with a monotone smoothstep transition between the two thresholds.
    """
    rho = _jp(xi1) / _jp(xi2)
    return 1.0 - smoothstep((rho - CHI_LO) / (CHI_HI - CHI_LO))


def chi_hl(xi1, xi2):
    return chi_lh(xi2, xi1)


def chi_hh(xi1, xi2):
    """Balanced cutoff, the complement of the two one-sided cutoffs.

    Pairs of comparable size land here, including pairs of two small
    frequencies.
    """
    return 1.0 - chi_lh(xi1, xi2) - chi_lh(xi2, xi1)


@dataclass(eq=False)
class BilinearSymbol:
    """Symbol b(xi1, xi2) with metadata.

    ``eval`` must accept numpy arrays (broadcasting) and return complex
    values.  ``parity_real`` asserts b(-xi1,-xi2) = conj(b(xi1,xi2)), so the
    operator maps real pairs to real output.  ``region`` is one of
    {"full", "lh", "hl", "hh"} and records the frequency support.
    """

    eval: callable
    parity_real: bool = True
    region: str = "full"
    name: str = ""
    _matrices: dict = field(default_factory=dict, repr=False)

    def matrix(self, grid: Grid) -> np.ndarray:
        """Tabulated values b(xi_i, xi_j) on the grid, cached per grid."""
        tab = self._matrices.get(grid)
        if tab is None:
            with _matrix_lock:
                tab = self._matrices.get(grid)
                if tab is None:
                    x1 = grid.xi[:, None]
                    x2 = grid.xi[None, :]
                    tab = np.asarray(self.eval(x1, x2), dtype=complex)
                    if tab.shape != (grid.n, grid.n):
                        tab = np.broadcast_to(tab, (grid.n, grid.n)).astype(complex)
                    if not np.all(np.isfinite(tab)):
                        raise ValueError(
                            f"bilinear symbol {self.name!r} non-finite on the grid"
                        )
                    self._matrices[grid] = tab
        return tab


def scaled_symbol(sym: BilinearSymbol, weight, name="") -> BilinearSymbol:
    """Multiply a symbol by a scalar function of (xi1, xi2)."""
    return BilinearSymbol(
        eval=lambda x1, x2: sym.eval(x1, x2) * weight(x1, x2),
        parity_real=sym.parity_real,
        region=sym.region,
        name=name or sym.name,
    )


def one_symbol() -> BilinearSymbol:
    return BilinearSymbol(eval=lambda x1, x2: np.ones(np.broadcast(x1, x2).shape), name="1")


def apply_bilinear(symbol: BilinearSymbol, f: Field, g: Field, dealias: bool = False) -> Field:
    """Direct double-sum evaluation of B(f,g): the reference semantics.

    Output coefficient at zeta is the sum of b(xi1,xi2) fhat(xi1) ghat(xi2)
    over representable pairs xi1 + xi2 = zeta; pairs whose sum leaves the
    resolved band are dropped, so no aliasing ever enters.  The optional
    2/3-rule truncation additionally zeroes the top third of output modes.
    """
    _check_same_grid(f, g)
    grid = f.grid
    tab = symbol.matrix(grid)
    prod = tab * f.coeffs[:, None] * g.coeffs[None, :]
    idx = grid.pair_index.ravel()
    re = np.bincount(idx, weights=prod.real.ravel(), minlength=grid.n + 1)
    im = np.bincount(idx, weights=prod.imag.ravel(), minlength=grid.n + 1)
    out = (re[: grid.n] + 1j * im[: grid.n]).astype(complex)
    if dealias:
        out[~grid.dealias_keep] = 0.0
    return Field(grid, out)


# ---------------------------------------------------------------------------
# paraproducts (Weyl quantization) and the balanced product
# ---------------------------------------------------------------------------

_weyl_low_high = BilinearSymbol(
    eval=lambda x1, x2: chi_lh(x1, x2 + 0.5 * x1), name="chi_lh_weyl"
)
_weyl_high_low = BilinearSymbol(
    eval=lambda x1, x2: chi_lh(x2, x1 + 0.5 * x2), name="chi_hl_weyl"
)
_weyl_balanced = BilinearSymbol(
    eval=lambda x1, x2: 1.0 - chi_lh(x1, x2 + 0.5 * x1) - chi_lh(x2, x1 + 0.5 * x2),
    name="chi_hh_weyl",
)


def paraproduct(f: Field, g: Field) -> Field:
    """Low-high part T_f g of the product, Weyl-quantized.

    The cutoff is evaluated at (xi1, xi2 + xi1/2); the second entry is the
    average of the g-input frequency and the output frequency, which makes
    T_f self-adjoint on L^2 for real f.
    """
    return apply_bilinear(_weyl_low_high, f, g)


def balanced_product(f: Field, g: Field) -> Field:
    """Comparable-frequency part of the product: fg - T_f g - T_g f."""
    return apply_bilinear(_weyl_balanced, f, g)


def para_with_constant(coeff: Field, base: float, g: Field) -> Field:
    """(base + T_coeff) g: the constant part of a coefficient multiplies
    directly, the variable part enters through the paraproduct."""
    return base * g + paraproduct(coeff, g)


def pointwise_product(f: Field, g: Field, dealias: bool = True) -> Field:
    """Collocation product of two real fields, optionally 2/3-truncated."""
    _check_same_grid(f, g)
    out = to_spectral(to_physical(f) * to_physical(g), f.grid)
    if dealias:
        out = Field(f.grid, np.where(f.grid.dealias_keep, out.coeffs, 0.0))
    return out


# ---------------------------------------------------------------------------
# fast path: separable low-high expansions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SeparableTerm:
    """One term xi1^power * blow(xi1) * chigh(xi2) of a low-high expansion."""

    power: int
    blow: callable
    chigh: callable


_chi_lh_factors: dict = {}


def _chi_lh_lowrank(grid: Grid, weyl: bool, rel_cut: float = 1e-13):
    """Low-rank separable factorization of the low-high cutoff.

    The cutoff is a smooth function of the frequency ratio, so its grid
    tabulation has rapidly decaying singular values; the truncated SVD
    turns the cutoff into a short sum of products of one-frequency
    multipliers, each applied in O(n log n).
    """
    key = (grid, weyl)
    fac = _chi_lh_factors.get(key)
    if fac is None:
        x1 = grid.xi[:, None]
        x2 = grid.xi[None, :]
        tab = chi_lh(x1, x2 + 0.5 * x1) if weyl else chi_lh(x1, x2)
        uu, ss, vv = np.linalg.svd(tab, full_matrices=False)
        keep = ss > rel_cut * ss[0]
        fac = (uu[:, keep] * ss[keep], vv[keep, :])
        _chi_lh_factors[key] = fac
    return fac


def apply_bilinear_fast(terms, f: Field, g: Field, weyl: bool = True) -> Field:
    """Evaluate a low-high symbol sum_j xi1^p_j b_j(xi1) c_j(xi2) chi(xi1,xi2),
    with chi the Weyl-shifted cutoff by default (the paraproduct's) or the
    unshifted one used by region splits.

    Each term becomes (multiplier on f) x (multiplier on g) composed with
    the rank-factored cutoff; the products are formed by zero-padded FFT,
    which reproduces the direct double sum exactly (no aliasing).
    """
    terms = list(terms)
    if not terms:
        raise ValueError("separable expansion must have at least one term")
    _check_same_grid(f, g)
    grid = f.grid
    n = grid.n
    uu, vv = _chi_lh_lowrank(grid, weyl)
    xi = grid.xi
    # pad to 2n so FFT products are true convolutions on the original band
    pad_idx = np.mod(grid.k_int, 2 * n)
    out = np.zeros(2 * n, dtype=complex)
    for term in terms:
        fmult = f.coeffs * (xi**term.power) * np.asarray(term.blow(xi), dtype=complex)
        gmult = g.coeffs * np.asarray(term.chigh(xi), dtype=complex)
        for r in range(uu.shape[1]):
            fpad = np.zeros(2 * n, dtype=complex)
            gpad = np.zeros(2 * n, dtype=complex)
            fpad[pad_idx] = fmult * uu[:, r]
            gpad[pad_idx] = gmult * vv[r, :]
            out += np.fft.fft(np.fft.ifft(fpad) * np.fft.ifft(gpad)) * (2 * n)
    # gathering only the resolved band drops out-of-band sums, mirroring the
    # direct semantics
    return Field(grid, out[pad_idx])


def separable_to_symbol(terms, weyl: bool = True, name="separable") -> BilinearSymbol:
    """Direct-evaluation symbol for a separable expansion (oracle side)."""
    terms = list(terms)

    def ev(x1, x2):
        total = np.zeros(np.broadcast(x1, x2).shape, dtype=complex)
        for t in terms:
            total += (x1**t.power) * np.asarray(t.blow(x1), dtype=complex) * np.asarray(
                t.chigh(x2), dtype=complex
            )
        cut = chi_lh(x1, x2 + 0.5 * x1) if weyl else chi_lh(x1, x2)
        return total * cut

    return BilinearSymbol(eval=ev, name=name)
