"""Per-cell interpolation kernels.

Every kernel works on the *upwind cell* of a grid point: the near endpoint
(``lo``) is the point being updated and the far endpoint (``up``) is its
upwind neighbour.  ``h_signed`` is ``+h`` when the neighbour lies to the right
(``u < 0``) and ``-h`` when it lies to the left (``u > 0``), so one set of
formulas covers both directions.

All functions accept scalars or equal-shaped numpy arrays and broadcast.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from advec.exceptions import DomainError

# relative floors, scaled by |P| + |Q|
EPS_PQ = 1e-14
EPS_B = 1e-14


@dataclass(frozen=True)
class CellData:
    f_lo: np.ndarray | float
    f_up: np.ndarray | float
    d_lo: np.ndarray | float
    d_up: np.ndarray | float
    h_signed: np.ndarray | float

    def __post_init__(self):
        for name in ("f_lo", "f_up", "d_lo", "d_up", "h_signed"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise DomainError(f"non-finite {name} in cell data")
        if np.any(np.asarray(self.h_signed) == 0):
            raise DomainError("cell width must be non-zero")

    @property
    def slope(self):
        return (np.asarray(self.f_up) - self.f_lo) / self.h_signed


@dataclass(frozen=True)
class HcrParams:
    P: np.ndarray | float
    Q: np.ndarray | float
    M: np.ndarray | float
    alpha: np.ndarray | float
    f_lo: np.ndarray | float
    d_lo: np.ndarray | float
    h_signed: np.ndarray | float


@dataclass(frozen=True)
class Csl2Coeffs:
    f_lo: np.ndarray | float
    q1: np.ndarray | float
    q2: np.ndarray | float


def cubic_coefficients(cell: CellData):
    """Hermite cubic ``f_lo + d_lo*x + C2*x**2 + C3*x**3`` on the cell.

    Returns ``(C2, C3)`` so that the cubic matches ``f_up`` and ``d_up`` at
    ``x = h_signed``.
    """
    h = cell.h_signed
    s = cell.slope
    c2 = -(cell.d_up + 2.0 * cell.d_lo - 3.0 * s) / h
    c3 = (cell.d_up + cell.d_lo - 2.0 * s) / (h * h)
    return c2, c3


def _mixing(P, Q):
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    scale = np.abs(P) + np.abs(Q)
    degenerate = (np.abs(P) <= EPS_PQ * scale) | (np.abs(Q) <= EPS_PQ * scale)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = np.maximum(Q / P, P / Q)
        M = np.where(degenerate, np.inf, np.maximum(2.0, ratio))
        mm = M * (M - 2.0)
        # written as 1/(1 + 1/mm) so that huge M gives 1 rather than inf/inf
        alpha = np.where(mm > 0, 1.0 / (1.0 + 1.0 / mm), 0.0)
    return M, alpha


def hcr_params(cell: CellData, alpha=None) -> HcrParams:
    """Build the hybrid cubic-rational parameters for a cell.

    ``alpha`` may be forced (``0`` gives the cubic, ``1`` the rational
    function); by default it is the smallest weight that keeps the
    interpolant convexity preserving.
    """
    h = cell.h_signed
    s = cell.slope
    P = (s - cell.d_lo) * h
    Q = (cell.d_up - s) * h
    M, a = _mixing(P, Q)
    if alpha is not None:
        a = np.broadcast_to(np.asarray(alpha, dtype=float), np.shape(P)).copy()
        if np.ndim(P) == 0:
            a = float(a)
    if np.ndim(P) == 0:
        P, Q, M, a = float(P), float(Q), float(M), float(a)
    return HcrParams(P=P, Q=Q, M=M, alpha=a, f_lo=cell.f_lo, d_lo=cell.d_lo, h_signed=h)


def rational_params(cell: CellData) -> HcrParams:
    """Parameters of the rational interpolant (``alpha = 1``).

    Where the cell data is not monotone (``P*Q < 0``) the rational
    denominator changes sign inside the cell, so those cells take the cubic
    (``alpha = 0``), the same choice the hybrid weight makes there.
    """
    p = hcr_params(cell)
    alpha = np.where(np.asarray(p.P) * p.Q < 0, 0.0, 1.0)
    return replace(p, alpha=alpha if np.ndim(alpha) else float(alpha))


def _denominator(p: HcrParams, k):
    B = p.Q + (p.P - p.Q) * k
    tiny = np.abs(B) <= EPS_B * (np.abs(p.P) + np.abs(p.Q))
    # the cubic branch takes over wherever B is too small to divide by
    alpha = np.where(tiny, 0.0, p.alpha)
    B_safe = np.where(tiny, 1.0, B)
    return B, B_safe, alpha


def hcr_eval(p: HcrParams, k):
    """Value of the hybrid interpolant at fractional offset ``k`` in [0, 1]."""
    B, B_safe, alpha = _denominator(p, k)
    g1 = alpha * p.P * p.P / B_safe
    g2 = (1.0 - alpha) * (2.0 * p.P - B)
    out = p.f_lo + p.d_lo * p.h_signed * k + (g1 + g2) * k * k
    return out if np.ndim(out) else float(out)


def hcr_deriv(p: HcrParams, k):
    """Spatial derivative of the hybrid interpolant at offset ``k``."""
    B, B_safe, alpha = _denominator(p, k)
    g1 = alpha * p.P * p.P / B_safe
    g2 = (1.0 - alpha) * (2.0 * p.P - B)
    bracket = g1 * (p.Q + B) / B_safe + 2.0 * g2 + (1.0 - alpha) * (p.Q - B)
    out = p.d_lo + bracket * k / p.h_signed
    return out if np.ndim(out) else float(out)


def gamma_switch(d_lo, d_up, inclusive=False):
    """1 where the two endpoint derivatives change sign, else 0.

    With ``inclusive=True`` a zero product also selects the rational branch.
    """
    prod = np.asarray(d_lo) * np.asarray(d_up)
    out = (prod <= 0 if inclusive else prod < 0).astype(int)
    return out if np.ndim(out) else int(out)


def csl2_coefficients(f_lo, f_up, rho, h_signed) -> Csl2Coeffs:
    """Quadratic ``f_lo + 2*q1*x + 3*q2*x**2`` matching ``f_up`` and mean ``rho``."""
    q1 = -(f_up + 2.0 * f_lo - 3.0 * rho) / h_signed
    q2 = (f_up + f_lo - 2.0 * rho) / (h_signed * h_signed)
    return Csl2Coeffs(f_lo=f_lo, q1=q1, q2=q2)


def csl2_eval(c: Csl2Coeffs, xi):
    return c.f_lo + 2.0 * c.q1 * xi + 3.0 * c.q2 * xi * xi


def cell_outflux(c: Csl2Coeffs, xi):
    """Integral of the CSL2 quadratic from the near endpoint to ``xi``."""
    return c.f_lo * xi + c.q1 * xi * xi + c.q2 * xi * xi * xi
