"""Prediction-error criteria: pointwise MSPE, the closed-form IMSPE and
an independent adaptive-quadrature evaluation.

The closed form is

    IMSPE = 2 * (1 - A_n + B_n / G(n)),

with G(n) = 1 + sum g(d_l), A_n and B_n assembled from the integral
tables rho_{i,j} = int_0^1 exp(-lam(|x-t_i| + |x-t_j|)) dx and
v_{i,j} = int_0^1 exp(-lam|x-t_i|) cos(omega(x-t_j)) dx.  Both criteria
are evaluated in normalized (unit stationary variance) units, so they
are invariant under rescaling of sigma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, ValidationError
from .model import (
    Design,
    OuParams,
    build_C_inv,
    cross_Q_many,
    trend_matrix,
)


def g_scalar(d: float, params: OuParams) -> float:
    """Per-gap information gain g(d); g(0) = 0 and g(d) -> 1 as d grows."""
    if d < 0:
        raise ValidationError(f"gap must be nonnegative, got {d}")
    if d == 0.0:
        return 0.0
    e = math.exp(-params.lam * d)
    return (1.0 - 2.0 * e * math.cos(params.omega * d) + e * e) / (1.0 - e * e)


def fim_G(design: Design, params: OuParams) -> float:
    """G(n) = 1 + sum g(d_l); H C^{-1} H^T = G(n) * I_2."""
    return 1.0 + sum(g_scalar(d, params) for d in design.gaps)


@dataclass(frozen=True)
class RhoVeeTable:
    """Integral tables shared by the closed-form criterion.

    ``rho[i, j]`` and ``vee[i, j]`` are 0-based over design points;
    rho is symmetric, vee is not.
    """

    rho: np.ndarray
    vee: np.ndarray


def build_tables(design: Design, params: OuParams) -> RhoVeeTable:
    t = design.points
    lam, om = params.lam, params.omega
    diff = np.abs(t[:, None] - t[None, :])
    summ = t[:, None] + t[None, :]
    rho = (
        2.0 * np.exp(-lam * diff) - np.exp(-lam * summ) - np.exp(-lam * (2.0 - summ))
    ) / (2.0 * lam) + diff * np.exp(-lam * diff)
    den = lam * lam + om * om
    ti = t[:, None]
    tj = t[None, :]
    vee = (
        2.0 * lam * np.cos(om * (ti - tj))
        + np.exp(-lam * ti) * (om * np.sin(om * tj) - lam * np.cos(om * tj))
        + np.exp(-lam * (1.0 - ti))
        * (om * np.sin(om * (1.0 - tj)) - lam * np.cos(om * (1.0 - tj)))
    ) / den
    return RhoVeeTable(rho=rho, vee=vee)


def rho(i: int, j: int, design: Design, params: OuParams) -> float:
    """rho_{i,j} for 1-based indices; symmetric in (i, j)."""
    _check_index(i, design)
    _check_index(j, design)
    return float(build_tables(design, params).rho[i - 1, j - 1])


def vee(i: int, j: int, design: Design, params: OuParams) -> float:
    """v_{i,j} for 1-based indices (not symmetric)."""
    _check_index(i, design)
    _check_index(j, design)
    return float(build_tables(design, params).vee[i - 1, j - 1])


def _check_index(i: int, design: Design):
    if not 1 <= i <= design.n:
        raise ValidationError(f"index {i} out of range 1..{design.n}")


@dataclass(frozen=True)
class ImspeBreakdown:
    """Closed-form IMSPE with its building blocks.

    ``b_terms`` exposes the five summands of B_n in assembly order for
    term-level diagnostics.
    """

    g_values: tuple
    G: float
    A_n: float
    B_n: float
    b_terms: tuple
    value: float


def imspe_closed(design: Design, params: OuParams) -> ImspeBreakdown:
    """Closed-form IMSPE = 2 * (1 - A_n + B_n / G)."""
    n = design.n
    t = design.points
    tab = build_tables(design, params)
    R, V = tab.rho, tab.vee
    pis = design.pis(params)
    pi2 = pis**2
    om = params.omega

    g_values = tuple(g_scalar(d, params) for d in design.gaps)
    G = 1.0 + sum(g_values)

    k = np.arange(n - 1)
    quad = R[k, k] - 2.0 * pis * R[k + 1, k] + pi2 * R[k + 1, k + 1]
    A_n = float(R[n - 1, n - 1] + np.sum(quad / (1.0 - pi2)))

    b1 = 1.0 - 2.0 * V[n - 1, n - 1] + R[n - 1, n - 1]
    b2 = -2.0 * float(
        np.sum(
            ((V[k, k] - pis * V[k, k + 1]) - pis * (V[k + 1, k] - pis * V[k + 1, k + 1]))
            / (1.0 - pi2)
        )
    )
    b3 = 2.0 * float(
        np.sum(
            (R[n - 1, k] - pis * R[n - 1, k + 1])
            * (np.cos(om * (1.0 - t[k])) - pis * np.cos(om * (1.0 - t[k + 1])))
            / (1.0 - pi2)
        )
    )
    b4 = float(
        np.sum(
            quad * (1.0 - 2.0 * pis * np.cos(om * design.gaps) + pi2) / (1.0 - pi2) ** 2
        )
    )
    b5 = 0.0
    for i in range(1, n - 1):
        j = np.arange(i)
        r_term = (
            R[i, j]
            - pis[i] * R[i + 1, j]
            - pis[j] * R[i, j + 1]
            + pis[i] * pis[j] * R[i + 1, j + 1]
        )
        c_term = (
            np.cos(om * (t[i] - t[j]))
            - pis[i] * np.cos(om * (t[i + 1] - t[j]))
            - pis[j] * np.cos(om * (t[i] - t[j + 1]))
            + pis[i] * pis[j] * np.cos(om * (t[i + 1] - t[j + 1]))
        )
        b5 += 2.0 * float(np.sum(r_term * c_term / ((1.0 - pi2[i]) * (1.0 - pi2[j]))))

    B_n = b1 + b2 + b3 + b4 + b5
    value = 2.0 * (1.0 - A_n + B_n / G)
    return ImspeBreakdown(
        g_values=g_values,
        G=G,
        A_n=A_n,
        B_n=B_n,
        b_terms=(b1, b2, b3, b4, b5),
        value=value,
    )


class _MspeEvaluator:
    """Precomputed pieces for fast vectorized MSPE evaluation."""

    def __init__(self, design: Design, params: OuParams):
        self.design = design
        self.params = params
        self.Cinv = build_C_inv(design, params)
        self.HT = trend_matrix(design.n).T  # (2n, 2)
        # H C^{-1} H^T = (G(n)/variance) * I2; G_norm is the normalized FIM
        self.G_norm = float((self.HT.T @ self.Cinv @ self.HT)[0, 0]) * params.variance

    def __call__(self, xs: np.ndarray) -> np.ndarray:
        Q = cross_Q_many(xs, self.design, self.params)  # (m, 2, 2n)
        QC = np.einsum("mij,jk->mik", Q, self.Cinv)
        tr_qcq = np.einsum("mik,mik->m", QC, Q)
        Rm = np.eye(2)[None, :, :] - np.einsum("mij,jk->mik", QC, self.HT)
        tr_rr = np.einsum("mik,mik->m", Rm, Rm)
        v = self.params.variance
        # normalized units: divide out the stationary variance scaling
        return 2.0 - tr_qcq / v + tr_rr / self.G_norm


def mspe_point(x: float, design: Design, params: OuParams) -> float:
    """Normalized pointwise MSPE of the BLUE at x (expanded-trace form).

    Vanishes at design points; tiny negative roundoff is clamped to 0.
    """
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"prediction location {x} outside [0, 1]")
    val = float(_MspeEvaluator(design, params)(np.array([x]))[0])
    if -1e-12 < val < 0.0:
        return 0.0
    return val


def mspe_bordered(x: float, design: Design, params: OuParams) -> float:
    """Normalized MSPE via the bordered-matrix trace formula.

    Independent evaluation path from ``mspe_point``: one dense solve of
    the (2n+2)-dimensional system [[O_2, H], [H^T, C]].
    """
    from .model import build_C, cross_Q  # local import keeps paths separate

    norm = OuParams(params.lam, params.omega)
    n = design.n
    H = trend_matrix(n)
    M = np.zeros((2 * n + 2, 2 * n + 2))
    M[:2, 2:] = H
    M[2:, :2] = H.T
    M[2:, 2:] = build_C(design, norm)
    P = np.hstack([np.eye(2), cross_Q(x, design, norm)])
    try:
        sol = np.linalg.solve(M, P.T)
    except np.linalg.LinAlgError as exc:
        from .errors import SingularityError

        raise SingularityError("bordered system is singular") from exc
    val = float(np.trace(np.eye(2) - P @ sol))
    if -1e-12 < val < 0.0:
        return 0.0
    return val


@lru_cache(maxsize=4)
def _gauss_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def imspe_quadrature(design: Design, params: OuParams, tol: float = 1e-9) -> float:
    """IMSPE by adaptive panel quadrature of the pointwise MSPE.

    Panels start at the design gaps (the MSPE has kinks at each t_i) and
    are bisected until nested Gauss estimates agree; the error estimate
    compares 10- and 21-node rules on each panel.
    """
    if not 1e-12 <= tol <= 1e-4:
        raise ValidationError(f"tolerance {tol} outside [1e-12, 1e-4]")
    ev = _MspeEvaluator(design, params)
    xg_lo, wg_lo = _gauss_nodes(10)
    xg_hi, wg_hi = _gauss_nodes(21)

    def panel(a, b):
        h = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        lo = h * float(wg_lo @ ev(mid + h * xg_lo))
        hi = h * float(wg_hi @ ev(mid + h * xg_hi))
        return hi, abs(hi - lo)

    intervals = []
    for a, b in zip(design.points[:-1], design.points[1:]):
        val, err = panel(a, b)
        intervals.append((a, b, val, err))

    max_panels = 4000
    while True:
        total = sum(v for _, _, v, _ in intervals)
        total_err = sum(e for _, _, _, e in intervals)
        if total_err <= max(tol, tol * abs(total)):
            return total
        if len(intervals) >= max_panels:
            raise ConvergenceError(
                f"quadrature error {total_err:.3e} above tolerance {tol:.3e} "
                f"after {len(intervals)} panels",
                best=total,
            )
        intervals.sort(key=lambda it: it[3])
        a, b, _, _ = intervals.pop()
        mid = 0.5 * (a + b)
        intervals.append((a, mid, *panel(a, mid)))
        intervals.append((mid, b, *panel(mid, b)))
