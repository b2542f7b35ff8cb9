"""Complex Ornstein-Uhlenbeck model primitives.

The complex process Y = Y1 + i*Y2 with damping ``lam`` and frequency
``omega`` is handled through its two-dimensional real form.  The lagged
covariance of (Y1, Y2) is

    R(tau) = (sigma^2 / (2*lam)) * e^{-lam*tau} * [[ cos(omega*tau), sin(omega*tau)],
                                                   [-sin(omega*tau), cos(omega*tau)]]

for tau >= 0.  This module builds the 2n x 2n observation covariance
C(n) on a design, its block-tridiagonal closed-form inverse, the
cross-covariance row Q(x), an exact-transition simulator and the
BLUE/kriging predictor with a GLS-estimated constant mean.

All covariance-level quantities carry the stationary variance factor
``sigma^2/(2*lam)``; under the default normalized convention this factor
is one and C(n) is a correlation matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import SingularityError, ValidationError

# Gaps below this are treated as coincident points: 1/(1 - pi^2) blows up.
MIN_GAP = 1e-9


@dataclass(frozen=True)
class OuParams:
    """Model parameters (lam, omega, sigma) plus the complex trend mean.

    When ``normalized`` is true the stationary variance sigma^2/(2*lam)
    is taken to be one and ``sigma`` is implied as sqrt(2*lam).
    """

    lam: float
    omega: float
    sigma: float | None = None
    m1: float = 0.0
    m2: float = 0.0

    def __post_init__(self):
        if not (self.lam > 0):
            raise ValidationError(f"damping must be positive, got {self.lam}")
        if self.sigma is not None and not (self.sigma > 0):
            raise ValidationError(f"sigma must be positive, got {self.sigma}")

    @property
    def normalized(self) -> bool:
        return self.sigma is None

    @property
    def variance(self) -> float:
        """Stationary variance of each coordinate, sigma^2/(2*lam)."""
        if self.sigma is None:
            return 1.0
        return self.sigma**2 / (2.0 * self.lam)

    @property
    def sigma_value(self) -> float:
        """Effective diffusion scale (sqrt(2*lam) when normalized)."""
        if self.sigma is None:
            return math.sqrt(2.0 * self.lam)
        return self.sigma

    @property
    def mean(self) -> complex:
        return complex(self.m1, self.m2)


@dataclass(frozen=True)
class Design:
    """Ordered sampling locations 0 = t_1 < ... < t_n = 1."""

    points: np.ndarray
    gaps: np.ndarray = field(init=False, repr=False)

    def __init__(self, points):
        t = np.asarray(points, dtype=float)
        if t.ndim != 1 or t.size < 2:
            raise ValidationError("a design needs at least two points")
        if abs(t[0]) > 1e-12 or abs(t[-1] - 1.0) > 1e-12:
            raise ValidationError("design endpoints must be t_1 = 0 and t_n = 1")
        gaps = np.diff(t)
        if np.any(gaps < MIN_GAP):
            raise ValidationError(
                "design points must be strictly increasing with gaps above "
                f"{MIN_GAP:g}"
            )
        if abs(gaps.sum() - 1.0) > 1e-12:
            raise ValidationError("gaps must sum to one")
        object.__setattr__(self, "points", t)
        object.__setattr__(self, "gaps", gaps)

    @property
    def n(self) -> int:
        return self.points.size

    def pis(self, params: OuParams) -> np.ndarray:
        """pi_i = exp(-lam * d_i) for each gap."""
        return np.exp(-params.lam * self.gaps)

    @classmethod
    def from_gaps(cls, gaps) -> "Design":
        g = np.asarray(gaps, dtype=float)
        t = np.concatenate(([0.0], np.cumsum(g)))
        t[-1] = 1.0 if abs(t[-1] - 1.0) <= 1e-12 else t[-1]
        return cls(t)


def equispaced(n: int) -> Design:
    """The equidistant n-point design on [0, 1]."""
    if n < 2:
        raise ValidationError("equispaced design needs n >= 2")
    return Design(np.linspace(0.0, 1.0, n))


def rotation_exp(params: OuParams, tau: float) -> np.ndarray:
    """Damped rotation e^{A*tau} for tau >= 0.

    Returns e^{-lam*tau} * [[cos, sin], [-sin, cos]] evaluated at
    omega*tau; its determinant is e^{-2*lam*tau}.
    """
    if tau < 0:
        raise ValidationError(f"tau must be nonnegative, got {tau}")
    e = math.exp(-params.lam * tau)
    c = math.cos(params.omega * tau)
    s = math.sin(params.omega * tau)
    return e * np.array([[c, s], [-s, c]])


def cov_R(params: OuParams, tau: float) -> np.ndarray:
    """Lagged covariance R(tau) of the 2-D real process.

    For tau < 0 the transpose of R(|tau|) is returned (stationarity).
    """
    m = params.variance * rotation_exp(params, abs(tau))
    return m.T if tau < 0 else m


def complex_cov(params: OuParams, tau: float) -> complex:
    """Complex covariance E[Y(t+tau) * conj(Y(t))], tau >= 0."""
    if tau < 0:
        raise ValidationError(f"tau must be nonnegative, got {tau}")
    amp = 2.0 * params.variance * math.exp(-params.lam * tau)
    return amp * complex(math.cos(params.omega * tau), -math.sin(params.omega * tau))


def get_block(mat: np.ndarray, i: int, j: int) -> np.ndarray:
    """2x2 block (i, j) of a block matrix with 2x2 cells."""
    return mat[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]


def build_C(design: Design, params: OuParams) -> np.ndarray:
    """Observation covariance C(n): block (i, j), i > j, is e^{A (t_i - t_j)}.

    Scaled by the stationary variance, so diagonal blocks are the
    identity under normalization.
    """
    t = design.points
    n = design.n
    C = np.empty((2 * n, 2 * n))
    for i in range(n):
        for j in range(i + 1):
            b = params.variance * rotation_exp(params, t[i] - t[j])
            C[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] = b
            C[2 * j : 2 * j + 2, 2 * i : 2 * i + 2] = b.T
    return C


def build_C_inv(design: Design, params: OuParams) -> np.ndarray:
    """Closed-form block-tridiagonal inverse of ``build_C``.

    Uses U_k = [I - e^{(A + A^T) d_k}]^{-1} = (1 - pi_k^2)^{-1} I (the
    drift satisfies A + A^T = -2*lam*I) and
    V_k = U_k + e^{(A + A^T) d_{k-1}} U_{k-1}.
    """
    n = design.n
    pis = design.pis(params)
    pi2 = pis**2
    if np.any(1.0 - pi2 <= 0):
        raise SingularityError("coincident design points make C(n) singular")
    u = 1.0 / (1.0 - pi2)  # U_k scalar factors, k = 0..n-2
    I2 = np.eye(2)
    M = np.zeros((2 * n, 2 * n))
    for k in range(n - 1):
        E = rotation_exp(params, design.gaps[k])
        off = -u[k] * E  # e^{A d_k} U_k with U_k scalar
        M[2 * k : 2 * k + 2, 2 * k + 2 : 2 * k + 4] += off.T
        M[2 * k + 2 : 2 * k + 4, 2 * k : 2 * k + 2] += off
        M[2 * k : 2 * k + 2, 2 * k : 2 * k + 2] += u[k] * I2
        M[2 * k + 2 : 2 * k + 4, 2 * k + 2 : 2 * k + 4] += (u[k] * pi2[k]) * I2
    # interior diagonal blocks now hold V_k; the last block needs
    # U_{n-1} - pi_{n-1}^2 U_{n-1} = I to complete U_{n-1}
    M[2 * (n - 1) : 2 * n, 2 * (n - 1) : 2 * n] += I2
    return M / params.variance


def trend_matrix(n: int) -> np.ndarray:
    """H(n): the 2 x 2n matrix stacking identity blocks."""
    return np.tile(np.eye(2), n)


def cross_Q(x: float, design: Design, params: OuParams, allow_outside=False) -> np.ndarray:
    """Correlation row Q(x): 2 x 2n, block i is the damped rotation at x - t_i."""
    if not allow_outside and not (0.0 <= x <= 1.0):
        raise ValidationError(f"prediction location {x} outside [0, 1]")
    return cross_Q_many(np.array([x]), design, params)[0]


def cross_Q_many(xs: np.ndarray, design: Design, params: OuParams) -> np.ndarray:
    """Vectorized ``cross_Q``: returns an (m, 2, 2n) array."""
    xs = np.asarray(xs, dtype=float)
    delta = xs[:, None] - design.points[None, :]  # (m, n)
    e = params.variance * np.exp(-params.lam * np.abs(delta))
    c = e * np.cos(params.omega * delta)
    s = e * np.sin(params.omega * delta)
    out = np.empty((xs.size, 2, 2 * design.n))
    out[:, 0, 0::2] = c
    out[:, 0, 1::2] = s
    out[:, 1, 0::2] = -s
    out[:, 1, 1::2] = c
    return out


def simulate(params: OuParams, times, seed: int, count: int = 1) -> np.ndarray:
    """Exact simulation of Z = m + Y at the given times.

    Stationary start N(0, v*I) with v = sigma^2/(2*lam); transitions
    Y(t+d) = e^{A d} Y(t) + eps, eps ~ N(0, v*(1 - e^{-2*lam*d})*I).
    Returns an array of shape (count, len(times), 2).
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size == 0:
        raise ValidationError("times must be a nonempty 1-D sequence")
    if np.any(np.diff(t) < 0):
        raise ValidationError("times must be sorted")
    if count < 1:
        raise ValidationError("count must be at least one")
    rng = np.random.default_rng(seed)
    v = params.variance
    out = np.empty((count, t.size, 2))
    y = math.sqrt(v) * rng.standard_normal((count, 2))
    out[:, 0, :] = y
    for k in range(1, t.size):
        d = t[k] - t[k - 1]
        E = rotation_exp(params, d)
        sd = math.sqrt(v * (1.0 - math.exp(-2.0 * params.lam * d)))
        y = y @ E.T + sd * rng.standard_normal((count, 2))
        out[:, k, :] = y
    out[..., 0] += params.m1
    out[..., 1] += params.m2
    return out


def gls_mean(observations: np.ndarray, design: Design, params: OuParams) -> np.ndarray:
    """GLS estimate of the constant mean (m1, m2) from stacked observations."""
    z = np.asarray(observations, dtype=float).ravel()
    if z.size != 2 * design.n:
        raise ValidationError(
            f"expected {2 * design.n} stacked observations, got {z.size}"
        )
    Cinv = build_C_inv(design, params)
    H = trend_matrix(design.n)
    G = H @ Cinv @ H.T  # = G(n) * I2
    return np.linalg.solve(G, H @ (Cinv @ z))


def blue_predict(x: float, observations: np.ndarray, design: Design, params: OuParams):
    """BLUE/kriging prediction of (Z1(x), Z2(x)).

    Observations are stacked (Z1(t_1), Z2(t_1), ..., Z1(t_n), Z2(t_n)).
    Interpolates exactly at design points.
    """
    z = np.asarray(observations, dtype=float).ravel()
    if z.size != 2 * design.n:
        raise ValidationError(
            f"expected {2 * design.n} stacked observations, got {z.size}"
        )
    Cinv = build_C_inv(design, params)
    H = trend_matrix(design.n)
    m_hat = np.linalg.solve(H @ Cinv @ H.T, H @ (Cinv @ z))
    Q = cross_Q(x, design, params)
    resid = z - H.T @ m_hat
    pred = m_hat + Q @ (Cinv @ resid)
    return float(pred[0]), float(pred[1])
