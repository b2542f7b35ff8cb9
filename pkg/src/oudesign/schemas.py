"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class DesignSpec(BaseModel):
    """Either explicit points or an equispaced size; exactly one."""

    points: list[float] | None = None
    n: int | None = Field(default=None, ge=2)


class ImspeRequest(BaseModel):
    design: DesignSpec
    lam: float = Field(gt=0)
    omega: float
    oracle: bool = False
    oracle_tol: float = 1e-9


class ImspeResponse(BaseModel):
    points: list[float]
    g_values: list[float]
    G: float
    A_n: float
    B_n: float
    b_terms: list[float]
    value: float
    quadrature: float | None = None
    relative_gap: float | None = None


class OptimizeRequest(BaseModel):
    n: int = Field(ge=2)
    lam: float = Field(gt=0)
    omega: float
    criterion: str = "imspe"
    n_starts: int = Field(default=16, ge=1)
    seed: int = 0
    max_iters: int = 2000
    x_tol: float = 1e-10
    f_tol: float = 1e-13


class StartTrace(BaseModel):
    start: int
    value: float
    iterations: int
    converged: bool


class OptimizeResponse(BaseModel):
    points: list[float]
    gaps: list[float]
    criterion: str
    value: float
    equispaced_value: float
    trace: list[StartTrace]


class BenchmarkRequest(BaseModel):
    n_starts: int = Field(default=16, ge=1)
    seed: int = 0


class EfficiencyCell(BaseModel):
    label: str
    lam: float
    omega: float
    n: int
    imspe_optimal: float
    imspe_equispaced: float
    relative_efficiency_pct: float
    optimal_points: list[float]
    reference_efficiency_pct: float
    efficiency_deviation_pp: float
    reference_imspe_optimal: float
    reference_imspe_equispaced: float


class BenchmarkResponse(BaseModel):
    cells: list[EfficiencyCell]
    discrepancies: list[str]
    csv: str


class ProfileRequest(BaseModel):
    design: DesignSpec
    lam: float = Field(gt=0)
    omega: float
    grid_size: int = Field(default=201, ge=2)


class SurfaceRequest(BaseModel):
    n: int = Field(default=3, ge=2)
    lam_min: float = Field(default=0.5, gt=0)
    lam_max: float = Field(default=5.0, gt=0)
    lam_count: int = Field(default=10, ge=2)
    omega_min: float = -6.0
    omega_max: float = 6.0
    omega_count: int = Field(default=10, ge=2)


class CsvResponse(BaseModel):
    csv: str


class SimulateRequest(BaseModel):
    lam: float = Field(gt=0)
    omega: float
    sigma: float | None = Field(default=None, gt=0)
    m1: float = 0.0
    m2: float = 0.0
    times: list[float] | None = None
    n_steps: int | None = Field(default=None, ge=1)
    dt: float | None = Field(default=None, gt=0)
    seed: int = 0
    count: int = Field(default=1, ge=1)


class EstimateRequest(BaseModel):
    content: str
    epoch_col: int = 0
    x_col: int = 1
    y_col: int = 3
    freq_preset: str | None = "annual"
    cycles_per_year: float | None = None


class EstimateResponse(BaseModel):
    lambda_hat: float
    omega_hat: float
    sigma_hat: float
    m_hat_re: float
    m_hat_im: float
    mean_hat_re: float
    mean_hat_im: float
    residual_variance: float
    n_samples: int
    duplicates_dropped: int
    cycles_per_year: float
    flags: list[str]


class ErrorPayload(BaseModel):
    error_type: str
    message: str
    exit_code: int
