"""FastAPI service exposing the design criteria, the optimizer and the
data pipeline.  The CLI is a thin client of this app; it can also be
served standalone with uvicorn:

    uvicorn oudesign.service:app
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .entropy import arbitrate_determinant, entropy
from .errors import OuDesignError, ValidationError
from .imspe import imspe_closed, imspe_quadrature
from .model import Design, OuParams, equispaced, simulate
from .optimize import (
    REFERENCE_ABS_IMSPE,
    REFERENCE_EFFICIENCY_PCT,
    REFERENCE_PARAM_SETS,
    OptimizerConfig,
    efficiency_table,
    imspe_surface,
    mspe_profile,
    optimize_design,
)
from .polar import FREQ_PRESETS, ColumnConfig, estimate_from_series, parse_eop
from .reporting import csv_text
from .schemas import (
    CsvResponse,
    EstimateRequest,
    EstimateResponse,
    ImspeRequest,
    ImspeResponse,
    OptimizeRequest,
    OptimizeResponse,
    ProfileRequest,
    SimulateRequest,
    StartTrace,
    SurfaceRequest,
    BenchmarkRequest,
    BenchmarkResponse,
    EfficiencyCell,
    DesignSpec,
)

app = FastAPI(title="oudesign", version=__version__)


@app.exception_handler(OuDesignError)
async def _domain_error(request: Request, exc: OuDesignError):
    status = {2: 422, 3: 409, 4: 400}.get(exc.exit_code, 500)
    return JSONResponse(
        status_code=status,
        content={
            "error_type": exc.error_type,
            "message": str(exc),
            "exit_code": exc.exit_code,
        },
    )


def _resolve_design(spec: DesignSpec) -> Design:
    if (spec.points is None) == (spec.n is None):
        raise ValidationError("give either explicit design points or n, not both")
    if spec.points is not None:
        return Design(np.asarray(spec.points))
    return equispaced(spec.n)


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/imspe", response_model=ImspeResponse)
def imspe_endpoint(req: ImspeRequest):
    design = _resolve_design(req.design)
    params = OuParams(req.lam, req.omega)
    br = imspe_closed(design, params)
    quad = rel = None
    if req.oracle:
        quad = imspe_quadrature(design, params, req.oracle_tol)
        rel = abs(br.value - quad) / abs(br.value)
    return ImspeResponse(
        points=list(design.points),
        g_values=list(br.g_values),
        G=br.G,
        A_n=br.A_n,
        B_n=br.B_n,
        b_terms=list(br.b_terms),
        value=br.value,
        quadrature=quad,
        relative_gap=rel,
    )


@app.post("/optimize", response_model=OptimizeResponse)
def optimize_endpoint(req: OptimizeRequest):
    params = OuParams(req.lam, req.omega)
    cfg = OptimizerConfig(
        n_starts=req.n_starts,
        max_iters=req.max_iters,
        x_tol=req.x_tol,
        f_tol=req.f_tol,
        seed=req.seed,
        criterion=req.criterion,
    )
    design, value, trace = optimize_design(req.n, params, cfg)
    if req.criterion == "imspe":
        eq_value = imspe_closed(equispaced(req.n), params).value
    else:
        eq_value = entropy(equispaced(req.n), params).value
        value = entropy(design, params).value
    return OptimizeResponse(
        points=list(design.points),
        gaps=list(design.gaps),
        criterion=req.criterion,
        value=value,
        equispaced_value=eq_value,
        trace=[StartTrace(**t) for t in trace],
    )


@app.post("/benchmark", response_model=BenchmarkResponse)
def benchmark_endpoint(req: BenchmarkRequest):
    cells = []
    discrepancies = []
    cfg = OptimizerConfig(n_starts=req.n_starts, seed=req.seed)
    for label, lam, om in REFERENCE_PARAM_SETS:
        params = OuParams(lam, om)
        for report in efficiency_table([params], [3, 4, 5], cfg):
            ref_pct = REFERENCE_EFFICIENCY_PCT[(report.n, label)]
            ref_opt, ref_eq = REFERENCE_ABS_IMSPE[(report.n, label)]
            dev = report.relative_efficiency_pct - ref_pct
            cell = EfficiencyCell(
                label=label,
                lam=lam,
                omega=om,
                n=report.n,
                imspe_optimal=report.imspe_optimal,
                imspe_equispaced=report.imspe_equispaced,
                relative_efficiency_pct=report.relative_efficiency_pct,
                optimal_points=list(report.optimal_design.points),
                reference_efficiency_pct=ref_pct,
                efficiency_deviation_pp=dev,
                reference_imspe_optimal=ref_opt,
                reference_imspe_equispaced=ref_eq,
            )
            cells.append(cell)
            if abs(dev) > 1.0:
                discrepancies.append(
                    f"{label} n={report.n}: computed efficiency "
                    f"{report.relative_efficiency_pct:.2f}% vs reference {ref_pct}% "
                    f"(deviation {dev:+.2f} pp)"
                )
    header = [
        "label",
        "lam",
        "omega",
        "n",
        "imspe_optimal",
        "imspe_equispaced",
        "relative_efficiency_pct",
        "reference_efficiency_pct",
        "efficiency_deviation_pp",
        "reference_imspe_optimal",
        "reference_imspe_equispaced",
    ]
    rows = [
        (
            c.label,
            c.lam,
            c.omega,
            c.n,
            c.imspe_optimal,
            c.imspe_equispaced,
            c.relative_efficiency_pct,
            c.reference_efficiency_pct,
            c.efficiency_deviation_pp,
            c.reference_imspe_optimal,
            c.reference_imspe_equispaced,
        )
        for c in cells
    ]
    return BenchmarkResponse(cells=cells, discrepancies=discrepancies, csv=csv_text(header, rows))


@app.post("/profile", response_model=CsvResponse)
def profile_endpoint(req: ProfileRequest):
    design = _resolve_design(req.design)
    params = OuParams(req.lam, req.omega)
    rows = mspe_profile(design, params, req.grid_size)
    return CsvResponse(csv=csv_text(["x", "mspe"], rows))


@app.post("/surface", response_model=CsvResponse)
def surface_endpoint(req: SurfaceRequest):
    lam_grid = np.linspace(req.lam_min, req.lam_max, req.lam_count)
    omega_grid = np.linspace(req.omega_min, req.omega_max, req.omega_count)
    rows = imspe_surface(req.n, lam_grid, omega_grid)
    return CsvResponse(csv=csv_text(["lam", "omega", "imspe"], rows))


@app.post("/simulate", response_model=CsvResponse)
def simulate_endpoint(req: SimulateRequest):
    params = OuParams(req.lam, req.omega, sigma=req.sigma, m1=req.m1, m2=req.m2)
    if req.times is not None:
        times = np.asarray(req.times, dtype=float)
    elif req.n_steps is not None and req.dt is not None:
        times = np.arange(req.n_steps) * req.dt
    else:
        raise ValidationError("give either explicit times or n_steps with dt")
    paths = simulate(params, times, req.seed, req.count)
    rows = []
    for p in range(paths.shape[0]):
        for k, t in enumerate(times):
            rows.append((p, float(t), float(paths[p, k, 0]), float(paths[p, k, 1])))
    return CsvResponse(csv=csv_text(["path", "t", "z1", "z2"], rows))


@app.post("/estimate", response_model=EstimateResponse)
def estimate_endpoint(req: EstimateRequest):
    if req.cycles_per_year is not None:
        freq = req.cycles_per_year
    else:
        preset = req.freq_preset or "annual"
        if preset not in FREQ_PRESETS:
            raise ValidationError(
                f"unknown frequency preset {preset!r}; options: {sorted(FREQ_PRESETS)}"
            )
        freq = FREQ_PRESETS[preset]
    columns = ColumnConfig(epoch=req.epoch_col, x=req.x_col, y=req.y_col)
    series = parse_eop(req.content.splitlines(), columns)
    result = estimate_from_series(series, freq)
    return EstimateResponse(
        lambda_hat=result.lambda_hat,
        omega_hat=result.omega_hat,
        sigma_hat=result.sigma_hat,
        m_hat_re=result.m_hat.real,
        m_hat_im=result.m_hat.imag,
        mean_hat_re=result.mean_hat.real,
        mean_hat_im=result.mean_hat.imag,
        residual_variance=result.residual_variance,
        n_samples=result.n_samples,
        duplicates_dropped=series.duplicates_dropped,
        cycles_per_year=freq,
        flags=list(result.flags),
    )


@app.post("/entropy")
def entropy_endpoint(req: ImspeRequest):
    design = _resolve_design(req.design)
    params = OuParams(req.lam, req.omega)
    ent = entropy(design, params)
    arb = arbitrate_determinant(design, params)
    return {
        "points": list(design.points),
        "logdet": ent.logdet,
        "value": ent.value,
        "determinant_arbitration": {
            "oracle": arb.oracle,
            "squared_form": arb.squared_form,
            "alt_form": None if arb.alt_form != arb.alt_form else arb.alt_form,
            "squared_deviation": arb.squared_deviation,
            "alt_deviation": None if arb.alt_deviation == float("inf") else arb.alt_deviation,
            "matching_form": arb.matching_form,
        },
    }
