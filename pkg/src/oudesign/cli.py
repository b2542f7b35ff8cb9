"""Command-line front end: a thin client of the HTTP service.

By default requests are served in-process (no network); ``--server``
points the same commands at a remote instance.  Every command that
writes files also emits a run manifest next to them; numeric output is
rendered to 12 significant digits and is byte-reproducible for a fixed
seed.

Exit codes: 0 success, 2 usage/validation, 3 convergence, 4 input
format.
"""

from __future__ import annotations

import os
import sys
import time

import click

from . import __version__
from .reporting import fmt, json_text, manifest_text, sha256_hex

_SEED_ENV = "OU_DESIGN_SEED"


def _default_seed() -> int:
    return int(os.environ.get(_SEED_ENV, "0"))


class ServiceClient:
    """Minimal HTTP wrapper; in-process ASGI unless a server is given."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=600.0)
        else:
            from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)

    def post(self, path: str, payload: dict) -> dict:
        resp = self._client.post(path, json=payload)
        body = resp.json()
        if resp.status_code >= 400:
            if isinstance(body, dict) and "exit_code" in body:
                click.echo(f"error: {body['message']}", err=True)
                sys.exit(body["exit_code"])
            click.echo(f"error: {body}", err=True)
            sys.exit(2)
        return body


def _parse_design_spec(design: str | None, n: int | None) -> dict:
    if (design is None) == (n is None):
        click.echo("error: give exactly one of --design or --n", err=True)
        sys.exit(2)
    if design is not None:
        try:
            points = [float(p) for p in design.split(",")]
        except ValueError:
            click.echo(f"error: cannot parse design {design!r}", err=True)
            sys.exit(2)
        return {"points": points}
    return {"n": n}


def _emit(command: str, parameters: dict, seed, outputs: dict[str, str], out_path: str | None, started: float):
    """Write named outputs plus a manifest, or print to stdout."""
    if out_path is None:
        for text in outputs.values():
            click.echo(text, nl=False)
        return
    base, ext = os.path.splitext(out_path)
    digests = {}
    for suffix, text in outputs.items():
        path = out_path if len(outputs) == 1 else f"{base}.{suffix}{ext}"
        with open(path, "w", newline="") as fh:
            fh.write(text)
        digests[os.path.basename(path)] = sha256_hex(text)
    manifest = manifest_text(
        command, parameters, __version__, seed, time.monotonic() - started, digests
    )
    with open(f"{base}.manifest.json", "w", newline="") as fh:
        fh.write(manifest)


@click.group()
@click.version_option(__version__)
@click.option("--server", default=None, help="Base URL of a running service; in-process by default.")
@click.pass_context
def main(ctx, server):
    """Optimal sampling designs for a complex Ornstein-Uhlenbeck process."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--design", default=None, help="Comma-separated design points, e.g. 0,0.5,1.")
@click.option("--n", type=int, default=None, help="Equispaced design size.")
@click.option("--lambda", "lam", type=float, required=True, help="Damping rate (> 0).")
@click.option("--omega", type=float, required=True, help="Angular frequency.")
@click.option("--oracle", is_flag=True, help="Also run the quadrature oracle and report the gap.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full breakdown as JSON.")
@click.option("--output", default=None, help="Write the report to this file (plus a manifest).")
@click.pass_obj
def imspe(client, design, n, lam, omega, oracle, as_json, output):
    """Closed-form IMSPE of a design with its G/A/B breakdown."""
    started = time.monotonic()
    payload = {
        "design": _parse_design_spec(design, n),
        "lam": lam,
        "omega": omega,
        "oracle": oracle,
    }
    body = client.post("/imspe", payload)
    if as_json or output:
        text = json_text(body)
    else:
        lines = [
            f"design: {','.join(fmt(p) for p in body['points'])}",
            f"G: {fmt(body['G'])}",
            f"A_n: {fmt(body['A_n'])}",
            f"B_n: {fmt(body['B_n'])}",
            f"imspe: {fmt(body['value'])}",
        ]
        if oracle:
            lines.append(f"quadrature: {fmt(body['quadrature'])}")
            lines.append(f"relative_gap: {fmt(body['relative_gap'])}")
        text = "\n".join(lines) + "\n"
    _emit("imspe", payload, None, {"report": text}, output, started)


@main.command()
@click.option("--n", type=int, required=True)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--criterion", type=click.Choice(["imspe", "entropy"]), default="imspe")
@click.option("--starts", type=int, default=16)
@click.option("--seed", type=int, default=None, help=f"Default from ${_SEED_ENV} or 0.")
@click.option("--output", default=None)
@click.pass_obj
def optimize(client, n, lam, omega, criterion, starts, seed, output):
    """Optimize the design for the chosen criterion."""
    started = time.monotonic()
    seed = _default_seed() if seed is None else seed
    payload = {
        "n": n,
        "lam": lam,
        "omega": omega,
        "criterion": criterion,
        "n_starts": starts,
        "seed": seed,
    }
    body = client.post("/optimize", payload)
    text = json_text(body)
    _emit("optimize", payload, seed, {"design": text}, output, started)


@main.command()
@click.option("--starts", type=int, default=16)
@click.option("--seed", type=int, default=None)
@click.option("--output", default=None, help="CSV path; the discrepancy report lands beside it.")
@click.pass_obj
def benchmark(client, starts, seed, output):
    """Relative-efficiency table for the benchmark parameter sets."""
    started = time.monotonic()
    seed = _default_seed() if seed is None else seed
    payload = {"n_starts": starts, "seed": seed}
    body = client.post("/benchmark", payload)
    report = json_text(
        {"cells": body["cells"], "discrepancies": body["discrepancies"]}
    )
    if output is None:
        click.echo(body["csv"], nl=False)
        for line in body["discrepancies"]:
            click.echo(f"# discrepancy: {line}", err=True)
        return
    _emit("benchmark", payload, seed, {"csv": body["csv"], "report": report}, output, started)


@main.command()
@click.option("--design", default=None)
@click.option("--n", type=int, default=None)
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--grid", type=int, default=201)
@click.option("--output", default=None)
@click.pass_obj
def profile(client, design, n, lam, omega, grid, output):
    """Pointwise MSPE profile of a design as CSV."""
    started = time.monotonic()
    payload = {
        "design": _parse_design_spec(design, n),
        "lam": lam,
        "omega": omega,
        "grid_size": grid,
    }
    body = client.post("/profile", payload)
    _emit("profile", payload, None, {"csv": body["csv"]}, output, started)


@main.command()
@click.option("--n", type=int, default=3)
@click.option("--lambda-min", type=float, default=0.5)
@click.option("--lambda-max", type=float, default=5.0)
@click.option("--lambda-count", type=int, default=10)
@click.option("--omega-min", type=float, default=-6.0)
@click.option("--omega-max", type=float, default=6.0)
@click.option("--omega-count", type=int, default=10)
@click.option("--output", default=None)
@click.pass_obj
def surface(client, n, lambda_min, lambda_max, lambda_count, omega_min, omega_max, omega_count, output):
    """Equispaced-design IMSPE over a (lambda, omega) grid as CSV."""
    started = time.monotonic()
    payload = {
        "n": n,
        "lam_min": lambda_min,
        "lam_max": lambda_max,
        "lam_count": lambda_count,
        "omega_min": omega_min,
        "omega_max": omega_max,
        "omega_count": omega_count,
    }
    body = client.post("/surface", payload)
    _emit("surface", payload, None, {"csv": body["csv"]}, output, started)


@main.command()
@click.option("--lambda", "lam", type=float, required=True)
@click.option("--omega", type=float, required=True)
@click.option("--sigma", type=float, default=None, help="Raw diffusion scale; normalized if omitted.")
@click.option("--m1", type=float, default=0.0)
@click.option("--m2", type=float, default=0.0)
@click.option("--n-steps", type=int, default=100)
@click.option("--dt", type=float, default=0.05)
@click.option("--count", type=int, default=1)
@click.option("--seed", type=int, default=None)
@click.option("--output", default=None)
@click.pass_obj
def simulate(client, lam, omega, sigma, m1, m2, n_steps, dt, count, seed, output):
    """Exact simulation paths as CSV."""
    started = time.monotonic()
    seed = _default_seed() if seed is None else seed
    payload = {
        "lam": lam,
        "omega": omega,
        "sigma": sigma,
        "m1": m1,
        "m2": m2,
        "n_steps": n_steps,
        "dt": dt,
        "count": count,
        "seed": seed,
    }
    body = client.post("/simulate", payload)
    _emit("simulate", payload, seed, {"csv": body["csv"]}, output, started)


@main.command()
@click.option("--input", "input_path", required=True, type=click.Path())
@click.option("--freq-preset", type=click.Choice(["annual", "chandler"]), default="annual")
@click.option("--cycles-per-year", type=float, default=None, help="Overrides --freq-preset.")
@click.option("--epoch-col", type=int, default=0)
@click.option("--x-col", type=int, default=1)
@click.option("--y-col", type=int, default=3)
@click.option("--output", default=None)
@click.pass_obj
def estimate(client, input_path, freq_preset, cycles_per_year, epoch_col, x_col, y_col, output):
    """Fit the periodic trend and estimate (lambda, omega, sigma) from a
    pole-coordinate file."""
    started = time.monotonic()
    try:
        with open(input_path) as fh:
            content = fh.read()
    except OSError as exc:
        click.echo(f"error: cannot read {input_path}: {exc}", err=True)
        sys.exit(2)
    payload = {
        "content": content,
        "epoch_col": epoch_col,
        "x_col": x_col,
        "y_col": y_col,
        "freq_preset": freq_preset,
        "cycles_per_year": cycles_per_year,
    }
    body = client.post("/estimate", payload)
    params_echo = {k: v for k, v in payload.items() if k != "content"}
    params_echo["input"] = input_path
    _emit("estimate", params_echo, None, {"result": json_text(body)}, output, started)


if __name__ == "__main__":
    main()
