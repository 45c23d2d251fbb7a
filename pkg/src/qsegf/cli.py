"""Thin command-line client for the Green's-function service.

Every subcommand speaks HTTP to the FastAPI app: against a remote server
when ``--server`` is given, otherwise against an in-process instance via
an ASGI transport (no network, same wire format).  File contents travel
in the request; returned artifact bundles are written to the output
directory.

Exit codes: 0 success, 1 usage/config error, 2 numerical failure.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Optional

import click
import httpx

from .pipeline import ConfigError, RunConfig, parse_config_text

USAGE_EXIT = 1
NUMERICAL_EXIT = 2


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


async def _asgi_post(path: str, payload: dict) -> httpx.Response:
    from .service.app import app  # imported lazily; pulls in the full pipeline

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(
        transport=transport, base_url="http://qsegf.local", timeout=None
    ) as client:
        return await client.post(path, json=payload)


def _post(server: Optional[str], path: str, payload: dict) -> dict:
    try:
        if server:
            with httpx.Client(base_url=server, timeout=600.0) as client:
                response = client.post(path, json=payload)
        else:
            import asyncio

            response = asyncio.run(_asgi_post(path, payload))
    except httpx.HTTPError as exc:
        _fail(f"cannot reach service: {exc}", USAGE_EXIT)
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
        detail = body.get("detail", response.text)
    except ValueError:
        body, detail = {}, response.text
    # 400 and request-validation 422s are usage errors; the service tags
    # genuine numerical failures explicitly.
    code = NUMERICAL_EXIT if body.get("kind") == "numerical" else USAGE_EXIT
    _fail(str(detail), code)
    raise AssertionError("unreachable")


def _read_file(path: str, what: str) -> str:
    p = Path(path)
    if not p.is_file():
        _fail(f"{what} not found: {path}", USAGE_EXIT)
    return p.read_text()


def _write_bundle(files: dict[str, str], out_dir: str):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        (out / name).write_text(content)


def _print_summary(summary: dict):
    for key in sorted(summary):
        click.echo(f"{key}: {summary[key]}")


def _merge_config(config_file: Optional[str], cli_overrides: dict) -> dict:
    """Config file first, explicit CLI flags win."""
    merged: dict = {}
    if config_file:
        try:
            merged.update(parse_config_text(_read_file(config_file, "config file")))
        except ConfigError as exc:
            _fail(str(exc), USAGE_EXIT)
    merged.update({k: v for k, v in cli_overrides.items() if v is not None})
    return merged


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in-process.")
@click.pass_context
def main(ctx, server):
    """Imaginary-time Green's functions of small molecules: VQE + subspace expansion."""
    ctx.obj = {"server": server}


def _run_options(fn):
    fn = click.option("--config", "config_file", type=str, default=None,
                      help="Key = value config file; flags override it.")(fn)
    fn = click.option("--fcidump", type=str, default=None, help="FCIDUMP file with the integrals.")(fn)
    fn = click.option("--beta", type=float, default=None, help="Inverse temperature (default 100).")(fn)
    fn = click.option("--n-max", type=int, default=None, help="Number of Matsubara frequencies (default 1000).")(fn)
    fn = click.option("--seed", type=int, default=None, help="Random seed for shot sampling.")(fn)
    fn = click.option("--out", "out_dir", type=str, default=".", show_default=True,
                      help="Directory for the emitted files.")(fn)
    return fn


@main.command()
@_run_options
@click.option("--rotation", type=str, default=None, help="Optional orbital-rotation matrix file.")
@click.option("--ansatz-mode", type=click.Choice(["full", "single-xxxy"]), default=None)
@click.option("--mode", type=click.Choice(["statevector", "shots"]), default=None)
@click.option("--shots", type=int, default=None, help="Shots per Pauli term in shots mode.")
@click.option("--bins", type=int, default=None, help="Resampling bins (shots mode).")
@click.option("--epsilon", type=float, default=None, help="Overlap truncation threshold.")
@click.option("--gtol", type=float, default=None, help="VQE gradient-norm tolerance.")
@click.option("--max-iter", type=int, default=None, help="VQE iteration cap.")
@click.option("--with-oracle/--no-oracle", "with_oracle", default=None,
              help="Compare against the exact-diagonalization reference.")
@click.option("--dump-subspace", is_flag=True, default=None, help="Also emit the subspace matrices.")
@click.pass_context
def gf(ctx, config_file, fcidump, beta, n_max, seed, out_dir, rotation, ansatz_mode,
       mode, shots, bins, epsilon, gtol, max_iter, with_oracle, dump_subspace):
    """Run the full VQE + subspace-expansion Green's function pipeline."""
    merged = _merge_config(config_file, {
        "fcidump_path": fcidump, "rotation_path": rotation, "beta": beta, "n_max": n_max,
        "seed": seed, "ansatz_mode": ansatz_mode, "mode": mode, "shots": shots,
        "bins": bins, "epsilon": epsilon, "gtol": gtol, "max_iter": max_iter,
        "with_oracle": with_oracle, "dump_subspace": dump_subspace,
    })
    if not merged.get("fcidump_path"):
        _fail("an FCIDUMP path is required (--fcidump or config file)", USAGE_EXIT)
    fcidump_text = _read_file(merged["fcidump_path"], "FCIDUMP")
    rotation_text = None
    if merged.get("rotation_path"):
        rotation_text = _read_file(merged["rotation_path"], "rotation file")

    defaults = RunConfig()
    payload = {
        "fcidump": fcidump_text,
        "fcidump_path": merged["fcidump_path"],
        "rotation": rotation_text,
        "rotation_path": merged.get("rotation_path"),
        "beta": merged.get("beta", defaults.beta),
        "n_max": merged.get("n_max", defaults.n_max),
        "seed": merged.get("seed", defaults.seed),
        "ansatz_mode": merged.get("ansatz_mode", defaults.ansatz_mode),
        "mode": merged.get("mode", defaults.mode),
        "shots": merged.get("shots", defaults.shots),
        "bins": merged.get("bins", defaults.bins),
        "epsilon": merged.get("epsilon"),
        "gtol": merged.get("gtol", defaults.gtol),
        "max_iter": merged.get("max_iter", defaults.max_iter),
        "with_oracle": merged.get("with_oracle", defaults.with_oracle),
        "dump_subspace": merged.get("dump_subspace", defaults.dump_subspace),
    }
    data = _post(ctx.obj["server"], "/gf", payload)
    _write_bundle(data["files"], out_dir)
    _print_summary(data["summary"])


@main.command()
@_run_options
@click.pass_context
def fci(ctx, config_file, fcidump, beta, n_max, seed, out_dir):
    """Exact-diagonalization Green's function and sector spectra."""
    merged = _merge_config(config_file, {
        "fcidump_path": fcidump, "beta": beta, "n_max": n_max, "seed": seed,
    })
    if not merged.get("fcidump_path"):
        _fail("an FCIDUMP path is required (--fcidump or config file)", USAGE_EXIT)
    defaults = RunConfig()
    payload = {
        "fcidump": _read_file(merged["fcidump_path"], "FCIDUMP"),
        "fcidump_path": merged["fcidump_path"],
        "beta": merged.get("beta", defaults.beta),
        "n_max": merged.get("n_max", defaults.n_max),
        "seed": merged.get("seed", defaults.seed),
    }
    data = _post(ctx.obj["server"], "/fci", payload)
    _write_bundle(data["files"], out_dir)
    _print_summary(data["summary"])


@main.command()
@click.argument("g_a", type=str)
@click.argument("g_b", type=str)
@click.option("--out", "out_dir", type=str, default=".", show_default=True)
@click.pass_context
def compare(ctx, g_a, g_b, out_dir):
    """Difference report between two Green's-function CSV files."""
    payload = {"g_a": _read_file(g_a, "CSV file"), "g_b": _read_file(g_b, "CSV file")}
    data = _post(ctx.obj["server"], "/compare", payload)
    _write_bundle(data["files"], out_dir)
    _print_summary(data["summary"])


@main.command("freeze-oracle")
@_run_options
@click.pass_context
def freeze_oracle_cmd(ctx, config_file, fcidump, beta, n_max, seed, out_dir):
    """Snapshot exact sector energies and G samples for regression checks."""
    merged = _merge_config(config_file, {
        "fcidump_path": fcidump, "beta": beta, "n_max": n_max, "seed": seed,
    })
    if not merged.get("fcidump_path"):
        _fail("an FCIDUMP path is required (--fcidump or config file)", USAGE_EXIT)
    defaults = RunConfig()
    payload = {
        "fcidump": _read_file(merged["fcidump_path"], "FCIDUMP"),
        "fcidump_path": merged["fcidump_path"],
        "beta": merged.get("beta", defaults.beta),
        "n_max": merged.get("n_max", defaults.n_max),
        "seed": merged.get("seed", defaults.seed),
    }
    data = _post(ctx.obj["server"], "/freeze-oracle", payload)
    _write_bundle(data["files"], out_dir)
    _print_summary(data["summary"])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
def serve(host, port):
    """Run the service with uvicorn."""
    import uvicorn

    uvicorn.run("qsegf.service.app:app", host=host, port=port)


if __name__ == "__main__":
    main()
