"""End-to-end runs: configuration, orchestration and plot-ready artifacts.

A run takes FCIDUMP content plus numeric knobs and produces a bundle of
text files (CSV for curves, JSON for scalars) together with a summary
dict.  Every bundle includes a manifest echoing the fully resolved
configuration so runs are reproducible; with a fixed seed the emitted
bytes are identical across runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np

from . import ansatz, greens, oracle, qse, stats, vqe
from .integrals import parse_fcidump, to_spin_orbitals
from .pauli import map_hamiltonian


class ConfigError(ValueError):
    """Unusable configuration or inputs (CLI exit code 1)."""


class NumericalError(RuntimeError):
    """A numerical stage failed (CLI exit code 2)."""


@dataclass
class RunConfig:
    fcidump_path: str = ""
    rotation_path: Optional[str] = None
    beta: float = 100.0
    n_max: int = 1000
    ansatz_mode: str = "full"
    gtol: float = 1e-7
    max_iter: int = 500
    mode: str = "statevector"
    shots: int = 10000
    bins: int = 10
    seed: int = 0
    epsilon: Optional[float] = None
    with_oracle: bool = True
    dump_subspace: bool = False
    output_dir: str = "."

    def resolved_epsilon(self) -> float:
        if self.epsilon is not None:
            return self.epsilon
        return qse.DEFAULT_EPS_EXACT if self.mode == "statevector" else qse.DEFAULT_EPS_SHOTS

    def validate(self):
        if self.mode not in ("statevector", "shots"):
            raise ConfigError(f"unknown mode {self.mode!r}")
        if self.ansatz_mode not in ("full", "single-xxxy"):
            raise ConfigError(f"unknown ansatz mode {self.ansatz_mode!r}")
        if self.beta <= 0:
            raise ConfigError(f"beta must be positive, got {self.beta}")
        if self.n_max < 1:
            raise ConfigError("n_max must be at least 1")
        if self.mode == "shots":
            if self.bins < 2:
                raise ConfigError("shots mode needs at least 2 bins")
            if self.shots <= 0 or self.shots % self.bins:
                raise ConfigError(f"shots ({self.shots}) must divide evenly into {self.bins} bins")


def parse_config_text(text: str) -> dict:
    """Parse a TOML-style key = value file into RunConfig overrides."""
    out: dict = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {ln} is not `key = value`: {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if key not in RunConfig.__dataclass_fields__:
            raise ConfigError(f"unknown config key {key!r} on line {ln}")
        out[key] = _coerce_config_value(value)
    return out


def _coerce_config_value(value: str):
    if value.startswith(("'", '"')) and value.endswith(value[0]) and len(value) >= 2:
        return value[1:-1]
    lowered = value.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    if lowered in ("none", "null", ""):
        return None
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


@dataclass
class RunResult:
    files: dict[str, str]
    summary: dict


def _float_cell(x: float) -> str:
    return repr(float(x))


def render_greens_csv(g: greens.GreensFunction) -> str:
    """Flat CSV with one row per (frequency, i, j) element."""
    lines = ["n,omega,i,j,re_g,im_g,re_err,im_err"]
    freq = g.grid.frequencies
    n_so = g.n_so
    re_err, im_err = g.errors if g.errors is not None else (None, None)
    for w, n_idx in enumerate(g.grid.indices):
        omega = _float_cell(freq[w])
        for i in range(n_so):
            for j in range(n_so):
                val = g.values[w, i, j]
                err_cells = ("", "")
                if re_err is not None:
                    err_cells = (_float_cell(re_err[w, i, j]), _float_cell(im_err[w, i, j]))
                lines.append(
                    f"{int(n_idx)},{omega},{i},{j},{_float_cell(val.real)},"
                    f"{_float_cell(val.imag)},{err_cells[0]},{err_cells[1]}"
                )
    return "\n".join(lines) + "\n"


def parse_greens_csv(text: str) -> greens.GreensFunction:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("n,omega"):
        raise ConfigError("not a Green's function CSV (missing header)")
    rows = []
    for ln in lines[1:]:
        parts = ln.split(",")
        rows.append(
            (int(parts[0]), float(parts[1]), int(parts[2]), int(parts[3]),
             float(parts[4]), float(parts[5]))
        )
    ns = sorted({r[0] for r in rows})
    n_so = max(r[2] for r in rows) + 1
    omega_by_n = {r[0]: r[1] for r in rows}
    values = np.zeros((len(ns), n_so, n_so), dtype=np.complex128)
    pos = {n: k for k, n in enumerate(ns)}
    for n_idx, _, i, j, re, im in rows:
        values[pos[n_idx], i, j] = re + 1j * im
    omegas = np.array([omega_by_n[n] for n in ns])
    beta = (2 * ns[0] + 1) * np.pi / omegas[0]
    grid = greens.MatsubaraGrid(beta, np.array(ns), omegas)
    return greens.GreensFunction(grid, values)


def render_binned_matrix_csv(bins: np.ndarray) -> str:
    """Per-bin matrix estimates: bin, i, j, re, im."""
    lines = ["bin,i,j,re,im"]
    for b in range(bins.shape[0]):
        for i in range(bins.shape[1]):
            for j in range(bins.shape[2]):
                val = bins[b, i, j]
                lines.append(f"{b},{i},{j},{_float_cell(val.real)},{_float_cell(val.imag)}")
    return "\n".join(lines) + "\n"


def render_matrix_csv(mat: np.ndarray, extra: Optional[dict[str, np.ndarray]] = None) -> str:
    """Small-matrix dump: i, j, re, im (plus one column set per extra matrix)."""
    names = list(extra.keys()) if extra else []
    header = "i,j,re,im" + "".join(f",re_{k},im_{k}" for k in names)
    lines = [header]
    n = mat.shape[0]
    for i in range(n):
        for j in range(n):
            cells = [str(i), str(j), _float_cell(mat[i, j].real), _float_cell(mat[i, j].imag)]
            for k in names:
                cells += [_float_cell(extra[k][i, j].real), _float_cell(extra[k][i, j].imag)]
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _manifest(config: RunConfig, command: str) -> str:
    data = asdict(config)
    data["command"] = command
    data["resolved_epsilon"] = config.resolved_epsilon()
    return _json_dumps(data)


def _load_system(config: RunConfig, fcidump_text: str, rotation_text: Optional[str]):
    try:
        mi = parse_fcidump(fcidump_text)
    except ValueError as exc:
        raise ConfigError(f"bad FCIDUMP {config.fcidump_path or '<inline>'}: {exc}") from exc
    soh = to_spin_orbitals(mi)
    spatial_rot = None
    if rotation_text is not None:
        try:
            spatial_rot = ansatz.load_rotation_file(rotation_text, mi.n_spatial)
        except ValueError as exc:
            raise ConfigError(f"bad rotation file {config.rotation_path}: {exc}") from exc
    return mi, soh, spatial_rot


def _greens_pipeline(e0: float, grid, eps: float):
    """Closure mapping (ea_h, ea_s, ip_h, ip_s) to a GreensFunction."""

    def run(mats: tuple[np.ndarray, ...]) -> greens.GreensFunction:
        ea = qse.expand_from_matrices("EA", mats[0], mats[1], eps)
        ip = qse.expand_from_matrices("IP", mats[2], mats[3], eps)
        return greens.lehmann_greens(e0, ea, ip, grid)

    return run


def run_gf(
    config: RunConfig,
    fcidump_text: str,
    rotation_text: Optional[str] = None,
) -> RunResult:
    """VQE + subspace expansion Green's function run."""
    config.validate()
    t0 = time.perf_counter()
    mi, soh, spatial_rot = _load_system(config, fcidump_text, rotation_text)
    grid = greens.matsubara_grid(config.beta, config.n_max)
    eps = config.resolved_epsilon()

    try:
        circuit = ansatz.build_circuit(
            mi.n_electrons, soh.n_so, mi.ms2, config.ansatz_mode, spatial_rot
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        h = map_hamiltonian(soh)
        opts = vqe.VqeOptions(gtol=config.gtol, max_iter=config.max_iter)
        result = vqe.minimize(h, circuit, opts)
        state = ansatz.prepare_state(circuit, result.theta_opt)
        e0 = result.energy

        files: dict[str, str] = {}
        summary: dict = {
            "e_vqe": e0,
            "vqe_converged": result.converged,
            "vqe_iterations": result.iterations,
        }

        g0 = greens.hf_reference_greens(
            soh, circuit.hf_occupation, grid, eps=qse.DEFAULT_EPS_EXACT,
            orbital_rotation=circuit.orbital_rotation,
        )

        if config.mode == "statevector":
            ea, _ = qse.expand_sector(state, h, "EA", eps)
            ip, _ = qse.expand_sector(state, h, "IP", eps)
            g = greens.lehmann_greens(e0, ea, ip, grid)
            summary["n_electrons"] = greens.electron_count(ip.s_sub)
            sum_rule = greens.sum_rule_matrix(ea.amplitudes, ip.amplitudes)
        else:
            plan = qse.ShotPlan(config.shots, config.bins, config.seed)
            ea, ea_bins = qse.expand_sector(state, h, "EA", eps, plan)
            ip, ip_bins = qse.expand_sector(state, h, "IP", eps, plan)
            bin_tuples = [
                (ea_bins.h_bins[b], ea_bins.s_bins[b], ip_bins.h_bins[b], ip_bins.s_bins[b])
                for b in range(config.bins)
            ]
            pipeline_fn = _greens_pipeline(e0, grid, eps)
            g = stats.propagate(bin_tuples, pipeline_fn)
            raw = stats.per_bin_outputs(bin_tuples, pipeline_fn)
            summary["fat_tail_excess_kurtosis_re_g00"] = float(
                np.median(stats.excess_kurtosis(raw.real[:, :, 0, 0]))
            )
            counts = stats.jackknife([greens.electron_count(ip_bins.s_bins[b]) for b in range(config.bins)])
            summary["n_electrons"] = counts.mean
            summary["n_electrons_std"] = counts.std
            sum_rule = greens.sum_rule_matrix(ea.amplitudes, ip.amplitudes)

        summary["sum_rule_residual"] = float(
            np.max(np.abs(sum_rule - np.eye(soh.n_so)))
        )

        sigma = greens.self_energy(g0, g)
        sigma_gf = greens.GreensFunction(grid, sigma)
        if config.mode == "shots":
            g0_for_dyson = g0

            def sigma_pipeline(mats):
                gf = _greens_pipeline(e0, grid, eps)(mats)
                return greens.GreensFunction(grid, greens.self_energy(g0_for_dyson, gf))

            sigma_gf = stats.propagate(bin_tuples, sigma_pipeline)

        summary["e_fci"] = None
        summary["max_dev_vs_fci"] = None
        if config.with_oracle:
            g_fci = oracle.fci_greens(h, mi.n_electrons, grid)
            hm_e0, _ = oracle.ground_state(oracle.dense_matrix(h), mi.n_electrons)
            summary["e_fci"] = hm_e0
            summary["max_dev_vs_fci"] = float(np.max(np.abs(g.values - g_fci.values)))

        summary["runtime_s"] = time.perf_counter() - t0

        files["vqe.json"] = _json_dumps(
            {
                "theta_opt": [float(t) for t in result.theta_opt],
                "energy": result.energy,
                "iterations": result.iterations,
                "converged": result.converged,
                "gradient_norm": result.gradient_norm,
                "generators": [g_.label() for g_ in circuit.generators],
            }
        )
        files["g.csv"] = render_greens_csv(g)
        files["g0.csv"] = render_greens_csv(g0)
        files["sigma.csv"] = render_greens_csv(sigma_gf)
        if config.dump_subspace:
            files["ea_h_sub.csv"] = render_matrix_csv(ea.h_sub)
            files["ea_s_sub.csv"] = render_matrix_csv(ea.s_sub)
            files["ip_h_sub.csv"] = render_matrix_csv(ip.h_sub)
            files["ip_s_sub.csv"] = render_matrix_csv(ip.s_sub)
            if config.mode == "shots":
                files["ea_h_sub_bins.csv"] = render_binned_matrix_csv(ea_bins.h_bins)
                files["ea_s_sub_bins.csv"] = render_binned_matrix_csv(ea_bins.s_bins)
                files["ip_h_sub_bins.csv"] = render_binned_matrix_csv(ip_bins.h_bins)
                files["ip_s_sub_bins.csv"] = render_binned_matrix_csv(ip_bins.s_bins)
        # timings stay out of the emitted files so fixed-seed runs are
        # byte-identical on disk
        files["summary.json"] = _json_dumps(
            {k: v for k, v in summary.items() if k != "runtime_s"}
        )
        files["manifest.json"] = _manifest(config, "gf")
        return RunResult(files, summary)
    except (ConfigError, NumericalError):
        raise
    except (ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
        raise NumericalError(f"gf pipeline failed: {exc}") from exc


def run_fci(config: RunConfig, fcidump_text: str) -> RunResult:
    """Exact-diagonalization reference run."""
    config.validate()
    t0 = time.perf_counter()
    mi, soh, _ = _load_system(config, fcidump_text, None)
    grid = greens.matsubara_grid(config.beta, config.n_max)
    try:
        h = map_hamiltonian(soh)
        hm = oracle.dense_matrix(h)
        spectra = {}
        for label, n_part in (
            ("N-1", mi.n_electrons - 1),
            ("N", mi.n_electrons),
            ("N+1", mi.n_electrons + 1),
        ):
            spec = oracle.sector_spectrum(hm, n_part)
            spectra[label] = {
                "particle_number": n_part,
                "dimension": len(spec.energies),
                "energies": [float(e) for e in spec.energies],
            }
        g_fci = oracle.fci_greens(h, mi.n_electrons, grid)
        e_fci = spectra["N"]["energies"][0]
        summary = {
            "e_fci": e_fci,
            "n_so": soh.n_so,
            "runtime_s": time.perf_counter() - t0,
        }
        files = {
            "g_fci.csv": render_greens_csv(g_fci),
            "sector_spectra.json": _json_dumps(spectra),
            "summary.json": _json_dumps({k: v for k, v in summary.items() if k != "runtime_s"}),
            "manifest.json": _manifest(config, "fci"),
        }
        return RunResult(files, summary)
    except ConfigError:
        raise
    except (ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
        raise NumericalError(f"fci pipeline failed: {exc}") from exc


def run_compare(g_a_text: str, g_b_text: str) -> RunResult:
    """Element-wise difference of two Green's-function CSV files."""
    g_a = parse_greens_csv(g_a_text)
    g_b = parse_greens_csv(g_b_text)
    if g_a.values.shape != g_b.values.shape or not np.array_equal(
        g_a.grid.indices, g_b.grid.indices
    ):
        raise ConfigError("Green's function grids do not match")
    if np.max(np.abs(g_a.grid.frequencies - g_b.grid.frequencies)) > 1e-12:
        raise ConfigError("Green's function grids do not match")
    diff = g_a.values - g_b.values
    lines = ["n,omega,i,j,re_diff,im_diff"]
    for w, n_idx in enumerate(g_a.grid.indices):
        omega = _float_cell(g_a.grid.frequencies[w])
        for i in range(g_a.n_so):
            for j in range(g_a.n_so):
                d = diff[w, i, j]
                lines.append(
                    f"{int(n_idx)},{omega},{i},{j},{_float_cell(d.real)},{_float_cell(d.imag)}"
                )
    summary = {
        "max_abs_diff": float(np.max(np.abs(diff))),
        "mean_abs_diff": float(np.mean(np.abs(diff))),
    }
    files = {"diff.csv": "\n".join(lines) + "\n", "compare_summary.json": _json_dumps(summary)}
    return RunResult(files, summary)


ORACLE_SAMPLE_INDICES = (0, 10, 100)


def freeze_oracle(config: RunConfig, fcidump_text: str) -> RunResult:
    """Regression snapshot: sector energies and sampled exact G elements."""
    config.validate()
    mi, soh, _ = _load_system(config, fcidump_text, None)
    grid = greens.matsubara_grid(config.beta, config.n_max)
    try:
        h = map_hamiltonian(soh)
        hm = oracle.dense_matrix(h)
        g_fci = oracle.fci_greens(h, mi.n_electrons, grid)
        sectors = {}
        for label, n_part in (
            ("N-1", mi.n_electrons - 1),
            ("N", mi.n_electrons),
            ("N+1", mi.n_electrons + 1),
        ):
            spec = oracle.sector_spectrum(hm, n_part)
            sectors[label] = [float(e) for e in spec.energies]
        samples = []
        for n_idx in ORACLE_SAMPLE_INDICES:
            if n_idx >= config.n_max:
                continue
            for i in range(soh.n_so):
                for j in range(soh.n_so):
                    val = g_fci.values[n_idx, i, j]
                    samples.append(
                        {"n": n_idx, "i": i, "j": j, "re": float(val.real), "im": float(val.imag)}
                    )
        payload = {
            "fcidump_path": config.fcidump_path,
            "beta": config.beta,
            "n_max": config.n_max,
            "e_fci": sectors["N"][0],
            "sector_energies": sectors,
            "g_samples": samples,
        }
        summary = {"e_fci": sectors["N"][0], "n_samples": len(samples)}
        files = {
            "oracle_regression.json": _json_dumps(payload),
            "manifest.json": _manifest(config, "freeze-oracle"),
        }
        return RunResult(files, summary)
    except ConfigError:
        raise
    except (ValueError, np.linalg.LinAlgError, RuntimeError) as exc:
        raise NumericalError(f"freeze-oracle failed: {exc}") from exc
