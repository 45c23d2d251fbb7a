"""Binning, jackknife resampling and error propagation through the pipeline.

Shot estimates arrive as M bin means per matrix element.  Because the map
from subspace matrices to the Green's function is nonlinear, uncertainty
is propagated by rerunning the whole map on each leave-one-out average
and applying the jackknife formulas to the M outputs:

    U  = U0 - (M-1) (Ubar - U0)
    dU = sqrt(M-1) * sqrt( (1/M) sum_i U_i^2 - Ubar^2 )

with U0 the statistic on the full average and U_i the leave-one-out values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .greens import GreensFunction


@dataclass
class JackknifeEstimate:
    mean: float
    std: float
    bins: int


def bin_means(samples: Sequence[float], m: int) -> np.ndarray:
    """Means of m contiguous equal-size bins."""
    samples = np.asarray(samples, dtype=float)
    if m < 1 or len(samples) % m:
        raise ValueError(f"{len(samples)} samples do not divide into {m} bins")
    return samples.reshape(m, -1).mean(axis=1)


def _jackknife_from_loo(u0: np.ndarray, loo: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Jackknife mean/std given the full-sample value and leave-one-out values."""
    m = loo.shape[0]
    ubar = loo.mean(axis=0)
    mean = u0 - (m - 1) * (ubar - u0)
    bracket = np.clip((loo**2).mean(axis=0) - ubar**2, 0.0, None)
    std = np.sqrt(m - 1) * np.sqrt(bracket)
    return mean, std


def jackknife(bins: Sequence[float]) -> JackknifeEstimate:
    """Bias-corrected mean and standard deviation of a set of bin means."""
    bins = np.asarray(bins, dtype=float)
    m = len(bins)
    if m < 2:
        raise ValueError("jackknife needs at least two bins")
    u0 = bins.mean()
    loo = (bins.sum() - bins) / (m - 1)
    mean, std = _jackknife_from_loo(np.float64(u0), loo)
    return JackknifeEstimate(float(mean), float(std), m)


def leave_one_out_averages(bins: np.ndarray) -> np.ndarray:
    """All M averages over M-1 bins; axis 0 of `bins` indexes the bin."""
    m = bins.shape[0]
    if m < 2:
        raise ValueError("jackknife needs at least two bins")
    total = bins.sum(axis=0)
    return (total[None, ...] - bins) / (m - 1)


def propagate(
    bins: Sequence[tuple[np.ndarray, ...]],
    pipeline: Callable[[tuple[np.ndarray, ...]], GreensFunction],
) -> GreensFunction:
    """Jackknife a nonlinear matrix -> Green's-function map over shot bins.

    `bins` holds M tuples of matrices (one tuple per bin, all tuples alike);
    `pipeline` maps one such tuple to a GreensFunction.  Real and imaginary
    parts are resampled as independent channels.
    """
    m = len(bins)
    if m < 2:
        raise ValueError("jackknife needs at least two bins")
    n_parts = len(bins[0])
    stacked = [np.stack([b[k] for b in bins]) for k in range(n_parts)]
    full = tuple(part.mean(axis=0) for part in stacked)
    g_full = pipeline(full)

    loo_parts = [leave_one_out_averages(part) for part in stacked]
    loo_values = []
    for i in range(m):
        sample = tuple(part[i] for part in loo_parts)
        try:
            loo_values.append(pipeline(sample).values)
        except Exception as exc:
            raise RuntimeError(f"pipeline failed on leave-one-out subsample {i}") from exc
    loo_values = np.stack(loo_values)

    mean_re, std_re = _jackknife_from_loo(g_full.values.real, loo_values.real)
    mean_im, std_im = _jackknife_from_loo(g_full.values.imag, loo_values.imag)
    return GreensFunction(g_full.grid, mean_re + 1j * mean_im, errors=(std_re, std_im))


def per_bin_outputs(
    bins: Sequence[tuple[np.ndarray, ...]],
    pipeline: Callable[[tuple[np.ndarray, ...]], GreensFunction],
) -> np.ndarray:
    """Pipeline output for every single bin (fat-tail diagnostics)."""
    return np.stack([pipeline(b).values for b in bins])


def excess_kurtosis(samples: np.ndarray, axis: int = 0) -> np.ndarray:
    """Fisher excess kurtosis along an axis (0 for a normal distribution)."""
    x = np.asarray(samples, dtype=float)
    mu = x.mean(axis=axis, keepdims=True)
    centered = x - mu
    var = (centered**2).mean(axis=axis)
    fourth = (centered**4).mean(axis=axis)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(var > 0, fourth / np.where(var > 0, var**2, 1.0) - 3.0, 0.0)
    return out
