"""Variational ground-state search over the ansatz parameters.

The objective is the exact statevector expectation of the Hamiltonian;
gradients come from the parameter-shift rule, and the optimizer is plain
gradient descent with a backtracking line search.  Shot-noise studies
reuse the noiseless optimum rather than optimizing under noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import QccCircuit, prepare_state
from .pauli import PauliSum
from .simulator import expectation


@dataclass
class VqeOptions:
    gtol: float = 1e-7
    max_iter: int = 500
    initial_step: float = 1.0
    armijo_c1: float = 1e-4


@dataclass
class VqeResult:
    theta_opt: np.ndarray
    energy: float
    iterations: int
    converged: bool
    energy_trace: list[float] = field(default_factory=list)  # best-so-far per iteration
    gradient_norm: float = float("nan")


def ansatz_energy(h: PauliSum, circuit: QccCircuit, theta: np.ndarray) -> float:
    val = expectation(prepare_state(circuit, theta), h)
    if abs(val.imag) > 1e-9:
        raise ValueError(f"energy expectation has imaginary part {val.imag:.2e}")
    return val.real


def energy_gradient(h: PauliSum, circuit: QccCircuit, theta: np.ndarray) -> np.ndarray:
    """Parameter-shift gradient: dE/dth_k = (E(th_k + pi/2) - E(th_k - pi/2)) / 2."""
    theta = np.asarray(theta, dtype=float)
    grad = np.empty_like(theta)
    for k in range(len(theta)):
        shifted = theta.copy()
        shifted[k] = theta[k] + 0.5 * np.pi
        e_plus = ansatz_energy(h, circuit, shifted)
        shifted[k] = theta[k] - 0.5 * np.pi
        e_minus = ansatz_energy(h, circuit, shifted)
        grad[k] = 0.5 * (e_plus - e_minus)
    return grad


def minimize(h: PauliSum, circuit: QccCircuit, opts: VqeOptions | None = None) -> VqeResult:
    """Gradient descent with backtracking line search from the HF point theta = 0."""
    opts = opts or VqeOptions()
    m = circuit.n_parameters
    theta = np.zeros(m)
    energy = ansatz_energy(h, circuit, theta)
    trace = [energy]
    if m == 0:
        return VqeResult(theta, energy, 0, True, trace, 0.0)

    step = opts.initial_step
    grad = energy_gradient(h, circuit, theta)
    for it in range(1, opts.max_iter + 1):
        gnorm = float(np.linalg.norm(grad))
        if gnorm < opts.gtol:
            return VqeResult(theta, energy, it - 1, True, trace, gnorm)
        gsq = gnorm * gnorm
        alpha = step
        accepted = False
        while alpha > 1e-16:
            trial = theta - alpha * grad
            e_trial = ansatz_energy(h, circuit, trial)
            # Strict decrease guards against accepting 0-ulp "improvements"
            # once the Armijo slack underflows near the optimum.
            if e_trial < energy and e_trial <= energy - opts.armijo_c1 * alpha * gsq:
                accepted = True
                break
            alpha *= 0.5
        if accepted:
            theta, energy = trial, e_trial
            trace.append(min(trace[-1], energy))
            step = min(alpha * 2.0, 4.0)
            grad = energy_gradient(h, circuit, theta)
            continue
        # Energy sits at the floating-point floor.  The gradient still
        # resolves smaller displacements, so place one secant step on the
        # directional derivative along -grad and keep it if it shrinks the
        # gradient without raising the energy.
        d1 = float(-energy_gradient(h, circuit, theta - step * grad) @ grad)
        denom = d1 + gsq
        alpha = min(step * gsq / denom, 4.0) if denom > 0 else step
        cand = theta - alpha * grad
        e_cand = ansatz_energy(h, circuit, cand)
        g_cand = energy_gradient(h, circuit, cand)
        ulp_slack = 4.0 * np.finfo(float).eps * max(abs(energy), 1.0)
        if float(np.linalg.norm(g_cand)) < gnorm and e_cand <= energy + ulp_slack:
            theta, energy, grad = cand, e_cand, g_cand
            trace.append(min(trace[-1], energy))
            continue
        return VqeResult(theta, energy, it, gnorm < opts.gtol, trace, gnorm)

    gnorm = float(np.linalg.norm(grad))
    return VqeResult(theta, energy, opts.max_iter, gnorm < opts.gtol, trace, gnorm)
