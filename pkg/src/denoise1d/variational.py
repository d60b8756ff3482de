"""First-order variational denoising and its diffusion approximation.

The discrete energy is

    E(u) = h * sum (u_i - f_i)^2  +  alpha * h * sum psi(fd_i)

with the clamped forward differences of :mod:`.signals` (the last
difference is zero).  Its minimiser satisfies a discrete
Euler-Lagrange equation whose right-hand side is the same flux
divergence as one explicit diffusion step with phi = psi'/2, so the
energy can be attacked by running that diffusion flow to time alpha.
For the quadratic (Whittaker-Tikhonov) regulariser the module also
ships an exact direct solve as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .diffusion import StepSizeMode, _flux_step, _gradient_range, max_stable_tau
from .nonlinearities import (
    Role,
    RoleFunction,
    estimate_lipschitz,
    translate,
)
from .signals import Signal1D, _fdiff

_LIPSCHITZ_SAMPLES = 200_001


@dataclass(frozen=True)
class EnergySpec:
    """Regulariser plus weight for the first-order energy."""

    psi: RoleFunction
    alpha: float

    def __post_init__(self):
        if self.psi.role is not Role.REGULARISER:
            raise ValueError("EnergySpec expects a regulariser")
        if not np.isfinite(self.alpha) or self.alpha <= 0.0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if abs(float(self.psi(0.0))) > 1e-12:
            raise ValueError("regulariser must satisfy psi(0) = 0")


def _check_pair(u, f):
    if len(u) != len(f):
        raise ValueError(f"signal lengths differ: {len(u)} vs {len(f)}")
    if u.h != f.h:
        raise ValueError(f"grid sizes differ: {u.h!r} vs {f.h!r}")


def discrete_energy(u: Signal1D, f: Signal1D, spec: EnergySpec) -> float:
    """Quadratic data term plus weighted regulariser of the gradient."""
    _check_pair(u, f)
    d = u.values - f.values
    data = float(np.sum(d * d))
    reg = float(np.sum(spec.psi.evaluator(_fdiff(u.values, u.h))))
    return u.h * data + spec.alpha * u.h * reg


def _flux_divergence(x, ev, h):
    # Divergence of the interface fluxes ev(fd x); identical arithmetic
    # to one explicit diffusion step without the time factor.
    w = ev(_fdiff(x, h))
    phi0 = float(ev(np.float64(0.0)))
    div = np.empty_like(x)
    div[0] = w[0] - phi0
    np.subtract(w[1:], w[:-1], out=div[1:])
    if h != 1.0:
        div /= h
    return div


def euler_lagrange_residual(u: Signal1D, f: Signal1D, spec: EnergySpec) -> Signal1D:
    """Pointwise residual (u - f)/alpha - div(psi'(fd u)/2).

    Zero (up to the derivative tolerance) exactly at energy minimisers.
    """
    _check_pair(u, f)
    phi = translate(spec.psi, Role.ACTIVATION)
    r = (u.values - f.values) / spec.alpha - _flux_divergence(u.values, phi.evaluator, u.h)
    return Signal1D._wrap(r, u.h)


def energy_gradient(u: Signal1D, f: Signal1D, spec: EnergySpec) -> np.ndarray:
    """Analytic gradient of :func:`discrete_energy` with respect to u."""
    _check_pair(u, f)
    phi = translate(spec.psi, Role.ACTIVATION)
    div = _flux_divergence(u.values, phi.evaluator, u.h)
    return 2.0 * u.h * (u.values - f.values) - 2.0 * spec.alpha * u.h * div


def minimize_by_diffusion(f: Signal1D, spec: EnergySpec, m: int) -> Signal1D:
    """Approach the minimiser with m explicit diffusion steps, tau = alpha/m.

    Raises if alpha/m violates the max-min stability bound for
    phi = psi'/2; the message reports the smallest admissible m.
    """
    if m < 1:
        raise ValueError(f"need at least one step, got m = {m!r}")
    phi = translate(spec.psi, Role.ACTIVATION)
    tau = spec.alpha / m
    L = estimate_lipschitz(phi, _gradient_range(f), _LIPSCHITZ_SAMPLES)
    tau_max = max_stable_tau(L, f.h, StepSizeMode.MAXMIN)
    if tau > tau_max:
        m_min = int(math.ceil(spec.alpha / tau_max))
        raise ValueError(
            f"tau = alpha/m = {tau:g} exceeds the stability bound {tau_max:g}; "
            f"use m >= {m_min}"
        )
    x = f.values
    ev = phi.evaluator
    phi0 = float(ev(np.float64(0.0)))
    for _ in range(m):
        x = _flux_step(x, ev, phi0, tau, f.h)
    return Signal1D._wrap(x, f.h)


def tikhonov_solve_oracle(f: Signal1D, alpha: float) -> Signal1D:
    """Exact minimiser for the quadratic regulariser psi(r) = r^2.

    Solves (u - f)/alpha = Lap(u) with the reflecting-boundary discrete
    Laplacian by a direct symmetric tridiagonal solve.  Independent of
    the explicit-step code path; used as a verification oracle.
    """
    if not np.isfinite(alpha) or alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    n = len(f)
    if n == 1:
        return f
    c = alpha / (f.h * f.h)
    ab = np.empty((2, n))
    ab[0, 0] = 0.0
    ab[0, 1:] = -c
    ab[1, :] = 1.0 + 2.0 * c
    ab[1, 0] = 1.0 + c
    ab[1, -1] = 1.0 + c
    u = solveh_banded(ab, f.values, lower=False)
    return Signal1D._wrap(u, f.h)
