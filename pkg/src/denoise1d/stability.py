"""Empirical stability diagnostics for the explicit scheme.

Two notions are checked: the maximum-minimum principle (filtered values
never leave the range of the input) and sign stability (the number of
sign changes never grows).  Zeros are removed before counting sign
alternations; the count is then invariant under negation and positive
scaling.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffusion import _flux_step, _gradient_range, _phi_at_zero
from .nonlinearities import Role, RoleFunction, estimate_lipschitz
from .signals import Signal1D

_LIPSCHITZ_SAMPLES = 200_001
_MAX_RECORDED_VIOLATIONS = 1000


@dataclass
class StabilityReport:
    """Measured constants, admissible bounds, and per-step diagnostics."""

    lipschitz: float
    tau_maxmin: float
    tau_sign: float
    tau_used: float
    steps: int
    range_ok: bool
    worst_overshoot: float
    sign_changes_in: int
    sign_changes_per_step: list = field(default_factory=list)
    violations: list = field(default_factory=list)  # (step, index, value)

    @property
    def sign_changes_out(self):
        return self.sign_changes_per_step[-1] if self.sign_changes_per_step else self.sign_changes_in

    @property
    def sign_stable(self):
        counts = [self.sign_changes_in] + self.sign_changes_per_step
        return all(b <= a for a, b in zip(counts, counts[1:]))

    def to_lines(self):
        """Flat key=value serialisation."""
        lines = [
            f"lipschitz={self.lipschitz:.17g}",
            f"tau_maxmin={self.tau_maxmin:.17g}",
            f"tau_sign={self.tau_sign:.17g}",
            f"tau_used={self.tau_used:.17g}",
            f"steps={self.steps}",
            f"range_ok={'true' if self.range_ok else 'false'}",
            f"worst_overshoot={self.worst_overshoot:.17g}",
            f"sign_changes_in={self.sign_changes_in}",
            f"sign_changes_out={self.sign_changes_out}",
            f"sign_stable={'true' if self.sign_stable else 'false'}",
            "sign_changes_per_step=" + ",".join(str(c) for c in self.sign_changes_per_step),
            "violations=" + ";".join(f"{s}:{i}:{v:.17g}" for s, i, v in self.violations),
        ]
        return lines


def _count_sign_changes(x):
    s = x[x != 0.0]
    if s.size < 2:
        return 0
    sg = np.sign(s)
    return int(np.count_nonzero(sg[1:] != sg[:-1]))


def count_sign_changes(u: Signal1D) -> int:
    """Strict sign alternations after removing zero samples."""
    return _count_sign_changes(u.values)


def check_range_preservation(f: Signal1D, trajectory, slack: float = 1e-12):
    """Whether every state stays inside [min f - slack, max f + slack].

    Returns (ok, worst_overshoot); the overshoot is the largest excursion
    beyond the input range, zero if there is none.
    """
    states = list(trajectory)
    if not states:
        raise ValueError("trajectory must contain at least one state")
    lo = float(np.min(f.values))
    hi = float(np.max(f.values))
    worst = 0.0
    for state in states:
        x = state.values
        if x.size != len(f):
            raise ValueError("trajectory states must match the input length")
        worst = max(worst, float(np.max(x)) - hi, lo - float(np.min(x)))
    worst = max(worst, 0.0)
    return worst <= slack, worst


def analyze(
    f: Signal1D,
    phi: RoleFunction,
    tau: float,
    steps: int,
    slack: float = 1e-12,
) -> StabilityReport:
    """Run the explicit scheme and fill a :class:`StabilityReport`.

    Flags any sample leaving the input range (with ``slack``) and any
    step whose sign-change count grows.
    """
    if phi.role is not Role.ACTIVATION:
        raise ValueError("analyze expects an activation function")
    if steps < 1:
        raise ValueError(f"need at least one step, got {steps!r}")
    if not np.isfinite(tau) or tau <= 0.0:
        raise ValueError(f"time step must be positive, got {tau!r}")
    L = estimate_lipschitz(phi, _gradient_range(f), _LIPSCHITZ_SAMPLES)
    tau_maxmin = f.h * f.h / (2.0 * L)
    tau_sign = tau_maxmin / 2.0

    x = f.values
    lo = float(np.min(x))
    hi = float(np.max(x))
    ev = phi.evaluator
    phi0 = _phi_at_zero(phi)
    counts = []
    violations = []
    worst = 0.0
    for k in range(1, steps + 1):
        x = _flux_step(x, ev, phi0, tau, f.h)
        counts.append(_count_sign_changes(x))
        above = x > hi + slack
        below = x < lo - slack
        if above.any() or below.any():
            for i in np.flatnonzero(above | below):
                if len(violations) < _MAX_RECORDED_VIOLATIONS:
                    violations.append((k, int(i), float(x[i])))
        worst = max(worst, float(np.max(x)) - hi, lo - float(np.min(x)))
    worst = max(worst, 0.0)
    return StabilityReport(
        lipschitz=L,
        tau_maxmin=tau_maxmin,
        tau_sign=tau_sign,
        tau_used=tau,
        steps=steps,
        range_ok=worst <= slack,
        worst_overshoot=worst,
        sign_changes_in=_count_sign_changes(f.values),
        sign_changes_per_step=counts,
        violations=violations,
    )
