"""Command line interface: signal generation, noise, denoising, dictionary
translations, stability reports, and cross-method comparison.

Signals are stored as CSV: one sample per line, 17 significant digits,
with an optional ``# h=<value>`` header line (h defaults to 1).  Noise
is drawn from numpy's seeded PCG64 generator
(``numpy.random.default_rng(seed)``), so identical configurations give
byte-identical outputs.

Exit codes: 0 ok, 1 usage error, 2 I/O error, 3 stability violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .blocks import chain, make_diffusion_block
from .diffusion import StepSizeMode, diffuse, explicit_step, max_stable_tau
from .nonlinearities import (
    CouplingParams,
    Family,
    FamilySpec,
    Role,
    estimate_lipschitz,
    make_role_function,
    translate,
)
from .shrinkage import iterate_shrinkage
from .signals import Signal1D, _fdiff
from .stability import analyze
from .variational import EnergySpec, minimize_by_diffusion

_LIPSCHITZ_SAMPLES = 200_001

_METHODS = ("diffusion", "wavelet", "variational", "resnet")

_ROLE_NAMES = {
    "diffusivity": Role.DIFFUSIVITY,
    "regulariser": Role.REGULARISER,
    "shrinkage": Role.SHRINKAGE,
    "activation": Role.ACTIVATION,
}


class UsageError(Exception):
    pass


class StabilityViolation(Exception):
    pass


@dataclass(frozen=True)
class NoiseModel:
    """Additive noise description: none, gaussian(sigma), or uniform(a)."""

    kind: str = "none"
    level: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "gaussian", "uniform"):
            raise UsageError(f"unknown noise model {self.kind!r}")
        if self.kind != "none" and (not np.isfinite(self.level) or self.level < 0.0):
            raise UsageError(f"noise level must be nonnegative, got {self.level!r}")


@dataclass(frozen=True)
class RunConfig:
    """One denoise run, fully determined (method, family, schedule, seed)."""

    method: str
    family: FamilySpec
    coupling: CouplingParams
    input_path: str
    output_path: str
    stopping_time: Optional[float] = None
    steps: Optional[int] = None
    mode: StepSizeMode = StepSizeMode.SIGN_STABLE
    noise: NoiseModel = NoiseModel()
    seed: Optional[int] = None
    report_path: Optional[str] = None

    def __post_init__(self):
        if self.method not in _METHODS:
            raise UsageError(f"unknown method {self.method!r}")
        if (self.stopping_time is None) == (self.steps is None):
            raise UsageError("give exactly one of stopping time and step count")
        if self.noise.kind != "none" and self.seed is None:
            raise UsageError("a seed is mandatory when noise is added")


def generate_signal(kind: str, n: int, params=None, seed=None) -> Signal1D:
    """Deterministic test signals.

    step: 0 for i < N//2, then 1.  spike: single 1 at index N//2.
    sine: sin(2*pi*i/N).  piecewise: constant levels (default
    0, 1, 0.25, 0.75) over equal segments; params may override the
    levels.  The seed is accepted for interface symmetry; all four
    shapes are deterministic.
    """
    if n < 1:
        raise UsageError(f"need at least one sample, got N = {n!r}")
    if kind == "spike":
        x = np.zeros(n)
        x[n // 2] = 1.0
    elif kind == "step":
        x = np.where(np.arange(n) >= n // 2, 1.0, 0.0)
    elif kind == "sine":
        x = np.sin(2.0 * np.pi * np.arange(n) / n)
    elif kind == "piecewise":
        levels = tuple(params) if params else (0.0, 1.0, 0.25, 0.75)
        if not levels or not all(np.isfinite(v) for v in levels):
            raise UsageError("piecewise levels must be finite and nonempty")
        edges = np.linspace(0, n, len(levels) + 1).astype(int)
        x = np.empty(n)
        for lv, a, b in zip(levels, edges[:-1], edges[1:]):
            x[a:b] = lv
    else:
        raise UsageError(f"unknown signal kind {kind!r}")
    return Signal1D(x)


def add_noise(u: Signal1D, model: NoiseModel, seed=None) -> Signal1D:
    """Seeded additive perturbation; reproducible for a fixed seed."""
    if model.kind == "none":
        return u
    rng = np.random.default_rng(seed)
    if model.kind == "gaussian":
        pert = rng.normal(0.0, model.level, size=len(u)) if model.level > 0 else 0.0
    else:
        pert = rng.uniform(-model.level, model.level, size=len(u)) if model.level > 0 else 0.0
    return Signal1D(u.values + pert, u.h)


def read_signal_csv(path) -> Signal1D:
    h = 1.0
    samples = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("h="):
                    h = float(body[2:])
                continue
            samples.append(float(line))
    return Signal1D(np.array(samples), h)


def write_signal_csv(path, u: Signal1D):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# h={u.h:.17g}\n")
        for v in u.values:
            fh.write(f"{v:.17g}\n")


def _family_spec(args) -> FamilySpec:
    try:
        family = Family(args.family)
    except ValueError:
        raise UsageError(f"unknown family {args.family!r}") from None
    return FamilySpec(family=family, contrast=args.contrast, threshold=args.threshold)


def _noise_model(args) -> NoiseModel:
    if args.noise == "none":
        return NoiseModel()
    level = args.sigma if args.noise == "gaussian" else args.amplitude
    if level is None:
        flag = "--sigma" if args.noise == "gaussian" else "--amplitude"
        raise UsageError(f"{args.noise} noise needs {flag}")
    return NoiseModel(kind=args.noise, level=level)


def _denoise_signal(config: RunConfig, f: Signal1D):
    """Run one method; returns (denoised, phi, tau, steps) for reporting."""
    spec = config.family
    phi = make_role_function(spec, Role.ACTIVATION)
    tau = config.coupling.tau
    h = f.h

    if config.method == "diffusion":
        if config.stopping_time is not None:
            out, plan = diffuse(f, phi, config.stopping_time, config.mode)
            return out, phi, plan.tau, plan.steps
        _check_tau(phi, f, tau, config.mode)
        out = f
        for _ in range(config.steps):
            out = explicit_step(out, phi, tau)
        return out, phi, tau, config.steps

    if config.steps is None:
        raise UsageError(f"method {config.method!r} needs --steps, not --time")

    if config.method == "wavelet":
        shrink = translate(phi, Role.SHRINKAGE, config.coupling)
        out = iterate_shrinkage(f, shrink, config.steps)
        return out, phi, tau, config.steps

    if config.method == "variational":
        psi = make_role_function(spec, Role.REGULARISER)
        alpha = config.steps * tau
        try:
            out = minimize_by_diffusion(f, EnergySpec(psi=psi, alpha=alpha), config.steps)
        except ValueError as exc:
            raise StabilityViolation(str(exc)) from None
        return out, phi, tau, config.steps

    # resnet
    _check_tau(phi, f, tau, config.mode)
    block = make_diffusion_block(phi, tau, h)
    out = chain([block] * config.steps, f)
    return out, phi, tau, config.steps


def _check_tau(phi, f, tau, mode):
    grad = 2.0 * float(np.max(np.abs(_fdiff(f.values, f.h)))) or 1.0
    L = estimate_lipschitz(phi, grad, _LIPSCHITZ_SAMPLES)
    bound = max_stable_tau(L, f.h, mode)
    if tau > bound:
        raise StabilityViolation(
            f"tau = {tau:g} violates the {mode.value} bound {bound:g} (L = {L:g})"
        )


def run(config: RunConfig) -> int:
    """Execute a denoise run: read, perturb, filter, write, report."""
    f = read_signal_csv(config.input_path)
    f = add_noise(f, config.noise, config.seed)
    out, phi, tau, steps = _denoise_signal(config, f)
    write_signal_csv(config.output_path, out)
    report_path = config.report_path or config.output_path + ".report"
    report = analyze(f, phi, tau, max(steps, 1))
    with open(report_path, "w", encoding="ascii") as fh:
        fh.write("\n".join(report.to_lines()) + "\n")
    return 0


def _cmd_generate(args):
    params = tuple(float(s) for s in args.levels.split(",")) if args.levels else None
    u = generate_signal(args.kind, args.n, params, args.seed)
    write_signal_csv(args.out, u)
    return 0


def _cmd_noise(args):
    model = _noise_model(args)
    if model.kind != "none" and args.seed is None:
        raise UsageError("a seed is mandatory when noise is added")
    u = read_signal_csv(args.input)
    write_signal_csv(args.out, add_noise(u, model, args.seed))
    return 0


def _cmd_denoise(args):
    config = RunConfig(
        method=args.method,
        family=_family_spec(args),
        coupling=CouplingParams(tau=args.tau, alpha=args.alpha, h=1.0),
        input_path=args.input,
        output_path=args.out,
        stopping_time=args.time,
        steps=args.steps,
        mode=StepSizeMode.MAXMIN if args.mode == "maxmin" else StepSizeMode.SIGN_STABLE,
        noise=_noise_model(args),
        seed=args.seed,
        report_path=args.report,
    )
    return run(config)


def _cmd_translate(args):
    spec = _family_spec(args)
    src = _ROLE_NAMES[args.from_role]
    dst = _ROLE_NAMES[args.to]
    fn = translate(
        make_role_function(spec, src),
        dst,
        CouplingParams(tau=args.tau, alpha=args.alpha, h=1.0),
    )
    for s in args.at.split(","):
        r = float(s)
        print(f"{fn(r):.17g}")
    return 0


def _cmd_stability(args):
    spec = _family_spec(args)
    f = read_signal_csv(args.input)
    phi = make_role_function(spec, Role.ACTIVATION)
    report = analyze(f, phi, args.tau, args.steps)
    lines = report.to_lines()
    print("\n".join(lines))
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    if not report.range_ok:
        raise StabilityViolation(
            f"range violated; worst overshoot {report.worst_overshoot:g}"
        )
    return 0


def _cmd_compare(args):
    """All four methods under equivalent parameters; reports max deltas."""
    import os

    spec = _family_spec(args)
    f = read_signal_csv(args.input)
    if f.h != 1.0:
        raise UsageError("compare requires grid size h = 1 (wavelet pairing)")
    tau = args.tau
    m = args.steps
    coupling = CouplingParams(tau=tau, alpha=tau, h=1.0)
    phi = make_role_function(spec, Role.ACTIVATION)
    _check_tau(phi, f, tau, StepSizeMode.MAXMIN)

    out_diffusion = f
    for _ in range(m):
        out_diffusion = explicit_step(out_diffusion, phi, tau)
    out_wavelet = iterate_shrinkage(f, translate(phi, Role.SHRINKAGE, coupling), m)
    psi = make_role_function(spec, Role.REGULARISER)
    out_variational = minimize_by_diffusion(f, EnergySpec(psi=psi, alpha=m * tau), m)
    out_resnet = chain([make_diffusion_block(phi, tau, 1.0)] * m, f)

    outputs = {
        "diffusion": out_diffusion,
        "wavelet": out_wavelet,
        "variational": out_variational,
        "resnet": out_resnet,
    }
    os.makedirs(args.outdir, exist_ok=True)
    for name, sig in outputs.items():
        write_signal_csv(os.path.join(args.outdir, f"{name}.csv"), sig)

    names = list(outputs)
    lines = []
    worst = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            delta = float(np.max(np.abs(outputs[a].values - outputs[b].values)))
            worst = max(worst, delta)
            lines.append(f"delta_{a}_{b}={delta:.17g}")
    lines.append(f"delta_max={worst:.17g}")
    print("\n".join(lines))
    with open(os.path.join(args.outdir, "deltas.txt"), "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_family_flags(p):
    p.add_argument("--family", default="constant",
                   help="constant | charbonnier | truncated-tv | perona-malik | truncated-bfb | truncated-quadratic")
    p.add_argument("--contrast", type=float, default=1.0, help="lambda for charbonnier / perona-malik")
    p.add_argument("--threshold", type=float, default=1.0, help="theta for the truncated families")


def _add_noise_flags(p):
    p.add_argument("--noise", default="none", choices=("none", "gaussian", "uniform"))
    p.add_argument("--sigma", type=float, default=None, help="gaussian standard deviation")
    p.add_argument("--amplitude", type=float, default=None, help="uniform noise half-width")
    p.add_argument("--seed", type=int, default=None, help="rng seed (PCG64); mandatory with noise")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="denoise1d", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a deterministic test signal")
    p.add_argument("--kind", required=True, choices=("step", "sine", "piecewise", "spike"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--levels", default=None, help="comma-separated piecewise levels")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("noise", help="add seeded noise to a signal")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _add_noise_flags(p)
    p.set_defaults(fn=_cmd_noise)

    p = sub.add_parser("denoise", help="denoise with one of the four methods")
    p.add_argument("--method", required=True, choices=_METHODS)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--time", type=float, default=None, help="diffusion stopping time")
    p.add_argument("--steps", type=int, default=None, help="explicit step / block count")
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--alpha", type=float, default=0.25)
    p.add_argument("--mode", default="sign-stable", choices=("maxmin", "sign-stable"))
    p.add_argument("--report", default=None, help="write a stability report here")
    _add_family_flags(p)
    _add_noise_flags(p)
    p.set_defaults(fn=_cmd_denoise)

    p = sub.add_parser("translate", help="evaluate a dictionary translation")
    p.add_argument("--from-role", default="diffusivity", choices=tuple(_ROLE_NAMES))
    p.add_argument("--to", required=True, choices=tuple(_ROLE_NAMES))
    p.add_argument("--at", required=True, help="comma-separated evaluation points")
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--alpha", type=float, default=0.25)
    _add_family_flags(p)
    p.set_defaults(fn=_cmd_translate)

    p = sub.add_parser("stability", help="run the scheme and report diagnostics")
    p.add_argument("--input", required=True)
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--out", default=None)
    _add_family_flags(p)
    p.set_defaults(fn=_cmd_stability)

    p = sub.add_parser("compare", help="run all four methods and report deltas")
    p.add_argument("--input", required=True)
    p.add_argument("--outdir", required=True)
    p.add_argument("--tau", type=float, default=0.25)
    p.add_argument("--steps", type=int, default=1)
    _add_family_flags(p)
    p.set_defaults(fn=_cmd_compare)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except StabilityViolation as exc:
        print(f"stability violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
