"""
Command-line front end.

Data artifacts go to standard output (or ``--out``); diagnostics such as the
total-mass check and runtime go to standard error.
"""

from __future__ import annotations

import argparse
import io
import math
import re
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import artifacts
from .closedform import hadamard_amplitudes, phase_factors, xi_coefficients_closed
from .coin import PHI_STAR, ChiralityVector
from .environment import (
    Environment,
    EnvironmentSpec,
    PhaseMeasure,
    load_environment_spec,
    sample_environment,
)
from .errors import ConfigurationError, QwreError
from .evolve import annealed_exact, annealed_monte_carlo, evolve_to
from .limit import (
    EDGE,
    annealed_limit_density,
    convergence_report,
    limit_moments,
    quenched_limit_density,
)
from .pathsum import DEFAULT_CAP, oracle_distribution
from .verify import SUITES, run_suites

__all__ = ["main", "build_parser", "parse_angle", "parse_qubit", "parse_measure", "RunConfig"]

_ANGLE = re.compile(r"^\s*([+-]?)\s*(\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(\d*\.?\d+))?\s*$")


def parse_angle(text: str) -> float:
    """A float, or a multiple of pi such as ``pi/6``, ``-pi/4``, ``2*pi/3``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text.lower())
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse angle {text!r}")
    sign, coef, denom = m.groups()
    value = (float(coef) if coef else 1.0) * math.pi / (float(denom) if denom else 1.0)
    return -value if sign == "-" else value


def parse_qubit(text: str) -> ChiralityVector:
    """``re_L,im_L,re_R,im_R`` -> ChiralityVector."""
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("qubit must be re_L,im_L,re_R,im_R")
    try:
        reL, imL, reR, imR = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad qubit components {text!r}") from None
    return ChiralityVector(complex(reL, imL), complex(reR, imR))


def parse_measure(text: str) -> PhaseMeasure:
    """
    Inline measure: ``delta:A``, ``uniform:LO,HI``, ``two_point:THETA`` or
    ``discrete:V1,V2,...;W1,W2,...``. Angles accept the ``pi`` forms.
    """
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    try:
        if kind == "delta":
            return PhaseMeasure.delta(parse_angle(rest))
        if kind == "uniform":
            lo, hi = rest.split(",")
            return PhaseMeasure.uniform(parse_angle(lo), parse_angle(hi))
        if kind == "two_point":
            return PhaseMeasure.two_point(parse_angle(rest))
        if kind == "discrete":
            vals, _, weights = rest.partition(";")
            return PhaseMeasure.discrete([parse_angle(v) for v in vals.split(",")],
                                         [float(w) for w in weights.split(",")])
    except (ValueError, argparse.ArgumentTypeError) as exc:
        raise argparse.ArgumentTypeError(f"bad measure {text!r}: {exc}") from None
    raise argparse.ArgumentTypeError(f"unknown measure kind in {text!r}")


@dataclass
class RunConfig:
    command: str
    n: Optional[int] = None
    omega0: Optional[float] = None
    env_path: Optional[Path] = None
    seed: Optional[int] = None
    qubit: ChiralityVector = PHI_STAR
    fmt: str = "csv"
    out: Optional[Path] = None
    cap: int = DEFAULT_CAP

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        cfg = cls(
            command=args.command,
            n=getattr(args, "n", None),
            omega0=getattr(args, "omega0", None),
            env_path=getattr(args, "env", None),
            seed=getattr(args, "seed", None),
            qubit=getattr(args, "qubit", PHI_STAR),
            fmt=getattr(args, "format", "csv"),
            out=getattr(args, "out", None),
            cap=getattr(args, "cap", None) or DEFAULT_CAP,
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        n = self.n
        values = n if isinstance(n, list) else [n] if n is not None else []
        if any(v < 0 for v in values):
            raise ConfigurationError("--n must be nonnegative")
        if abs(self.qubit.norm2() - 1.0) > 1e-12:
            raise ConfigurationError(f"qubit is not normalized (|.|^2 = {self.qubit.norm2():.15g})")
        if self.cap < 1:
            raise ConfigurationError("--cap must be positive")

    def spec(self) -> Optional[EnvironmentSpec]:
        return load_environment_spec(self.env_path) if self.env_path else None

    def environment(self, extent: int) -> Environment:
        """Environment from --env (sampled) and/or --omega0; --omega0 alone means ω ≡ omega0."""
        spec = self.spec()
        if spec is None:
            return Environment.constant(self.omega0 if self.omega0 is not None else 0.0)
        seed = self.seed if self.seed is not None else (spec.seed if spec.seed is not None else 0)
        env = sample_environment(spec, extent, seed)
        if self.omega0 is not None:
            env = env.with_phase(0, self.omega0)
        return env


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)


def _diag(msg: str) -> None:
    print(msg, file=sys.stderr)


def cmd_evolve(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    env = cfg.environment(cfg.n)
    dist = evolve_to(cfg.qubit, env, cfg.n)
    _emit(cfg, artifacts.emit_distribution(dist, cfg.fmt, {"omega0": env.phase(0)}))
    _diag(f"total mass = {dist.total():.17g} (deviation {abs(dist.total() - 1):.2e}); runtime {time.perf_counter() - t0:.3f}s")
    return 0


def cmd_paths(cfg: RunConfig) -> int:
    t0 = time.perf_counter()
    env = cfg.environment(cfg.n)
    dist = oracle_distribution(env, cfg.n, cfg.qubit, cap=cfg.cap)
    _emit(cfg, artifacts.emit_distribution(dist, cfg.fmt, {"omega0": env.phase(0), "source": "path-sum"}))
    _diag(f"total mass = {dist.total():.17g}; runtime {time.perf_counter() - t0:.3f}s")
    return 0


def cmd_closed_form(cfg: RunConfig, l: int, m: int) -> int:
    if l < 0 or m < 0 or l + m == 0:
        raise ConfigurationError("need l, m >= 0 with l + m >= 1")
    env = cfg.environment(l + m)
    h = hadamard_amplitudes(l, m)
    t = phase_factors(l, m, env)
    c = xi_coefficients_closed(l, m, env)
    rows = []
    for name, amp, theta, coef in zip("pqrs", (h.p_h, h.q_h, h.r_h, h.s_h),
                                      (t.theta_p, t.theta_q, t.theta_r, t.theta_s), c.as_tuple()):
        theta, coef = complex(theta), complex(coef)
        rows.append((name, amp, theta.real, theta.imag, coef.real, coef.imag))
    out_text = _table(cfg, ("basis", "hadamard_amplitude", "theta_re", "theta_im", "coef_re", "coef_im"),
                      rows, {"n": l + m, "l": l, "m": m, "x": m - l})
    _emit(cfg, out_text)
    return 0


def _table(cfg: RunConfig, columns, rows, meta) -> str:
    buf = io.StringIO()
    artifacts.write_table(buf, columns, rows, cfg.fmt, meta)
    return buf.getvalue()


def cmd_limit_density(cfg: RunConfig, points: int, measure: Optional[PhaseMeasure]) -> int:
    if points < 2:
        raise ConfigurationError("--points must be at least 2")
    if measure is None and cfg.env_path is not None:
        spec = cfg.spec()
        measure = spec.measure_at(0)
    if measure is not None:
        density = annealed_limit_density(measure)
        label = {"kind": "annealed"}
    else:
        density = quenched_limit_density(cfg.omega0 if cfg.omega0 is not None else 0.0)
        label = {"kind": "quenched"}
    mean, var = limit_moments(density)
    xs = np.linspace(-EDGE, EDGE, points)
    _emit(cfg, artifacts.emit_density(xs, density(xs), cfg.fmt,
                                      {**label, "mean_sin": density.mean_sin, "mean": mean, "variance": var}))
    return 0


def cmd_annealed(cfg: RunConfig, method: str, samples: int, measure: Optional[PhaseMeasure]) -> int:
    t0 = time.perf_counter()
    spec = cfg.spec()
    if spec is None:
        if measure is None:
            raise ConfigurationError("annealed needs --measure or --env")
        spec = EnvironmentSpec(measure)
    elif measure is not None:
        spec = EnvironmentSpec(measure, spec.per_site, spec.seed)
    seed = cfg.seed if cfg.seed is not None else (spec.seed if spec.seed is not None else 0)
    meta = {"method": method}
    if method == "exact":
        dist = annealed_exact(spec.measure_at(0), cfg.n, cfg.qubit)
        _emit(cfg, artifacts.emit_distribution(dist, cfg.fmt, meta))
    else:
        est = annealed_monte_carlo(spec, cfg.n, samples, seed, cfg.qubit)
        dist = est.mean
        rows = zip(dist.positions.tolist(), dist.mass.tolist(), est.stderr.tolist())
        _emit(cfg, _table(cfg, ("position", "probability", "stderr"), rows,
                          {"time": cfg.n, **meta, "samples": samples, "seed": seed}))
    _diag(f"total mass = {dist.total():.17g}; runtime {time.perf_counter() - t0:.3f}s")
    return 0


def cmd_converge(cfg: RunConfig, strict: bool) -> int:
    n_values = sorted(set(cfg.n or []))
    if not n_values:
        raise ConfigurationError("converge needs at least one --n value")
    t0 = time.perf_counter()
    env = cfg.environment(n_values[-1])
    report = convergence_report(env, n_values, cfg.qubit)
    _emit(cfg, artifacts.emit_convergence(report, cfg.fmt, {"omega0": env.phase(0)}))
    _diag(f"runtime {time.perf_counter() - t0:.3f}s")
    if strict and not report.ks_decreasing():
        _diag("KS distances are not strictly decreasing")
        return 1
    return 0


def cmd_verify(cfg: RunConfig, suites: Sequence[str]) -> int:
    results = run_suites(suites or None, cap=cfg.cap, seed=cfg.seed or 0)
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("ALL PASS" if ok else "FAILURES")
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwre", description="Quantum walks in one-dimensional random environments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, env=True, n=True, output=True):
        if n:
            p.add_argument("--n", type=int, required=True, help="number of steps")
        if env:
            p.add_argument("--omega0", type=parse_angle, help="origin phase; alone it means the constant environment")
            p.add_argument("--env", type=Path, help="environment spec file (JSON)")
            p.add_argument("--seed", type=int, help="sampling seed (overrides the file's seed)")
        p.add_argument("--qubit", type=parse_qubit, default=PHI_STAR, help="initial qubit re_L,im_L,re_R,im_R")
        if output:
            p.add_argument("--format", choices=("csv", "json"), default="csv")
            p.add_argument("--out", type=Path, help="output file (default: stdout)")

    p = sub.add_parser("evolve", help="state-vector distribution of X_n")
    common(p)
    p = sub.add_parser("paths", help="path-sum oracle distribution (small n)")
    common(p)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap on n")
    p = sub.add_parser("closed-form", help="PQRS coefficients of Ξ_n(l, m) from closed forms")
    common(p, n=False)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p = sub.add_parser("limit-density", help="sampled limit density")
    common(p, n=False)
    p.add_argument("--measure", type=parse_measure, help="annealed: law of the origin phase")
    p.add_argument("--points", type=int, default=1001)
    p = sub.add_parser("annealed", help="annealed distribution of X_n")
    common(p)
    p.add_argument("--measure", type=parse_measure, help="default site measure (overrides the file's)")
    p.add_argument("--method", choices=("exact", "mc"), default="exact")
    p.add_argument("--samples", type=int, default=10000)
    p = sub.add_parser("converge", help="KS distance and moments of X_n/n vs the limit law")
    common(p, n=False)
    p.add_argument("--n", type=int, nargs="+", required=True, help="one or more times")
    p.add_argument("--strict", action="store_true", help="fail unless KS distances decrease")
    p = sub.add_parser("verify", help="run the cross-check suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES), default=[])
    p.add_argument("--cap", type=int, default=12, help="max n for the path-sum suites")
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
        if args.command == "evolve":
            return cmd_evolve(cfg)
        if args.command == "paths":
            return cmd_paths(cfg)
        if args.command == "closed-form":
            return cmd_closed_form(cfg, args.l, args.m)
        if args.command == "limit-density":
            return cmd_limit_density(cfg, args.points, args.measure)
        if args.command == "annealed":
            if args.samples < 1:
                raise ConfigurationError("--samples must be positive")
            return cmd_annealed(cfg, args.method, args.samples, args.measure)
        if args.command == "converge":
            return cmd_converge(cfg, args.strict)
        if args.command == "verify":
            return cmd_verify(cfg, args.suite)
    except (QwreError, OSError) as exc:
        print(f"qwre: error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigurationError) else 1
    parser.error(f"unknown command {args.command!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
