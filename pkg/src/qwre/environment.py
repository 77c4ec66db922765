"""
Environments (site phases) and product measures over them.

Sampling is reproducible per site: the random stream used at site ``x`` is
derived from ``(seed, x)`` only, so the phase drawn at one site never depends
on the measure placed at another site or on the sampling window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from .errors import ConfigurationError, InvalidArgumentError

__all__ = [
    "Environment",
    "PhaseMeasure",
    "EnvironmentSpec",
    "site_rng",
    "sample_environment",
    "sample_environments",
    "measure_mean_sin",
    "is_symmetric",
    "load_environment_spec",
    "dump_environment_spec",
    "environment_spec_from_dict",
    "environment_spec_to_dict",
]

_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Environment:
    """
    Assignment of a phase to every integer site.

    Parameters
    ----------
    phases:
        Explicitly stored phases, keyed by site.
    default_phase:
        Phase returned for sites not in ``phases``.
    """

    phases: Mapping[int, float] = field(default_factory=dict)
    default_phase: float = 0.0

    def __post_init__(self):
        clean = {}
        for x, w in dict(self.phases).items():
            w = float(w)
            if not math.isfinite(w):
                raise InvalidArgumentError(f"phase at site {x} is not finite")
            clean[int(x)] = w
        if not math.isfinite(float(self.default_phase)):
            raise InvalidArgumentError("default phase is not finite")
        object.__setattr__(self, "phases", MappingProxyType(clean))
        object.__setattr__(self, "default_phase", float(self.default_phase))

    @classmethod
    def constant(cls, omega: float) -> "Environment":
        return cls({}, omega)

    @classmethod
    def from_window(cls, lo: int, values: Sequence[float], default_phase: float = 0.0) -> "Environment":
        """Environment with ``values[k]`` at site ``lo + k``."""
        return cls({lo + k: v for k, v in enumerate(values)}, default_phase)

    def phase(self, x: int) -> float:
        return self.phases.get(x, self.default_phase)

    def __getitem__(self, x: int) -> float:
        return self.phase(x)

    def phase_array(self, sites: Iterable[int]) -> NDArray[np.float64]:
        get = self.phases.get
        d = self.default_phase
        return np.fromiter((get(int(x), d) for x in sites), dtype=np.float64)

    def window(self, extent: int) -> NDArray[np.float64]:
        """Phases at sites -extent..extent."""
        return self.phase_array(range(-extent, extent + 1))

    def with_phase(self, x: int, omega: float) -> "Environment":
        new = dict(self.phases)
        new[int(x)] = omega
        return Environment(new, self.default_phase)


@dataclass(frozen=True)
class PhaseMeasure:
    """
    A probability law for a single site phase.

    Use the constructors :meth:`delta`, :meth:`uniform`, :meth:`two_point`
    and :meth:`discrete`; they validate their parameters.
    """

    kind: str
    params: tuple = ()

    @classmethod
    def delta(cls, value: float) -> "PhaseMeasure":
        value = _finite(value, "delta value")
        return cls("delta", (value,))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "PhaseMeasure":
        lo, hi = _finite(lo, "uniform lo"), _finite(hi, "uniform hi")
        if lo > hi:
            raise ConfigurationError(f"uniform measure needs lo <= hi, got ({lo}, {hi})")
        return cls("uniform", (lo, hi))

    @classmethod
    def two_point(cls, theta: float) -> "PhaseMeasure":
        """Mass 1/2 at each of -theta and +theta."""
        return cls("two_point", (_finite(theta, "two_point theta"),))

    @classmethod
    def discrete(cls, values: Sequence[float], weights: Sequence[float]) -> "PhaseMeasure":
        values = tuple(_finite(v, "discrete value") for v in values)
        weights = tuple(float(w) for w in weights)
        if not values or len(values) != len(weights):
            raise ConfigurationError("discrete measure needs equally many values and weights (at least one)")
        if any(not math.isfinite(w) or w < 0 for w in weights):
            raise ConfigurationError("discrete weights must be finite and nonnegative")
        if abs(math.fsum(weights) - 1.0) > _WEIGHT_TOL:
            raise ConfigurationError(f"discrete weights sum to {math.fsum(weights)!r}, not 1")
        return cls("discrete", (values, weights))

    def atoms(self) -> Optional[list[tuple[float, float]]]:
        """(value, weight) pairs for atomic measures, None for uniform (non-degenerate)."""
        if self.kind == "delta":
            return [(self.params[0], 1.0)]
        if self.kind == "two_point":
            t = self.params[0]
            return [(-t, 0.5), (t, 0.5)]
        if self.kind == "discrete":
            return list(zip(*self.params))
        lo, hi = self.params
        if lo == hi:
            return [(lo, 1.0)]
        return None

    def sample(self, rng: np.random.Generator, size: int) -> NDArray[np.float64]:
        """Draw ``size`` phases. Draw k is the same whatever ``size`` is (prefix-stable)."""
        if self.kind == "delta":
            return np.full(size, self.params[0])
        u = rng.random(size)
        if self.kind == "uniform":
            lo, hi = self.params
            return lo + (hi - lo) * u
        if self.kind == "two_point":
            t = self.params[0]
            return np.where(u < 0.5, -t, t)
        if self.kind == "discrete":
            values, weights = self.params
            cdf = np.cumsum(weights)
            idx = np.searchsorted(cdf, u, side="right")
            return np.asarray(values)[np.minimum(idx, len(values) - 1)]
        raise ConfigurationError(f"unknown measure kind {self.kind!r}")

    def mean_sin(self) -> float:
        return measure_mean_sin(self)

    def is_symmetric(self) -> bool:
        return is_symmetric(self)


@dataclass(frozen=True)
class EnvironmentSpec:
    """Product measure: independent per-site laws with a default for unlisted sites."""

    default_measure: PhaseMeasure
    per_site: Mapping[int, PhaseMeasure] = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "per_site", MappingProxyType({int(k): v for k, v in dict(self.per_site).items()}))

    def measure_at(self, x: int) -> PhaseMeasure:
        return self.per_site.get(x, self.default_measure)


def _finite(v: Any, what: str) -> float:
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ConfigurationError(f"{what} must be a real number, got {v!r}") from None
    if not math.isfinite(v):
        raise ConfigurationError(f"{what} must be finite, got {v!r}")
    return v


def _zigzag(x: int) -> int:
    return 2 * x if x >= 0 else -2 * x - 1


def site_rng(seed: int, x: int) -> np.random.Generator:
    """Independent generator for site ``x`` under master ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(_zigzag(int(x)),))
    return np.random.Generator(np.random.PCG64(ss))


def sample_environment(spec: EnvironmentSpec, extent: int, seed: int) -> Environment:
    """
    Sample one environment on sites -extent..extent.

    Sites outside the window get the default measure's point value when it is
    a delta measure and 0 otherwise; an ``extent``-step walk never reads them.
    """
    if extent < 0:
        raise InvalidArgumentError(f"extent must be nonnegative, got {extent}")
    rows = sample_environments(spec, extent, 1, seed)
    default = spec.default_measure.params[0] if spec.default_measure.kind == "delta" else 0.0
    return Environment.from_window(-extent, rows[0], default)


def sample_environments(spec: EnvironmentSpec, extent: int, n_samples: int, seed: int) -> NDArray[np.float64]:
    """
    Sample ``n_samples`` environments at once.

    Returns an array of shape (n_samples, 2*extent + 1); column j holds site
    ``j - extent``. Row 0 equals :func:`sample_environment` with the same seed.
    """
    if extent < 0:
        raise InvalidArgumentError(f"extent must be nonnegative, got {extent}")
    if n_samples < 1:
        raise InvalidArgumentError(f"n_samples must be positive, got {n_samples}")
    out = np.empty((n_samples, 2 * extent + 1))
    for j, x in enumerate(range(-extent, extent + 1)):
        out[:, j] = spec.measure_at(x).sample(site_rng(seed, x), n_samples)
    return out


def measure_mean_sin(measure: PhaseMeasure) -> float:
    """Exact expectation of sin(ω) under ``measure``."""
    atoms = measure.atoms()
    if atoms is not None:
        return math.fsum(w * math.sin(v) for v, w in atoms)
    lo, hi = measure.params
    return (math.cos(lo) - math.cos(hi)) / (hi - lo)


def is_symmetric(measure: PhaseMeasure) -> bool:
    """True iff the law is invariant under ω -> -ω."""
    if measure.kind == "uniform":
        lo, hi = measure.params
        return lo == -hi
    atoms = measure.atoms()
    mass: dict[float, float] = {}
    for v, w in atoms:
        if w > 0:
            mass[v] = mass.get(v, 0.0) + w
    for v, w in mass.items():
        if abs(mass.get(-v, 0.0) - w) > _WEIGHT_TOL:
            return False
    return True


# -- serialization ------------------------------------------------------------

def _measure_to_dict(m: PhaseMeasure) -> dict:
    if m.kind == "delta":
        return {"kind": "delta", "value": m.params[0]}
    if m.kind == "uniform":
        return {"kind": "uniform", "lo": m.params[0], "hi": m.params[1]}
    if m.kind == "two_point":
        return {"kind": "two_point", "theta": m.params[0]}
    return {"kind": "discrete", "values": list(m.params[0]), "weights": list(m.params[1])}


def measure_from_dict(obj: Any) -> PhaseMeasure:
    """Parse a measure object; a bare number is a fixed phase (delta measure)."""
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return PhaseMeasure.delta(obj)
    if not isinstance(obj, Mapping) or "kind" not in obj:
        raise ConfigurationError(f"measure must be a number or an object with 'kind', got {obj!r}")
    kind = obj["kind"]
    try:
        if kind == "delta":
            return PhaseMeasure.delta(obj["value"])
        if kind == "uniform":
            return PhaseMeasure.uniform(obj["lo"], obj["hi"])
        if kind == "two_point":
            return PhaseMeasure.two_point(obj["theta"])
        if kind == "discrete":
            return PhaseMeasure.discrete(obj["values"], obj["weights"])
    except KeyError as exc:
        raise ConfigurationError(f"{kind} measure is missing field {exc}") from None
    raise ConfigurationError(f"unknown measure kind {kind!r}")


def environment_spec_from_dict(obj: Mapping) -> EnvironmentSpec:
    if "default_measure" not in obj:
        raise ConfigurationError("environment spec needs a 'default_measure'")
    sites = {}
    for key, val in (obj.get("sites") or {}).items():
        try:
            x = int(key)
        except ValueError:
            raise ConfigurationError(f"site key {key!r} is not an integer") from None
        sites[x] = measure_from_dict(val)
    seed = obj.get("seed")
    if seed is not None and (not isinstance(seed, int) or isinstance(seed, bool) or seed < 0):
        raise ConfigurationError(f"seed must be a nonnegative integer, got {seed!r}")
    return EnvironmentSpec(measure_from_dict(obj["default_measure"]), sites, seed)


def environment_spec_to_dict(spec: EnvironmentSpec) -> dict:
    out: dict[str, Any] = {"default_measure": _measure_to_dict(spec.default_measure)}
    if spec.per_site:
        out["sites"] = {str(x): _measure_to_dict(m) for x, m in sorted(spec.per_site.items())}
    if spec.seed is not None:
        out["seed"] = spec.seed
    return out


def load_environment_spec(path: str | Path) -> EnvironmentSpec:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    return environment_spec_from_dict(obj)


def dump_environment_spec(spec: EnvironmentSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(environment_spec_to_dict(spec), indent=2) + "\n")
