"""Configuration of the two-ring junction: sizes, arc values, derived quantities.

Positions are numbered 1..n on the priority ring and n+1..n+m on the other
ring in every document and file format; internal storage is 0-based tuples.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from math import fsum

EV = "EV"
DS = "DS"
CONVENTIONS = (EV, DS)


class ConfigError(ValueError):
    """Malformed or structurally unusable configuration document."""


class InvalidConfig(ConfigError):
    """Constraint violations in an otherwise well-formed configuration."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class DensityOutOfRange(InvalidConfig):
    def __init__(self, density):
        super().__init__([f"density {density!r} outside [0, 1]"])


@dataclass(frozen=True)
class TrafficConfig:
    """Ring sizes n, m and the n+m arc values (vehicle counts per place)."""

    n: int
    m: int
    a: tuple[float, ...]
    convention: str = EV

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.m, int):
            raise TypeError("n and m must be integers")
        values = tuple(float(v) for v in self.a)
        if len(values) != self.n + self.m:
            raise ValueError(f"expected {self.n + self.m} arc values, got {len(values)}")
        if any(not math.isfinite(v) for v in values):
            raise ValueError("arc values must be finite")
        if self.convention not in CONVENTIONS:
            raise ValueError(f"convention must be one of {CONVENTIONS}, got {self.convention!r}")
        object.__setattr__(self, "a", values)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from a valid configuration.

    d is the vehicle density, r the priority-ring size ratio n/(n+m-1),
    rho = 1/(n+m-1). b_n/b_m sum the arcs strictly inside each ring and
    bbar_n/bbar_m their complements. d1 and d2 bound the saturation phase.
    """

    n: int
    m: int
    a: tuple[float, ...]
    abar: tuple[float, ...]
    d: float
    r: float
    rho: float
    b_n: float
    bbar_n: float
    b_m: float
    bbar_m: float
    d1: float
    d2: float

    @property
    def size(self) -> int:
        return self.n + self.m


def validate(config: TrafficConfig) -> list[str]:
    """Return every violated constraint (empty list means the config is valid)."""
    problems = []
    if config.n < 2:
        problems.append(f"n >= 2 required, got n={config.n}")
    if config.m < 2:
        problems.append(f"m >= 2 required, got m={config.m}")
    for i, value in enumerate(config.a, start=1):
        if not 0.0 <= value <= 1.0:
            problems.append(f"a_{i} = {value:g} outside [0, 1]")
    jn = config.a[config.n - 1]
    jm = config.a[config.n + config.m - 1]
    if jn + jm > 1.0:
        problems.append(f"a_n + a_{{n+m}} = {jn + jm:g} > 1")
    return problems


def derive(config: TrafficConfig) -> DerivedParams:
    """Compute all derived quantities; raises InvalidConfig on violations."""
    problems = validate(config)
    if problems:
        raise InvalidConfig(problems)
    n, m, a = config.n, config.m, config.a
    size = n + m
    ring_total = fsum((a[n - 1], a[size - 1]))
    abar = tuple(
        1.0 - ring_total if i in (n - 1, size - 1) else 1.0 - a[i] for i in range(size)
    )
    big = n + m - 1
    return DerivedParams(
        n=n,
        m=m,
        a=a,
        abar=abar,
        d=fsum(a) / big,
        r=n / big,
        rho=1.0 / big,
        b_n=fsum(a[: n - 1]),
        bbar_n=fsum(abar[: n - 1]),
        b_m=fsum(a[n : size - 1]),
        bbar_m=fsum(abar[n : size - 1]),
        d1=(n + m) / (4.0 * big),
        d2=(3 * n + m - 2) / (4.0 * big),
    )


def allocate(n: int, m: int, density: float, convention: str = EV) -> TrafficConfig:
    """Deterministic arc allocation achieving the requested density exactly.

    With s = density * (n+m-1): spread s uniformly while the per-arc share
    stays at or below 1/2; beyond that pin both junction arcs at 1/2 and
    spread the remainder over the other arcs. Both rules agree at the
    switch point, and the result is always a valid configuration.
    """
    if n < 2 or m < 2:
        raise InvalidConfig([f"n >= 2 and m >= 2 required, got n={n}, m={m}"])
    if not 0.0 <= density <= 1.0:
        raise DensityOutOfRange(density)
    size = n + m
    total = density * (n + m - 1)
    if total / size <= 0.5:
        values = [total / size] * size
    else:
        values = [(total - 1.0) / (size - 2)] * size
        values[n - 1] = values[size - 1] = 0.5
    return TrafficConfig(n, m, tuple(values), convention)


_CONFIG_FIELDS = {"n", "m", "a", "density", "convention"}


def _reject_constant(token):
    raise ConfigError(f"non-finite number {token!r} not accepted in config documents")


def parse_config(text: str) -> TrafficConfig:
    """Parse a JSON config document; see serialize_config for the inverse.

    Requires integer fields n and m plus exactly one of "a" (array of n+m
    numbers) or "density" (number in [0, 1]); optional "convention".
    """
    try:
        doc = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = sorted(set(doc) - _CONFIG_FIELDS)
    if unknown:
        raise ConfigError(f"unknown config fields: {', '.join(unknown)}")
    for field in ("n", "m"):
        if field not in doc:
            raise ConfigError(f"missing field {field!r}")
        if not isinstance(doc[field], int) or isinstance(doc[field], bool):
            raise ConfigError(f"field {field!r} must be an integer")
    if ("a" in doc) == ("density" in doc):
        raise ConfigError("exactly one of 'a' or 'density' is required")
    convention = doc.get("convention", EV)
    if convention not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {CONVENTIONS}, got {convention!r}")

    if "density" in doc:
        density = doc["density"]
        if not isinstance(density, (int, float)) or isinstance(density, bool):
            raise ConfigError("field 'density' must be a number")
        config = allocate(doc["n"], doc["m"], float(density), convention)
    else:
        arcs = doc["a"]
        if not isinstance(arcs, list) or any(
            not isinstance(v, (int, float)) or isinstance(v, bool) for v in arcs
        ):
            raise ConfigError("field 'a' must be an array of numbers")
        if len(arcs) != doc["n"] + doc["m"]:
            raise ConfigError(
                f"field 'a' must have n+m = {doc['n'] + doc['m']} entries, got {len(arcs)}"
            )
        try:
            config = TrafficConfig(doc["n"], doc["m"], tuple(float(v) for v in arcs), convention)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
    problems = validate(config)
    if problems:
        raise InvalidConfig(problems)
    return config


def serialize_config(config: TrafficConfig) -> str:
    """Serialize to the JSON document format accepted by parse_config."""
    doc = {"n": config.n, "m": config.m, "a": list(config.a), "convention": config.convention}
    return json.dumps(doc)
