"""Scenario files: a small line-oriented config format and its round-trip.

Syntax: ``[section]`` headers, ``key = value`` pairs, ``#`` comments, commas
for lists.  Unknown sections or keys are parse errors that name the line, so
typos cannot silently fall back to defaults.  ``parse_scenario`` and
``serialize_scenario`` round-trip exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError

KINDS = ("scaling_sweep", "intro_example", "bounds_table", "periodic_correction", "bound_check")
CODES = ("identity", "repetition-3", "repetition-5", "five_qubit")
_AXIS_LETTERS = {"x": 1, "y": 2, "z": 3}
_AXIS_NAMES = {1: "x", 2: "y", 3: "z"}


@dataclass(frozen=True)
class TimeGrid:
    start: float = 5e-4
    end: float = 8e-3
    points: int = 14
    spacing: str = "log"

    def __post_init__(self):
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.points < 1:
            raise ConfigError("time grid needs at least one point")
        if not self.start < self.end:
            raise ConfigError("time grid start must lie before end")
        if self.spacing == "log" and self.start <= 0:
            raise ConfigError("log spacing needs a positive start time")

    def times(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.start, self.end, self.points)
        return np.linspace(self.start, self.end, self.points)


@dataclass(frozen=True)
class Scenario:
    """Fully materialized scenario; every field has a value after parsing."""

    kind: str
    code: str = "five_qubit"
    seed: int = 42
    out: str = "out"
    plots: bool = True
    max_dim: int = 4096
    env_dim: int = 2
    coupling_bound: float = 1.0
    beta: float = 0.0
    interaction_kind: str = "non_contact"
    contact_terms: tuple[tuple[float, tuple[tuple[int, int], ...]], ...] = ()
    time_grid: TimeGrid = TimeGrid()
    n_theta: int = 12
    n_phi: int = 12
    state_theta: float = 1.2
    state_phi: float = 0.5
    single_flip_omegas: tuple[float, ...] = (0.9, 1.1, 0.75, 1.3, 0.85)
    pair_flip: tuple[tuple[int, int, float], ...] = (
        (1, 2, 0.8),
        (1, 3, 0.7),
        (2, 3, 0.65),
        (3, 4, 1.05),
        (4, 5, 0.95),
    )
    dt: float = 0.12
    cycles: int = 40
    halvings: int = 2
    n_min: int = 1
    n_max: int = 20
    k_min: int = 0
    k_max: int = 3

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}; known: {KINDS}")
        if self.code not in CODES:
            raise ConfigError(f"unknown code {self.code!r}; known: {CODES}")
        if self.interaction_kind not in ("non_contact", "contact"):
            raise ConfigError(f"interaction kind must be non_contact or contact, got {self.interaction_kind!r}")
        if self.env_dim < 1:
            raise ConfigError("environment dimension must be at least 1")
        if self.max_dim < 2:
            raise ConfigError("dimension cap must allow at least one qubit")


def _parse_bool(raw: str, where: str) -> bool:
    if raw == "true":
        return True
    if raw == "false":
        return False
    raise ConfigError(f"{where}: expected true or false, got {raw!r}")


def _parse_int(raw: str, where: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected an integer, got {raw!r}") from None


def _parse_float(raw: str, where: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{where}: expected a number, got {raw!r}") from None


def _parse_float_list(raw: str, where: str) -> tuple[float, ...]:
    if not raw.strip():
        return ()
    return tuple(_parse_float(item.strip(), where) for item in raw.split(","))


def _parse_pairs(raw: str, where: str) -> tuple[tuple[int, int, float], ...]:
    """Comma list of ``k-l:omega`` items, 1-based qubit positions."""
    items = []
    if raw.strip():
        for chunk in raw.split(","):
            chunk = chunk.strip()
            try:
                pair_part, omega_part = chunk.split(":")
                k_part, l_part = pair_part.split("-")
                items.append((int(k_part), int(l_part), float(omega_part)))
            except ValueError:
                raise ConfigError(f"{where}: expected items like '1-2:0.8', got {chunk!r}") from None
    return tuple(sorted(items))


def _parse_contact_terms(raw: str, where: str) -> tuple[tuple[float, tuple[tuple[int, int], ...]], ...]:
    """Comma list of ``omega:x1 y3`` items: coefficient, then axis+position letters."""
    terms = []
    if raw.strip():
        for chunk in raw.split(","):
            chunk = chunk.strip()
            try:
                omega_part, ops_part = chunk.split(":")
                omega = float(omega_part)
            except ValueError:
                raise ConfigError(f"{where}: expected items like '0.9:x1 x2', got {chunk!r}") from None
            factors = []
            for op in ops_part.split():
                if len(op) < 2 or op[0] not in _AXIS_LETTERS:
                    raise ConfigError(f"{where}: factor {op!r} must be an axis letter plus a position")
                factors.append((_AXIS_LETTERS[op[0]], _parse_int(op[1:], where)))
            if not factors:
                raise ConfigError(f"{where}: term {chunk!r} has no Pauli factors")
            terms.append((omega, tuple(factors)))
    return tuple(terms)


# section -> key -> (scenario field, parser tag)
_SCHEMA = {
    "scenario": {
        "kind": ("kind", "str"),
        "code": ("code", "str"),
        "seed": ("seed", "int"),
        "out": ("out", "str"),
        "plots": ("plots", "bool"),
        "max_dim": ("max_dim", "int"),
    },
    "environment": {
        "d_e": ("env_dim", "int"),
        "coupling_bound": ("coupling_bound", "float"),
        "beta": ("beta", "float"),
    },
    "interaction": {
        "kind": ("interaction_kind", "str"),
        "terms": ("contact_terms", "contact"),
    },
    "time_grid": {
        "start": ("_tg_start", "float"),
        "end": ("_tg_end", "float"),
        "points": ("_tg_points", "int"),
        "spacing": ("_tg_spacing", "str"),
    },
    "state_grid": {
        "n_theta": ("n_theta", "int"),
        "n_phi": ("n_phi", "int"),
    },
    "state": {
        "theta": ("state_theta", "float"),
        "phi": ("state_phi", "float"),
    },
    "single_flip": {
        "omegas": ("single_flip_omegas", "floats"),
    },
    "pair_flip": {
        "pairs": ("pair_flip", "pairs"),
    },
    "correction": {
        "dt": ("dt", "float"),
        "cycles": ("cycles", "int"),
        "halvings": ("halvings", "int"),
    },
    "bounds": {
        "n_min": ("n_min", "int"),
        "n_max": ("n_max", "int"),
        "k_min": ("k_min", "int"),
        "k_max": ("k_max", "int"),
    },
}

_PARSERS = {
    "str": lambda raw, where: raw,
    "int": _parse_int,
    "float": _parse_float,
    "bool": _parse_bool,
    "floats": _parse_float_list,
    "pairs": _parse_pairs,
    "contact": _parse_contact_terms,
}


def parse_scenario(text: str) -> Scenario:
    """Parse a scenario document; every unknown name is an error with its line."""
    section = None
    fields: dict[str, object] = {}
    grid_overrides: dict[str, object] = {}
    for lineno, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if section not in _SCHEMA:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {rawline.strip()!r}")
        if section is None:
            raise ConfigError(f"line {lineno}: key outside any section")
        key, raw_value = (part.strip() for part in line.split("=", 1))
        if key not in _SCHEMA[section]:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{section}]")
        field_name, tag = _SCHEMA[section][key]
        value = _PARSERS[tag](raw_value, f"line {lineno}, key {key!r}")
        if field_name.startswith("_tg_"):
            grid_overrides[field_name[4:]] = value
        else:
            fields[field_name] = value
    if "kind" not in fields:
        raise ConfigError("scenario file does not set 'kind' in section [scenario]")
    try:
        if grid_overrides:
            fields["time_grid"] = replace(TimeGrid(), **grid_overrides)
        return Scenario(**fields)
    except ConfigError:
        raise
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def serialize_scenario(s: Scenario) -> str:
    """Canonical full-form document; ``parse_scenario`` inverts it exactly."""
    omegas = ", ".join(repr(w) for w in s.single_flip_omegas)
    pairs = ", ".join(f"{k}-{l}:{w!r}" for k, l, w in s.pair_flip)
    terms = ", ".join(
        f"{omega!r}:" + " ".join(f"{_AXIS_NAMES[axis]}{pos}" for axis, pos in factors)
        for omega, factors in s.contact_terms
    )
    lines = [
        "[scenario]",
        f"kind = {s.kind}",
        f"code = {s.code}",
        f"seed = {s.seed}",
        f"out = {s.out}",
        f"plots = {'true' if s.plots else 'false'}",
        f"max_dim = {s.max_dim}",
        "",
        "[environment]",
        f"d_e = {s.env_dim}",
        f"coupling_bound = {s.coupling_bound!r}",
        f"beta = {s.beta!r}",
        "",
        "[interaction]",
        f"kind = {s.interaction_kind}",
        f"terms = {terms}",
        "",
        "[time_grid]",
        f"start = {s.time_grid.start!r}",
        f"end = {s.time_grid.end!r}",
        f"points = {s.time_grid.points}",
        f"spacing = {s.time_grid.spacing}",
        "",
        "[state_grid]",
        f"n_theta = {s.n_theta}",
        f"n_phi = {s.n_phi}",
        "",
        "[state]",
        f"theta = {s.state_theta!r}",
        f"phi = {s.state_phi!r}",
        "",
        "[single_flip]",
        f"omegas = {omegas}",
        "",
        "[pair_flip]",
        f"pairs = {pairs}",
        "",
        "[correction]",
        f"dt = {s.dt!r}",
        f"cycles = {s.cycles}",
        f"halvings = {s.halvings}",
        "",
        "[bounds]",
        f"n_min = {s.n_min}",
        f"n_max = {s.n_max}",
        f"k_min = {s.k_min}",
        f"k_max = {s.k_max}",
    ]
    return "\n".join(lines) + "\n"


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
