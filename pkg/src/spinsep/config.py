"""Flat ``key = value`` run configuration for the command-line front end.

Recognized keys (``#`` starts a comment; keys are case-insensitive)::

    N                 spin count, 2..14                       (required)
    omega             Zeeman frequency                         (required)
    a                 uniform pair coupling                    default 1.0
    a_i_j             coupling of pair (i, j), overrides ``a``
    include_P         keep the double-quantum term            default true
    initial           1-based basis index of the start state  } exactly one
    amplitudes        comma-separated complex amplitudes       } of these
    dt, t_end         RK4 step and horizon                    default 1e-3, 1000
    record_stride     keep every k-th step                    default 10
    abort_threshold   allowed |norm - 1| before aborting       default 1e-6
    t_start           start of the averaging window           default 0
    command           evolve | separability | jumps | oracle   default evolve
    out               output directory                        default spinsep_out
    seed              RNG seed for jump trajectories           default 0
    ceiling           max |C_k|^2 counted as "reached"         default 0.99
    class_tolerance   diagonal-energy tolerance for classes    default 1e-9*||H||
    stochastic        also run random-jump trajectories        default false
    rate              jump rate per unit time                  default 0.01
    n_trajectories    random-jump ensemble size                default 16
    export_amplitudes write the full C(t) trajectory CSV       default false
    dump_hamiltonian  write nonzero H entries                  default false
    workers           threads for ensemble members             default 1

Amplitude lists must be normalized to within 1e-9; accepted lists are
rescaled to unit norm before integration.
"""
from __future__ import annotations

import dataclasses
import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .basis import MAX_SPINS
from .dynamics import IntegratorConfig
from .errors import ConfigError
from .hamiltonian import SpinSystem
from .jumps import JumpConfig

COMMANDS = ("evolve", "separability", "jumps", "oracle")
_PAIR_KEY = re.compile(r"^a_(\d+)_(\d+)$")


@dataclass
class RunConfig:
    n: int
    omega: float
    a: float = 1.0
    pair_couplings: dict = field(default_factory=dict)
    include_p: bool = True
    initial: int | None = None
    amplitudes: tuple | None = None
    dt: float = 1e-3
    t_end: float = 1000.0
    record_stride: int = 10
    abort_threshold: float = 1e-6
    t_start: float = 0.0
    command: str = "evolve"
    out: str = "spinsep_out"
    seed: int = 0
    ceiling: float = 0.99
    class_tolerance: float | None = None
    stochastic: bool = False
    rate: float = 0.01
    n_trajectories: int = 16
    export_amplitudes: bool = False
    dump_hamiltonian: bool = False
    workers: int = 1

    def __post_init__(self):
        if not 2 <= self.n <= MAX_SPINS:
            raise ConfigError(f"N must be in [2, {MAX_SPINS}], got {self.n}")
        if (self.initial is None) == (self.amplitudes is None):
            raise ConfigError("give exactly one of 'initial' or 'amplitudes'")
        dim = 1 << self.n
        if self.initial is not None and not 1 <= self.initial <= dim:
            raise ConfigError(f"initial = {self.initial} out of range 1..{dim}")
        if self.amplitudes is not None:
            if len(self.amplitudes) != dim:
                raise ConfigError(f"expected {dim} amplitudes, got {len(self.amplitudes)}")
            norm = sum(abs(c) ** 2 for c in self.amplitudes)
            if abs(norm - 1.0) > 1e-9:
                raise ConfigError(f"amplitudes are not normalized (norm = {norm:.12g})")
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; choose from {COMMANDS}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not 0 < self.ceiling <= 1:
            raise ConfigError("ceiling must be in (0, 1]")
        # construct once so range errors surface as ConfigError here
        try:
            self.system()
            self.integrator()
            self.jump_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def system(self) -> SpinSystem:
        couplings = {p: self.a for p in itertools.combinations(range(1, self.n + 1), 2)}
        for (i, j), val in self.pair_couplings.items():
            if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
                raise ConfigError(f"coupling a_{i}_{j} does not name a pair of {self.n} spins")
            couplings[(min(i, j), max(i, j))] = val
        return SpinSystem(self.n, self.omega, couplings, self.include_p)

    def integrator(self) -> IntegratorConfig:
        return IntegratorConfig(self.dt, self.t_end, self.record_stride, self.abort_threshold)

    def jump_config(self) -> JumpConfig:
        return JumpConfig(self.rate, self.seed, self.n_trajectories, self.class_tolerance)

    def initial_vector(self) -> np.ndarray:
        dim = 1 << self.n
        if self.initial is not None:
            v = np.zeros(dim, dtype=np.complex128)
            v[self.initial - 1] = 1.0
            return v
        v = np.array(self.amplitudes, dtype=np.complex128)
        return v / np.sqrt(np.vdot(v, v).real)

    def resolved_lines(self) -> list[str]:
        """Every setting, including defaults, as ``key = value`` lines."""
        out = []
        for f in dataclasses.fields(self):
            val = getattr(self, f.name)
            if f.name == "pair_couplings":
                out += [f"a_{i}_{j} = {v!r}" for (i, j), v in sorted(val.items())]
                continue
            if f.name == "amplitudes" and val is not None:
                val = ", ".join(repr(c) for c in val)
            key = {"n": "N", "include_p": "include_P"}.get(f.name, f.name)
            out.append(f"{key} = {'default' if val is None else val}")
        return out


def _bool(text: str) -> bool:
    t = text.lower()
    if t in ("true", "yes", "on", "1"):
        return True
    if t in ("false", "no", "off", "0"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ConfigError(f"not an integer: {text!r}") from None


def _float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"not a number: {text!r}") from None


def _complex_list(text: str) -> tuple:
    try:
        return tuple(complex(tok.replace(" ", "")) for tok in text.split(","))
    except ValueError:
        raise ConfigError(f"cannot parse amplitude list {text!r}") from None


_PARSERS = {
    "n": ("n", _int), "omega": ("omega", _float), "a": ("a", _float),
    "include_p": ("include_p", _bool), "initial": ("initial", _int),
    "amplitudes": ("amplitudes", _complex_list), "dt": ("dt", _float),
    "t_end": ("t_end", _float), "record_stride": ("record_stride", _int),
    "abort_threshold": ("abort_threshold", _float), "t_start": ("t_start", _float),
    "command": ("command", str), "out": ("out", str), "seed": ("seed", _int),
    "ceiling": ("ceiling", _float), "class_tolerance": ("class_tolerance", _float),
    "stochastic": ("stochastic", _bool), "rate": ("rate", _float),
    "n_trajectories": ("n_trajectories", _int),
    "export_amplitudes": ("export_amplitudes", _bool),
    "dump_hamiltonian": ("dump_hamiltonian", _bool), "workers": ("workers", _int),
}


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse config text; ``overrides`` (already typed) win over file values."""
    values: dict = {}
    pairs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if not val:
            raise ConfigError(f"line {lineno}: empty value for {key!r}")
        m = _PAIR_KEY.match(key)
        if m:
            pair = (int(m.group(1)), int(m.group(2)))
            if pair in pairs:
                raise ConfigError(f"line {lineno}: duplicate key {key!r}")
            pairs[pair] = _float(val)
            continue
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        name, conv = _PARSERS[key]
        if name in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[name] = conv(val)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    for required in ("n", "omega"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    if values.get("seed", 0) < 0 or values.get("seed", 0) >= 2 ** 64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    try:
        return RunConfig(pair_couplings=pairs, **values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path, overrides: dict | None = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(text, overrides)
