"""Experiment configuration: flat sectioned key-value files with line-anchored
validation, plus the shipped experiment presets."""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .magnus import QuadraticHamiltonian
from .schemes import METHODS, NonlinearTerm
from .spectral import GridSpec, WaveFunction, gaussian_state, vortex_state

__all__ = [
    "ExperimentConfig",
    "ConfigMessage",
    "parse_config_text",
    "load_config",
    "resolve_config_path",
    "preset_names",
    "MODULATIONS",
    "INITIAL_STATES",
    "POTENTIALS",
]


# trap frequency presets: name -> (omega_x_sq(t; w0sq), omega_y_sq(t; w0sq))
MODULATIONS = {
    "constant": (lambda w0: (lambda t: w0), lambda w0: (lambda t: w0)),
    "sin_half_t": (lambda w0: (lambda t: w0 * (1.0 + np.sin(0.5 * t))),
                   lambda w0: (lambda t: w0 - np.sin(0.5 * t))),
}

INITIAL_STATES = {
    "vortex": vortex_state,
    "gaussian": gaussian_state,
}

POTENTIALS = {
    "none": None,
    "harmonic_half_x2": lambda x, y, t: 0.5 * x**2 + 0.0 * y,
}


@dataclass
class ConfigMessage:
    line: int
    message: str

    def render(self, path) -> str:
        return f"{path}:{self.line}: {self.message}"


@dataclass
class ExperimentConfig:
    """Validated experiment description."""

    L: float
    nx: int
    ny: int
    omega0_sq: float
    modulation: str
    rotation: float
    g: float
    lam: float
    potential: str
    t0: float
    final: float
    methods: list[str]
    steps: list[int]
    magnus_order: int = 4
    initial: str = "vortex"
    reference_method: str = "BM4-ROT"
    reference_multiplier: int = 16
    reference_snapshot: str = ""
    seed: int = 0
    csv: str = "results.csv"

    def make_grid(self) -> GridSpec:
        return GridSpec(L=self.L, nx=self.nx, ny=self.ny)

    def make_hamiltonian(self) -> QuadraticHamiltonian:
        wx, wy = MODULATIONS[self.modulation]
        return QuadraticHamiltonian(wx(self.omega0_sq), wy(self.omega0_sq),
                                    Omega=self.rotation, lam=self.lam)

    def make_term(self) -> NonlinearTerm:
        return NonlinearTerm(g=self.g, V=POTENTIALS[self.potential], lam=self.lam)

    def make_initial(self, grid: GridSpec) -> WaveFunction:
        return INITIAL_STATES[self.initial](grid)


_SCHEMA = {
    "grid": {"l": ("float", True), "nx": ("int", True), "ny": ("int", True)},
    "hamiltonian": {"omega0_sq": ("float", True), "modulation": ("str", False),
                    "rotation": ("float", True)},
    "nonlinearity": {"g": ("float", False), "lambda": ("float", False),
                     "potential": ("str", False)},
    "time": {"t0": ("float", False), "final": ("float", True)},
    "run": {"methods": ("strlist", True), "steps": ("intlist", True),
            "magnus_order": ("int", False), "initial": ("str", False),
            "reference_method": ("str", False), "reference_multiplier": ("int", False),
            "reference_snapshot": ("str", False), "seed": ("int", False)},
    "output": {"csv": ("str", False)},
}


def _convert(kind, raw, line, errors):
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            v = float(raw)
            if v != int(v):
                raise ValueError
            return int(v)
        if kind == "intlist":
            return [int(s) for s in raw.replace(",", " ").split()]
        if kind == "strlist":
            return [s for s in raw.replace(",", " ").split()]
        return raw
    except ValueError:
        errors.append(ConfigMessage(line, f"cannot parse {raw!r} as {kind}"))
        return None


def parse_config_text(text: str):
    """Parse and validate; returns (ExperimentConfig | None, [ConfigMessage])."""
    errors: list[ConfigMessage] = []
    values: dict[tuple[str, str], tuple[object, int]] = {}
    section = None
    for ln, rawline in enumerate(text.splitlines(), start=1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                errors.append(ConfigMessage(ln, f"malformed section header {rawline.strip()!r}"))
                continue
            section = line[1:-1].strip().lower()
            if section not in _SCHEMA:
                errors.append(ConfigMessage(
                    ln, f"unknown section [{section}]; known: {sorted(_SCHEMA)}"))
                section = None
            continue
        if "=" not in line:
            errors.append(ConfigMessage(ln, f"expected 'key = value', got {rawline.strip()!r}"))
            continue
        if section is None:
            errors.append(ConfigMessage(ln, "key outside any known section"))
            continue
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key not in _SCHEMA[section]:
            hint = difflib.get_close_matches(key, _SCHEMA[section], n=1, cutoff=0.5)
            extra = f"; did you mean {hint[0]!r}?" if hint else ""
            errors.append(ConfigMessage(ln, f"unknown key {key!r} in [{section}]{extra}"))
            continue
        kind, _required = _SCHEMA[section][key]
        val = _convert(kind, raw, ln, errors)
        if val is not None:
            values[(section, key)] = (val, ln)

    for section, keys in _SCHEMA.items():
        for key, (_kind, required) in keys.items():
            if required and (section, key) not in values:
                errors.append(ConfigMessage(0, f"missing required key {key!r} in [{section}]"))

    if errors:
        return None, errors

    def get(section, key, default=None):
        return values.get((section, key), (default, 0))[0]

    def lineof(section, key):
        return values.get((section, key), (None, 0))[1]

    cfg = ExperimentConfig(
        L=get("grid", "l"), nx=get("grid", "nx"), ny=get("grid", "ny"),
        omega0_sq=get("hamiltonian", "omega0_sq"),
        modulation=get("hamiltonian", "modulation", "constant"),
        rotation=get("hamiltonian", "rotation"),
        g=get("nonlinearity", "g", 0.0),
        lam=get("nonlinearity", "lambda", 0.0),
        potential=get("nonlinearity", "potential", "none"),
        t0=get("time", "t0", 0.0), final=get("time", "final"),
        methods=get("run", "methods"), steps=get("run", "steps"),
        magnus_order=get("run", "magnus_order", 4),
        initial=get("run", "initial", "vortex"),
        reference_method=get("run", "reference_method", "BM4-ROT"),
        reference_multiplier=get("run", "reference_multiplier", 16),
        reference_snapshot=get("run", "reference_snapshot", ""),
        seed=get("run", "seed", 0),
        csv=get("output", "csv", "results.csv"),
    )

    # semantic checks, anchored to the offending line where possible
    def bad(section, key, msg):
        errors.append(ConfigMessage(lineof(section, key) or 0, msg))

    if cfg.L <= 0:
        bad("grid", "l", f"half-width L must be positive, got {cfg.L}")
    for key, n in (("nx", cfg.nx), ("ny", cfg.ny)):
        if n < 4 or n % 2:
            bad("grid", key, f"{key} must be even and >= 4, got {n}")
    if cfg.modulation not in MODULATIONS:
        bad("hamiltonian", "modulation",
            f"unknown modulation {cfg.modulation!r}; known: {sorted(MODULATIONS)}")
    if cfg.potential not in POTENTIALS:
        bad("nonlinearity", "potential",
            f"unknown potential {cfg.potential!r}; known: {sorted(POTENTIALS)}")
    if cfg.lam < 0:
        bad("nonlinearity", "lambda", f"lambda must be >= 0, got {cfg.lam}")
    if cfg.final <= cfg.t0:
        bad("time", "final", f"final time {cfg.final} must exceed t0 {cfg.t0}")
    if cfg.initial not in INITIAL_STATES:
        bad("run", "initial",
            f"unknown initial condition {cfg.initial!r}; known: {sorted(INITIAL_STATES)}")
    if cfg.magnus_order not in (2, 4):
        bad("run", "magnus_order", f"magnus_order must be 2 or 4, got {cfg.magnus_order}")
    if not cfg.steps or any(b <= a for a, b in zip(cfg.steps, cfg.steps[1:])) \
            or any(n < 1 for n in cfg.steps):
        bad("run", "steps", f"steps must be strictly increasing positive integers, got {cfg.steps}")
    if cfg.reference_multiplier < 1:
        bad("run", "reference_multiplier", "reference_multiplier must be >= 1")
    for m in cfg.methods + ([cfg.reference_method] if not cfg.reference_snapshot else []):
        if m not in METHODS:
            hint = difflib.get_close_matches(m, METHODS, n=3)
            extra = f"; did you mean one of {hint}?" if hint else ""
            errors.append(ConfigMessage(
                lineof("run", "methods") or 0,
                f"unknown method {m!r} (known: {sorted(METHODS)}){extra}"))
    if cfg.lam > 0:
        for m in cfg.methods + [cfg.reference_method]:
            if m.startswith(("Y4", "BM4")):
                errors.append(ConfigMessage(
                    lineof("run", "methods") or 0,
                    f"method {m!r} uses negative substeps and cannot run with lambda > 0"))

    if errors:
        return None, errors
    return cfg, []


def load_config(path) -> ExperimentConfig:
    """Load and validate; raises ValueError with all messages on failure."""
    path = Path(path)
    cfg, errors = parse_config_text(path.read_text())
    if errors:
        raise ValueError("\n".join(e.render(path) for e in errors))
    return cfg


def preset_names() -> list[str]:
    root = resources.files("rotsplit").joinpath("presets")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".cfg"))


def resolve_config_path(name_or_path: str) -> Path:
    """Accept either a config file path or a shipped preset name."""
    p = Path(name_or_path)
    if p.exists():
        return p
    root = resources.files("rotsplit").joinpath("presets")
    candidate = root.joinpath(f"{name_or_path}.cfg")
    if candidate.is_file():
        return Path(str(candidate))
    raise FileNotFoundError(
        f"no config file {name_or_path!r} and no preset of that name "
        f"(presets: {preset_names()})")
