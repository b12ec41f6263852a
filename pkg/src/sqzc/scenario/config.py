"""JSON scenario documents.

A scenario names the circuit, the Fock truncation, up to two swept
parameters, solver settings, output location and the task to run.  Unknown
keys anywhere in the document are rejected.

If ``circuit`` carries ``kappa2_mhz``, every rate and frequency in the
circuit block (and in variant overrides) is read in MHz and divided by it,
so that stored configs are always in units of ``kappa2``.
"""
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace

from ..effective import CircuitParams
from ..errors import ConfigError
from ..fock.operators import VARIANTS, HilbertConfig
from ..fock.steady import METHODS

__all__ = [
    "SweepAxis",
    "SolverConfig",
    "OutputConfig",
    "WignerSpec",
    "Variant",
    "ScenarioConfig",
    "SWEEP_VARIABLES",
    "TASKS",
    "TIERS",
    "parse_config",
    "load_config",
    "dump_config",
    "config_to_dict",
]

TIERS = ("gaussian", "fock", "both")
TASKS = ("sweep", "wigner", "number_distribution")
FORMATS = ("csv", "svg")
_CIRCUIT_FIELDS = tuple(f.name for f in fields(CircuitParams))
#: circuit entries with dimensions of frequency, scaled by kappa2_mhz
_RATE_FIELDS = ("kappa1", "kappa2", "eps1_mag", "g", "delta_q", "delta12")
#: aliases accepted as sweep variables
_ALIASES = {"eps1": "eps1_mag"}
SWEEP_VARIABLES = _CIRCUIT_FIELDS + tuple(_ALIASES) + ("delta_tilde",)


@dataclass(frozen=True)
class SweepAxis:
    variable: str
    start: float
    stop: float
    points: int = 1

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.variable!r}; "
                              f"choose from {', '.join(SWEEP_VARIABLES)}")
        if self.variable == "sigma_z":
            raise ConfigError("sigma_z cannot be swept")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError(f"sweep range of {self.variable} must be finite")
        if int(self.points) != self.points or self.points < 1:
            raise ConfigError(f"sweep points for {self.variable} must be a positive integer")

    @property
    def parameter(self):
        return _ALIASES.get(self.variable, self.variable)

    def values(self):
        if self.points == 1:
            return [float(self.start)]
        step = (self.stop - self.start) / (self.points - 1)
        return [float(self.start + i * step) for i in range(self.points)]


@dataclass(frozen=True)
class SolverConfig:
    tier: str = "gaussian"
    method: str = "auto"
    tolerance: float = 1e-10
    fock_tolerance: float = 1e-8
    damping: float = 0.5
    max_iter: int = 500
    optimize_detuning: bool = False
    fock_refine: bool = False
    window: tuple = None

    def __post_init__(self):
        if self.tier not in TIERS:
            raise ConfigError(f"solver.tier must be one of {TIERS}, not {self.tier!r}")
        if self.method not in METHODS:
            raise ConfigError(f"solver.method must be one of {METHODS}, not {self.method!r}")
        for name in ("tolerance", "fock_tolerance"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"solver.{name} must be a positive number")
        if not 0 < self.damping <= 1:
            raise ConfigError("solver.damping must lie in (0, 1]")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ConfigError("solver.max_iter must be a positive integer")
        if self.window is not None:
            w = tuple(float(x) for x in self.window)
            if len(w) != 2 or not all(map(math.isfinite, w)) or w[0] >= w[1]:
                raise ConfigError("solver.window must be [lo, hi] with lo < hi")
            object.__setattr__(self, "window", w)


@dataclass(frozen=True)
class OutputConfig:
    path: str = "out"
    formats: tuple = ("csv",)

    def __post_init__(self):
        fmts = tuple(self.formats)
        bad = [f for f in fmts if f not in FORMATS]
        if bad:
            raise ConfigError(f"unknown output formats {bad}; choose from {FORMATS}")
        object.__setattr__(self, "formats", fmts)


@dataclass(frozen=True)
class WignerSpec:
    xmax: float = 4.0
    points: int = 201

    def __post_init__(self):
        if not (math.isfinite(self.xmax) and self.xmax > 0):
            raise ConfigError("wigner.xmax must be positive")
        if int(self.points) != self.points or self.points < 2:
            raise ConfigError("wigner.points must be an integer >= 2")


@dataclass(frozen=True)
class Variant:
    """A labelled modification of the base circuit (one curve or panel)."""

    label: str
    circuit: dict = field(default_factory=dict)
    include_qubit: bool = None
    hamiltonian: str = "full"

    def __post_init__(self):
        bad = set(self.circuit) - set(_CIRCUIT_FIELDS)
        if bad:
            raise ConfigError(f"variant {self.label!r}: unknown circuit keys {sorted(bad)}")
        if self.hamiltonian not in VARIANTS:
            raise ConfigError(f"variant {self.label!r}: hamiltonian must be one of {VARIANTS}")
        object.__setattr__(self, "circuit", dict(sorted(self.circuit.items())))


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "scenario"
    circuit: CircuitParams = field(default_factory=CircuitParams)
    truncation: HilbertConfig = field(default_factory=HilbertConfig)
    sweep: tuple = ()
    solver: SolverConfig = field(default_factory=SolverConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    task: str = "sweep"
    wigner: WignerSpec = field(default_factory=WignerSpec)
    variants: tuple = ()

    def __post_init__(self):
        if self.task not in TASKS:
            raise ConfigError(f"task must be one of {TASKS}, not {self.task!r}")
        if len(self.sweep) > 2:
            raise ConfigError("at most two sweep variables are supported")
        names = [ax.parameter for ax in self.sweep]
        if len(set(names)) != len(names):
            raise ConfigError("sweep variables must be distinct")
        if "delta_tilde" in names and "delta12" in names:
            raise ConfigError("delta_tilde and delta12 cannot be swept together")
        if "delta_tilde" in names and self.solver.tier != "gaussian":
            raise ConfigError("delta_tilde sweeps are only defined for the gaussian tier")
        if self.solver.optimize_detuning and ({"delta12", "delta_tilde"} & set(names)):
            raise ConfigError("optimize_detuning conflicts with a detuning sweep")
        labels = [v.label for v in self.variants]
        if len(set(labels)) != len(labels):
            raise ConfigError("variant labels must be unique")
        for v in self.variants:
            self.variant_circuit(v)

    def variant_list(self):
        return self.variants or (Variant("base"),)

    def variant_circuit(self, variant):
        try:
            return self.circuit.replace(**variant.circuit)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"variant {variant.label!r}: {exc}") from None

    def variant_truncation(self, variant):
        if variant.include_qubit is None:
            return self.truncation
        return HilbertConfig(self.truncation.n1, self.truncation.n2, variant.include_qubit)


_SECTIONS = {
    "name", "circuit", "truncation", "sweep", "solver", "output", "task", "wigner", "variants",
}


def _check_keys(block, allowed, where):
    if not isinstance(block, dict):
        raise ConfigError(f"{where} must be a JSON object")
    bad = set(block) - set(allowed)
    if bad:
        raise ConfigError(f"unknown keys in {where}: {sorted(bad)}")


def _scaled(block, scale, where):
    out = dict(block)
    if scale is None:
        return out
    for k in _RATE_FIELDS:
        if k in out:
            out[k] = float(out[k]) / scale
    return out


def _construct(cls, kwargs, where):
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_config(doc):
    """Build a :class:`ScenarioConfig` from a decoded JSON document."""
    _check_keys(doc, _SECTIONS, "config")
    circuit = dict(doc.get("circuit", {}))
    _check_keys(circuit, _CIRCUIT_FIELDS + ("kappa2_mhz",), "circuit")
    scale = circuit.pop("kappa2_mhz", None)
    if scale is not None:
        if not (isinstance(scale, (int, float)) and math.isfinite(scale) and scale > 0):
            raise ConfigError("circuit.kappa2_mhz must be a positive number")
        scale = float(scale)
        circuit.setdefault("kappa2", scale)
    circuit = _construct(CircuitParams, _scaled(circuit, scale, "circuit"), "circuit")

    trunc = doc.get("truncation", {})
    _check_keys(trunc, ("n1", "n2", "include_qubit"), "truncation")
    truncation = _construct(HilbertConfig, trunc, "truncation")

    sweep = doc.get("sweep", [])
    if not isinstance(sweep, list):
        raise ConfigError("sweep must be a list")
    axes = []
    for i, ax in enumerate(sweep):
        _check_keys(ax, ("variable", "start", "stop", "points"), f"sweep[{i}]")
        ax = dict(ax)
        if scale is not None and _ALIASES.get(ax.get("variable"), ax.get("variable")) in _RATE_FIELDS + ("delta_tilde",):
            ax["start"] = float(ax["start"]) / scale
            ax["stop"] = float(ax["stop"]) / scale
        axes.append(_construct(SweepAxis, ax, f"sweep[{i}]"))

    solver = doc.get("solver", {})
    _check_keys(solver, [f.name for f in fields(SolverConfig)], "solver")
    solver = _construct(SolverConfig, solver, "solver")

    output = doc.get("output", {})
    _check_keys(output, ("path", "formats"), "output")
    output = _construct(OutputConfig, output, "output")

    wig = doc.get("wigner", {})
    _check_keys(wig, ("xmax", "points"), "wigner")
    wig = _construct(WignerSpec, wig, "wigner")

    variants = []
    for i, v in enumerate(doc.get("variants", [])):
        _check_keys(v, ("label", "circuit", "include_qubit", "hamiltonian"), f"variants[{i}]")
        v = dict(v)
        if "circuit" in v:
            _check_keys(v["circuit"], _CIRCUIT_FIELDS, f"variants[{i}].circuit")
            v["circuit"] = _scaled(v["circuit"], scale, f"variants[{i}].circuit")
        variants.append(_construct(Variant, v, f"variants[{i}]"))

    return _construct(ScenarioConfig, dict(
        name=doc.get("name", "scenario"), circuit=circuit, truncation=truncation,
        sweep=tuple(axes), solver=solver, output=output, task=doc.get("task", "sweep"),
        wigner=wig, variants=tuple(variants),
    ), "config")


def load_config(path):
    """Read and validate a JSON scenario file."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_config(doc)


def config_to_dict(cfg):
    """Plain-JSON form of a config, in normalised units."""
    solver = asdict(cfg.solver)
    if solver["window"] is not None:
        solver["window"] = list(solver["window"])
    variants = []
    for v in cfg.variants:
        d = {"label": v.label, "circuit": dict(v.circuit), "hamiltonian": v.hamiltonian}
        if v.include_qubit is not None:
            d["include_qubit"] = v.include_qubit
        variants.append(d)
    return {
        "name": cfg.name,
        "circuit": cfg.circuit.to_dict(),
        "truncation": cfg.truncation.to_dict(),
        "sweep": [asdict(ax) for ax in cfg.sweep],
        "solver": solver,
        "output": {"path": cfg.output.path, "formats": list(cfg.output.formats)},
        "task": cfg.task,
        "wigner": asdict(cfg.wigner),
        "variants": variants,
    }


def dump_config(cfg, path=None):
    """JSON text of ``cfg``; also written to ``path`` when given."""
    text = json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def with_output(cfg, path):
    return replace(cfg, output=replace(cfg.output, path=str(path)))
