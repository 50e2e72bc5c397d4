"""Run configuration: a flat, diff-friendly `key = value` text format.

Schema (defaults shown by `serialize_config(RunConfig())`):

    version = 1
    geometry.l_e / l_c / l_i / l_air / w_e / w_c / w_fe / air_box_half_width
    mesh.h                      target edge length in meters
    excitation.current         coil current in A
    excitation.turns           number of coil turns
    excitation.coil_area       window area in m^2, or `auto` (mesh-measured)
    material.source            `brauer` or `csv` (exactly one source)
    material.brauer.k1/k2/k3   exponential-model constants
    material.brauer.samples    non-negative-branch sample count
    material.brauer.b_max      sampling range in T
    material.csv.path          measurement curve for source = csv
    solver.switch_iteration    global->local weight switch (`never` disables)
    solver.max_iterations / min_iterations
    solver.cg_tol / newton_tol / stagnation_tol
    solver.search_window       0 = exhaustive data scan
    output.dir
    seed                       reserved

Comment lines start with `#`; unknown keys are rejected.
"""

from dataclasses import dataclass, field, fields, asdict

from .errors import ConfigError, ParseError
from .geometry import InductorGeometry

CONFIG_VERSION = 1


@dataclass
class GeometryConfig:
    l_e: float = 0.030
    l_c: float = 0.090
    l_i: float = 0.030
    l_air: float = 0.0033
    w_e: float = 0.030
    w_c: float = 0.030
    w_fe: float = 0.090
    air_box_half_width: float = 0.28

    def build(self):
        return InductorGeometry(l_e=self.l_e, l_c=self.l_c, l_i=self.l_i,
                                l_air=self.l_air, w_e=self.w_e, w_c=self.w_c,
                                w_fe=self.w_fe,
                                air_box_half_width=self.air_box_half_width)


@dataclass
class ExcitationConfig:
    current: float = 50.0
    turns: int = 66
    coil_area: float = None  # None = auto


@dataclass
class BrauerConfig:
    k1: float = 10.0
    k2: float = 1.8
    k3: float = 100.0
    samples: int = 100
    b_max: float = 2.0


@dataclass
class MaterialConfig:
    source: str = "brauer"
    brauer: BrauerConfig = field(default_factory=BrauerConfig)
    csv_path: str = ""


@dataclass
class SolverConfig:
    switch_iteration: int = 4  # None = never switch
    max_iterations: int = 200
    min_iterations: int = 0
    cg_tol: float = 1e-10
    newton_tol: float = 1e-12
    stagnation_tol: float = 1e-12
    search_window: int = 0


@dataclass
class RunConfig:
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    mesh_h: float = 0.008
    excitation: ExcitationConfig = field(default_factory=ExcitationConfig)
    material: MaterialConfig = field(default_factory=MaterialConfig)
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: str = "out"
    seed: int = 0

    def validate(self):
        if self.material.source not in ("brauer", "csv"):
            raise ConfigError("material.source must be 'brauer' or 'csv'")
        if self.material.source == "csv" and not self.material.csv_path:
            raise ConfigError("material.source = csv requires material.csv.path")
        if self.mesh_h <= 0.0:
            raise ConfigError("mesh.h must be positive")
        for name in ("cg_tol", "newton_tol", "stagnation_tol"):
            if getattr(self.solver, name) <= 0.0:
                raise ConfigError(f"solver.{name} must be positive")
        if self.excitation.coil_area is not None and self.excitation.coil_area <= 0:
            raise ConfigError("excitation.coil_area must be positive or auto")
        return self


def _fmt(value):
    if value is None:
        return "auto"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize_config(cfg):
    """Render a RunConfig to the canonical text form (round-trip safe)."""
    g, e, m, s = cfg.geometry, cfg.excitation, cfg.material, cfg.solver
    lines = [f"version = {CONFIG_VERSION}"]
    for f_ in fields(GeometryConfig):
        lines.append(f"geometry.{f_.name} = {_fmt(getattr(g, f_.name))}")
    lines.append(f"mesh.h = {_fmt(cfg.mesh_h)}")
    lines.append(f"excitation.current = {_fmt(e.current)}")
    lines.append(f"excitation.turns = {_fmt(e.turns)}")
    lines.append(f"excitation.coil_area = {_fmt(e.coil_area)}")
    lines.append(f"material.source = {m.source}")
    for f_ in fields(BrauerConfig):
        lines.append(f"material.brauer.{f_.name} = {_fmt(getattr(m.brauer, f_.name))}")
    lines.append(f"material.csv.path = {m.csv_path}")
    sw = s.switch_iteration
    lines.append(f"solver.switch_iteration = {'never' if sw is None else sw}")
    lines.append(f"solver.max_iterations = {s.max_iterations}")
    lines.append(f"solver.min_iterations = {s.min_iterations}")
    lines.append(f"solver.cg_tol = {_fmt(s.cg_tol)}")
    lines.append(f"solver.newton_tol = {_fmt(s.newton_tol)}")
    lines.append(f"solver.stagnation_tol = {_fmt(s.stagnation_tol)}")
    lines.append(f"solver.search_window = {s.search_window}")
    lines.append(f"output.dir = {cfg.output_dir}")
    lines.append(f"seed = {cfg.seed}")
    return "\n".join(lines) + "\n"


def _parse_kv(text, path="<config>"):
    pairs = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in pairs:
            raise ParseError(f"{path}:{lineno}: duplicate key {key!r}")
        pairs[key] = value.strip()
    return pairs


def parse_config(text, path="<config>"):
    """Parse the text form into a validated RunConfig."""
    pairs = _parse_kv(text, path)
    cfg = RunConfig()

    def pop(key, default=None):
        return pairs.pop(key, default)

    version = pop("version")
    if version is not None and int(version) != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version}")

    for f_ in fields(GeometryConfig):
        v = pop(f"geometry.{f_.name}")
        if v is not None:
            setattr(cfg.geometry, f_.name, float(v))
    v = pop("mesh.h")
    if v is not None:
        cfg.mesh_h = float(v)
    v = pop("excitation.current")
    if v is not None:
        cfg.excitation.current = float(v)
    v = pop("excitation.turns")
    if v is not None:
        cfg.excitation.turns = int(v)
    v = pop("excitation.coil_area")
    if v is not None:
        cfg.excitation.coil_area = None if v == "auto" else float(v)
    v = pop("material.source")
    if v is not None:
        cfg.material.source = v
    for f_ in fields(BrauerConfig):
        v = pop(f"material.brauer.{f_.name}")
        if v is not None:
            cast = int if f_.name == "samples" else float
            setattr(cfg.material.brauer, f_.name, cast(v))
    v = pop("material.csv.path")
    if v is not None:
        cfg.material.csv_path = v
    v = pop("solver.switch_iteration")
    if v is not None:
        cfg.solver.switch_iteration = None if v == "never" else int(v)
    for name in ("max_iterations", "min_iterations", "search_window"):
        v = pop(f"solver.{name}")
        if v is not None:
            setattr(cfg.solver, name, int(v))
    for name in ("cg_tol", "newton_tol", "stagnation_tol"):
        v = pop(f"solver.{name}")
        if v is not None:
            setattr(cfg.solver, name, float(v))
    v = pop("output.dir")
    if v is not None:
        cfg.output_dir = v
    v = pop("seed")
    if v is not None:
        cfg.seed = int(v)

    if pairs:
        raise ConfigError(f"unknown config keys: {sorted(pairs)}")
    return cfg.validate()


def load_config(path):
    with open(path) as f:
        return parse_config(f.read(), path=str(path))


def save_config(cfg, path):
    with open(path, "w", newline="") as f:
        f.write(serialize_config(cfg))
