"""Run configurations and named curve families for the command line."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputError
from .families import FamilySpec, build_pd, cp2_params, fermat, hexagon_section, standard_family
from .lattice import LatticePolygon, standard_triangle
from .local_models import ProfileKind
from .moment import METRICS, LaurentSection, MomentParams
from .sampler import AmoebaConfig
from .subdivision import WeightFunction


@dataclass(frozen=True)
class Family:
    """Section, polygon and (optionally) weight behind a family name.

    Names: ``cp2:d`` (unit coefficients on the degree-d triangle with the
    quadratic weight), ``pd:d`` (the amplified edge family, no weight),
    ``fermat:d`` and ``hexagon``.
    """

    name: str
    polygon: LatticePolygon
    section: LaurentSection
    weight: WeightFunction | None
    base_params: MomentParams = field(default_factory=MomentParams)

    def params(self, delta: float | None = None, metric: str | None = None,
               temper: float | None = None) -> MomentParams:
        b = self.base_params
        d = b.delta if delta is None else delta
        return MomentParams(delta=d, w=self.weight if d < 1 else b.w, metric=metric or b.metric,
                            temper=b.temper if temper is None else temper)


def resolve_family(name: str, c_ratio: float = 1e3) -> Family:
    kind, _, arg = name.partition(":")
    try:
        d = int(arg) if arg else None
    except ValueError as exc:
        raise InputError(f"bad family degree in {name!r}") from exc
    if kind == "hexagon":
        poly, w, s = hexagon_section()
        return Family(name, poly, s, w)
    if d is None or d < 1:
        raise InputError(f"family {name!r} needs a degree, e.g. {kind}:3")
    if kind == "cp2":
        poly, w, s = standard_family(d)
        return Family(name, poly, s, w)
    if kind == "pd":
        return Family(name, standard_triangle(d), build_pd(FamilySpec(d, c_ratio=c_ratio)), None, cp2_params())
    if kind == "fermat":
        return Family(name, standard_triangle(d), fermat(d), None, cp2_params())
    raise InputError(f"unknown family {name!r} (cp2:d, pd:d, fermat:d, hexagon)")


def parse_floats(text: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"bad number list {text!r}") from exc
    if not vals:
        raise InputError("empty number list")
    return vals


def parse_point(text: str) -> tuple[float, float]:
    v = parse_floats(text)
    if len(v) != 2:
        raise InputError("a point needs two coordinates")
    return v[0], v[1]


def parse_vertices(text: str) -> list[tuple[int, int]]:
    out = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        parts = chunk.split(",")
        try:
            x, y = (int(q) for q in parts)
        except ValueError as exc:
            raise InputError(f"bad vertex {chunk!r}; use integers 'x,y;x,y;...'") from exc
        out.append((x, y))
    return out


@dataclass(frozen=True)
class SamplingOptions:
    resolution: int = 600
    slices: int = 800
    angles: int = 64
    dilation: float = 1.5
    seed: int = 0
    threads: int | None = None

    def amoeba(self) -> AmoebaConfig:
        return AmoebaConfig(self.resolution, self.slices, self.angles, self.dilation, seed=self.seed,
                            threads=self.threads)


@dataclass(frozen=True)
class ConvergeConfig:
    family: str
    deltas: tuple[float, ...]
    sampling: SamplingOptions = SamplingOptions()

    def __post_init__(self):
        if any(not (0 < d < 1) for d in self.deltas):
            raise InputError("sweep deltas must lie in (0, 1)")


@dataclass(frozen=True)
class LocalConfig:
    model: str
    eps: float = 0.1
    t_steps: int = 11
    grid: int = 200

    def __post_init__(self):
        ProfileKind.parse(self.model)
        if not self.eps > 0:
            raise InputError("eps must be positive")
        if self.t_steps < 2 or self.grid < 4:
            raise InputError("need t-steps >= 2 and grid >= 4")


@dataclass(frozen=True)
class Cp2Config:
    degree: int
    c_ratio: float = 1e3
    delta: float = 1.0
    search: bool = True
    sampling: SamplingOptions = SamplingOptions()

    def __post_init__(self):
        if self.degree < 1:
            raise InputError("degree must be at least 1")
        if not self.c_ratio > 1:
            raise InputError("c-ratio must exceed 1")
        if not (0 < self.delta <= 1):
            raise InputError("delta must lie in (0, 1]")


def check_metric(metric: str | None) -> None:
    if metric is not None and metric not in METRICS:
        raise InputError(f"metric must be one of {METRICS}")
