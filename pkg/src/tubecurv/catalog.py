"""JSON descriptors for (ambient, submanifold) examples and the built-in catalog."""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .geometry import (
    AmbientModel,
    ChartMetric,
    GeometryError,
    RankOneAdapted,
    SpaceForm,
    SubmanifoldChart,
)

__all__ = [
    "DescriptorError",
    "Example",
    "catalog_dir",
    "catalog_names",
    "resolve_descriptor",
    "load_descriptor",
    "parse_descriptor",
]

CATALOG_ENV = "TUBECURV_CATALOG"


class DescriptorError(ValueError):
    pass


@dataclass
class Example:
    name: str
    model: AmbientModel
    sub: Any  # SubmanifoldChart, or initial principal curvatures for rank-one models
    metadata: dict
    sampling: dict
    descriptor: dict = field(repr=False, default_factory=dict)

    @property
    def n(self) -> int:
        return self.model.dim - 1

    @property
    def m(self) -> int:
        return self.n if isinstance(self.model, RankOneAdapted) else self.sub.m

    @property
    def fiber_dim(self) -> int:
        return self.n - self.m + 1

    @property
    def is_chart(self) -> bool:
        return bool(getattr(self.model, "is_chart", False))

    @property
    def focal_k(self) -> float:
        k = self.metadata.get("focal_k")
        if k is None:
            return 0
        return math.inf if k in ("inf", "all") else int(k)

    def constant_q(self, j: int) -> bool:
        flag = self.metadata.get("constant_q", [])
        return flag == "all" or j in flag


# ---------------------------------------------------------------------------
# built-in ambient models


def _stereo_sphere_metric(x):
    return 4.0 / (1.0 + float(x @ x)) ** 2 * np.eye(x.size)


def _perturbed_flat(eps: float, dim: int):
    def metric(x):
        return (1.0 + eps * x[0] ** 2) * np.eye(dim)

    return metric


def _ambient(spec: dict) -> AmbientModel:
    kind = spec.get("type")
    try:
        if kind == "space_form":
            return SpaceForm(float(spec["c"]), int(spec["dim"]))
        if kind == "rank_one":
            return RankOneAdapted(float(spec["c"]), spec["multiplicities"])
        if kind == "chart":
            name = spec.get("builtin")
            params = spec.get("params", {})
            h = float(params.get("h", 1e-4))
            if name in ("stereographic_sphere", "veronese_s4"):
                dim = int(params.get("dim", 4))
                return ChartMetric(_stereo_sphere_metric, dim, h, "stereographic_sphere")
            if name == "perturbed_flat":
                dim = int(params.get("dim", 3))
                eps = float(params.get("eps", 0.1))
                return ChartMetric(_perturbed_flat(eps, dim), dim, h, f"perturbed_flat(eps={eps})")
            raise DescriptorError(f"unknown chart builtin {name!r}")
    except KeyError as exc:
        raise DescriptorError(f"ambient descriptor is missing {exc}") from None
    except GeometryError as exc:
        raise DescriptorError(str(exc)) from None
    raise DescriptorError(f"unknown ambient type {kind!r}")


# ---------------------------------------------------------------------------
# built-in submanifolds


def _great_subsphere(model, m):
    if not isinstance(model, SpaceForm) or model.c <= 0:
        raise DescriptorError("great_subsphere needs a space form with c > 0")
    if not 0 <= m <= model.dim - 1:
        raise DescriptorError(f"great_subsphere needs 0 <= m <= {model.dim - 1}")
    r = 1.0 / math.sqrt(model.c)
    norm = "sqrt(1" + "".join(f" + u{a}**2" for a in range(m)) + ")"
    coords = [f"{r!r}/{norm}"] + [f"{r!r}*u{a}/{norm}" for a in range(m)]
    coords += ["0"] * (model.coords - 1 - m)
    return SubmanifoldChart.from_expressions(coords, m, [(-1.0, 1.0)] * m, f"great S^{m}")


def _clifford(model, theta):
    if not isinstance(model, SpaceForm) or model.c != 1 or model.dim != 3:
        raise DescriptorError("clifford_torus needs SpaceForm(c=1, dim=3)")
    c, s = math.cos(theta), math.sin(theta)
    coords = [f"{c!r}*cos(u0)", f"{c!r}*sin(u0)", f"{s!r}*cos(u1)", f"{s!r}*sin(u1)"]
    dom = [(0.0, 2 * math.pi)] * 2
    return SubmanifoldChart.from_expressions(coords, 2, dom, f"clifford torus theta={theta:g}")


def _round_sphere(model, radius, m):
    if not isinstance(model, SpaceForm) or model.c != 0 or model.dim != m + 1:
        raise DescriptorError("round_sphere needs a flat space form of dimension m+1")
    if m != 2:
        raise DescriptorError("round_sphere is implemented for m = 2")
    R = float(radius)
    coords = [f"{R!r}*sin(u0)*cos(u1)", f"{R!r}*sin(u0)*sin(u1)", f"{R!r}*cos(u0)"]
    return SubmanifoldChart.from_expressions(coords, 2, [(0.4, 2.7), (0.0, 2 * math.pi)],
                                             f"round sphere R={R:g}")


def _veronese(model):
    if not isinstance(model, ChartMetric) or model.dim != 4:
        raise DescriptorError("veronese needs the stereographic S^4 chart")
    x, y, z = "sin(u0)*cos(u1)", "sin(u0)*sin(u1)", "cos(u0)"
    r3 = "sqrt(3)"
    P = [
        f"{r3}*({x})*({y})",
        f"{r3}*({x})*({z})",
        f"{r3}*({y})*({z})",
        f"{r3}/2*(({x})**2 - ({y})**2)",
        f"(({x})**2 + ({y})**2 - 2*({z})**2)/2",
    ]
    coords = [f"({p})/(1 - ({P[4]}))" for p in P[:4]]
    return SubmanifoldChart.from_expressions(coords, 2, [(0.4, 2.7), (0.0, 2 * math.pi)],
                                             "veronese surface")


def _point(model):
    if isinstance(model, SpaceForm):
        return SubmanifoldChart.single_point(model.base_point())
    return SubmanifoldChart.single_point(np.zeros(model.dim))


def _submanifold(model, spec: dict):
    if isinstance(model, RankOneAdapted):
        mus = spec.get("principal_curvatures")
        if mus is None or len(mus) != model.dim - 1:
            raise DescriptorError(f"rank_one models need {model.dim - 1} principal_curvatures")
        return [float(v) for v in mus]
    try:
        if "chart" in spec:
            ch = spec["chart"]
            coords, dom = ch["coords"], ch["domain"]
            return SubmanifoldChart.from_expressions(coords, len(dom), dom, ch.get("name", "chart"))
        name = spec.get("builtin")
        if name == "point":
            return _point(model)
        if name == "great_subsphere":
            return _great_subsphere(model, int(spec.get("m", 1)))
        if name == "clifford_torus":
            return _clifford(model, float(spec.get("theta", math.pi / 4)))
        if name == "round_sphere":
            return _round_sphere(model, spec.get("radius", 1.0), int(spec.get("m", 2)))
        if name == "veronese":
            return _veronese(model)
    except KeyError as exc:
        raise DescriptorError(f"submanifold descriptor is missing {exc}") from None
    except GeometryError as exc:
        raise DescriptorError(str(exc)) from None
    raise DescriptorError(f"unknown submanifold {spec!r}")


def parse_descriptor(doc: dict, name: str = "descriptor") -> Example:
    if not isinstance(doc, dict):
        raise DescriptorError("descriptor must be a JSON object")
    for key in ("ambient", "submanifold"):
        if key not in doc:
            raise DescriptorError(f"descriptor is missing {key!r}")
    model = _ambient(doc["ambient"])
    sub = _submanifold(model, doc["submanifold"])
    sampling = {"samples": 128, "seed": 0}
    sampling.update(doc.get("sampling", {}))
    return Example(doc.get("name", name), model, sub, dict(doc.get("metadata", {})), sampling, doc)


# ---------------------------------------------------------------------------
# files


def catalog_dir() -> Path:
    env = os.environ.get(CATALOG_ENV)
    return Path(env) if env else Path(__file__).with_name("catalog_data")


def catalog_names() -> list[str]:
    return sorted(p.stem for p in catalog_dir().glob("*.json"))


def resolve_descriptor(path: str | os.PathLike) -> Path:
    """A file path as given, else a catalog entry (with or without .json)."""
    p = Path(path)
    if p.is_file():
        return p
    for cand in (catalog_dir() / p.name, catalog_dir() / f"{p.name}.json"):
        if cand.is_file():
            return cand
    raise DescriptorError(f"no descriptor file {str(path)!r} (catalog: {catalog_dir()})")


def load_descriptor(path: str | os.PathLike) -> Example:
    p = resolve_descriptor(path)
    text = p.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"{p}: malformed JSON at line {exc.lineno}, column {exc.colno}: "
                              f"{exc.msg}") from None
    return parse_descriptor(doc, p.stem)
