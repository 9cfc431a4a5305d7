import json
import math

import numpy as np
import pytest

from tubecurv.catalog import (
    DescriptorError,
    catalog_dir,
    catalog_names,
    load_descriptor,
    parse_descriptor,
    resolve_descriptor,
)
from tubecurv.geometry import ChartMetric, RankOneAdapted, SpaceForm

EXPECTED = {
    "point_in_s3", "great_circle_in_s3", "great_sphere_in_s4", "great_sphere_in_s5", "clifford_torus_s3",
    "round_sphere_r3", "rank_one_toy", "veronese_s4", "perturbed_flat_curve",
}


def test_builtin_catalog_loads():
    assert EXPECTED <= set(catalog_names())
    for name in catalog_names():
        ex = load_descriptor(name)
        assert ex.name == name
        assert 1 <= ex.fiber_dim <= ex.n + 1


def test_example_properties():
    ex = load_descriptor("great_sphere_in_s5")
    assert isinstance(ex.model, SpaceForm)
    assert (ex.n, ex.m, ex.fiber_dim) == (4, 2, 3)
    assert ex.focal_k == math.inf and ex.constant_q(7)
    assert not ex.is_chart
    toy = load_descriptor("rank_one_toy.json")
    assert isinstance(toy.model, RankOneAdapted) and toy.m == toy.n == 2
    assert toy.sub == [0.5, 0.25]
    assert load_descriptor("perturbed_flat_curve").focal_k == 0


def test_chart_descriptor_is_an_immersion():
    ex = load_descriptor("veronese_s4")
    assert isinstance(ex.model, ChartMetric) and ex.is_chart
    u = np.array([1.0, 0.5])
    assert np.linalg.matrix_rank(ex.sub.jacobian(u)) == 2
    assert ex.sub.point(u).shape == (4,)


def test_inline_chart_submanifold():
    doc = {
        "ambient": {"type": "space_form", "c": 0, "dim": 3},
        "submanifold": {"chart": {"coords": ["u0", "u1", "u0*u1"], "domain": [[-1, 1], [-1, 1]]}},
    }
    ex = parse_descriptor(doc, "saddle")
    assert ex.name == "saddle" and ex.m == 2
    assert ex.sampling == {"samples": 128, "seed": 0}
    assert ex.sub.hessian(np.zeros(2))[2, 0, 1] == 1.0


@pytest.mark.parametrize("doc,match", [
    ([], "object"),
    ({"ambient": {"type": "space_form", "c": 1, "dim": 3}}, "submanifold"),
    ({"ambient": {"type": "cone"}, "submanifold": {}}, "unknown ambient"),
    ({"ambient": {"type": "space_form", "c": 1}, "submanifold": {}}, "missing"),
    ({"ambient": {"type": "space_form", "c": 1, "dim": 3}, "submanifold": {"builtin": "torus"}}, "unknown"),
    ({"ambient": {"type": "space_form", "c": 1, "dim": 3},
      "submanifold": {"chart": {"coords": ["u0", "zz"], "domain": [[0, 1]]}}}, "unknown symbols"),
    ({"ambient": {"type": "space_form", "c": 0, "dim": 3},
      "submanifold": {"builtin": "great_subsphere", "m": 1}}, "c > 0"),
    ({"ambient": {"type": "rank_one", "c": 1, "multiplicities": [1, 1]},
      "submanifold": {"principal_curvatures": [0.1]}}, "principal_curvatures"),
    ({"ambient": {"type": "chart", "builtin": "hyperbolic"}, "submanifold": {}}, "chart builtin"),
])
def test_descriptor_errors(doc, match):
    with pytest.raises(DescriptorError, match=match):
        parse_descriptor(doc)


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "ambient": {"type": "space_form",,}\n}')
    with pytest.raises(DescriptorError, match="line 2, column"):
        load_descriptor(p)


def test_missing_file():
    with pytest.raises(DescriptorError, match="no descriptor"):
        resolve_descriptor("does_not_exist")


def test_catalog_directory_override(tmp_path, monkeypatch):
    doc = {"name": "flat_point", "ambient": {"type": "space_form", "c": 0, "dim": 2},
           "submanifold": {"builtin": "point"}}
    (tmp_path / "flat_point.json").write_text(json.dumps(doc))
    monkeypatch.setenv("TUBECURV_CATALOG", str(tmp_path))
    assert catalog_dir() == tmp_path
    assert catalog_names() == ["flat_point"]
    assert load_descriptor("flat_point").m == 0
