import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tubecurv.catalog import load_descriptor, parse_descriptor
from tubecurv.cli import main
from tubecurv.verify import (
    PreconditionError,
    focal_identities,
    subm_d_identities,
    suite_austere_norm,
    suite_focal_filtration,
    suite_hypersurface,
    suite_thm_subm_d,
)

SADDLE = {
    "name": "saddle",
    "ambient": {"type": "space_form", "c": 0, "dim": 3},
    "submanifold": {"chart": {"coords": ["u0", "u1", "u0*u1 + u0**3"], "domain": [[-1, 1], [-1, 1]]}},
    # deliberately false claims, so the identities should fail
    "metadata": {"focal_k": "inf", "constant_q": "all", "austere": True},
    "sampling": {"samples": 8, "seed": 0},
}


# -- identity sets ---------------------------------------------------------------


@given(st.integers(1, 8), st.integers(1, 8))
def test_focal_sets_are_cumulative(k, extra):
    small = {s.name for s in focal_identities(k)}
    large = {s.name for s in focal_identities(k + extra)}
    assert small < large


def test_focal_level_one():
    names = [s.name for s in focal_identities(1)]
    assert names == ["Q1", "Q2+trKt+trKb/3", "Q3+tr(SKt)+trCKt/2+trCKb/4"]
    assert [s.odd for s in focal_identities(1)] == [True, False, True]
    with pytest.raises(PreconditionError):
        focal_identities(0)


def test_focal_special_cases():
    point = [s.tag for s in focal_identities(3, 0, 3)]
    assert "point" in point and "vertical" in point
    assert "austere" in [s.tag for s in focal_identities(4, 2, 4)]


def test_subm_d_identities():
    specs = subm_d_identities(2, ["i", "viii"])
    assert [s.name for s, _ in specs] == ["(i) Phi_4(2)", "(viii) Psi_5(3)"]
    assert [rng for _, rng in specs] == [(4, 6), (4, 7)]
    with pytest.raises(PreconditionError):
        subm_d_identities(1, ["ix"])


# -- suites -----------------------------------------------------------------------


@pytest.mark.parametrize("name,k", [("point_in_s3", 4), ("great_circle_in_s3", 4), ("great_sphere_in_s5", 3)])
def test_focal_suite_passes_on_space_form_examples(name, k):
    report = suite_focal_filtration(load_descriptor(name), k, samples=24)
    assert report.passed, report.to_text()
    for rec in report.records:
        if rec.parity is not None:
            assert rec.parity <= 1e-8


def test_subm_d_suite_on_great_sphere():
    report = suite_thm_subm_d(load_descriptor("great_sphere_in_s4"), 1, samples=16)
    assert report.passed and len(report.records) == 8


def test_veronese_suites():
    ex = load_descriptor("veronese_s4")
    assert suite_focal_filtration(ex, 2, samples=8).passed
    assert suite_austere_norm(ex, samples=8).passed


@pytest.mark.parametrize("name", ["clifford_torus_s3", "round_sphere_r3", "rank_one_toy"])
def test_hypersurface_suite(name):
    report = suite_hypersurface(load_descriptor(name), 2, samples=4)
    assert report.passed, report.to_text()


def test_false_claims_are_reported_as_failures():
    report = suite_focal_filtration(parse_descriptor(SADDLE), 1)
    assert not report.passed
    assert {r.name for r in report.failures()} == {s.name for s in focal_identities(1)}


def test_preconditions():
    flat = load_descriptor("perturbed_flat_curve")
    with pytest.raises(PreconditionError, match="focal"):
        suite_focal_filtration(flat, 1)
    with pytest.raises(PreconditionError, match="austere"):
        suite_austere_norm(flat)
    with pytest.raises(PreconditionError):
        suite_hypersurface(load_descriptor("great_circle_in_s3"), 1)
    with pytest.raises(PreconditionError, match="rank-one"):
        suite_focal_filtration(load_descriptor("rank_one_toy"), 1)
    doc = dict(SADDLE, metadata={"focal_k": 1, "constant_q": [1]})
    with pytest.raises(PreconditionError, match="constant"):
        suite_thm_subm_d(parse_descriptor(doc), 1)
    with pytest.raises(PreconditionError, match="k=2"):
        suite_focal_filtration(parse_descriptor(doc), 2)


def test_reports_are_deterministic():
    ex = load_descriptor("great_sphere_in_s5")
    a = suite_focal_filtration(ex, 2, samples=12, seed=3).to_json()
    b = suite_focal_filtration(load_descriptor("great_sphere_in_s5"), 2, samples=12, seed=3).to_json()
    assert a == b
    c = suite_focal_filtration(ex, 2, samples=12, seed=4).to_json()
    assert json.loads(a)["meta"]["config_hash"] != json.loads(c)["meta"]["config_hash"]


# -- command line --------------------------------------------------------------------


def test_cli_expand(capsys):
    assert main(["expand", "3", "2"]) == 0
    out = capsys.readouterr().out
    assert "3 tr(A_0 A_2)" in out and "MATCH" in out


def test_cli_expand_json(capsys):
    assert main(["expand", "2", "2", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["match"] and payload["refined"] == payload["brute"]


def test_cli_phi_psi(capsys):
    assert main(["phi-psi", "1"]) == 0
    assert "MISMATCH" not in capsys.readouterr().out


def test_cli_verify_exit_codes(tmp_path, capsys):
    assert main(["verify", "point_in_s3", "--suite", "focal", "--k", "2", "--samples", "8"]) == 0
    bad = tmp_path / "saddle.json"
    bad.write_text(json.dumps(SADDLE))
    assert main(["verify", str(bad), "--suite", "focal", "--k", "1"]) == 1
    assert main(["verify", "perturbed_flat_curve", "--suite", "focal"]) == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert main(["verify", str(broken), "--suite", "focal"]) == 2
    assert "line 1" in capsys.readouterr().err


def test_cli_verify_writes_output(tmp_path):
    out = tmp_path / "report.json"
    args = ["verify", "great_circle_in_s3", "--suite", "focal", "--k", "1", "--samples", "6",
            "--format", "json", "--output", str(out)]
    assert main(args) == 0
    first = out.read_text()
    assert main(args) == 0
    assert out.read_text() == first
    assert json.loads(first)["passed"]


def test_cli_tube_and_catalog(capsys):
    assert main(["tube", "great_circle_in_s3", "--t", "0.5", "--kmax", "2"]) == 0
    assert "Q=[" in capsys.readouterr().out
    assert main(["tube", "great_circle_in_s3", "--t", "1.6"]) == 2
    assert main(["catalog"]) == 0
    assert "veronese_s4" in capsys.readouterr().out
    assert main(["expand"]) == 2
