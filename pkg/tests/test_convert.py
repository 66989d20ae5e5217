from pathlib import Path

import glob
import json

import pytest
import numpy as np

from renyicones.cones import NonNeg, PSDCone, RenyiEpi, RenyiHypo, RenyiPerspEpi
from renyicones.convert import (
    build_report,
    convert_cone_from_dict,
    convert_cone_to_dict,
    convert_problem_from_dict,
    convert_problem_to_dict,
    convert_to_jsonable,
    dump_problem,
    dump_report,
    load_problem,
)
from renyicones.errors import ProblemFormatError
from renyicones.solver import ConicProblem, SolverConfig, SolveStatus, solve
from renyicones.utilities import RNG_ALGORITHM


DATA_DIR = Path(__file__).parent / "data"
DOCS_SOURCE = Path(__file__).parents[1] / "docs" / "source"


def simplex_problem() -> dict:
    "min x1 s.t. x1 + x2 = 1, x >= 0."
    return {
        "schema": 1,
        "objective": [1.0, 0.0],
        "cones": [{"kind": "nonneg", "k": 2}],
        "A": {"rows": [0, 0], "cols": [0, 1], "vals": [1.0, 1.0]},
        "b": [1.0],
        "start": [0.5, 0.5],
    }


class TestCones:
    @pytest.mark.parametrize(
        "cone",
        [NonNeg(3), PSDCone(2, "real"), RenyiHypo(2, 0.5), RenyiEpi(3, 1.5, "real"), RenyiPerspEpi(2, 0.75)],
        ids=repr,
    )
    def test_records(self, cone):
        record = convert_cone_to_dict(cone)
        assert record["kind"] == cone.kind
        assert convert_cone_from_dict(record) == cone

    def test_record_layout(self):
        assert convert_cone_to_dict(RenyiHypo(2, 0.5, "real")) == {
            "kind": "renyi-hypo", "n": 2, "alpha": 0.5, "field": "real"
        }

    def test_defaults_and_integer_alpha(self):
        cone = convert_cone_from_dict({"kind": "renyi-epi", "n": 2, "alpha": 2})
        assert cone == RenyiEpi(2, 2.0)
        assert isinstance(cone.alpha, float)

    @pytest.mark.parametrize(
        "record",
        [
            {"n": 2},
            {"kind": "soc", "n": 2},
            {"kind": "psd", "n": 2, "size": 3},
            {"kind": "psd"},
            {"kind": "psd", "n": "2"},
            {"kind": "psd", "n": True},
            {"kind": "nonneg", "k": 0},
            {"kind": "renyi-hypo", "n": 2, "alpha": 1.5},
            {"kind": "psd", "n": 2, "field": "quaternion"},
            [1, 2],
        ],
    )
    def test_invalid_records(self, record):
        with pytest.raises(ProblemFormatError):
            convert_cone_from_dict(record)


class TestProblems:
    def test_from_dict(self):
        problem, start = convert_problem_from_dict(simplex_problem())
        assert problem.n_vars == 2
        np.testing.assert_array_equal(problem.A.toarray(), [[1.0, 1.0]])
        np.testing.assert_array_equal(start, [0.5, 0.5])
        assert problem.cones == (NonNeg(2),)

    def test_to_dict_skips_defaults(self):
        data = convert_problem_to_dict(*convert_problem_from_dict(simplex_problem()))
        assert data == simplex_problem()

    def test_embedding_is_written(self):
        problem = ConicProblem([1.0], [NonNeg(1)], G=[[2.0]], h=[-1.0])
        data = convert_problem_to_dict(problem)
        assert data["G"] == {"rows": [0], "cols": [0], "vals": [2.0]}
        assert data["h"] == [-1.0]
        assert "A" not in data and "start" not in data

    def test_identity_embedding_is_omitted(self):
        problem = ConicProblem([1.0, 0.0], [NonNeg(2)], G=np.eye(2), h=[-1.0, 0.0])
        data = convert_problem_to_dict(problem)
        assert "G" not in data
        assert data["h"] == [-1.0, 0.0]

        loaded, _ = convert_problem_from_dict(data)
        np.testing.assert_array_equal(loaded.G.toarray(), np.eye(2))

    def test_documented_sample(self):
        problem, start = load_problem(DATA_DIR / "simplex.json")
        assert convert_problem_to_dict(problem, start) == simplex_problem()
        assert solve(problem, SolverConfig(), start).status is SolveStatus.OPTIMAL

        manifest = json.loads((DOCS_SOURCE / "dep_local.json").read_text(encoding="utf-8"))
        for entry in manifest["copy"]:
            assert glob.glob(str(DOCS_SOURCE / entry["from"]))

    def test_file_round_trip(self, tmp_path):
        problem, start = convert_problem_from_dict(simplex_problem())
        path = tmp_path / "simplex.json"
        dump_problem(problem, path, start)
        loaded, loaded_start = load_problem(path)
        np.testing.assert_array_equal(loaded.c, problem.c)
        np.testing.assert_array_equal(loaded_start, start)
        assert solve(loaded, SolverConfig(), loaded_start).status is SolveStatus.OPTIMAL

    @pytest.mark.parametrize(
        "change",
        [
            {"schema": 2},
            {"extra": 1},
            {"objective": [1.0, "x"]},
            {"objective": [1.0, None]},
            {"cones": {"kind": "nonneg", "k": 2}},
            {"cones": [{"kind": "nonneg", "k": 3}]},
            {"A": {"rows": [0], "cols": [0, 1], "vals": [1.0, 1.0]}},
            {"A": {"rows": [0, 1], "cols": [0, 1], "vals": [1.0, 1.0]}},
            {"A": {"rows": [0.0, 0], "cols": [0, 1], "vals": [1.0, 1.0]}},
            {"A": {"rows": [0, 0], "cols": [0, 1]}},
            {"start": [1.0]},
            {"h": [1.0]},
        ],
    )
    def test_invalid_documents(self, change):
        data = {**simplex_problem(), **change}
        with pytest.raises(ProblemFormatError):
            convert_problem_from_dict(data)

    def test_missing_keys(self):
        data = simplex_problem()
        del data["cones"]
        with pytest.raises(ProblemFormatError, match="cones"):
            convert_problem_from_dict(data)

        data = simplex_problem()
        del data["b"]
        with pytest.raises(ProblemFormatError):
            convert_problem_from_dict(data)

    def test_rank_deficient_constraints(self):
        data = {**simplex_problem(), "A": {"rows": [0, 0, 1, 1], "cols": [0, 1, 0, 1], "vals": [1.0] * 4}, "b": [1.0, 1.0]}
        with pytest.raises(ProblemFormatError):
            convert_problem_from_dict(data)

    def test_not_an_object(self):
        with pytest.raises(ProblemFormatError):
            convert_problem_from_dict([simplex_problem()])

    def test_invalid_json_position(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{\n  "schema": 1,\n  "objective": [1.0,,]\n}', encoding="utf-8")
        with pytest.raises(ProblemFormatError) as exc:
            load_problem(path)

        assert exc.value.line == 3
        assert exc.value.column is not None
        assert "line 3" in str(exc.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_problem(tmp_path / "missing.json")


class TestReports:
    def test_jsonable(self):
        data = convert_to_jsonable({
            "status": SolveStatus.OPTIMAL,
            "values": np.array([1.0, np.inf, np.nan]),
            "matrix": np.array([[1 + 2j]]),
            "flag": np.bool_(True),
            "count": np.int64(3),
            "cone": NonNeg(2),
        })
        assert data == {
            "status": "optimal",
            "values": [1.0, None, None],
            "matrix": {"real": [[1.0]], "imag": [[2.0]]},
            "flag": True,
            "count": 3,
            "cone": {"kind": "nonneg", "k": 2},
        }

    def test_solve_report(self):
        problem, start = convert_problem_from_dict(simplex_problem())
        config = SolverConfig()
        result = solve(problem, config, start)
        report = build_report("solve", result.status, seed=5, config=config, result=result, x=result.x)
        assert report["schema"] == 1
        assert report["status"] == "optimal"
        assert report["seed"] == 5
        assert report["rng"] == RNG_ALGORITHM
        assert report["config"]["gap_tolerance"] == config.gap_tolerance
        assert report["iterations"] == result.iterations
        assert set(report["residuals"]) == {"primal", "dual", "gap"}
        assert len(report["trace"]) == result.iterations
        assert report["objective"] == pytest.approx(0.0, abs=1e-7)

        parsed = json.loads(dump_report(report))
        assert parsed == report

    def test_wall_time_override(self):
        report = build_report("verify", "passed", wall_time=1.5)
        assert report["wall_time"] == 1.5
        assert "seed" not in report and "rng" not in report
