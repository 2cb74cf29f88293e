import json

import numpy as np
import pytest

from spatialmoran import (
    InputError,
    LevelOutOfRange,
    NotStochastic,
    builtin_model,
    load_model,
    parse_init_spec,
    parse_model,
    parse_number,
)
from spatialmoran.modelio import parse_policy_override


class TestParseNumber:
    def test_rational_strings(self):
        assert parse_number("3/4") == 0.75
        assert parse_number("2/7") == pytest.approx(2 / 7, abs=1e-17)

    def test_decimal_and_native(self):
        assert parse_number("0.25") == 0.25
        assert parse_number(2) == 2.0
        assert parse_number(0.5) == 0.5

    def test_bad_inputs(self):
        for bad in ("abc", "1/0", None, [1]):
            with pytest.raises(NotStochastic):
                parse_number(bad)


class TestBuiltins:
    def test_galanis(self):
        doc = builtin_model("@galanis")
        assert doc["n"] == 3 and doc["mu"] == "stationary" and doc["r"] == 1.0
        model = parse_model(doc)
        assert model.is_stationary(1e-12)

    def test_complete(self):
        doc = builtin_model("@complete:5")
        assert doc["n"] == 5
        assert all(v == pytest.approx(0.2) for row in doc["W"] for v in row)

    def test_two_vertex(self):
        model = parse_model(builtin_model("@n2:1,1/2"))
        assert np.allclose(model.W.entries, [[0.0, 1.0], [0.5, 0.5]])

    def test_unknown(self):
        with pytest.raises(InputError):
            builtin_model("@ring:4")
        with pytest.raises(InputError):
            builtin_model("@n2:1")


class TestParseModel:
    def test_rational_matrix_and_policy(self):
        doc = {"n": 3, "W": [["0", "1/4", "3/4"], ["1/4", "0", "3/4"], ["1/2", "1/2", "0"]],
               "mu": ["2/7", "2/7", "3/7"], "r": "1/2"}
        model = parse_model(doc)
        assert model.r == 0.5
        assert model.is_stationary(1e-12)

    def test_declared_size_mismatch(self):
        with pytest.raises(InputError):
            parse_model({"n": 4, "W": [[0.0, 1.0], [1.0, 0.0]]})

    def test_missing_matrix(self):
        with pytest.raises(InputError):
            parse_model({"n": 2})

    def test_overrides(self):
        model = parse_model(builtin_model("@galanis"), r_override="2",
                            mu_override="uniform")
        assert model.r == 2.0
        assert np.allclose(model.mu.mu, 1 / 3)


class TestLoadModel:
    def test_round_trip_file(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps(builtin_model("@galanis")))
        model = load_model(str(path))
        assert model.n == 3

    def test_missing_file(self):
        with pytest.raises(InputError):
            load_model("/nonexistent/model.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(InputError):
            load_model(str(path))


class TestParseInitSpec:
    def test_mask_forms(self):
        assert parse_init_spec("mask:5", 3).atoms == ((5, 1.0),)
        assert parse_init_spec("mask:0b101", 3).atoms == ((5, 1.0),)

    def test_level_uniform(self):
        alpha = parse_init_spec("level:1:uniform", 3)
        assert alpha.atoms == ((1, 1 / 3), (2, 1 / 3), (4, 1 / 3))

    def test_level_must_be_transient(self):
        with pytest.raises(LevelOutOfRange):
            parse_init_spec("level:3:uniform", 3)
        with pytest.raises(LevelOutOfRange):
            parse_init_spec("level:0:uniform", 3)

    def test_atoms_json_and_parenthesised(self):
        alpha = parse_init_spec("atoms:[[1,0.5],[2,0.5]]", 3)
        assert alpha.atoms == ((1, 0.5), (2, 0.5))
        alpha = parse_init_spec('atoms:[(1,"1/4"),(2,"3/4")]', 3)
        assert alpha.atoms == ((1, 0.25), (2, 0.75))

    def test_bad_specs(self):
        with pytest.raises(InputError):
            parse_init_spec("mask:xyz", 3)
        with pytest.raises(InputError):
            parse_init_spec("start:1", 3)
        with pytest.raises(InputError):
            parse_init_spec("atoms:nope", 3)
        with pytest.raises(InputError):
            parse_init_spec("level:2:weighted", 3)


class TestPolicyOverride:
    def test_keywords_pass_through(self):
        assert parse_policy_override("stationary") == "stationary"
        assert parse_policy_override("uniform") == "uniform"

    def test_comma_list(self):
        assert parse_policy_override("1/2,1/4,0.25") == [0.5, 0.25, 0.25]
