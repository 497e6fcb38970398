"""Built-in models and the JSON model description format."""

import json

import pytest

from hetmod.geometry import ModelError
from hetmod.models import (
    BUILTIN_NAMES,
    builtin_model,
    model_to_json,
    parse_model_text,
    print_model,
)


def test_builtin_names_resolve():
    for name in BUILTIN_NAMES:
        m = builtin_model(name)
        assert m.name == name
        assert m.n == 3
    with pytest.raises(ModelError):
        builtin_model("nope")


def test_iwasawa_shape(iwasawa):
    assert iwasawa.rank == 2
    assert str(iwasawa.alpha_prime) == "-4"
    assert iwasawa.chart is not None
    assert iwasawa.chart["coords"] == 3


def test_calabi_eckmann_shape(calabi_eckmann):
    assert calabi_eckmann.rank == 3
    assert calabi_eckmann.alpha_prime is None
    assert not calabi_eckmann.curvature_F
    assert calabi_eckmann.chart is None


def test_json_round_trip(builtins):
    for m in builtins:
        text = print_model(m)
        m2 = parse_model_text(text)
        assert m2.name == m.name
        assert m2.d_coframe == m.d_coframe
        assert m2.metric == m.metric
        assert m2.curvature_F == m.curvature_F
        assert m2.alpha_prime == m.alpha_prime
        assert m2.chart == m.chart
        # and the serialization itself is a fixed point
        assert print_model(m2) == text


def test_parse_rejects_missing_keys(iwasawa):
    data = model_to_json(iwasawa)
    del data["metric"]
    with pytest.raises(ModelError):
        parse_model_text(json.dumps(data))


def test_parse_rejects_bad_json():
    with pytest.raises(ModelError):
        parse_model_text("{not json")
    with pytest.raises(ModelError):
        parse_model_text("[1, 2]")


def test_parse_rejects_unknown_leg(iwasawa):
    data = model_to_json(iwasawa)
    data["d"]["a3"][0]["wedge"] = ["a1", "zz"]
    with pytest.raises(ModelError):
        parse_model_text(json.dumps(data))


def test_parse_rejects_variable_coefficient(iwasawa):
    data = model_to_json(iwasawa)
    data["metric"][0][0] = "a"
    with pytest.raises(ModelError):
        parse_model_text(json.dumps(data))
