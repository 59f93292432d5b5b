import json
import os
from pathlib import Path

import pytest

import harmonize

FIXTURES = Path(os.environ.get("HARMONIZE_FIXTURES_DIR", Path(__file__).resolve().parents[2] / "fixtures"))
EMPLOYMENT = FIXTURES / "employment"
AGE = FIXTURES / "age_survey"


def read(path):
    return Path(path).read_text(encoding="utf-8")


def employment_dicts():
    return [read(EMPLOYMENT / f"{name}.dict.json") for name in ("radx_up", "radx_rad", "nih_harmonized")]


def employment_rules():
    return [read(p) for p in sorted((EMPLOYMENT / "rules").glob("*.json"))]


def employment_inputs():
    return [
        ("radx_up", "radx_up", read(EMPLOYMENT / "radx_up.csv")),
        ("radx_rad", "radx_rad", read(EMPLOYMENT / "radx_rad.csv")),
    ]


@pytest.mark.parametrize(
    "spec, value, expected",
    [
        ({"primitive": "Truncate", "params": {"length": 3}}, "94305-2005", "943"),
        ({"primitive": "Cast", "params": {"source": "string", "target": "integer"}}, "1", 1),
        ({"primitive": "EnumToEnum", "params": {"mapping": [{"from": 2, "to": 1}]}}, 2, 1),
        ({"primitive": "Reduce", "params": {"operation": "any"}}, [0, 0, 1, 0], True),
        ({"primitive": "ConvertDate", "params": {"source": "%m/%d/%Y", "target": "%Y-%m-%d"}}, "03/14/2025", "2025-03-14"),
        ({"primitive": "Round", "params": {"precision": 2}}, 13.226, 13.23),
        ({"primitive": "Threshold", "params": {"lower": 0, "upper": 10}}, 16, 10),
        ({"primitive": "Round", "params": {"precision": 2}}, None, None),
    ],
)
def test_apply_primitive(spec, value, expected):
    assert harmonize.apply_primitive(spec, value) == expected


def test_convert_units_accepts_json_text():
    spec = json.dumps({"primitive": "ConvertUnits", "params": {"source": "km", "target": "mile"}})
    assert harmonize.apply_primitive(spec, 10.0) == pytest.approx(10 / 1.609344)


def test_errors_carry_codes():
    with pytest.raises(harmonize.HarmonizeError) as info:
        harmonize.apply_primitive({"primitive": "Cast", "params": {"source": "string", "target": "integer"}}, "abc")
    assert info.value.code == "CastError"
    with pytest.raises(harmonize.HarmonizeError) as info:
        harmonize.apply_primitive({"primitive": "Normalize", "params": {}}, 1)
    assert info.value.code == "UnknownPrimitive"


def test_validate_and_canonical_rule():
    rule = read(AGE / "age_rule.json")
    dicts = [read(AGE / "survey.dict.json"), read(AGE / "survey_harmonized.dict.json")]
    assert harmonize.validate_rules(rule, dicts) == []
    doc = json.loads(rule)
    doc["Operations"].reverse()
    issues = harmonize.validate_rules(json.dumps(doc), dicts)
    assert issues and "expects numeric" in issues[0]
    assert harmonize.canonical_rule(json.dumps(json.loads(rule))) == rule


def test_harmonize_then_replay_is_byte_identical():
    result = harmonize.harmonize(employment_inputs(), employment_rules(), employment_dicts(), "nih_harmonized")
    lines = result["csv"].splitlines()
    assert lines[0] == "nih_employment,commute_distance_miles,source_dataset,original_id"
    assert len(lines) == 1 + 40 + 35
    assert "0,6.21,radx_rad,1" in lines
    assert len(result["log"].splitlines()) == 3
    assert [r["rows"] for r in result["reports"]] == [40, 35]

    originals = {name: (dictionary, csv) for name, dictionary, csv in employment_inputs()}
    again = harmonize.replay(result["log"], originals, employment_dicts(), "nih_harmonized", workers=3)
    assert again["csv"] == result["csv"]
    assert harmonize.sha256_hex(again["csv"]) == harmonize.sha256_hex(result["csv"])


def test_collect_policy_reports_bad_cells():
    csv = read(AGE / "survey.csv").replace("\n3,31,", "\n3,abc,")
    dicts = [read(AGE / "survey.dict.json"), read(AGE / "survey_harmonized.dict.json")]
    rule = read(AGE / "age_rule.json")
    with pytest.raises(harmonize.HarmonizeError) as info:
        harmonize.harmonize([("survey", "survey", csv)], [rule], dicts, "survey_harmonized")
    assert info.value.code == "CastError"
    result = harmonize.harmonize([("survey", "survey", csv)], [rule], dicts, "survey_harmonized",
                                 error_policy="collect")
    errors = result["reports"][0]["errors"]
    assert [(e["row"], e["operation"], e["primitive"]) for e in errors] == [(3, 1, "Cast")]


def test_rule_store(tmp_path):
    store = harmonize.RuleStore(str(tmp_path / "store"))
    assert len(store) == 0
    for text in employment_rules():
        digest, overwritten = store.put(text)
        assert digest == harmonize.sha256_hex(text)
        assert not overwritten
    assert len(store.query(target="nih_employment")) == 2
    assert store.get("radx_rad:commute_distance_km", "nih_harmonized:commute_distance_miles") == read(
        EMPLOYMENT / "rules" / "rule3_rad_commute.json")
    assert store.get("radx_rad:employment", "nih_harmonized:commute_distance_miles") is None
    assert harmonize.RuleStore(str(tmp_path / "store")).query() == store.query()
