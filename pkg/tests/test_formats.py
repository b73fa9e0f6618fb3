"""JSON codecs: lossless round trips, schema enforcement, exact failures."""

import copy
import json
import pathlib

import pytest
from gmpy2 import mpq

from azulift.errors import FormatError, PreconditionViolated
from azulift.formats import (
    CERTIFICATE_SCHEMA_NAME,
    SCENARIO_SCHEMA_NAME,
    certificate_from_obj,
    certificate_to_json,
    certificate_to_obj,
    field_from_tag,
    field_tag,
    load_certificate,
    load_scenario,
    save_certificate,
    save_scenario,
    scenario_from_obj,
    scenario_to_json,
    scenario_to_obj,
    schema_text,
    witnesses_from_obj,
    witnesses_to_obj,
)
from azulift.lift import (
    LiftScenario,
    construct_lift,
    derive_witnesses,
    scenario_w,
    verify_certificate,
)
from azulift.scalars import QQ, PrimeField


def test_field_tags():
    assert field_tag(QQ) == "Q"
    assert field_tag(PrimeField(7)) == "Fp:7"
    assert field_from_tag("Q") == QQ
    assert field_from_tag("Fp:11") == PrimeField(11)
    with pytest.raises(FormatError):
        field_from_tag("R")
    with pytest.raises(FormatError):
        field_from_tag("Fp:4")


def test_scenario_round_trip_objects():
    sc = scenario_w(N=2, seeds=(1, 0, -2, 0, 0, 0, 0, 0, 0, 0, 0, 1), rng_seed=5)
    obj = scenario_to_obj(sc)
    back = scenario_from_obj(obj)
    assert back == sc
    assert scenario_to_obj(back) == obj


def test_scenario_round_trip_json_text():
    sc = LiftScenario(
        K=QQ, N=3, a1=mpq(2), a2=mpq(-1), a3=mpq(-1),
        x2=(mpq(1, 2), mpq(3)), x3=(0, 1), d=mpq(-2),
    )
    text = scenario_to_json(sc)
    assert text.endswith("\n")
    back = scenario_from_obj(json.loads(text))
    assert back == sc


def test_scenario_round_trip_prime_field():
    F = PrimeField(7)
    sc = LiftScenario(K=F, N=2, a1=3, a2=1, a3=1, x2=(1, 1), x3=(2, 1))
    assert scenario_from_obj(scenario_to_obj(sc)) == sc


def test_scenario_rejects_malformed_objects():
    good = scenario_to_obj(scenario_w(N=2))
    for mutate in (
        lambda o: o.__setitem__("field", "R"),
        lambda o: o.__setitem__("trunc", True),
        lambda o: o.__setitem__("trunc", 0),
        lambda o: o.__setitem__("trunc", 1.5),
        lambda o: o.__setitem__("a1", 2),
        lambda o: o.__setitem__("a1", "1.5"),
        lambda o: o.__setitem__("x2", ["1"]),
        lambda o: o.__setitem__("seeds", {"bogus": 1}),
        lambda o: o.__setitem__("seeds", {"a1": True}),
        lambda o: o.__setitem__("extras", 1),
        lambda o: o.pop("a3"),
    ):
        obj = copy.deepcopy(good)
        mutate(obj)
        with pytest.raises(FormatError):
            scenario_from_obj(obj)


def test_witnesses_round_trip():
    sc = scenario_w(N=1)
    w = derive_witnesses(sc)
    obj = witnesses_to_obj(QQ, w)
    back = witnesses_from_obj(QQ, obj)
    assert back == w


def test_scenario_file_round_trip(tmp_path):
    sc = scenario_w(N=2)
    p = tmp_path / "sc.json"
    save_scenario(sc, p)
    assert load_scenario(p) == sc


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(FormatError):
        load_scenario(tmp_path / "absent.json")


def test_load_scenario_bad_json(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{ not json")
    with pytest.raises(FormatError):
        load_scenario(p)


def test_schemas_ship_in_docs():
    root = pathlib.Path(__file__).resolve().parents[1]
    for name in (SCENARIO_SCHEMA_NAME, CERTIFICATE_SCHEMA_NAME):
        packaged = schema_text(name)
        doc = (root / "docs" / name).read_text()
        assert doc == packaged


class _CertFixture:
    cert = None
    text = None


def _cert():
    if _CertFixture.cert is None:
        sc = scenario_w(N=1)
        _CertFixture.cert = construct_lift(sc, derive_witnesses(sc))
        _CertFixture.text = certificate_to_json(_CertFixture.cert)
    return _CertFixture.cert, _CertFixture.text


def test_certificate_json_shape():
    cert, text = _cert()
    obj = json.loads(text)
    assert sorted(obj) == [
        "Ap", "App", "Bp", "Dp", "alpha", "c", "e",
        "primed", "report", "scenario", "witnesses",
    ]
    # one top-level key per line keeps certificates diffable field by field
    lines = text.splitlines()
    assert lines[0] == "{" and lines[-1] == "}"
    assert len(lines) == len(obj) + 2


def test_certificate_round_trip_and_reverify():
    cert, text = _cert()
    obj = json.loads(text)
    back = certificate_from_obj(obj)
    assert back.scenario == cert.scenario
    assert back.witnesses == cert.witnesses
    assert back.yp == cert.yp
    assert back.a2p == cert.a2p and back.a3p == cert.a3p
    assert back.c.coords == cert.c.coords
    assert back.e.coords == cert.e.coords
    assert certificate_to_json(back) == text
    rep = verify_certificate(back)
    assert rep.ok, rep.fmt()


def test_certificate_file_round_trip(tmp_path):
    cert, text = _cert()
    p = tmp_path / "c.cert.json"
    save_certificate(cert, p)
    assert p.read_text() == text
    back = load_certificate(p)
    assert certificate_to_json(back) == text


def test_certificate_rejects_tampering():
    cert, text = _cert()
    base = json.loads(text)

    obj = copy.deepcopy(base)
    del obj["primed"]
    with pytest.raises(FormatError):
        certificate_from_obj(obj)

    obj = copy.deepcopy(base)
    obj["primed"]["a2p"] = ["1/3"]
    # still parses: values are data, not checks; but the relation breaks later
    back = certificate_from_obj(obj)
    assert not verify_certificate(back).ok

    obj = copy.deepcopy(base)
    obj["primed"]["a2p"] = "nonsense"
    with pytest.raises(FormatError):
        certificate_from_obj(obj)

    obj = copy.deepcopy(base)
    obj["Dp"]["mul"][0][0] = [[999, ["1"]]]
    with pytest.raises(FormatError):
        certificate_from_obj(obj)

    obj = copy.deepcopy(base)
    obj["e"] = [["1/3"]] + obj["e"][1:]
    # e no longer squares to itself; the idempotent recheck rejects it
    with pytest.raises(PreconditionViolated):
        certificate_from_obj(obj)
