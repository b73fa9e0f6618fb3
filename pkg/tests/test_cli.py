"""Command-line surface: exit codes, frozen output lines, file round trips.

Everything goes through cli.main(argv) in-process; stdout and stderr are
captured with capsys.  The one expensive test (a full lift at N = 1 plus
verify and tamper passes) carries the whole file-lifecycle contract.
"""

import argparse
import dataclasses
import json
from fractions import Fraction
from pathlib import Path

import pytest

from azulift import cli
from azulift.errors import FormatError
from azulift.formats import save_scenario
from azulift.lift import scenario_w


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    # the seed override must not leak in from the host environment
    monkeypatch.delenv("AZULIFT_SEED", raising=False)


def _lines(capsys):
    return capsys.readouterr().out.rstrip("\n").split("\n")


# -- symbols ------------------------------------------------------------------


def test_symbols_nonsplit_frozen(capsys):
    code = cli.main(["symbols", "-1", "-1"])
    assert code == 0
    assert _lines(capsys) == [
        "(-1, -1) at 2: -1",
        "(-1, -1) at oo: -1",
        "ramified: {2, oo}",
        "verdict: non-split",
    ]


def test_symbols_split_frozen(capsys):
    code = cli.main(["symbols", "1", "5"])
    assert code == 0
    assert _lines(capsys) == [
        "(1, 5) at 2: +1",
        "(1, 5) at 5: +1",
        "(1, 5) at oo: +1",
        "ramified: {}",
        "verdict: split",
    ]


def test_symbols_fraction_input(capsys):
    # square-class reduction drives the place list, raw input the echo
    code = cli.main(["symbols", "2/9", "3"])
    assert code == 0
    assert _lines(capsys) == [
        "(2/9, 3) at 2: -1",
        "(2/9, 3) at 3: -1",
        "(2/9, 3) at oo: +1",
        "ramified: {2, 3}",
        "verdict: non-split",
    ]


def test_symbols_zero_is_parse_error(capsys):
    code = cli.main(["symbols", "0", "1"])
    cap = capsys.readouterr()
    assert code == 2
    assert "parse error" in cap.err
    assert cap.out == ""


def test_symbols_bad_token(capsys):
    assert cli.main(["symbols", "2", "x"]) == 2
    assert "parse error" in capsys.readouterr().err


def test_symbols_deterministic(capsys):
    cli.main(["symbols", "-6", "10"])
    first = capsys.readouterr().out
    cli.main(["symbols", "-6", "10"])
    assert capsys.readouterr().out == first


# -- thin wrappers ------------------------------------------------------------


def test_solve_norm_solvable(capsys):
    code = cli.main(["solve-norm", "2", "-1"])
    assert code == 0
    out = _lines(capsys)
    assert out[0].startswith("u = ") and out[1].startswith("v = ")
    u = Fraction(out[0][4:])
    v = Fraction(out[1][4:])
    assert u * u - 2 * v * v == -1


def test_solve_norm_obstructed(capsys):
    code = cli.main(["solve-norm", "-1", "-1"])
    assert code == 1
    assert _lines(capsys) == ["obstructed: no rational solution"]


def test_solve_norm_zero_is_parse_error(capsys):
    assert cli.main(["solve-norm", "0", "3"]) == 2
    assert "parse error" in capsys.readouterr().err


def test_find_slot_frozen(capsys):
    code = cli.main(["find-slot", "-1", "-1", "-1", "-2"])
    assert code == 0
    assert _lines(capsys) == ["y = -1"]


def test_find_slot_non_isomorphic(capsys):
    # (-1, -1) is ramified, (1, 5) split: no common slot exists
    code = cli.main(["find-slot", "-1", "-1", "1", "5"])
    assert code == 1
    assert _lines(capsys)[0].startswith("no common slot:")


def test_find_slot_zero_is_parse_error(capsys):
    assert cli.main(["find-slot", "0", "1", "1", "1"]) == 2
    assert "parse error" in capsys.readouterr().err


# -- argparse behaviour -------------------------------------------------------


def test_no_subcommand_exits_parse(capsys):
    assert cli.main([]) == 2
    capsys.readouterr()


def test_unknown_subcommand_exits_parse(capsys):
    assert cli.main(["frobnicate"]) == 2
    capsys.readouterr()


def test_help_exits_zero(capsys):
    assert cli.main(["--help"]) == 0
    assert "azulift" in capsys.readouterr().out


# -- scenario validation ------------------------------------------------------


def test_validate_ok(tmp_path, capsys):
    p = tmp_path / "w1.json"
    save_scenario(scenario_w(N=1), p)
    code = cli.main(["validate", str(p)])
    out = _lines(capsys)
    assert code == 0
    assert out[-1] == "ok"
    assert any(line.startswith("[pass] NonSquareSlot") for line in out)


def test_validate_square_slot(tmp_path, capsys):
    p = tmp_path / "bad.json"
    save_scenario(dataclasses.replace(scenario_w(N=1), a1=4), p)
    code = cli.main(["validate", str(p)])
    out = _lines(capsys)
    assert code == 1
    assert out[-1] == "invalid"
    assert any(line.startswith("[FAIL] NonSquareSlot") for line in out)


def test_validate_missing_file(tmp_path, capsys):
    assert cli.main(["validate", str(tmp_path / "nope.json")]) == 2
    assert "parse error" in capsys.readouterr().err


# -- lift argument handling ---------------------------------------------------


def test_lift_square_slot_exits_semantic(tmp_path, capsys):
    p = tmp_path / "bad.json"
    save_scenario(dataclasses.replace(scenario_w(N=1), a1=4), p)
    code = cli.main(["lift", str(p)])
    out = capsys.readouterr().out
    assert code == 1
    assert "invalid: NonSquareSlot" in out
    assert not (tmp_path / "bad.cert.json").exists()


def test_lift_bad_json(tmp_path, capsys):
    p = tmp_path / "junk.json"
    p.write_text("{not json", encoding="utf-8")
    assert cli.main(["lift", str(p)]) == 2
    assert "parse error" in capsys.readouterr().err


def test_lift_missing_file(tmp_path, capsys):
    assert cli.main(["lift", str(tmp_path / "nope.json")]) == 2
    assert "parse error" in capsys.readouterr().err


def test_lift_bad_env_seed(tmp_path, capsys, monkeypatch):
    p = tmp_path / "w1.json"
    save_scenario(scenario_w(N=1), p)
    monkeypatch.setenv("AZULIFT_SEED", "bogus")
    assert cli.main(["lift", str(p)]) == 2
    assert "AZULIFT_SEED" in capsys.readouterr().err


def test_lift_batch_rejects_file(tmp_path, capsys):
    p = tmp_path / "w1.json"
    save_scenario(scenario_w(N=1), p)
    assert cli.main(["lift", str(p), "--batch"]) == 2
    assert "not a directory" in capsys.readouterr().err


def test_lift_batch_skips_certs_and_reports_worst(tmp_path, capsys):
    save_scenario(dataclasses.replace(scenario_w(N=1), a1=4), tmp_path / "bad.json")
    (tmp_path / "old.cert.json").write_text("{not json", encoding="utf-8")
    code = cli.main(["lift", str(tmp_path), "--batch"])
    out = capsys.readouterr().out
    assert code == 1
    assert "== bad.json" in out
    assert "old.cert.json" not in out


def test_effective_scenario_precedence(monkeypatch):
    sc = scenario_w(N=2)
    ns = argparse.Namespace(trunc=1, seed=None)
    eff = cli._effective_scenario(sc, ns)
    assert eff.N == 1 and eff.rng_seed == sc.rng_seed
    monkeypatch.setenv("AZULIFT_SEED", "7")
    assert cli._effective_scenario(sc, ns).rng_seed == 7
    flag = argparse.Namespace(trunc=None, seed=3)
    assert cli._effective_scenario(sc, flag).rng_seed == 3
    monkeypatch.setenv("AZULIFT_SEED", "x")
    with pytest.raises(FormatError):
        cli._effective_scenario(sc, ns)


def test_default_cert_path():
    assert cli._default_cert_path("d/x.json") == Path("d/x.cert.json")
    assert cli._default_cert_path("d/x.scen") == Path("d/x.scen.cert.json")
    assert cli._default_cert_path("d/x.json", "out") == Path("out/x.cert.json")


# -- full lifecycle -----------------------------------------------------------


def test_lift_verify_tamper_lifecycle(tmp_path, capsys):
    p = tmp_path / "w1.json"
    save_scenario(scenario_w(N=1), p)
    cert = tmp_path / "w1.cert.json"

    code = cli.main(["lift", str(p)])
    out = _lines(capsys)
    assert code == 0
    assert f"certificate written: {cert}" in out
    assert out[-1] == "ok"
    assert cert.exists()

    # verification reads the certificate alone
    p.unlink()
    code = cli.main(["verify", str(cert)])
    out = _lines(capsys)
    assert code == 0
    assert out[-1] == "ok"
    assert all(not line.startswith("[FAIL]") for line in out)

    # a value-level tamper parses but must fail a named check
    text = cert.read_text(encoding="utf-8")
    obj = json.loads(text)
    obj["primed"]["a2p"] = ["5"]
    tampered = tmp_path / "tampered.cert.json"
    with tampered.open("w", encoding="utf-8") as fh:
        json.dump(obj, fh)
    code = cli.main(["verify", str(tampered)])
    out = capsys.readouterr().out
    assert code == 1
    assert out.rstrip().split("\n")[-1] == "FAILED"
    assert "[FAIL] relation-a2p" in out

    # a truncated file is a parse failure, not a semantic one
    cut = tmp_path / "cut.cert.json"
    cut.write_text(text[: len(text) // 2], encoding="utf-8")
    code = cli.main(["verify", str(cut)])
    assert code == 2
    assert "parse error" in capsys.readouterr().err


def test_verify_missing_file(tmp_path, capsys):
    assert cli.main(["verify", str(tmp_path / "nope.cert.json")]) == 2
    assert "parse error" in capsys.readouterr().err
