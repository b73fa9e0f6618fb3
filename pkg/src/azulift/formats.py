"""Exact JSON interchange for scenarios and certificates.

Every field scalar travels as a string ("num/den" over the rationals, a
residue digit over a prime field); truncated-ring elements as coefficient
lists, layer elements as pairs of those. Structure constants are sparse:
mul[i][j] is the list of [k, coeff] entries of e_i e_j. Nothing is ever a
binary float, so serialization is exact and byte-deterministic.

Readers validate against the shipped JSON schemas first, then parse with
the same exact routines the rings use; any violation raises FormatError.
The big multiplication tables are only shape-checked by the schema, the
parser re-checks every entry exactly.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

from .algebra import AlgebraMap, AlgElem, Idempotent, StructAlgebra
from .errors import FormatError
from .lift import (
    SEED_SLOTS,
    CheckEntry,
    LiftCertificate,
    LiftScenario,
    ValidationReport,
    Witnesses,
)
from .rings import MultiQuadExt, TruncatedLocalRing
from .scalars import PrimeField, QQ, Rationals

SCENARIO_SCHEMA_NAME = "scenario.schema.json"
CERTIFICATE_SCHEMA_NAME = "certificate.schema.json"


@lru_cache(maxsize=None)
def schema_text(name: str) -> str:
    return resources.files("azulift.schemas").joinpath(name).read_text()


@lru_cache(maxsize=None)
def _validator(name: str):
    return jsonschema.Draft7Validator(json.loads(schema_text(name)))


def _check_schema(obj, name: str):
    err = jsonschema.exceptions.best_match(_validator(name).iter_errors(obj))
    if err is not None:
        path = "/".join(str(p) for p in err.absolute_path)
        raise FormatError(f"schema violation at {path or '<root>'}: {err.message}")


# -- field tags ---------------------------------------------------------------


def field_tag(K) -> str:
    if isinstance(K, Rationals):
        return "Q"
    if isinstance(K, PrimeField):
        return f"Fp:{K.p}"
    raise FormatError(f"no file tag for base field {K!r}")


def field_from_tag(tag: str):
    if tag == "Q":
        return QQ
    if tag.startswith("Fp:"):
        try:
            return PrimeField(int(tag[3:]))
        except ValueError as ex:
            raise FormatError(f"bad prime field tag {tag!r}: {ex}") from ex
    raise FormatError(f"unknown base field tag {tag!r}")


def _int(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise FormatError(f"{what} must be an integer, got {v!r}")
    return v


# -- scenarios ----------------------------------------------------------------


def scenario_to_obj(sc: LiftScenario) -> dict:
    K = sc.K
    return {
        "field": field_tag(K),
        "trunc": sc.N,
        "a1": K.fmt(sc.a1),
        "a2": K.fmt(sc.a2),
        "a3": K.fmt(sc.a3),
        "x2": [K.fmt(sc.x2[0]), K.fmt(sc.x2[1])],
        "x3": [K.fmt(sc.x3[0]), K.fmt(sc.x3[1])],
        "d": K.fmt(sc.d),
        "seeds": {slot: sc.seeds[i] for i, slot in enumerate(SEED_SLOTS)},
        "rng_seed": sc.rng_seed,
    }


def scenario_from_obj(obj) -> LiftScenario:
    _check_schema(obj, SCENARIO_SCHEMA_NAME)
    K = field_from_tag(obj["field"])
    seeds_obj = obj.get("seeds", {})
    seeds = tuple(_int(seeds_obj.get(slot, 0), f"seed {slot}") for slot in SEED_SLOTS)
    return LiftScenario(
        K=K,
        N=_int(obj["trunc"], "trunc"),
        a1=K.parse(obj["a1"]),
        a2=K.parse(obj["a2"]),
        a3=K.parse(obj["a3"]),
        x2=(K.parse(obj["x2"][0]), K.parse(obj["x2"][1])),
        x3=(K.parse(obj["x3"][0]), K.parse(obj["x3"][1])),
        d=K.parse(obj["d"]) if "d" in obj else None,
        seeds=seeds,
        rng_seed=_int(obj.get("rng_seed", 0), "rng_seed"),
    )


def scenario_to_json(sc: LiftScenario) -> str:
    return json.dumps(scenario_to_obj(sc), indent=2, sort_keys=True) + "\n"


# -- witnesses ----------------------------------------------------------------


def witnesses_to_obj(K, w: Witnesses) -> dict:
    def pair(uv):
        return [K.fmt(K.coerce(uv[0])), K.fmt(K.coerce(uv[1]))]

    return {
        "y": K.fmt(K.coerce(w.y)),
        "mu2": pair(w.mu2),
        "mu3": pair(w.mu3),
        "mu23": pair(w.mu23),
    }


def witnesses_from_obj(K, obj) -> Witnesses:
    def pair(v):
        return (K.parse(v[0]), K.parse(v[1]))

    return Witnesses(
        y=K.parse(obj["y"]),
        mu2=pair(obj["mu2"]),
        mu3=pair(obj["mu3"]),
        mu23=pair(obj["mu23"]),
    )


# -- algebras -----------------------------------------------------------------


def _alg_to_obj(A: StructAlgebra) -> dict:
    ser = A.base.serial
    mul = []
    for i in range(A.dim):
        rowi = []
        for j in range(A.dim):
            rowi.append([[k, ser(cv)] for k, cv in A.row_uncached(i, j)])
        mul.append(rowi)
    return {"dim": A.dim, "one": [ser(cv) for cv in A.one], "mul": mul}


def _alg_from_obj(base, obj, dim: int, name: str, provenance, assoc="none"):
    if obj["dim"] != dim:
        raise FormatError(f"{name} must have rank {dim}, file says {obj['dim']}")
    try:
        one = tuple(base.from_serial(cv) for cv in obj["one"])
        mul = obj["mul"]
        if len(mul) != dim or len(one) != dim:
            raise FormatError(f"{name} table has the wrong shape")
        rows = {}
        for i in range(dim):
            rowi = mul[i]
            if len(rowi) != dim:
                raise FormatError(f"{name} table row {i} has the wrong shape")
            for j in range(dim):
                entries = []
                for entry in rowi[j]:
                    if len(entry) != 2:
                        raise FormatError(f"{name} entry at ({i}, {j}) is malformed")
                    k = _int(entry[0], f"{name} basis index")
                    if not 0 <= k < dim:
                        raise FormatError(f"{name} basis index {k} out of range")
                    entries.append((k, base.from_serial(entry[1])))
                rows[(i, j)] = tuple(entries)
    except (ValueError, TypeError) as ex:
        raise FormatError(f"{name} table does not parse: {ex}") from ex
    return StructAlgebra(
        base, dim, rows=rows, one=one, provenance=provenance, assoc=assoc,
    )


# -- certificates -------------------------------------------------------------


def certificate_to_obj(cert: LiftCertificate) -> dict:
    T, S = cert.T, cert.S
    primed = {
        "a1p": T.serial(cert.a1p),
        "a2p": T.serial(cert.a2p),
        "a3p": T.serial(cert.a3p),
        "dp": T.serial(cert.dp),
        "yp": T.serial(cert.yp),
        "x2p": S.serial(cert.x2p),
        "x3p": S.serial(cert.x3p),
        "mu2p": S.serial(cert.mu2p),
        "mu3p": S.serial(cert.mu3p),
        "mu23p": S.serial(cert.mu23p),
    }
    return {
        "scenario": scenario_to_obj(cert.scenario),
        "witnesses": witnesses_to_obj(cert.scenario.K, cert.witnesses),
        "primed": primed,
        "Bp": _alg_to_obj(cert.Bp),
        "Ap": _alg_to_obj(cert.Ap),
        "App": _alg_to_obj(cert.App),
        "Dp": _alg_to_obj(cert.Dp),
        "alpha": {
            "twist": int(cert.alpha.twist),
            "columns": [[S.serial(cv) for cv in col] for col in cert.alpha.columns],
        },
        "c": [S.serial(cv) for cv in cert.c.coords],
        "e": [T.serial(cv) for cv in cert.e.coords],
        "report": [
            {"check": en.name, "pass": en.passed, "detail": en.evidence}
            for en in cert.report.entries
        ],
    }


def certificate_from_obj(obj) -> LiftCertificate:
    _check_schema(obj, CERTIFICATE_SCHEMA_NAME)
    sc = scenario_from_obj(obj["scenario"])
    K = sc.K
    w = witnesses_from_obj(K, obj["witnesses"])
    T = TruncatedLocalRing(K, sc.N)
    pr = obj["primed"]
    try:
        a1p = T.from_serial(pr["a1p"])
        a2p = T.from_serial(pr["a2p"])
        a3p = T.from_serial(pr["a3p"])
        dp = T.from_serial(pr["dp"])
        yp = T.from_serial(pr["yp"])
        S = MultiQuadExt(T, [a1p])
        x2p = S.from_serial(pr["x2p"])
        x3p = S.from_serial(pr["x3p"])
        mu2p = S.from_serial(pr["mu2p"])
        mu3p = S.from_serial(pr["mu3p"])
        mu23p = S.from_serial(pr["mu23p"])
        alpha_obj = obj["alpha"]
        columns = [
            tuple(S.from_serial(cv) for cv in col) for col in alpha_obj["columns"]
        ]
        ccoords = tuple(S.from_serial(cv) for cv in obj["c"])
        ecoords = tuple(T.from_serial(cv) for cv in obj["e"])
    except (ValueError, TypeError) as ex:
        raise FormatError(f"certificate element does not parse: {ex}") from ex
    Bp = _alg_from_obj(S, obj["Bp"], 16, "Bp", provenance=("file",))
    if len(columns) != Bp.dim:
        raise FormatError("alpha must have one column per basis element of Bp")
    alpha = AlgebraMap(Bp, Bp, columns, twist=_int(alpha_obj["twist"], "twist"))
    if len(ccoords) != Bp.dim:
        raise FormatError("c must be a coordinate vector over Bp")
    c = AlgElem(Bp, ccoords)
    Ap = _alg_from_obj(T, obj["Ap"], 64, "Ap", provenance=("crossed", Bp, alpha, c))
    App = _alg_from_obj(T, obj["App"], 256, "App", provenance=("file",))
    if len(ecoords) != App.dim:
        raise FormatError("e must be a coordinate vector over App")
    e = Idempotent(AlgElem(App, ecoords))
    Dp = _alg_from_obj(T, obj["Dp"], 64, "Dp", provenance=("file",))
    report = ValidationReport(
        [
            CheckEntry(r["check"], bool(r["pass"]), r.get("detail", ""))
            for r in obj["report"]
        ]
    )
    return LiftCertificate(
        scenario=sc, witnesses=w, T=T, S=S,
        a1p=a1p, x2p=x2p, x3p=x3p, mu2p=mu2p, mu3p=mu3p, mu23p=mu23p,
        yp=yp, a2p=a2p, a3p=a3p, dp=dp,
        Bp=Bp, Ap=Ap, App=App, Dp=Dp, alpha=alpha, c=c, e=e, report=report,
    )


def certificate_to_json(cert: LiftCertificate) -> str:
    """One top-level key per line, values compact; big but diffable per field."""
    obj = certificate_to_obj(cert)
    lines = ",\n".join(
        json.dumps(k) + ": " + json.dumps(obj[k], sort_keys=True, separators=(",", ":"))
        for k in sorted(obj)
    )
    return "{\n" + lines + "\n}\n"


# -- file IO ------------------------------------------------------------------


def _load_json(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as ex:
        raise FormatError(f"cannot read {path}: {ex}") from ex
    except json.JSONDecodeError as ex:
        raise FormatError(f"invalid JSON in {path}: {ex}") from ex


def load_scenario(path) -> LiftScenario:
    return scenario_from_obj(_load_json(path))


def load_certificate(path) -> LiftCertificate:
    return certificate_from_obj(_load_json(path))


def save_scenario(sc: LiftScenario, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_json(sc))


def save_certificate(cert: LiftCertificate, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(certificate_to_json(cert))


__all__ = [
    "field_tag",
    "field_from_tag",
    "scenario_to_obj",
    "scenario_from_obj",
    "scenario_to_json",
    "witnesses_to_obj",
    "witnesses_from_obj",
    "certificate_to_obj",
    "certificate_from_obj",
    "certificate_to_json",
    "load_scenario",
    "load_certificate",
    "save_scenario",
    "save_certificate",
    "schema_text",
    "SCENARIO_SCHEMA_NAME",
    "CERTIFICATE_SCHEMA_NAME",
]
