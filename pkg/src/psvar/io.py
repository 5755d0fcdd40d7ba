"""Algebra file parsing and canonical serialization, plus report assembly.

Algebra files are JSON objects ``{"name", "size", "operations"}`` where
each operation is ``{"symbol", "arity", "table"}`` with a flat row-major
table, leftmost argument most significant.  The canonical serialization
is stable: parsing a canonically formatted file and re-serializing it is
byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from .algebra import FiniteAlgebra, Signature, term_to_prefix
from .errors import AlgebraFormatError, PsvarError


def parse_algebra_obj(obj, path=None) -> FiniteAlgebra:
    def fail(msg, json_path):
        raise AlgebraFormatError(msg, path=path, json_path=json_path)

    if not isinstance(obj, dict):
        fail("top-level value must be an object", "$")
    name = obj.get("name", "")
    if not isinstance(name, str):
        fail("name must be a string", "$.name")
    size = obj.get("size")
    if not isinstance(size, int) or size < 1:
        fail("size must be an integer >= 1", "$.size")
    ops = obj.get("operations")
    if not isinstance(ops, list) or not ops:
        fail("operations must be a nonempty array", "$.operations")
    symbols = []
    tables = []
    for i, op in enumerate(ops):
        loc = f"$.operations[{i}]"
        if not isinstance(op, dict):
            fail("operation must be an object", loc)
        sym = op.get("symbol")
        if not isinstance(sym, str) or not sym:
            fail("symbol must be a nonempty string", f"{loc}.symbol")
        arity = op.get("arity")
        if not isinstance(arity, int) or arity < 1:
            fail("arity must be an integer >= 1 (constants are unsupported)", f"{loc}.arity")
        table = op.get("table")
        if not isinstance(table, list):
            fail("table must be an array", f"{loc}.table")
        if len(table) != size**arity:
            fail(
                f"table length {len(table)} != size^arity = {size ** arity}",
                f"{loc}.table",
            )
        for j, v in enumerate(table):
            if not isinstance(v, int) or not 0 <= v < size:
                fail(f"table entry {v!r} out of range 0..{size - 1}", f"{loc}.table[{j}]")
        symbols.append((sym, arity))
        tables.append(tuple(table))
    try:
        return FiniteAlgebra(Signature(tuple(symbols)), size, tuple(tables), name=name)
    except PsvarError as exc:
        fail(str(exc), "$")


def parse_algebra_file(path) -> FiniteAlgebra:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise AlgebraFormatError(f"cannot read {path}: {exc}", path=str(path))
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFormatError(
            f"{path}: invalid JSON at byte offset {exc.pos}: {exc.msg}",
            path=str(path),
        )
    return parse_algebra_obj(obj, path=str(path))


def algebra_to_obj(alg: FiniteAlgebra) -> dict:
    return {
        "name": alg.name,
        "size": alg.size,
        "operations": [
            {"symbol": sym, "arity": arity, "table": list(table)}
            for (sym, arity), table in zip(alg.signature.symbols, alg.tables)
        ],
    }


def serialize_algebra(alg: FiniteAlgebra) -> str:
    """Canonical textual form (two-space indent, fixed key order)."""
    return json.dumps(algebra_to_obj(alg), indent=2) + "\n"


def write_algebra_file(alg: FiniteAlgebra, path) -> None:
    Path(path).write_text(serialize_algebra(alg), encoding="utf-8")


# ---------------------------------------------------------------------------
# Certificates and reports
# ---------------------------------------------------------------------------

def certificate_to_obj(cert) -> dict:
    from .variety import (
        NegativeCertificate,
        NegativeUniformCertificate,
        PositiveCertificate,
    )

    if isinstance(cert, PositiveCertificate):
        return {
            "type": "positive",
            "arity": cert.arity,
            "generating_tuple": list(cert.generating_tuple),
            "theta": list(cert.theta.class_of),
            "quotient": algebra_to_obj(cert.quotient),
            "hom": list(cert.hom.map),
        }
    if isinstance(cert, NegativeCertificate):
        return {
            "type": "negative",
            "s": term_to_prefix(cert.s),
            "t": term_to_prefix(cert.t),
            "generating_tuple": list(cert.generating_tuple),
        }
    if isinstance(cert, NegativeUniformCertificate):
        return {
            "type": "negative_uniform",
            "arity": cert.arity,
            "generating_tuple": list(cert.generating_tuple),
            "theta": list(cert.theta.class_of),
            "bounds": cert.bounds,
        }
    raise PsvarError(f"unknown certificate: {cert!r}")


def build_report(operation, verdict, *, arity=None, tuple_bound=None, size=None,
                 certificates=(), timings=None, **details) -> dict:
    report = {
        "operation": operation,
        "bounds": {"arity": arity, "tuple": tuple_bound, "size": size},
        "verdict": verdict,
        "certificates": [
            c if isinstance(c, dict) else certificate_to_obj(c) for c in certificates
        ],
        "timings": timings or {},
    }
    report.update(details)
    return report
