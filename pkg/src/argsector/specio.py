"""JSON function-spec documents.

A document is an object with a ``variant`` tag, the variant's parameters,
an optional ``schemaVersion`` (only 1 is known) and an optional declared
``order``.  Complex numbers are written as plain numbers when real and as
``[re, im]`` pairs otherwise.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .functions import (
    CanonicalProduct,
    ExpPoly,
    Fryntov,
    FunctionSpec,
    Monomial,
    Polynomial,
    SpecError,
    ZeroEntry,
    ZeroProduct,
)

SCHEMA_VERSION = 1

E_PARSE = "E_PARSE"
E_VARIANT = "E_VARIANT"
E_MISSING = "E_MISSING"
E_RANGE = "E_RANGE"
E_TYPE = "E_TYPE"
E_SCHEMA = "E_SCHEMA"


class SpecParseError(SpecError):
    def __init__(self, code: str, message: str, path: str = "", line: int | None = None,
                 column: int | None = None):
        where = f" at {path}" if path else ""
        if line is not None:
            where += f" (line {line}, column {column})"
        super().__init__(f"{code}: {message}{where}")
        self.code = code
        self.path = path
        self.line = line
        self.column = column


@dataclass(frozen=True)
class FunctionSpecDocument:
    spec: FunctionSpec
    order: float | None = None
    schema_version: int = SCHEMA_VERSION


_VARIANTS = {
    "monomial": ("n",),
    "polynomial": ("coefficients",),
    "zeroProduct": ("zeros",),
    "canonicalProduct": ("moduli",),
    "fryntov": ("T", "rho", "K"),
    "expPoly": ("g",),
}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _real(x, path: str) -> float:
    if not _is_number(x):
        raise SpecParseError(E_TYPE, "expected a number", path)
    v = float(x)
    if not math.isfinite(v):
        raise SpecParseError(E_RANGE, "number must be finite", path)
    return v


def _integer(x, path: str) -> int:
    if isinstance(x, float) and x.is_integer():
        x = int(x)
    if not isinstance(x, int) or isinstance(x, bool):
        raise SpecParseError(E_TYPE, "expected an integer", path)
    return x


def _complex(x, path: str) -> complex:
    if _is_number(x):
        return complex(_real(x, path), 0.0)
    if isinstance(x, list) and len(x) == 2:
        return complex(_real(x[0], path + "[0]"), _real(x[1], path + "[1]"))
    raise SpecParseError(E_TYPE, "expected a number or an [re, im] pair", path)


def _complex_list(x, path: str) -> tuple:
    if not isinstance(x, list):
        raise SpecParseError(E_TYPE, "expected a list", path)
    if not x:
        raise SpecParseError(E_RANGE, "list must be nonempty", path)
    return tuple(_complex(v, f"{path}[{i}]") for i, v in enumerate(x))


def _spec_from_object(obj: dict) -> FunctionSpec:
    variant = obj["variant"]
    for key in _VARIANTS[variant]:
        if key not in obj:
            raise SpecParseError(E_MISSING, f"missing field {key!r}", variant)

    if variant == "monomial":
        n = _integer(obj["n"], "n")
        if n < 1:
            raise SpecParseError(E_RANGE, "n must be >= 1", "n")
        return Monomial(n)

    if variant == "polynomial":
        c = _complex_list(obj["coefficients"], "coefficients")
        if len(c) < 2 or c[-1] == 0:
            raise SpecParseError(E_RANGE, "need degree >= 1 with nonzero leading coefficient",
                                 "coefficients")
        return Polynomial(c)

    if variant == "zeroProduct":
        zs = obj["zeros"]
        if not isinstance(zs, list):
            raise SpecParseError(E_TYPE, "expected a list", "zeros")
        entries = []
        for i, item in enumerate(zs):
            p = f"zeros[{i}]"
            if not isinstance(item, dict):
                raise SpecParseError(E_TYPE, "expected an object", p)
            if "location" not in item:
                raise SpecParseError(E_MISSING, "missing field 'location'", p)
            m = _integer(item.get("multiplicity", 1), p + ".multiplicity")
            if m < 1:
                raise SpecParseError(E_RANGE, "multiplicity must be >= 1", p + ".multiplicity")
            entries.append(ZeroEntry(_complex(item["location"], p + ".location"), m))
        g = _complex_list(obj["g"], "g") if "g" in obj else (0.0,)
        return ZeroProduct(tuple(entries), g)

    if variant == "canonicalProduct":
        mods = obj["moduli"]
        if not isinstance(mods, list) or not mods:
            raise SpecParseError(E_TYPE, "expected a nonempty list of [rho, m] pairs", "moduli")
        out = []
        for i, item in enumerate(mods):
            p = f"moduli[{i}]"
            if not isinstance(item, list) or len(item) != 2:
                raise SpecParseError(E_TYPE, "expected an [rho, m] pair", p)
            rho = _real(item[0], p + "[0]")
            m = _integer(item[1], p + "[1]")
            if rho <= 0 or m < 1:
                raise SpecParseError(E_RANGE, "need rho > 0 and m >= 1", p)
            out.append((rho, m))
        return CanonicalProduct(tuple(out))

    if variant == "fryntov":
        T = _real(obj["T"], "T")
        rho = _real(obj["rho"], "rho")
        K = _integer(obj["K"], "K")
        if T <= 1:
            raise SpecParseError(E_RANGE, "T must exceed 1", "T")
        if not 0 < rho <= 1:
            raise SpecParseError(E_RANGE, "rho must lie in (0, 1]", "rho")
        if K < 1:
            raise SpecParseError(E_RANGE, "K must be >= 1", "K")
        return Fryntov(T, rho, K)

    return ExpPoly(_complex_list(obj["g"], "g"))


def parse_document(text: str) -> FunctionSpecDocument:
    """Parse and validate a spec document, raising :class:`SpecParseError`."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecParseError(E_PARSE, exc.msg, "", exc.lineno, exc.colno) from None
    if not isinstance(obj, dict):
        raise SpecParseError(E_TYPE, "document must be a JSON object")
    version = obj.get("schemaVersion", SCHEMA_VERSION)
    if _integer(version, "schemaVersion") != SCHEMA_VERSION:
        raise SpecParseError(E_SCHEMA, f"unsupported schemaVersion {version!r}", "schemaVersion")
    if "variant" not in obj:
        raise SpecParseError(E_MISSING, "missing field 'variant'")
    if obj["variant"] not in _VARIANTS:
        raise SpecParseError(E_VARIANT, f"unknown variant {obj['variant']!r}", "variant")
    order = None
    if obj.get("order") is not None:
        order = _real(obj["order"], "order")
        if order < 0:
            raise SpecParseError(E_RANGE, "order must be >= 0", "order")
    return FunctionSpecDocument(_spec_from_object(obj), order, SCHEMA_VERSION)


def parse_function_spec(text: str) -> FunctionSpec:
    return parse_document(text).spec


def _num(z) -> float | list:
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


def spec_to_object(spec: FunctionSpec) -> dict:
    if isinstance(spec, Monomial):
        return {"variant": "monomial", "n": int(spec.n)}
    if isinstance(spec, Polynomial):
        return {"variant": "polynomial", "coefficients": [_num(c) for c in spec.coefficients]}
    if isinstance(spec, ZeroProduct):
        zs = []
        for e in spec.zeros:
            e = e if isinstance(e, ZeroEntry) else ZeroEntry(*e)
            zs.append({"location": _num(e.location), "multiplicity": e.multiplicity})
        return {"variant": "zeroProduct", "zeros": zs, "g": [_num(c) for c in spec.g]}
    if isinstance(spec, CanonicalProduct):
        return {"variant": "canonicalProduct",
                "moduli": [[float(r), int(m)] for r, m in spec.moduli]}
    if isinstance(spec, Fryntov):
        return {"variant": "fryntov", "T": float(spec.T), "rho": float(spec.rho), "K": int(spec.K)}
    if isinstance(spec, ExpPoly):
        return {"variant": "expPoly", "g": [_num(c) for c in spec.g]}
    raise SpecError(f"cannot serialize {spec!r}")


def document_to_object(doc: FunctionSpecDocument) -> dict:
    obj = {"schemaVersion": doc.schema_version}
    obj.update(spec_to_object(doc.spec))
    if doc.order is not None:
        obj["order"] = float(doc.order)
    return obj


def serialize_document(doc: FunctionSpecDocument) -> str:
    return json.dumps(document_to_object(doc), sort_keys=False)
