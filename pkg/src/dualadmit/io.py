"""JSON files for algebras and structured spaces."""

from __future__ import annotations

import json
from pathlib import Path

from .algebra import SIGNATURES, FiniteAlgebra
from .errors import FormatError, SignatureError
from .spaces import KINDS, StructuredSpace, check_space_axioms


def _decode(text: str, source: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormatError(f"{source}: top level must be a JSON object")
    return data


def _int(value, where: str, source: str, lo: int = 0, hi: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(f"{source}: field {where}: expected an integer, got {json.dumps(value)}")
    if value < lo or (hi is not None and value >= hi):
        bound = f"0..{hi - 1}" if hi is not None else f">= {lo}"
        raise FormatError(f"{source}: field {where}: value {value} out of range {bound}")
    return value


def _list(value, where: str, source: str, length: int | None = None) -> list:
    if not isinstance(value, list):
        raise FormatError(f"{source}: field {where}: expected a list")
    if length is not None and len(value) != length:
        raise FormatError(f"{source}: field {where}: expected {length} entries, got {len(value)}")
    return value


# ---------------------------------------------------------------- algebras

def algebra_from_json(data: dict, source: str = "<algebra>") -> FiniteAlgebra:
    for key in ("signature", "size", "ops"):
        if key not in data:
            raise FormatError(f"{source}: missing field {key!r}")
    sig_name = data["signature"]
    if sig_name not in SIGNATURES:
        raise FormatError(f"{source}: field signature: unknown signature {json.dumps(sig_name)}")
    sig = SIGNATURES[sig_name]
    n = _int(data["size"], "size", source, lo=1)
    ops = data["ops"]
    if not isinstance(ops, dict):
        raise FormatError(f"{source}: field ops: expected an object")
    extra = sorted(set(ops) - set(sig.op_names))
    if extra:
        raise FormatError(f"{source}: field ops.{extra[0]}: not an operation of {sig_name}")
    tables = {}
    for op, arity in sig.operations:
        where = f"ops.{op}"
        if op not in ops:
            raise FormatError(f"{source}: missing field {where}")
        t = ops[op]
        if arity == 0:
            tables[op] = _int(t, where, source, hi=n)
        elif arity == 1:
            tables[op] = [_int(v, f"{where}[{i}]", source, hi=n)
                          for i, v in enumerate(_list(t, where, source, n))]
        else:
            rows = _list(t, where, source, n)
            tables[op] = [[_int(v, f"{where}[{i}][{j}]", source, hi=n)
                           for j, v in enumerate(_list(r, f"{where}[{i}]", source, n))]
                          for i, r in enumerate(rows)]
    labels = data.get("labels")
    if labels is not None:
        labels = _list(labels, "labels", source, n)
        if not all(isinstance(x, str) for x in labels) or len(set(labels)) != n:
            raise FormatError(f"{source}: field labels: expected {n} distinct strings")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise FormatError(f"{source}: field name: expected a string")
    try:
        return FiniteAlgebra(sig, n, tables, name, labels)
    except SignatureError as exc:
        raise FormatError(f"{source}: {exc}") from None


def algebra_to_json(alg: FiniteAlgebra) -> dict:
    out = {"name": alg.name, "signature": alg.signature.name, "size": alg.size,
           "ops": {op: _plain(alg.ops[op]) for op in alg.signature.op_names}}
    if alg.labels is not None:
        out["labels"] = list(alg.labels)
    return out


def _plain(t):
    if isinstance(t, (tuple, list)):
        return [_plain(x) for x in t]
    return int(t)


def load_algebra(path) -> FiniteAlgebra:
    path = Path(path)
    return algebra_from_json(_decode(path.read_text(), str(path)), str(path))


def dump_algebra(alg: FiniteAlgebra, path=None) -> str:
    text = _dumps(algebra_to_json(alg))
    if path is not None:
        Path(path).write_text(text)
    return text


# ---------------------------------------------------------------- spaces

def space_from_json(data: dict, source: str = "<space>", check: bool = True) -> StructuredSpace:
    for key in ("kind", "size"):
        if key not in data:
            raise FormatError(f"{source}: missing field {key!r}")
    kind = data["kind"]
    if kind not in KINDS:
        raise FormatError(f"{source}: field kind: unknown kind {json.dumps(kind)}")
    n = _int(data["size"], "size", source)

    def pairs(value, where):
        return [(_int(p[0], f"{where}[{k}][0]", source, hi=n), _int(p[1], f"{where}[{k}][1]", source, hi=n))
                for k, p in enumerate(_list(value, where, source))
                if _list(p, f"{where}[{k}]", source, 2) is not None]

    order = pairs(data.get("order", []), "order")
    unary = {}
    for name, table in _dict(data.get("unary", {}), "unary", source).items():
        unary[name] = [_int(v, f"unary.{name}[{i}]", source, hi=n)
                       for i, v in enumerate(_list(table, f"unary.{name}", source, n))]
    rels = {name: pairs(v, f"rels.{name}")
            for name, v in _dict(data.get("rels", {}), "rels", source).items()}
    subsets = {name: [_int(v, f"subsets.{name}[{i}]", source, hi=n)
                      for i, v in enumerate(_list(members, f"subsets.{name}", source))]
               for name, members in _dict(data.get("subsets", {}), "subsets", source).items()}
    labels = data.get("labels")
    if labels is not None:
        labels = _list(labels, "labels", source, n)
    X = StructuredSpace.from_pairs(n, order, unary, rels, subsets, kind, labels)
    if check:
        ok, axiom = check_space_axioms(X)
        if not ok:
            raise FormatError(f"{source}: space violates axiom {axiom}")
    return X


def _dict(value, where: str, source: str) -> dict:
    if not isinstance(value, dict):
        raise FormatError(f"{source}: field {where}: expected an object")
    return value


def space_to_json(X: StructuredSpace) -> dict:
    out = {"kind": X.kind, "size": X.size,
           "order": [[i, j] for i, j in X.order_pairs() if i != j],
           "unary": {k: list(v) for k, v in X.unary.items()},
           "rels": {k: [[i, j] for i, j in X.rel_pairs(k)] for k in X.rels},
           "subsets": {k: X.subset_members(k) for k in X.subsets}}
    if X.labels is not None:
        out["labels"] = list(X.labels)
    return out


def load_space(path, check: bool = True) -> StructuredSpace:
    path = Path(path)
    return space_from_json(_decode(path.read_text(), str(path)), str(path), check)


def dump_space(X: StructuredSpace, path=None) -> str:
    text = _dumps(space_to_json(X))
    if path is not None:
        Path(path).write_text(text)
    return text


def _dumps(obj) -> str:
    """JSON with innermost lists kept on one line."""
    return _fmt(obj, 0) + "\n"


def _fmt(obj, indent: int) -> str:
    pad = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_fmt(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
    if isinstance(obj, list) and any(isinstance(x, (list, dict)) for x in obj):
        items = [pad + _fmt(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + "  " * indent + "]"
    return json.dumps(obj)
