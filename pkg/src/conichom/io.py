"""JSON exchange formats and graph specifications.

Graph JSON is ``{"n": int, "edges": [[u, v], ...]}`` with edges sorted and
``u < v``. Matrix JSON is ``{"dim": int, "rows": [[...], ...]}`` with an
optional ``"labels": {"nx": int, "ny": int}``; floats are written with
enough digits to round-trip exactly.
"""

from __future__ import annotations

import json
import os
from typing import Optional

from .errors import ParameterError
from .graph import Graph, VertexPairIndex, complete, cycle, empty, kneser, path, petersen
from .linalg import SymMatrix

REPORT_DIGITS = 9

_GENERATORS = {
    "complete": (complete, 1),
    "cycle": (cycle, 1),
    "empty": (empty, 1),
    "path": (path, 1),
    "petersen": (petersen, 0),
    "kneser": (kneser, 2),
}


def report_float(v: float) -> float:
    """Round to the fixed number of significant digits used in reports."""
    return float(f"{float(v):.{REPORT_DIGITS}g}")


# -- graphs --------------------------------------------------------------------

def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [list(e) for e in g.sorted_edges()]}


def graph_from_dict(d: dict) -> Graph:
    try:
        n = d["n"]
        edges = d.get("edges", [])
    except (TypeError, KeyError, AttributeError) as exc:
        raise ParameterError(f"graph JSON needs keys 'n' and 'edges': {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParameterError("graph JSON field 'n' must be an integer")
    return Graph.from_edges(n, edges)


def dumps_graph(g: Graph) -> str:
    return json.dumps(graph_to_dict(g), separators=(",", ":"))


def loads_graph(text: str) -> Graph:
    try:
        return graph_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"invalid graph JSON: {exc}") from None


def parse_generator(spec: str) -> Optional[Graph]:
    """``name[:arg[:arg]]`` for the built-in families, or ``None`` if ``spec``
    does not name one."""
    parts = spec.strip().split(":")
    name = parts[0].lower()
    if name not in _GENERATORS:
        return None
    fn, arity = _GENERATORS[name]
    args = parts[1:]
    if len(args) != arity:
        raise ParameterError(f"generator {name!r} takes {arity} integer argument(s), got {len(args)}")
    try:
        ints = [int(a) for a in args]
    except ValueError:
        raise ParameterError(f"non-integer argument in {spec!r}") from None
    return fn(*ints)


def load_graph(spec: str) -> Graph:
    """A generator string such as ``cycle:5`` or ``kneser:5:2``, or a path to
    a graph JSON file."""
    g = parse_generator(spec)
    if g is not None:
        return g
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            return loads_graph(fh.read())
    raise ParameterError(f"{spec!r} is neither a known generator nor a graph file")


# -- matrices ------------------------------------------------------------------------

def matrix_to_dict(m: SymMatrix) -> dict:
    d = {"dim": m.dim, "rows": [[float(v) for v in row] for row in m.data]}
    if m.labels is not None:
        d["labels"] = {"nx": m.labels.nx, "ny": m.labels.ny}
    return d


def matrix_from_dict(d: dict) -> SymMatrix:
    try:
        dim = int(d["dim"])
        rows = d["rows"]
    except (TypeError, KeyError, ValueError) as exc:
        raise ParameterError(f"matrix JSON needs keys 'dim' and 'rows': {exc}") from None
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ParameterError(f"matrix rows do not match dim={dim}")
    labels = None
    if "labels" in d:
        labels = VertexPairIndex(int(d["labels"]["nx"]), int(d["labels"]["ny"]))
    return SymMatrix(rows, labels)


def dumps_matrix(m: SymMatrix) -> str:
    return json.dumps(matrix_to_dict(m))


def loads_matrix(text: str) -> SymMatrix:
    try:
        return matrix_from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParameterError(f"invalid matrix JSON: {exc}") from None


# -- witnesses and decisions -----------------------------------------------------------

def witness_to_dict(w) -> dict:
    return {
        "x": graph_to_dict(w.x),
        "y": graph_to_dict(w.y),
        "cone": w.cone.value,
        "mode": w.mode,
        "matrix": matrix_to_dict(w.h),
        "residuals": {k: report_float(v) for k, v in w.residuals.as_dict().items()},
    }


def witness_from_dict(d: dict):
    from .homomorphisms import make_witness

    m = matrix_from_dict(d["matrix"])
    return make_witness(m, graph_from_dict(d["x"]), graph_from_dict(d["y"]), d["cone"], d["mode"])


def _plain(v):
    if isinstance(v, float):
        return report_float(v)
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, (str, int, bool)) or v is None:
        return v
    return str(v)


def decision_to_dict(dec, include_matrix: bool = False) -> dict:
    out = {"verdict": dec.verdict, "method": dec.method, "diagnostics": _plain(dec.diagnostics)}
    if dec.witness is not None:
        w = dec.witness
        out["residuals"] = {k: report_float(v) for k, v in w.residuals.as_dict().items()}
        if include_matrix:
            out["witness"] = witness_to_dict(w)
    if isinstance(dec.certificate, str):
        out["certificate"] = dec.certificate
    elif dec.certificate is not None:
        out["certificate"] = "dual infeasibility certificate"
    return out


def theta_to_dict(res) -> dict:
    d = res.to_json()
    d["value"] = report_float(d["value"])
    d["gap"] = report_float(d["gap"])
    return d
