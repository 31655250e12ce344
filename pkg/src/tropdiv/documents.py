"""The self-contained document format consumed by the service and CLI.

A document is a single JSON object with exact-rational strings:

    {
      "vertices": ["P", "Q"],
      "edges": [{"id": "e", "from": "P", "to": "Q", "length": "3/2"}],
      "divisors": {"K": [{"point": {"vertex": "P"}, "coeff": 1}]},
      "functions": {"f": [{"edge": "e",
                           "breakpoints": [{"offset": "0", "value": "0"},
                                           {"offset": "3/2", "value": "3"}]}]}
    }

Lengths are "p", "p/q", or "inf"; points are {"vertex": id},
{"edge": id, "offset": "p/q"}, or {"end": edge id}; infinite edges carry an
integer "end_slope" in function fragments.  Parse errors report a location:
line/column for malformed JSON, a JSON path for semantic problems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from .divisors import Divisor
from .functions import EdgePL, RationalFunction
from .graphs import GraphError, GraphPoint, MetricGraph
from .rationals import RationalParseError, format_rational, parse_rational


class DocumentError(ValueError):
    """A parse or validation failure, with a best-effort location."""

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, where: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.where = where

    def to_dict(self) -> Dict:
        out = {"message": self.message}
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        if self.where:
            out["where"] = self.where
        return out


@dataclass
class Document:
    graph: MetricGraph
    divisors: Dict[str, Divisor] = field(default_factory=dict)
    functions: Dict[str, RationalFunction] = field(default_factory=dict)

    def divisor(self, name: str) -> Divisor:
        if name not in self.divisors:
            raise DocumentError(f"unknown divisor {name!r}", where="divisors")
        return self.divisors[name]

    def function(self, name: str) -> RationalFunction:
        if name not in self.functions:
            raise DocumentError(f"unknown function {name!r}", where="functions")
        return self.functions[name]


def _rational(text, where: str, allow_inf: bool = False):
    if not isinstance(text, str):
        if isinstance(text, int):
            return Fraction(text)
        raise DocumentError(f"expected an exact rational string, got {text!r}",
                            where=where)
    try:
        return parse_rational(text, allow_inf=allow_inf)
    except RationalParseError as exc:
        raise DocumentError(str(exc), where=where) from None


def parse_point(g: MetricGraph, obj, where: str = "point") -> GraphPoint:
    if not isinstance(obj, dict):
        raise DocumentError(f"point must be an object, got {obj!r}", where=where)
    try:
        if "vertex" in obj:
            return g.vertex_point(obj["vertex"])
        if "end" in obj:
            return g.end_point(obj["end"])
        if "edge" in obj:
            offset = _rational(obj.get("offset"), where + ".offset")
            return g.edge_point(obj["edge"], offset)
    except GraphError as exc:
        raise DocumentError(str(exc), where=where) from None
    raise DocumentError("point needs a 'vertex', 'edge', or 'end' key", where=where)


def point_to_obj(p: GraphPoint) -> Dict:
    if p.vertex is not None:
        return {"vertex": p.vertex}
    return {"edge": p.edge, "offset": format_rational(p.offset)}


def divisor_to_obj(d: Divisor) -> List[Dict]:
    return [{"point": point_to_obj(p), "coeff": a} for p, a in d.items()]


def parse_divisor(g: MetricGraph, items, where: str) -> Divisor:
    if not isinstance(items, list):
        raise DocumentError("divisor must be a list of {point, coeff}", where=where)
    terms = []
    for i, item in enumerate(items):
        here = f"{where}[{i}]"
        if not isinstance(item, dict) or "point" not in item or "coeff" not in item:
            raise DocumentError("divisor term needs 'point' and 'coeff'", where=here)
        coeff = item["coeff"]
        if not isinstance(coeff, int) or isinstance(coeff, bool):
            raise DocumentError(f"coefficient must be an integer, got {coeff!r}",
                                where=here + ".coeff")
        terms.append((coeff, parse_point(g, item["point"], here + ".point")))
    return Divisor.of(g, *terms)


def function_to_obj(f: RationalFunction) -> List[Dict]:
    out = []
    for e in f.host.edges:
        data = f.edge_data(e.id)
        entry = {
            "edge": e.id,
            "breakpoints": [{"offset": format_rational(t), "value": format_rational(v)}
                            for t, v in data.breakpoints],
        }
        if data.end_slope is not None:
            entry["end_slope"] = data.end_slope
        out.append(entry)
    return out


def parse_function(g: MetricGraph, items, where: str) -> RationalFunction:
    if not g.edges:
        if (not isinstance(items, list) or len(items) != 1
                or "value" not in items[0]):
            raise DocumentError("edgeless graph takes [{'value': 'p/q'}]", where=where)
        return RationalFunction(g, {}, constant=_rational(items[0]["value"],
                                                          where + "[0].value"))
    if not isinstance(items, list):
        raise DocumentError("function must be a list of edge fragments", where=where)
    data = {}
    for i, item in enumerate(items):
        here = f"{where}[{i}]"
        if not isinstance(item, dict) or "edge" not in item:
            raise DocumentError("function fragment needs an 'edge'", where=here)
        eid = item["edge"]
        bps = []
        for j, bp in enumerate(item.get("breakpoints", ())):
            bps.append((_rational(bp.get("offset"), f"{here}.breakpoints[{j}].offset"),
                        _rational(bp.get("value"), f"{here}.breakpoints[{j}].value")))
        end_slope = item.get("end_slope")
        if end_slope is not None and (not isinstance(end_slope, int) or isinstance(end_slope, bool)):
            raise DocumentError("end_slope must be an integer", where=here + ".end_slope")
        data[eid] = EdgePL(tuple(bps), end_slope)
    try:
        return RationalFunction(g, data)
    except (ValueError, KeyError) as exc:
        raise DocumentError(str(exc), where=where) from None


def parse_document(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed document: {exc.msg}",
                            line=exc.lineno, column=exc.colno) from None
    if not isinstance(obj, dict):
        raise DocumentError("document must be a JSON object")
    if "vertices" not in obj or "edges" not in obj:
        raise DocumentError("document needs 'vertices' and 'edges'")
    vertices = obj["vertices"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise DocumentError("'vertices' must be a list of ids", where="vertices")
    edges = []
    lengths = {}
    if not isinstance(obj["edges"], list):
        raise DocumentError("'edges' must be a list", where="edges")
    for i, e in enumerate(obj["edges"]):
        here = f"edges[{i}]"
        if not isinstance(e, dict):
            raise DocumentError("edge must be an object", where=here)
        for key in ("id", "from", "to", "length"):
            if key not in e:
                raise DocumentError(f"edge needs {key!r}", where=here)
        edges.append((e["id"], e["from"], e["to"]))
        lengths[e["id"]] = _rational(e["length"], here + ".length", allow_inf=True)
    try:
        graph = MetricGraph(vertices, edges, lengths)
    except GraphError as exc:
        raise DocumentError(str(exc), where="edges") from None
    doc = Document(graph=graph)
    for name, items in (obj.get("divisors") or {}).items():
        doc.divisors[name] = parse_divisor(graph, items, f"divisors.{name}")
    for name, items in (obj.get("functions") or {}).items():
        doc.functions[name] = parse_function(graph, items, f"functions.{name}")
    return doc


def serialize_document(doc: Document) -> str:
    obj = {
        "vertices": list(doc.graph.vertices),
        "edges": [{"id": e.id, "from": e.u, "to": e.v,
                   "length": format_rational(doc.graph.length(e.id))}
                  for e in doc.graph.edges],
    }
    if doc.divisors:
        obj["divisors"] = {name: divisor_to_obj(d) for name, d in doc.divisors.items()}
    if doc.functions:
        obj["functions"] = {name: function_to_obj(f) for name, f in doc.functions.items()}
    return json.dumps(obj, indent=2, sort_keys=False)


def rank_report_to_obj(report) -> Dict:
    out = {
        "rank": report.rank,
        "scales_tested": list(report.scales_tested),
        "stabilized": report.stabilized,
    }
    if report.witness is not None:
        out["witness"] = divisor_to_obj(report.witness)
    return out
