"""File formats: graph text, graphon/quantum/group JSON, rational strings.

Rationals serialize as "p/q" strings ("p" when integral); float-mode values
are plain JSON numbers.  Graph text is 1-based: "n k simple|multi" on the
first line, one "u v" edge per line, repeated lines for multiplicities.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cayley import FiniteGroup
from .errors import InputError
from .graphs import LabeledGraph, QuantumGraph
from .stepgraphon import StepGraphon, StepKernel


def number_to_json(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x
    return str(Fraction(x))


def number_from_json(v):
    if isinstance(v, (int, float)):
        return float(v) if isinstance(v, float) else Fraction(v)
    try:
        return Fraction(str(v))
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number {v!r}") from exc


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse rational {text!r}") from exc


# -- graphons ---------------------------------------------------------------

def graphon_to_obj(w: StepGraphon | StepKernel) -> dict:
    return {
        "weights": [number_to_json(x) for x in w.weights],
        "matrix": [[number_to_json(x) for x in row] for row in w.matrix],
        "mode": w.mode,
    }


def graphon_from_obj(obj: dict) -> StepGraphon:
    try:
        mode = obj.get("mode", "exact")
        weights = [number_from_json(x) for x in obj["weights"]]
        kernel = [[number_from_json(x) for x in row] for row in obj["matrix"]]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graphon JSON: {exc}") from exc
    if mode == "float":
        weights = [float(x) for x in weights]
        kernel = [[float(x) for x in row] for row in kernel]
    return StepGraphon(weights, kernel, mode=mode, raw=bool(obj.get("raw", False)))


def load_graphon(path: str) -> StepGraphon:
    with open(path) as fh:
        return graphon_from_obj(json.load(fh))


# -- graphs -----------------------------------------------------------------

def graph_to_text(g: LabeledGraph) -> str:
    lines = [f"{g.node_count} {g.label_count} {g.kind}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in g.edges)
    return "\n".join(lines) + "\n"


def graph_from_text(text: str) -> LabeledGraph:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise InputError("empty graph text")
    head = lines[0].split()
    if len(head) != 3 or head[2] not in ("simple", "multi"):
        raise InputError(f"bad header {lines[0]!r}; expected 'n k simple|multi'")
    try:
        n, k = int(head[0]), int(head[1])
    except ValueError as exc:
        raise InputError(f"bad header {lines[0]!r}") from exc
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InputError(f"bad edge line {ln!r}")
        u, v = int(parts[0]), int(parts[1])
        edges.append((u - 1, v - 1))
    return LabeledGraph(n, k, edges, head[2])


def load_graph(path: str) -> LabeledGraph:
    with open(path) as fh:
        return graph_from_text(fh.read())


def graph_to_obj(g: LabeledGraph) -> dict:
    return {
        "nodes": g.node_count,
        "labels": g.label_count,
        "kind": g.kind,
        "edges": [[u + 1, v + 1] for u, v in g.edges],
    }


def graph_from_obj(obj: dict) -> LabeledGraph:
    try:
        return LabeledGraph(obj["nodes"], obj["labels"],
                            [(u - 1, v - 1) for u, v in obj["edges"]],
                            obj.get("kind", "simple"))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graph JSON: {exc}") from exc


# -- quantum graphs ------------------------------------------------------------

def quantum_to_obj(qg: QuantumGraph) -> list:
    return [{"coef": str(c), "graph": graph_to_obj(g)} for c, g in qg.terms]


def quantum_from_obj(obj) -> QuantumGraph:
    if not isinstance(obj, list):
        raise InputError("quantum graph JSON must be a list of terms")
    terms = []
    for item in obj:
        try:
            terms.append((parse_rational(str(item["coef"])),
                          graph_from_obj(item["graph"])))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed quantum term: {exc}") from exc
    return QuantumGraph(terms)


def load_quantum(path: str) -> QuantumGraph:
    with open(path) as fh:
        return quantum_from_obj(json.load(fh))


# -- groups ----------------------------------------------------------------------

def group_to_obj(g: FiniteGroup) -> dict:
    obj = {"order": g.order, "table": [list(row) for row in g.table]}
    if g.names is not None:
        obj["names"] = list(g.names)
    return obj


def group_from_obj(obj: dict) -> FiniteGroup:
    try:
        table = obj["table"]
        if len(table) != obj.get("order", len(table)):
            raise InputError("order field does not match table size")
        return FiniteGroup.from_table(table, names=obj.get("names"))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed group JSON: {exc}") from exc


def load_group(path: str) -> FiniteGroup:
    with open(path) as fh:
        return group_from_obj(json.load(fh))
