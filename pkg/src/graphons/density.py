"""Homomorphism densities of (multi)graphs and quantum graphs in step graphons.

The engine sums over assignments of motif nodes to steps by factor
elimination: each edge contributes a kernel matrix (multiplicities become
exponents), each unlabeled node its weight vector, and unlabeled variables
are summed out one at a time.  Exact mode works on integer-scaled data so
densities are exact Fractions; magnitudes decide between int64 and Python
ints.  Labeled nodes are either pinned to an anchor or kept as free axes,
which yields the whole anchor-indexed density table in one pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import CapExceeded, InputError
from .graphs import LabeledGraph, QuantumGraph, canonical_key
from .stepgraphon import _StepBase

_INT64_SAFE = 2 ** 62


@dataclass(frozen=True)
class Caps:
    """Work limits for a single density call."""
    max_motif_nodes: int = 8
    max_assignments: int = 10 ** 9
    max_table_cells: int = 50_000_000


DEFAULT_CAPS = Caps()


def _check_caps(f: LabeledGraph, q: int, caps: Caps):
    if f.node_count > caps.max_motif_nodes:
        raise CapExceeded(
            f"motif has {f.node_count} nodes, cap is {caps.max_motif_nodes}")
    if q ** f.node_count > caps.max_assignments:
        raise CapExceeded(
            f"q^|V| = {q}^{f.node_count} exceeds cap {caps.max_assignments}")


def _reshape_for(table: np.ndarray, fvars: Sequence[int],
                 union: Sequence[int], q: int) -> np.ndarray:
    shape = tuple(q if v in fvars else 1 for v in union)
    return table.reshape(shape)


def _contract(factors: list, elim_vars: list[int], q: int, max_cells: int):
    """Sum out ``elim_vars`` from the factor list; returns (factors, scalar)."""
    scalar = None
    factors = [(tuple(v), t) for v, t in factors]
    remaining = list(elim_vars)
    while remaining:
        best = None
        for var in remaining:
            scope = set()
            for fvars, _ in factors:
                if var in fvars:
                    scope.update(fvars)
            scope.discard(var)
            cost = len(scope)
            if best is None or cost < best[1]:
                best = (var, cost)
        var = best[0]
        remaining.remove(var)
        hit = [(fv, t) for fv, t in factors if var in fv]
        rest = [(fv, t) for fv, t in factors if var not in fv]
        union = sorted(set().union(*(fv for fv, _ in hit)))
        new_vars = tuple(v for v in union if v != var)
        if q ** len(union) <= max_cells:
            prod = _reshape_for(hit[0][1], hit[0][0], union, q)
            for fv, t in hit[1:]:
                prod = prod * _reshape_for(t, fv, union, q)
            summed = prod.sum(axis=union.index(var))
        elif q ** len(new_vars) <= max_cells:
            # too large to materialize; accumulate slice products over var
            summed = None
            for val in range(q):
                part = None
                for fv, t in hit:
                    if var in fv:
                        sliced = np.take(t, val, axis=fv.index(var))
                        svars = tuple(v for v in fv if v != var)
                    else:
                        sliced, svars = t, fv
                    piece = _reshape_for(sliced, svars, new_vars, q) if svars \
                        else sliced
                    part = piece if part is None else part * piece
                if not isinstance(part, np.ndarray) or part.shape != (q,) * len(new_vars):
                    part = np.broadcast_to(part, (q,) * len(new_vars))
                summed = part.copy() if summed is None else summed + part
        else:
            raise CapExceeded("elimination table exceeds the cell cap")
        if new_vars:
            rest.append((new_vars, summed))
        else:
            val = summed.item() if isinstance(summed, np.ndarray) else summed
            scalar = val if scalar is None else scalar * val
        factors = rest
    return factors, scalar


def _density_raw(f: LabeledGraph, w: _StepBase, anchor: Optional[Sequence[int]],
                 drop_label_edges: bool, caps: Caps):
    """Numerator table (or scalar) over free label axes plus its denominator."""
    n, k = f.node_count, f.label_count
    q = w.q
    _check_caps(f, q, caps)
    exact = w.mode == "exact"
    if exact:
        nmat, dscale = w.scaled_matrix()
        mvec, sscale = w.scaled_weights()
    else:
        nmat, dscale = w.matrix_float(), 1
        mvec, sscale = w.weights_float(), 1

    included = []
    for (u, v), mult in sorted(f.edge_multiplicities().items()):
        if drop_label_edges and u < k and v < k:
            continue
        included.append(((u, v), mult))
    e_total = sum(mult for _, mult in included)
    unlabeled = list(range(k, n))

    pinned = {}
    if anchor is not None:
        if len(anchor) != k:
            raise InputError(f"anchor length {len(anchor)} != label count {k}")
        for i, a in enumerate(anchor):
            a = int(a)
            if not 0 <= a < q:
                raise InputError(f"anchor index {a} out of range")
            pinned[i] = a

    if exact:
        max_n = max((abs(int(x)) for x in np.asarray(nmat).flat), default=0)
        max_m = max((int(x) for x in np.asarray(mvec).flat), default=1)
        bound = (q ** len(unlabeled)) * (max(max_n, 1) ** e_total)
        if unlabeled:
            bound *= max(max_m, 1) ** len(unlabeled)
        if bound >= _INT64_SAFE or nmat.dtype == object or mvec.dtype == object:
            nmat = nmat.astype(object)
            mvec = mvec.astype(object)

    factors = []
    scalar = None
    for (u, v), mult in included:
        table = nmat if mult == 1 else nmat ** mult
        pu, pv = pinned.get(u), pinned.get(v)
        if pu is not None and pv is not None:
            val = table[pu, pv]
            val = val.item() if isinstance(val, np.generic) else val
            scalar = val if scalar is None else scalar * val
        elif pu is not None:
            factors.append(((v,), table[pu, :]))
        elif pv is not None:
            factors.append(((u,), table[:, pv]))
        else:
            fvars = (u, v) if u < v else (v, u)
            factors.append((fvars, table if u < v else table.T))
    for x in unlabeled:
        factors.append(((x,), mvec))

    factors, elim_scalar = _contract(factors, unlabeled, q, caps.max_table_cells)
    if elim_scalar is not None:
        scalar = elim_scalar if scalar is None else scalar * elim_scalar

    den = (sscale ** len(unlabeled)) * (dscale ** e_total) if exact else 1.0

    free = [i for i in range(k) if i not in pinned]
    if not free:
        assert not factors, "factors left over with no free labels"
        num = scalar if scalar is not None else (1 if exact else 1.0)
        return num, den
    shape = (q,) * len(free)
    base = scalar if scalar is not None else (1 if exact else 1.0)
    if exact:
        out = np.full(shape, base,
                      dtype=object if nmat.dtype == object else np.int64)
    else:
        out = np.full(shape, float(base), dtype=float)
    for fv, table in factors:
        fshape = tuple(q if lab in fv else 1 for lab in free)
        out = out * table.reshape(fshape)
    return out, den


def density_table(f: LabeledGraph, w: _StepBase, drop_label_edges: bool = False,
                  caps: Caps = DEFAULT_CAPS):
    """Anchor-indexed numerator table and denominator, cached per graphon."""
    cache = getattr(w, "_cache", None)
    key = None
    if cache is not None:
        key = ("tab", canonical_key(f), drop_label_edges)
        if key in cache:
            return cache[key]
    out = _density_raw(f, w, anchor=None, drop_label_edges=drop_label_edges,
                       caps=caps)
    if cache is not None:
        cache[key] = out
    return out


def _as_value(num, den, exact: bool):
    if exact:
        return Fraction(int(num), int(den))
    return float(num) / float(den)


def t(f: LabeledGraph, w: _StepBase, caps: Caps = DEFAULT_CAPS):
    """Homomorphism density t(F, W) of an unlabeled (multi)graph."""
    if f.label_count != 0:
        raise InputError("t needs an unlabeled graph; use t_restricted")
    num, den = _density_raw(f, w, anchor=(), drop_label_edges=False, caps=caps)
    return _as_value(num, den, w.mode == "exact")


def t_restricted(f: LabeledGraph, w: _StepBase, anchor: Sequence[int],
                 caps: Caps = DEFAULT_CAPS):
    """Restricted density with labeled node i pinned to step anchor[i]."""
    anchor = tuple(int(a) for a in anchor)
    k = f.label_count
    if len(anchor) != k:
        raise InputError(f"anchor length {len(anchor)} != label count {k}")
    exact = w.mode == "exact"
    if k > 0 and w.q ** k <= 262144:
        num_table, den = density_table(f, w, caps=caps)
        for a in anchor:
            if not 0 <= a < w.q:
                raise InputError(f"anchor index {a} out of range")
        return _as_value(num_table[anchor], den, exact)
    num, den = _density_raw(f, w, anchor=anchor, drop_label_edges=False, caps=caps)
    return _as_value(num, den, exact)


def t_quantum(qg: QuantumGraph, w: _StepBase, anchor: Sequence[int] = (),
              caps: Caps = DEFAULT_CAPS):
    """Linear extension of restricted densities to quantum graphs."""
    anchor = tuple(int(a) for a in anchor)
    exact = w.mode == "exact"
    total = Fraction(0) if exact else 0.0
    for coef, g in qg.terms:
        val = t_restricted(g, w, anchor, caps=caps)
        total += (coef if exact else float(coef)) * val
    return total


def t_graph(f: LabeledGraph, g: LabeledGraph, caps: Caps = DEFAULT_CAPS):
    """hom(F, G) / |V(G)|^|V(F)| by direct backtracking over maps.

    Independent of the step-graphon engine; used as its agreement oracle.
    """
    if f.kind != "simple" or g.kind != "simple":
        raise InputError("t_graph needs simple graphs")
    if f.label_count != 0 or g.label_count != 0:
        raise InputError("t_graph needs unlabeled graphs")
    n = g.node_count
    _check_caps(f, n, caps)
    adj = [[False] * n for _ in range(n)]
    for u, v in g.edges:
        adj[u][v] = adj[v][u] = True
    nf = f.node_count
    back = [[] for _ in range(nf)]
    for u, v in f.edges:
        hi, lo = (u, v) if u > v else (v, u)
        back[hi].append(lo)
    image = [0] * nf

    def count(level: int) -> int:
        if level == nf:
            return 1
        total = 0
        checks = back[level]
        for x in range(n):
            ok = True
            for earlier in checks:
                if not adj[x][image[earlier]]:
                    ok = False
                    break
            if ok:
                image[level] = x
                total += count(level + 1)
        return total

    hom = count(0)
    return Fraction(hom, n ** nf)
