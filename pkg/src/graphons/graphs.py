"""k-labeled graphs and quantum graphs.

A k-labeled graph carries labels 1..k on its first k nodes (0-based
internally: nodes 0..k-1).  Isomorphisms must fix labeled nodes pointwise,
so canonical keys minimize only over permutations of unlabeled nodes.
Loops are excluded throughout.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Optional

from .errors import CapExceeded, InputError

CANONICAL_NODE_CAP = 12
ENUMERATION_NODE_CAP = 8
_PERM_BUDGET = 4_000_000


class LabeledGraph:
    """Simple or multi graph with labels on its first ``label_count`` nodes."""

    __slots__ = ("node_count", "label_count", "edges", "kind", "_key")

    def __init__(self, node_count: int, label_count: int,
                 edges: Iterable[tuple[int, int]], kind: str = "simple"):
        if kind not in ("simple", "multi"):
            raise InputError(f"unknown kind {kind!r}")
        node_count = int(node_count)
        label_count = int(label_count)
        if node_count < 0 or not (0 <= label_count <= node_count):
            raise InputError(
                f"need 0 <= label_count <= node_count, got k={label_count}, n={node_count}")
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise InputError(f"loop at node {u} (loops are excluded)")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise InputError(f"edge ({u},{v}) out of range")
            norm.append((u, v) if u < v else (v, u))
        norm.sort()
        if kind == "simple":
            for a, b in zip(norm, norm[1:]):
                if a == b:
                    raise InputError(f"repeated edge {a} in a simple graph")
        self.node_count = node_count
        self.label_count = label_count
        self.edges = tuple(norm)
        self.kind = kind
        self._key: Optional[bytes] = None

    # -- basic accessors ---------------------------------------------------

    @property
    def edge_count(self) -> int:
        """Number of edges counted with multiplicity."""
        return len(self.edges)

    def edge_multiplicities(self) -> dict[tuple[int, int], int]:
        mult: dict[tuple[int, int], int] = {}
        for e in self.edges:
            mult[e] = mult.get(e, 0) + 1
        return mult

    def unlabeled_nodes(self) -> range:
        return range(self.label_count, self.node_count)

    def has_edge(self, u: int, v: int) -> bool:
        e = (u, v) if u < v else (v, u)
        return e in self.edge_multiplicities()

    def __repr__(self):
        return (f"LabeledGraph(n={self.node_count}, k={self.label_count}, "
                f"edges={list(self.edges)}, kind={self.kind!r})")

    def __eq__(self, other):
        if not isinstance(other, LabeledGraph):
            return NotImplemented
        return canonical_key(self) == canonical_key(other)

    def __hash__(self):
        return hash(canonical_key(self))


# -- canonical form ---------------------------------------------------------

def _refined_colors(g: LabeledGraph) -> list:
    """Stable node colors; labeled nodes are individualized from the start.

    Colors are nested tuples built identically for isomorphic inputs, so
    sorting unlabeled nodes by color gives an isomorphism-invariant
    partition.
    """
    mult = g.edge_multiplicities()
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(g.node_count)]
    for (u, v), m in mult.items():
        nbrs[u].append((v, m))
        nbrs[v].append((u, m))
    colors = [("L", i) if i < g.label_count else ("U",) for i in range(g.node_count)]
    for _ in range(g.node_count):
        new = []
        for x in range(g.node_count):
            sig = tuple(sorted((colors[y], m) for y, m in nbrs[x]))
            new.append((colors[x], sig))
        if len(set(map(repr, new))) == len(set(map(repr, colors))):
            colors = new
            break
        colors = new
    return colors


def canonical_key(g: LabeledGraph) -> bytes:
    """Canonical byte string: equal iff label-fixing isomorphic.

    Minimizes the upper-triangle multiplicity encoding over permutations of
    unlabeled nodes, restricted to the color classes of an iterated
    refinement (labels stay fixed).
    """
    if g._key is not None:
        return g._key
    if g.node_count > CANONICAL_NODE_CAP:
        raise CapExceeded(
            f"canonical_key supports at most {CANONICAL_NODE_CAP} nodes, got {g.node_count}")
    n, k = g.node_count, g.label_count
    colors = _refined_colors(g)
    classes: dict[str, list[int]] = {}
    for x in range(k, n):
        classes.setdefault(repr(colors[x]), []).append(x)
    class_lists = [sorted(v) for _, v in sorted(classes.items())]
    budget = 1
    for cl in class_lists:
        for i in range(2, len(cl) + 1):
            budget *= i
        if budget > _PERM_BUDGET:
            raise CapExceeded("canonical_key permutation budget exceeded")
    mult = g.edge_multiplicities()

    best: Optional[tuple] = None
    for perm_parts in itertools.product(*(itertools.permutations(cl) for cl in class_lists)):
        order = list(range(k))
        for part in perm_parts:
            order.extend(part)
        pos = [0] * n
        for p, x in enumerate(order):
            pos[x] = p
        enc = [0] * (n * (n - 1) // 2)
        for (u, v), m in mult.items():
            a, b = pos[u], pos[v]
            if a > b:
                a, b = b, a
            enc[a * (2 * n - a - 1) // 2 + (b - a - 1)] = m
        cand = tuple(enc)
        if best is None or cand < best:
            best = cand
    key = repr((n, k, g.kind, best)).encode()
    g._key = key
    return key


# -- operations --------------------------------------------------------------

def glue_product(g: LabeledGraph, h: LabeledGraph) -> LabeledGraph:
    """Glue two k-labeled graphs: identify equally labeled nodes.

    Parallel edges are reduced to one in the simple category and their
    multiplicities added in the multi category.
    """
    if g.label_count != h.label_count:
        raise InputError("glue_product needs equal label counts")
    if g.kind != h.kind:
        raise InputError("glue_product needs equal kinds")
    k = g.label_count
    shift = g.node_count - k
    edges = list(g.edges)
    for u, v in h.edges:
        uu = u if u < k else u + shift
        vv = v if v < k else v + shift
        edges.append((uu, vv))
    n = g.node_count + h.node_count - k
    if g.kind == "simple":
        edges = sorted(set((min(u, v), max(u, v)) for u, v in edges))
    return LabeledGraph(n, k, edges, g.kind)


def unlabel(g: LabeledGraph) -> LabeledGraph:
    """Forget the labels; same nodes and edges."""
    return LabeledGraph(g.node_count, 0, g.edges, g.kind)


def subdivide_edge(g: LabeledGraph, edge: tuple[int, int], m: int) -> LabeledGraph:
    """Replace one copy of ``edge`` by a path of m edges through m-1 new
    unlabeled nodes.  m=1 returns the graph unchanged."""
    if m < 1:
        raise InputError("subdivision count m must be >= 1")
    u, v = (edge[0], edge[1]) if edge[0] < edge[1] else (edge[1], edge[0])
    if (u, v) not in g.edge_multiplicities():
        raise InputError(f"edge {edge} not present")
    if u < g.label_count and v < g.label_count:
        raise InputError("subdivision needs at least one unlabeled endpoint")
    if m == 1:
        return g
    edges = list(g.edges)
    edges.remove((u, v))
    fresh = list(range(g.node_count, g.node_count + m - 1))
    chain = [u] + fresh + [v]
    edges.extend(zip(chain, chain[1:]))
    return LabeledGraph(g.node_count + m - 1, g.label_count, edges, g.kind)


def blow_up(g: LabeledGraph, m: int) -> LabeledGraph:
    """Replace every node by m copies and every edge by K_{m,m}."""
    if g.kind != "simple" or g.label_count != 0:
        raise InputError("blow_up needs a simple unlabeled graph")
    if m < 1:
        raise InputError("blow-up factor must be >= 1")
    edges = []
    for u, v in g.edges:
        for i in range(m):
            for j in range(m):
                edges.append((u * m + i, v * m + j))
    return LabeledGraph(g.node_count * m, 0, edges, "simple")


_ENUM_CACHE: dict[tuple, tuple] = {}


def enumerate_klabeled(k: int, max_nodes: int,
                       independent_labels: bool = False) -> list[LabeledGraph]:
    """All isomorphism classes of k-labeled simple graphs with <= max_nodes
    nodes (isomorphisms fix labels), ordered by canonical key.

    ``independent_labels`` restricts to graphs whose labeled nodes are
    pairwise nonadjacent.
    """
    if not (0 <= k <= max_nodes <= ENUMERATION_NODE_CAP):
        raise CapExceeded(
            f"enumeration needs 0 <= k <= max_nodes <= {ENUMERATION_NODE_CAP}")
    cache_key = (k, max_nodes, independent_labels)
    if cache_key in _ENUM_CACHE:
        return list(_ENUM_CACHE[cache_key])
    found: dict[bytes, LabeledGraph] = {}
    for n in range(max(k, 1), max_nodes + 1):
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if not (independent_labels and i < k and j < k)]
        if 2 ** len(pairs) > _PERM_BUDGET:
            raise CapExceeded(f"enumeration budget exceeded at n={n}")
        for mask in range(2 ** len(pairs)):
            edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
            g = LabeledGraph(n, k, edges, "simple")
            key = canonical_key(g)
            if key not in found:
                found[key] = g
    out = [found[key] for key in sorted(found)]
    _ENUM_CACHE[cache_key] = tuple(out)
    return out


# -- named graphs -------------------------------------------------------------

def complete(n: int, labels: int = 0) -> LabeledGraph:
    return LabeledGraph(n, labels, [(i, j) for i in range(n) for j in range(i + 1, n)])


def empty(n: int, labels: int = 0) -> LabeledGraph:
    return LabeledGraph(n, labels, [])


def path(n: int, labels: int = 0) -> LabeledGraph:
    """Path on n nodes, consecutive along node order; labels on first nodes."""
    return LabeledGraph(n, labels, [(i, i + 1) for i in range(n - 1)])


def path_both_labeled(m: int) -> LabeledGraph:
    """P_{m+1} with m edges and both endpoints labeled (labels 1 and 2)."""
    if m < 1:
        raise InputError("need at least one edge")
    if m == 1:
        return LabeledGraph(2, 2, [(0, 1)])
    chain = [0] + list(range(2, m + 1)) + [1]
    return LabeledGraph(m + 1, 2, list(zip(chain, chain[1:])))


def cycle(n: int, labels: int = 0) -> LabeledGraph:
    if n < 3:
        raise InputError("cycle needs at least 3 nodes")
    return LabeledGraph(n, labels, [(i, (i + 1) % n) for i in range(n)])


def star(leaves: int, labels: int = 0) -> LabeledGraph:
    """Star with given number of leaves, centered at node 0."""
    return LabeledGraph(leaves + 1, labels, [(0, i + 1) for i in range(leaves)])


def multi_edge(mult: int, labels: int = 0) -> LabeledGraph:
    """Two nodes joined by ``mult`` parallel edges (C_2 for mult=2)."""
    return LabeledGraph(2, labels, [(0, 1)] * mult, "multi")


def petersen() -> LabeledGraph:
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    return LabeledGraph(10, 0, edges)


_FRUCHT_LCF = [-5, -2, -4, 2, 5, -2, 2, 5, -2, -5, 4, 2]


def frucht() -> LabeledGraph:
    """The Frucht graph: 12 nodes, cubic, trivial automorphism group."""
    n = 12
    edges = {(i, (i + 1) % n) for i in range(n)}
    for i, jump in enumerate(_FRUCHT_LCF):
        j = (i + jump) % n
        edges.add((min(i, j), max(i, j)))
    return LabeledGraph(n, 0, sorted(edges))


def named_graph(name: str) -> LabeledGraph:
    """Resolve motif names like K3, P4, C5, S3, petersen, frucht."""
    s = name.strip()
    low = s.lower()
    if low == "petersen":
        return petersen()
    if low == "frucht":
        return frucht()
    if len(s) >= 2 and s[0] in "KPCS" and s[1:].isdigit():
        n = int(s[1:])
        if s[0] == "K":
            return complete(n)
        if s[0] == "P":
            return path(n)
        if s[0] == "C":
            return cycle(n)
        return star(n)
    raise InputError(f"unknown graph name {name!r}")


# -- quantum graphs -----------------------------------------------------------

class QuantumGraph:
    """Formal rational combination of k-labeled graphs sharing one k."""

    __slots__ = ("terms", "label_count")

    def __init__(self, terms: Iterable[tuple[Fraction, LabeledGraph]]):
        combined: dict[bytes, list] = {}
        k = None
        for coef, g in terms:
            coef = Fraction(coef)
            if k is None:
                k = g.label_count
            elif g.label_count != k:
                raise InputError("all quantum-graph terms need equal label counts")
            key = canonical_key(g)
            if key in combined:
                combined[key][0] += coef
            else:
                combined[key] = [coef, g]
        if k is None:
            raise InputError("quantum graph needs at least one term")
        self.label_count = k
        self.terms = tuple((c, g) for c, g in
                           (combined[key] for key in sorted(combined)) if c != 0)

    def __add__(self, other: "QuantumGraph") -> "QuantumGraph":
        return QuantumGraph(list(self.terms) + list(other.terms))

    def __sub__(self, other: "QuantumGraph") -> "QuantumGraph":
        return QuantumGraph(list(self.terms) +
                            [(-c, g) for c, g in other.terms])

    def __rmul__(self, scalar) -> "QuantumGraph":
        scalar = Fraction(scalar)
        return QuantumGraph([(scalar * c, g) for c, g in self.terms])

    def __repr__(self):
        return f"QuantumGraph({len(self.terms)} terms, k={self.label_count})"


def builtin_quantum(name: str) -> QuantumGraph:
    """The 2-labeled quantum multigraphs h and f.

    h satisfies t_xy(h, W) = d_W(x, y)^2: expanding the square of the row
    difference gives a double edge at label 1, minus twice the 2-path
    between the labels, plus a double edge at label 2.  f is the edgeless
    2-labeled graph minus h, so t_xy(f, W) = 1 - d_W(x, y)^2.
    """
    c2_at_1 = LabeledGraph(3, 2, [(0, 2), (0, 2)], "multi")
    p3 = LabeledGraph(3, 2, [(0, 2), (1, 2)], "multi")
    c2_at_2 = LabeledGraph(3, 2, [(1, 2), (1, 2)], "multi")
    h = QuantumGraph([(Fraction(1), c2_at_1), (Fraction(-2), p3), (Fraction(1), c2_at_2)])
    if name == "h":
        return h
    if name == "f":
        one = QuantumGraph([(Fraction(1), LabeledGraph(2, 2, [], "multi"))])
        return one - h
    raise InputError(f"unknown builtin quantum graph {name!r}")
