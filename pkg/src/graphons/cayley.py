"""Finite groups, Cayley graphons, and the transitive-to-Cayley conversion.

A Cayley graphon on a finite group puts uniform weights on the elements and
kernel f(x y^-1) for a symmetric connection function f.  Conversely, a
node-transitive pure step graphon is converted by taking its automorphism
group acting on a base step: the result is weakly isomorphic (checked by
motif densities) even when the underlying graph is not a Cayley graph.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .density import Caps, t
from .errors import CapExceeded, InputError
from .graphs import LabeledGraph, enumerate_klabeled
from .stepgraphon import StepGraphon
from .symmetry import AutGroup, automorphisms

ASSOCIATIVITY_FULL_CHECK = 64
GROUP_ORDER_CAP = 200


class FiniteGroup:
    """Finite group given by a 0-based multiplication table."""

    def __init__(self, table: Sequence[Sequence[int]],
                 names: Optional[Sequence[str]] = None, check: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.order = len(self.table)
        self.names = tuple(names) if names is not None else None
        if self.names is not None and len(self.names) != self.order:
            raise InputError("names length does not match group order")
        if check:
            self._validate()
        self.identity = self._find_identity()
        self.inverse_map = self._find_inverses()

    def _validate(self):
        n = self.order
        full = set(range(n))
        for i, row in enumerate(self.table):
            if len(row) != n:
                raise InputError(f"row {i} has length {len(row)}, expected {n}")
            if set(row) != full:
                raise InputError(f"row {i} is not a permutation (not a Latin square)")
        for j in range(n):
            if {self.table[i][j] for i in range(n)} != full:
                raise InputError(f"column {j} is not a permutation (not a Latin square)")
        if n <= ASSOCIATIVITY_FULL_CHECK:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = np.random.default_rng(0)
            triples = (tuple(rng.integers(0, n, 3)) for _ in range(4096))
        for a, b, c in triples:
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise InputError(f"associativity fails at ({a},{b},{c})")

    def _find_identity(self) -> int:
        for e in range(self.order):
            if all(self.table[e][x] == x and self.table[x][e] == x
                   for x in range(self.order)):
                return e
        raise InputError("no identity element")

    def _find_inverses(self) -> tuple[int, ...]:
        inv = [None] * self.order
        e = self.identity
        for x in range(self.order):
            for y in range(self.order):
                if self.table[x][y] == e and self.table[y][x] == e:
                    inv[x] = y
                    break
            if inv[x] is None:
                raise InputError(f"element {x} has no inverse")
        return tuple(inv)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse_map[a]

    # -- builtins ------------------------------------------------------------

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise InputError("cyclic group order must be positive")
        return cls([[(i + j) % n for j in range(n)] for i in range(n)], check=False)

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of the n-gon, order 2n; element i + n*s acts as
        x -> (-1)^s x + i."""
        if n < 1:
            raise InputError("dihedral parameter must be positive")

        def apply(g, x):
            i, s = g % n, g // n
            return (i + (x if s == 0 else -x)) % n

        def compose(g, h):
            # apply g first, then h
            i, s = g % n, g // n
            j, r = h % n, h // n
            sign = (s + r) % 2
            off = (j + (i if r == 0 else -i)) % n
            return off + n * sign

        table = [[compose(g, h) for h in range(2 * n)] for g in range(2 * n)]
        return cls(table, check=False)

    @classmethod
    def symmetric(cls, n: int) -> "FiniteGroup":
        if not 1 <= n <= 5:
            raise InputError("symmetric group supported for n <= 5")
        perms = sorted(itertools.permutations(range(n)))
        index = {p: i for i, p in enumerate(perms)}
        # apply p first, then q
        table = [[index[tuple(q[p[x]] for x in range(n))] for q in perms]
                 for p in perms]
        names = ["".join(map(str, p)) for p in perms]
        return cls(table, names=names, check=False)

    @classmethod
    def direct_product(cls, g1: "FiniteGroup", g2: "FiniteGroup") -> "FiniteGroup":
        n2 = g2.order
        order = g1.order * n2
        table = [[0] * order for _ in range(order)]
        for a1 in range(g1.order):
            for a2 in range(n2):
                for b1 in range(g1.order):
                    for b2 in range(n2):
                        table[a1 * n2 + a2][b1 * n2 + b2] = \
                            g1.mul(a1, b1) * n2 + g2.mul(a2, b2)
        return cls(table, check=False)

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]],
                   names: Optional[Sequence[str]] = None) -> "FiniteGroup":
        return cls(table, names=names, check=True)

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"


def group_builtin(name: str, *args) -> FiniteGroup:
    builders = {
        "cyclic": FiniteGroup.cyclic,
        "dihedral": FiniteGroup.dihedral,
        "symmetric": FiniteGroup.symmetric,
    }
    if name not in builders:
        raise InputError(f"unknown group builtin {name!r}")
    return builders[name](*args)


def symmetric_connection(group: FiniteGroup, seed: int,
                         denominator: int = 8) -> list[Fraction]:
    """Random rational f with f(x) = f(x^-1), for transitivity experiments."""
    rng = np.random.default_rng(seed)
    f: list = [None] * group.order
    for x in range(group.order):
        if f[x] is None:
            v = Fraction(int(rng.integers(0, denominator + 1)), denominator)
            f[x] = v
            f[group.inv(x)] = v
    return f


def cayley_graphon(group: FiniteGroup, f: Sequence) -> StepGraphon:
    """Uniform weights on group elements, kernel A[x,y] = f(x y^-1)."""
    n = group.order
    if len(f) != n:
        raise InputError(f"connection function needs length {n}")
    exact = not any(isinstance(x, float) for x in f)
    vals = [Fraction(x) for x in f] if exact else [float(x) for x in f]
    for x in range(n):
        lo, hi = (0, 1)
        if not lo <= vals[x] <= hi:
            raise InputError(f"f({x}) = {vals[x]} outside [0,1]")
        if vals[x] != vals[group.inv(x)]:
            raise InputError(f"f must satisfy f(x) = f(x^-1); fails at x={x}")
    kernel = [[vals[group.mul(x, group.inv(y))] for y in range(n)] for x in range(n)]
    weights = [Fraction(1, n)] * n if exact else [1.0 / n] * n
    return StepGraphon(weights, kernel, mode="exact" if exact else "float")


def translation_invariant(w: StepGraphon, group: FiniteGroup) -> bool:
    """Check right translations act as kernel automorphisms (exact)."""
    a = w.matrix
    for k in range(group.order):
        for x in range(group.order):
            gx = group.mul(x, k)
            for y in range(group.order):
                if a[group.mul(y, k), gx] != a[y, x]:
                    return False
    return True


@dataclass
class CayleyConversion:
    """Result of converting a node-transitive graphon to Cayley form."""
    group: FiniteGroup
    connection: list
    graphon: StepGraphon
    base_step: int
    densities_match: bool
    motifs_checked: int
    translation_invariant: bool
    source_densities: list
    converted_densities: list


def transitive_to_cayley(w: StepGraphon, motif_max_nodes: int = 4,
                         group_order_cap: int = GROUP_ORDER_CAP) -> CayleyConversion:
    """Convert a pure node-transitive step graphon to a Cayley graphon on its
    automorphism group, verifying weak isomorphism by motif densities."""
    aut = automorphisms(w)
    if not aut.is_transitive():
        raise InputError("graphon is not node-transitive")
    if aut.order > group_order_cap:
        raise CapExceeded(
            f"automorphism group order {aut.order} exceeds cap {group_order_cap}")
    group = FiniteGroup(aut.multiplication_table(), check=True)
    base = 0
    f = [w.matrix[g[base], base] for g in aut.elements]
    converted = cayley_graphon(group, f)
    motifs = [g for g in enumerate_klabeled(0, motif_max_nodes)]
    caps = Caps(max_motif_nodes=8, max_assignments=10 ** 10)
    src = [t(m, w, caps=caps) for m in motifs]
    dst = [t(m, converted, caps=caps) for m in motifs]
    if w.mode == "exact":
        match = all(a == b for a, b in zip(src, dst))
    else:
        match = all(abs(a - b) <= 1e-9 for a, b in zip(src, dst))
    return CayleyConversion(
        group=group, connection=f, graphon=converted, base_step=base,
        densities_match=match, motifs_checked=len(motifs),
        translation_invariant=translation_invariant(converted, group),
        source_densities=src, converted_densities=dst)
