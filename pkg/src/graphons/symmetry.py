"""Automorphism groups of pure step graphons and the algebra around them.

Automorphisms are step permutations preserving weights and kernel exactly
(rational mode) or within a bucketing tolerance (float mode).  The density
oracle compares anchor-indexed density tables over an enumerated family of
k-labeled graphs; connection matrices are assembled in anchor space as
weighted Gram matrices of restricted-density vectors, which the paper's
rank identity licenses, and a direct glued-density route is kept for
cross-checks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .density import Caps, DEFAULT_CAPS, density_table, t, t_restricted
from .errors import CapExceeded, InputError
from .graphs import LabeledGraph, enumerate_klabeled, glue_product, unlabel
from .metrics import FLOAT_TWIN_TOL, is_pure, merge_twins
from .spectral import SpectralDecomposition, decompose
from .stepgraphon import StepGraphon, _StepBase

AUT_STEP_CAP = 12
ORBIT_TUPLE_CAP = 10 ** 6
R_OPERATOR_CAP = 10 ** 6
_INT64_SAFE = 2 ** 62


class AutGroup:
    """All weight- and kernel-preserving step permutations.

    Composition is "apply g, then h", so the natural action on steps is a
    right action: x^(gh) = (x^g)^h.
    """

    def __init__(self, elements: Sequence[tuple[int, ...]]):
        elems = sorted(set(tuple(int(x) for x in e) for e in elements))
        if not elems:
            raise InputError("a group needs at least the identity")
        self.degree = len(elems[0])
        ident = tuple(range(self.degree))
        if ident not in elems:
            raise InputError("identity permutation missing")
        self.elements = tuple(elems)
        self.identity_index = self.elements.index(ident)
        self._index = {e: i for i, e in enumerate(self.elements)}
        self._check_closure()

    @property
    def order(self) -> int:
        return len(self.elements)

    def compose(self, g: tuple[int, ...], h: tuple[int, ...]) -> tuple[int, ...]:
        """Apply g first, then h."""
        return tuple(h[g[x]] for x in range(self.degree))

    def inverse(self, g: tuple[int, ...]) -> tuple[int, ...]:
        inv = [0] * self.degree
        for x, y in enumerate(g):
            inv[y] = x
        return tuple(inv)

    def _check_closure(self):
        for g in self.elements:
            if self.inverse(g) not in self._index:
                raise InputError("group not closed under inverse")
            for h in self.elements:
                if self.compose(g, h) not in self._index:
                    raise InputError("group not closed under composition")

    def multiplication_table(self) -> list[list[int]]:
        return [[self._index[self.compose(g, h)] for h in self.elements]
                for g in self.elements]

    def node_orbits(self) -> list[tuple[int, ...]]:
        seen = [False] * self.degree
        orbits = []
        for x in range(self.degree):
            if seen[x]:
                continue
            orb = sorted({g[x] for g in self.elements})
            for y in orb:
                seen[y] = True
            orbits.append(tuple(orb))
        return orbits

    def is_transitive(self) -> bool:
        return len(self.node_orbits()) == 1

    def __repr__(self):
        return f"AutGroup(order={self.order}, degree={self.degree})"


def _color_refinement(w: _StepBase, tol: float):
    """Stable step colors by weight and iterated weighted-row signatures."""
    q = w.q
    exact = w.mode == "exact"

    def bucket(v):
        return v if exact else int(round(float(v) / tol))

    a = w.matrix
    colors = [(("w", bucket(w.weights[x])),) for x in range(q)]
    for _ in range(q):
        ids = {c: i for i, c in enumerate(sorted(set(colors), key=repr))}
        new = []
        for x in range(q):
            sig = tuple(sorted((ids[colors[y]], bucket(a[x, y])) for y in range(q)
                               if y != x))
            new.append((ids[colors[x]], bucket(a[x, x]), sig))
        if len(set(new)) == len(set(colors)):
            colors = new
            break
        colors = new
    ids = {c: i for i, c in enumerate(sorted(set(colors), key=repr))}
    return [ids[c] for c in colors]


def automorphisms(w: StepGraphon, tol: Optional[float] = None,
                  step_cap: int = AUT_STEP_CAP) -> AutGroup:
    """Exhaustive automorphism search with color-refinement pruning.

    Defined for pure graphons only; rejected otherwise.
    """
    exact = w.mode == "exact"
    if tol is None:
        tol = 0 if exact else FLOAT_TWIN_TOL
    if not is_pure(w, tol=tol):
        raise InputError("automorphisms are defined for pure graphons; purify first")
    q = w.q
    if q > step_cap:
        raise CapExceeded(f"automorphism search capped at {step_cap} steps, got {q}")
    colors = _color_refinement(w, tol if not exact else FLOAT_TWIN_TOL)
    a = w.matrix
    b = w.weights

    def eq(u, v):
        return u == v if exact else abs(float(u) - float(v)) <= tol

    order = sorted(range(q), key=lambda x: (colors[x], x))
    candidates = [[y for y in range(q) if colors[y] == colors[x]] for x in order]
    found: list[tuple[int, ...]] = []
    image: dict[int, int] = {}
    used = [False] * q

    def extend(pos: int):
        if pos == q:
            perm = [0] * q
            for x, y in image.items():
                perm[x] = y
            found.append(tuple(perm))
            return
        x = order[pos]
        for y in candidates[pos]:
            if used[y]:
                continue
            if not eq(b[x], b[y]) or not eq(a[x, x], a[y, y]):
                continue
            ok = True
            for xx, yy in image.items():
                if not eq(a[x, xx], a[y, yy]):
                    ok = False
                    break
            if ok:
                image[x] = y
                used[y] = True
                extend(pos + 1)
                del image[x]
                used[y] = False

    extend(0)
    return AutGroup(found)


def orbits(group: AutGroup, k: int, cap: int = ORBIT_TUPLE_CAP) -> list[tuple]:
    """Orbits of the diagonal action on k-tuples of steps."""
    q = group.degree
    if q ** k > cap:
        raise CapExceeded(f"q^k = {q ** k} exceeds orbit cap {cap}")
    seen: dict[tuple, int] = {}
    out = []
    for tup in itertools.product(range(q), repeat=k):
        if tup in seen:
            continue
        orb = sorted({tuple(g[x] for x in tup) for g in group.elements})
        for member in orb:
            seen[member] = len(out)
        out.append(tuple(orb))
    return out


def orbit_labels(group: AutGroup, k: int, cap: int = ORBIT_TUPLE_CAP) -> dict[tuple, int]:
    labels: dict[tuple, int] = {}
    for i, orb in enumerate(orbits(group, k, cap)):
        for tup in orb:
            labels[tup] = i
    return labels


# -- density oracle ---------------------------------------------------------

def density_profile(w: _StepBase, k: int, max_nodes: Optional[int] = None,
                    independent_only: bool = True,
                    caps: Caps = DEFAULT_CAPS):
    """(graph, numerator table, denominator) over the enumerated family."""
    if max_nodes is None:
        max_nodes = k + 4
    out = []
    for g in enumerate_klabeled(k, max_nodes, independent_labels=independent_only):
        num, den = density_table(g, w, caps=caps)
        out.append((g, num, den))
    return out


def oracle_partition(w: _StepBase, k: int, max_nodes: Optional[int] = None,
                     independent_only: bool = True,
                     caps: Caps = DEFAULT_CAPS) -> dict[tuple, int]:
    """Partition of [q]^k by joint equality of all enumerated densities."""
    profile = density_profile(w, k, max_nodes, independent_only, caps)
    q = w.q
    tuples = list(itertools.product(range(q), repeat=k))
    signatures = {tup: [] for tup in tuples}
    for _, num, _ in profile:
        arr = np.asarray(num).reshape((q,) * k) if k else num
        for tup in tuples:
            signatures[tup].append(arr[tup] if k else arr)
    classes: dict[tuple, int] = {}
    labels: dict[tuple, int] = {}
    for tup in tuples:
        sig = tuple(signatures[tup])
        if sig not in classes:
            classes[sig] = len(classes)
        labels[tup] = classes[sig]
    return labels


def orbit_equiv_oracle(w: _StepBase, a: Sequence[int], b: Sequence[int],
                       max_nodes: Optional[int] = None,
                       independent_only: bool = True,
                       caps: Caps = DEFAULT_CAPS):
    """Density test for orbit equivalence of two anchor tuples.

    True when every enumerated k-labeled graph has equal restricted density
    at the two anchors; on False the first separating graph is the witness.
    A finite cap makes True a necessary condition only; the acceptance
    suite pins its empirical sufficiency per corpus graphon.
    """
    a = tuple(int(x) for x in a)
    b = tuple(int(x) for x in b)
    if len(a) != len(b):
        raise InputError("anchor tuples differ in length")
    k = len(a)
    for tup in (a, b):
        for x in tup:
            if not 0 <= x < w.q:
                raise InputError(f"anchor index {x} out of range")
    if a == b:
        return True, None
    profile = density_profile(w, k, max_nodes, independent_only, caps)
    for g, num, _ in profile:
        arr = np.asarray(num).reshape((w.q,) * k)
        if arr[a] != arr[b]:
            return False, g
    return True, None


# -- exact linear algebra -----------------------------------------------------

def _exact_rank(rows: list[list[Fraction]], stop: Optional[int] = None) -> int:
    """Rank over the rationals by incremental row reduction."""
    basis: list[tuple[int, list[Fraction]]] = []
    width = len(rows[0]) if rows else 0
    limit = stop if stop is not None else width
    for row in rows:
        r = list(row)
        for piv, base in basis:
            if r[piv] != 0:
                c = r[piv] / base[piv]
                r = [x - c * y for x, y in zip(r, base)]
        for i, x in enumerate(r):
            if x != 0:
                basis.append((i, r))
                break
        if len(basis) >= limit:
            break
    return len(basis)


def matrix_rank(m: np.ndarray, tol: Optional[float] = None) -> int:
    """Exact Gaussian rank for Fraction matrices, SVD rank for floats."""
    arr = np.asarray(m)
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return _exact_rank([list(row) for row in arr])
    if tol is None:
        tol = 1e-10
    svals = np.linalg.svd(arr.astype(float), compute_uv=False)
    if svals.size == 0 or svals[0] == 0:
        return 0
    return int((svals > tol * svals[0]).sum())


def is_psd(m: np.ndarray, tol: float = 1e-9) -> bool:
    """Exact PSD test by symmetric elimination for Fraction matrices;
    eigenvalue bound for floats."""
    arr = np.asarray(m)
    n = len(arr)
    if arr.dtype != object:
        if n == 0:
            return True
        vals = np.linalg.eigvalsh(arr.astype(float))
        return bool(vals.min() >= -tol * max(1.0, abs(vals.max())))
    work = [[arr[i][j] for j in range(n)] for i in range(n)]
    active = list(range(n))
    while active:
        pivot = None
        for i in active:
            if work[i][i] > 0:
                pivot = i
                break
            if work[i][i] < 0:
                return False
        if pivot is None:
            # all diagonal entries vanish; PSD forces the block to vanish
            return all(work[i][j] == 0 for i in active for j in active)
        active.remove(pivot)
        piv = work[pivot][pivot]
        for i in active:
            ci = work[i][pivot]
            if ci == 0:
                continue
            ratio = ci / piv
            for j in active:
                work[i][j] -= ratio * work[pivot][j]
    return True


# -- connection matrices --------------------------------------------------------

@dataclass
class ConnectionMatrix:
    """Gram matrix M[G,H] = t(unlabel(GH), W) over an enumerated family."""
    graphs: list[LabeledGraph]
    matrix: np.ndarray
    k: int
    max_nodes: int
    independent_only: bool
    mode: str

    @property
    def size(self) -> int:
        return len(self.graphs)

    def rank(self, tol: Optional[float] = None) -> int:
        return matrix_rank(self.matrix, tol)

    def psd(self, tol: float = 1e-9) -> bool:
        return is_psd(self.matrix, tol)


def _label_edge_sets(graphs: list[LabeledGraph], k: int):
    out = []
    for g in graphs:
        out.append(frozenset((u, v) for (u, v) in g.edge_multiplicities()
                             if u < k and v < k))
    return out


def connection_matrix(w: _StepBase, k: int, max_nodes: Optional[int] = None,
                      independent_only: bool = False,
                      caps: Caps = DEFAULT_CAPS) -> ConnectionMatrix:
    """Assemble M_k in anchor space: M[G,H] is the b^k-weighted inner product
    of the two restricted-density vectors, with one kernel factor per
    label-label edge in the union of the two edge sets (simple gluing)."""
    if max_nodes is None:
        max_nodes = k + 3
    graphs = enumerate_klabeled(k, max_nodes, independent_labels=independent_only)
    exact = w.mode == "exact"
    q = w.q
    if q ** k > ORBIT_TUPLE_CAP:
        raise CapExceeded("anchor space too large for connection matrix")
    tables = []
    for g in graphs:
        num, den = density_table(g, w, drop_label_edges=True, caps=caps)
        arr = np.asarray(num, dtype=object if exact else float).reshape(-1)
        tables.append((arr, den))
    ledges = _label_edge_sets(graphs, k)

    if exact:
        mvec, s = w.scaled_weights()
        nmat, dscale = w.scaled_matrix()
        mobj = mvec.astype(object)
        wt = mobj.copy()
        for _ in range(k - 1):
            wt = np.multiply.outer(wt, mobj)
        wt = wt.reshape(-1)
        nobj = nmat.astype(object)
    else:
        b = w.weights_float()
        wt = b.copy()
        for _ in range(k - 1):
            wt = np.multiply.outer(wt, b)
        wt = wt.reshape(-1)
        nobj = w.matrix_float()
        s = dscale = 1

    edge_tensor_cache: dict[frozenset, np.ndarray] = {}

    def union_tensor(edge_set: frozenset) -> tuple[np.ndarray, int]:
        if edge_set in edge_tensor_cache:
            tensor = edge_tensor_cache[edge_set]
        else:
            tensor = None
            for (u, v) in sorted(edge_set):
                shape = [1] * k
                shape[u] = q
                shape[v] = q
                axes = nobj.reshape(tuple(q if i in (u, v) else 1 for i in range(k)))
                tensor = axes if tensor is None else tensor * axes
            if tensor is not None:
                tensor = np.broadcast_to(tensor, (q,) * k).reshape(-1)
            edge_tensor_cache[edge_set] = tensor
        return tensor, len(edge_set)

    n = len(graphs)
    mat = np.empty((n, n), dtype=object if exact else float)
    for i in range(n):
        ti, deni = tables[i]
        for j in range(i, n):
            tj, denj = tables[j]
            union = ledges[i] | ledges[j]
            tensor, ecount = union_tensor(union)
            prod = wt * ti * tj
            if tensor is not None:
                prod = prod * tensor
            total = prod.sum()
            if exact:
                den = (s ** k) * deni * denj * (dscale ** ecount)
                val = Fraction(int(total), den)
            else:
                val = float(total)
            mat[i, j] = mat[j, i] = val
    return ConnectionMatrix(list(graphs), mat, k, max_nodes, independent_only, w.mode)


def connection_entry_direct(w: _StepBase, g: LabeledGraph, h: LabeledGraph,
                            caps: Caps = DEFAULT_CAPS):
    """M[G,H] by the definition: glue, unlabel, take the density."""
    return t(unlabel(glue_product(g, h)), w, caps=caps)


def algebra_dimension(w: _StepBase, k: int, max_nodes: Optional[int] = None,
                      independent_only: bool = True,
                      caps: Caps = DEFAULT_CAPS) -> int:
    """Dimension of the span of restricted-density vectors on [q]^k over the
    enumerated family: the capped realization of the k-th graph algebra."""
    if w.q ** k > ORBIT_TUPLE_CAP:
        raise CapExceeded("anchor space too large")
    profile = density_profile(w, k, max_nodes, independent_only, caps)
    if not profile:
        return 0
    raw_rows = [np.asarray(num).reshape(-1) for _, num, _ in profile]
    ncols = len(raw_rows[0])
    col_sig: dict[tuple, int] = {}
    keep_cols = []
    for c in range(ncols):
        sig = tuple(int(row[c]) if w.mode == "exact" else float(row[c])
                    for row in raw_rows)
        if sig not in col_sig:
            col_sig[sig] = c
            keep_cols.append(c)
    rows = [[Fraction(int(row[c]), int(den)) if w.mode == "exact" else float(row[c])
             for c in keep_cols]
            for (_, _, den), row in zip(
                [(g, n, d) for g, n, d in profile], raw_rows)]
    if w.mode == "exact":
        return _exact_rank(rows, stop=len(keep_cols))
    return matrix_rank(np.array(rows, dtype=float))


# -- node transitivity -----------------------------------------------------------

@dataclass
class TransitivityReport:
    """Five verdicts of the algebraic transitivity characterization."""
    aut_transitive: bool
    densities_constant: bool
    algebra_dim_one: bool
    connection_rank_one: bool
    cauchy_schwarz_equality: bool
    details: dict = field(default_factory=dict)

    @property
    def verdicts(self) -> tuple[bool, ...]:
        return (self.aut_transitive, self.densities_constant, self.algebra_dim_one,
                self.connection_rank_one, self.cauchy_schwarz_equality)

    @property
    def all_agree(self) -> bool:
        return len(set(self.verdicts)) == 1

    @property
    def node_transitive(self) -> bool:
        return all(self.verdicts)


def node_transitivity_report(w: StepGraphon, max_nodes: int = 5,
                             caps: Caps = DEFAULT_CAPS) -> TransitivityReport:
    """Evaluate all five node-transitivity conditions on the purified graphon."""
    pure, _ = merge_twins(w)
    exact = pure.mode == "exact"
    group = automorphisms(pure)
    cond_i = group.is_transitive()

    graphs = enumerate_klabeled(1, max_nodes, independent_labels=True)
    rows = []
    for g in graphs:
        num, den = density_table(g, pure, caps=caps)
        arr = np.asarray(num).reshape(-1)
        rows.append((arr, den))
    if exact:
        cond_ii = all((row == row[0]).all() for row, _ in rows)
    else:
        cond_ii = all(np.abs(row - row[0]).max() <= 1e-9 for row, _ in rows)

    dim = algebra_dimension(pure, 1, max_nodes, independent_only=True, caps=caps)
    cond_iii = dim == 1

    cm = connection_matrix(pure, 1, max_nodes, independent_only=True, caps=caps)
    rank = cm.rank()
    cond_iv = rank == 1

    cs_ok = True
    witness = None
    n = cm.size
    for i in range(n):
        for j in range(i + 1, n):
            lhs = cm.matrix[i, i] * cm.matrix[j, j]
            rhs = cm.matrix[i, j] ** 2
            bad = lhs != rhs if exact else abs(lhs - rhs) > 1e-9
            if bad:
                cs_ok = False
                witness = (i, j)
                break
        if not cs_ok:
            break
    return TransitivityReport(
        cond_i, cond_ii, cond_iii, cond_iv, cs_ok,
        details={"aut_order": group.order,
                 "node_orbits": len(group.node_orbits()),
                 "algebra_dim": dim,
                 "connection_rank": rank,
                 "cs_witness": witness,
                 "max_nodes": max_nodes,
                 "purified_steps": pure.q})


# -- the r operator and the spectral action ----------------------------------------

def r_operator(w: _StepBase, h: np.ndarray, n: Optional[int] = None) -> np.ndarray:
    """r(h, x) = sum over n step arguments of h times prod_i b_{x_i} A[x, x_i].

    ``h`` is an n-dimensional table on steps; returns the induced function
    of the remaining point x.
    """
    h = np.asarray(h)
    if n is None:
        n = h.ndim
    if h.ndim != n or h.shape != (w.q,) * n:
        raise InputError(f"h must be a table of shape {(w.q,) * n}")
    if w.q ** n > R_OPERATOR_CAP:
        raise CapExceeded("r operator table too large")
    exact = w.mode == "exact" and h.dtype == object
    if exact:
        a = w.matrix
        b = w.weights
        tmat = np.empty((w.q, w.q), dtype=object)
        for x in range(w.q):
            tmat[x, :] = [a[x, z] * b[z] for z in range(w.q)]
    else:
        af = w.matrix_float()
        bf = w.weights_float()
        tmat = af * bf[None, :]
        h = h.astype(float)
    out = np.empty(w.q, dtype=object if exact else float)
    for x in range(w.q):
        acc = h
        for _ in range(n):
            acc = np.tensordot(tmat[x], acc, axes=([0], [0]))
        out[x] = acc.item() if isinstance(acc, np.ndarray) else acc
    return out


@dataclass
class SpectralActionReport:
    """How a step permutation acts on each eigenspace."""
    eigenvalue_groups: list[list[int]]
    block_matrices: list[np.ndarray]
    max_block_residual: float
    max_orthogonality_defect: float

    @property
    def orthogonal_within_eigenspaces(self) -> bool:
        return self.max_block_residual < 1e-8 and self.max_orthogonality_defect < 1e-8


def spectral_action_check(w: _StepBase, sigma: Sequence[int],
                          decomp: Optional[SpectralDecomposition] = None,
                          group_tol: float = 1e-7) -> SpectralActionReport:
    """Verify a permutation maps each eigenspace into itself orthogonally.

    For each eigenvalue group with eigenfunction block F, the permuted block
    F[sigma] must equal F C with C orthogonal under the weighted inner
    product.
    """
    if decomp is None:
        decomp = decompose(w)
    sigma = [int(x) for x in sigma]
    if sorted(sigma) != list(range(w.q)):
        raise InputError("sigma must be a permutation of the steps")
    bw = decomp.weights
    groups = decomp.eigenvalue_groups(group_tol)
    blocks = []
    max_res = 0.0
    max_orth = 0.0
    for idx in groups:
        fg = decomp.functions[:, idx]
        permuted = fg[sigma, :]
        c = fg.T @ (bw[:, None] * permuted)
        res = float(np.abs(permuted - fg @ c).max())
        orth = float(np.abs(c.T @ c - np.eye(len(idx))).max())
        blocks.append(c)
        max_res = max(max_res, res)
        max_orth = max(max_orth, orth)
    return SpectralActionReport(groups, blocks, max_res, max_orth)
