"""Point metrics on step graphons, twin merging, and kernel recovery.

Three metrics on steps: the neighborhood distance r (weighted L1 between
kernel rows), the L2 distance d, and the similarity metric rbar = r of the
operator square.  Exact mode keeps r, rbar, and d^2 as Fractions; d itself
is reported as floats with the exact squares alongside, so every acceptance
identity can be checked with zero tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InputError
from .stepgraphon import StepGraphon, StepKernel, _StepBase, operator_product

FLOAT_TWIN_TOL = 1e-9


@dataclass
class MetricCheck:
    symmetric: bool
    zero_diagonal: bool
    triangle_ok: bool
    max_violation: float


class MetricMatrix:
    """q x q distance matrix between steps, tagged r, d, or rbar."""

    def __init__(self, tag: str, values: np.ndarray, weights: np.ndarray,
                 mode: str, squared: Optional[np.ndarray] = None):
        if tag not in ("r", "d", "rbar"):
            raise InputError(f"unknown metric tag {tag!r}")
        self.tag = tag
        self.values = values
        self.squared = squared
        self.weights = weights
        self.mode = mode

    @property
    def q(self) -> int:
        return len(self.values)

    def __getitem__(self, pair):
        return self.values[pair]

    def check_axioms(self) -> MetricCheck:
        q = self.q
        vals = self.values
        exact = self.mode == "exact"
        sym = all(vals[i][j] == vals[j][i] for i in range(q) for j in range(i, q)) \
            if exact or self.tag == "d" else bool(np.array_equal(vals, np.asarray(vals).T))
        zero_diag = all(vals[i][i] == 0 for i in range(q))
        if self.tag == "d" and exact:
            tri, viol = self._triangle_exact_sqrt()
        else:
            tri, viol = self._triangle_direct()
        return MetricCheck(sym, zero_diag, tri, viol)

    def _triangle_direct(self):
        q = self.q
        vals = self.values
        exact = self.mode == "exact" and self.tag != "d"
        worst = Fraction(0) if exact else 0.0
        ok = True
        for x in range(q):
            for y in range(q):
                for z in range(q):
                    gap = vals[x][y] - vals[x][z] - vals[z][y]
                    if gap > worst:
                        worst = gap
                    if exact:
                        if gap > 0:
                            ok = False
                    elif gap > 1e-12:
                        ok = False
        return ok, float(worst)

    def _triangle_exact_sqrt(self):
        # d = sqrt(d2); test sqrt(a) <= sqrt(b) + sqrt(c) exactly:
        # immediate if a <= b + c, else need (a - b - c)^2 <= 4bc.
        q = self.q
        d2 = self.squared
        ok = True
        worst = 0.0
        for x in range(q):
            for y in range(q):
                for z in range(q):
                    a, b, c = d2[x][y], d2[x][z], d2[z][y]
                    if a <= b + c:
                        continue
                    if (a - b - c) ** 2 > 4 * b * c:
                        ok = False
                        gap = math.sqrt(float(a)) - math.sqrt(float(b)) - math.sqrt(float(c))
                        worst = max(worst, gap)
        return ok, worst


def _abs_diff_rows_int(nmat: np.ndarray, mvec: np.ndarray) -> np.ndarray:
    """Row-difference L1 numerators: out[x,y] = sum_z m_z |N[x,z]-N[y,z]|."""
    q = len(mvec)
    if nmat.dtype == object or mvec.dtype == object:
        nm = nmat.astype(object)
        mv = mvec.astype(object)
    else:
        nm, mv = nmat, mvec
    out = np.empty((q, q), dtype=nm.dtype)
    for x in range(q):
        out[x] = np.abs(nm[x] - nm) @ mv
    return out


def neighborhood_metric(w: _StepBase) -> MetricMatrix:
    """r[x,y] = weighted L1 distance between kernel rows x and y."""
    if w.mode == "exact":
        nmat, d = w.scaled_matrix()
        mvec, s = w.scaled_weights()
        nums = _abs_diff_rows_int(nmat, mvec)
        den = s * d
        q = w.q
        vals = np.empty((q, q), dtype=object)
        for i in range(q):
            vals[i, :] = [Fraction(int(v), den) for v in nums[i]]
        return MetricMatrix("r", vals, w.weights, "exact")
    a = w.matrix_float()
    b = w.weights_float()
    q = w.q
    vals = np.empty((q, q), dtype=float)
    for x in range(q):
        vals[x] = np.abs(a[x] - a) @ b
    return MetricMatrix("r", vals, b, "float")


def l2_metric(w: _StepBase) -> MetricMatrix:
    """d[x,y] = sqrt(sum_z b_z (A[x,z]-A[y,z])^2); exact squares kept."""
    if w.mode == "exact":
        nmat, d = w.scaled_matrix()
        mvec, s = w.scaled_weights()
        nm = nmat.astype(object) if nmat.dtype != object else nmat
        mv = mvec.astype(object) if mvec.dtype != object else mvec
        q = w.q
        den = s * d * d
        sq = np.empty((q, q), dtype=object)
        for x in range(q):
            diff = nm[x] - nm
            sq[x, :] = [Fraction(int(v), den) for v in (diff * diff) @ mv]
        vals = np.array([[math.sqrt(float(v)) for v in row] for row in sq], dtype=float)
        return MetricMatrix("d", vals, w.weights, "exact", squared=sq)
    a = w.matrix_float()
    b = w.weights_float()
    q = w.q
    sq = np.empty((q, q), dtype=float)
    for x in range(q):
        diff = a[x] - a
        sq[x] = (diff * diff) @ b
    return MetricMatrix("d", np.sqrt(sq), b, "float", squared=sq)


def similarity_metric(w: _StepBase) -> MetricMatrix:
    """rbar = neighborhood metric of the operator square W o W."""
    square = operator_product(w, w)
    out = neighborhood_metric(square)
    return MetricMatrix("rbar", out.values, out.weights, out.mode)


def similarity_distance(w: _StepBase, x: int, y: int):
    """rbar(x, y) without forming the full operator square."""
    if w.mode == "exact":
        nmat, d = w.scaled_matrix()
        mvec, s = w.scaled_weights()
        nm = nmat if nmat.dtype == np.int64 and \
            (int(np.abs(nmat).max()) ** 2 * int(mvec.max()) * w.q < 2 ** 62) \
            else nmat.astype(object)
        mv = mvec if nm.dtype == np.int64 else mvec.astype(object)
        row_x = (nm[x] * mv) @ nm
        row_y = (nm[y] * mv) @ nm
        num = int(np.abs(row_x - row_y) @ mv)
        return Fraction(num, s * s * d * d)
    a = w.matrix_float()
    b = w.weights_float()
    row_x = (a[x] * b) @ a
    row_y = (a[y] * b) @ a
    return float(np.abs(row_x - row_y) @ b)


# -- twins and purification -----------------------------------------------------

class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, x: int, y: int):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def _twin_groups(w: _StepBase, kept: list[int], tol):
    """Group kept steps whose kernel rows are within tol in r_W."""
    exact = w.mode == "exact"
    if exact and tol == 0:
        by_row: dict[tuple, list[int]] = {}
        for i in kept:
            row = tuple(w.matrix[i, j] for j in kept)
            by_row.setdefault(row, []).append(i)
        return sorted(by_row.values(), key=lambda g: g[0])
    r = neighborhood_metric(w)
    uf = _UnionFind(w.q)
    for a_pos, i in enumerate(kept):
        for j in kept[a_pos + 1:]:
            if r.values[i][j] <= tol:
                uf.union(i, j)
    groups: dict[int, list[int]] = {}
    for i in kept:
        groups.setdefault(uf.find(i), []).append(i)
    out = sorted(groups.values(), key=lambda g: g[0])
    for grp in out:
        for i in grp:
            for j in grp:
                if r.values[i][j] > tol:
                    raise InputError(
                        f"twin tolerance {tol} is not an equivalence: steps {i},{j} "
                        f"are linked through the group {grp} but lie {r.values[i][j]} apart")
    return out


def merge_twins(w: StepGraphon, tol=None) -> tuple[StepGraphon, tuple]:
    """Merge twin steps and drop zero-weight steps; returns the pure graphon
    and the map old step -> new step (None for dropped steps)."""
    exact = w.mode == "exact"
    if tol is None:
        tol = 0 if exact else FLOAT_TWIN_TOL
    kept = [i for i in range(w.q) if w.weights[i] > 0]
    groups = _twin_groups(w, kept, tol)
    mapping: list = [None] * w.q
    for gi, grp in enumerate(groups):
        for i in grp:
            mapping[i] = gi
    zero = Fraction(0) if exact else 0.0
    weights = []
    for grp in groups:
        total = zero
        for i in grp:
            total = total + w.weights[i]
        weights.append(total)
    qn = len(groups)
    kernel = [[zero] * qn for _ in range(qn)]
    for gi, grp_i in enumerate(groups):
        for gj in range(gi, qn):
            grp_j = groups[gj]
            acc = zero
            for i in grp_i:
                for j in grp_j:
                    acc = acc + w.weights[i] * w.weights[j] * w.matrix[i, j]
            val = acc / (weights[gi] * weights[gj])
            kernel[gi][gj] = kernel[gj][gi] = val
    merged = StepGraphon(weights, kernel, mode=w.mode)
    return merged, tuple(mapping)


def is_pure(w: StepGraphon, tol=None) -> bool:
    """True iff all weights are positive and no two steps are twins."""
    exact = w.mode == "exact"
    if tol is None:
        tol = 0 if exact else FLOAT_TWIN_TOL
    if any(x <= 0 for x in w.weights):
        return False
    groups = _twin_groups(w, list(range(w.q)), tol)
    return len(groups) == w.q


def un_approximation(w: StepGraphon, n: int) -> tuple[StepKernel, object]:
    """Kernel recovery from restricted densities:

        U_n(x,y) = sum_u b_u (1-d(x,u)^2)^n A[u,y] / sum_u b_u (1-d(x,u)^2)^n

    Returns (U_n, weighted L1 error against the kernel).  The denominator is
    positive because the u = x term contributes b_x > 0.
    """
    if n < 1:
        raise InputError("approximation order must be >= 1")
    if not is_pure(w):
        raise InputError("kernel recovery is defined for pure graphons")
    exact = w.mode == "exact"
    d2 = l2_metric(w).squared
    b = w.weights
    a = w.matrix
    q = w.q
    one = Fraction(1) if exact else 1.0
    rows = []
    for x in range(q):
        coef = [b[u] * (one - d2[x][u]) ** n for u in range(q)]
        denom = sum(coef)
        rows.append([sum(coef[u] * a[u, y] for u in range(q)) / denom
                     for y in range(q)])
    if exact:
        un = StepKernel(w.weights, rows, mode="exact")
        err = Fraction(0)
        for x in range(q):
            for y in range(q):
                err += b[x] * b[y] * abs(un.matrix[x, y] - a[x, y])
    else:
        un = StepKernel(w.weights, np.array(rows, dtype=float), mode="float")
        diff = np.abs(un.matrix - a)
        err = float(b @ diff @ b)
    return un, err
