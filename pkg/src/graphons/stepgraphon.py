"""Finite-support (step) graphons and kernel algebra.

A step graphon is a probability weight vector b over q steps together with
a symmetric q x q kernel with entries in [0,1].  Exact mode stores
Fractions; float mode stores float64.  Exact-mode linear algebra runs on
integer-scaled matrices (int64 when magnitudes permit, Python ints
otherwise) so paper values reproduce bit-exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import CapExceeded, InputError
from .graphs import LabeledGraph

_FLOAT_SYM_TOL = 1e-12
_INT64_SAFE = 2 ** 62


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    if isinstance(x, float):
        raise InputError("float entry in exact mode; pass mode='float'")
    return Fraction(x)


def _fraction_matrix(rows: Iterable[Iterable]) -> np.ndarray:
    data = [[_to_fraction(x) for x in row] for row in rows]
    arr = np.empty((len(data), len(data[0]) if data else 0), dtype=object)
    for i, row in enumerate(data):
        arr[i, :] = row
    return arr


def _fraction_vector(vals: Iterable) -> np.ndarray:
    data = [_to_fraction(x) for x in vals]
    arr = np.empty(len(data), dtype=object)
    arr[:] = data
    return arr


def _lcm_denominators(arr: np.ndarray) -> int:
    d = 1
    for x in arr.flat:
        d = d * x.denominator // math.gcd(d, x.denominator)
    return d


def _scaled_int_array(arr: np.ndarray, scale: int) -> np.ndarray:
    ints = [[int(x * scale) for x in row] for row in arr] \
        if arr.ndim == 2 else [int(x * scale) for x in arr.flat]
    flat = np.array(ints, dtype=object)
    mx = max((abs(int(v)) for v in flat.flat), default=0)
    if mx < 2 ** 31:
        return flat.astype(np.int64)
    return flat


class _StepBase:
    """Shared accessors for StepGraphon and derived kernels."""

    mode: str
    _b: np.ndarray
    _A: np.ndarray

    @property
    def q(self) -> int:
        return len(self._b)

    @property
    def weights(self) -> np.ndarray:
        return self._b

    @property
    def matrix(self) -> np.ndarray:
        return self._A

    def weights_float(self) -> np.ndarray:
        if self.mode == "float":
            return self._b
        return np.array([float(x) for x in self._b], dtype=float)

    def matrix_float(self) -> np.ndarray:
        if self.mode == "float":
            return self._A
        return np.array([[float(x) for x in row] for row in self._A], dtype=float)

    def scaled_weights(self) -> tuple[np.ndarray, int]:
        """Integer weights m and scale s with b = m/s (exact mode only)."""
        if self.mode != "exact":
            raise InputError("scaled weights need exact mode")
        if not hasattr(self, "_sw") or self._sw is None:
            s = _lcm_denominators(self._b)
            self._sw = (_scaled_int_array(self._b, s), s)
        return self._sw

    def scaled_matrix(self) -> tuple[np.ndarray, int]:
        """Integer kernel N and scale D with A = N/D (exact mode only)."""
        if self.mode != "exact":
            raise InputError("scaled kernel needs exact mode")
        if not hasattr(self, "_sm") or self._sm is None:
            d = _lcm_denominators(self._A)
            self._sm = (_scaled_int_array(self._A, d), d)
        return self._sm


class StepGraphon(_StepBase):
    """Step weights b (probability vector) and symmetric kernel in [0,1].

    ``raw=True`` permits zero weights (pre-purification graphons).
    """

    def __init__(self, weights: Sequence, kernel: Sequence[Sequence],
                 mode: Optional[str] = None, raw: bool = False):
        if mode is None:
            flat = list(weights) + [x for row in kernel for x in row]
            mode = "float" if any(isinstance(x, float) for x in flat) else "exact"
        if mode not in ("exact", "float"):
            raise InputError(f"unknown mode {mode!r}")
        self.mode = mode
        self.raw = bool(raw)
        if mode == "exact":
            self._b = _fraction_vector(weights)
            self._A = _fraction_matrix(kernel)
        else:
            self._b = np.array([float(x) for x in weights], dtype=float)
            self._A = np.array([[float(x) for x in row] for row in kernel], dtype=float)
        self._sw = None
        self._sm = None
        self._cache: dict = {}
        self._validate()
        self._b.setflags(write=False)
        self._A.setflags(write=False)

    def _validate(self):
        q = len(self._b)
        if q == 0:
            raise InputError("graphon needs at least one step")
        if self._A.shape != (q, q):
            raise InputError(f"kernel shape {self._A.shape} does not match {q} weights")
        if self.mode == "exact":
            total = sum(self._b)
            if total != 1:
                raise InputError(f"weights sum to {total}, expected 1")
            for x in self._b:
                if x < 0 or (x == 0 and not self.raw):
                    raise InputError(f"weight {x} out of range")
            for i in range(q):
                for j in range(i, q):
                    if self._A[i, j] != self._A[j, i]:
                        raise InputError(f"kernel asymmetric at ({i},{j})")
                    if not (0 <= self._A[i, j] <= 1):
                        raise InputError(f"kernel entry {self._A[i, j]} outside [0,1]")
        else:
            if abs(self._b.sum() - 1.0) > _FLOAT_SYM_TOL * max(q, 1):
                raise InputError(f"weights sum to {self._b.sum()}, expected 1")
            if (self._b < (0 if self.raw else -0.0)).any() or \
                    (not self.raw and (self._b <= 0).any()):
                raise InputError("weights must be positive (nonnegative for raw)")
            if np.abs(self._A - self._A.T).max() > _FLOAT_SYM_TOL:
                raise InputError("kernel asymmetric beyond 1e-12")
            if self._A.min() < -_FLOAT_SYM_TOL or self._A.max() > 1 + _FLOAT_SYM_TOL:
                raise InputError("kernel entries outside [0,1]")

    def to_float(self) -> "StepGraphon":
        if self.mode == "float":
            return self
        return StepGraphon(self.weights_float(), self.matrix_float(),
                           mode="float", raw=self.raw)

    def __repr__(self):
        return f"StepGraphon(q={self.q}, mode={self.mode!r})"


class StepKernel(_StepBase):
    """Derived kernel sharing a weight vector with its parent graphon.

    Entries are not clamped; spectral truncations may leave [0,1].
    """

    def __init__(self, weights: Sequence, matrix: Sequence[Sequence],
                 mode: Optional[str] = None):
        if mode is None:
            flat = list(weights) + [x for row in matrix for x in row]
            mode = "float" if any(isinstance(x, float) for x in flat) else "exact"
        self.mode = mode
        if mode == "exact":
            self._b = weights if isinstance(weights, np.ndarray) and weights.dtype == object \
                else _fraction_vector(weights)
            self._A = matrix if isinstance(matrix, np.ndarray) and matrix.dtype == object \
                else _fraction_matrix(matrix)
        else:
            self._b = np.asarray(weights, dtype=float)
            self._A = np.asarray(matrix, dtype=float)
        self._sw = None
        self._sm = None

    def value_range(self) -> tuple:
        lo = min(self._A.flat)
        hi = max(self._A.flat)
        return lo, hi

    def __repr__(self):
        return f"StepKernel(q={self.q}, mode={self.mode!r})"


def validate(weights, kernel, mode: Optional[str] = None, raw: bool = False) -> StepGraphon:
    """Build a StepGraphon, enforcing all invariants."""
    return StepGraphon(weights, kernel, mode=mode, raw=raw)


def from_simple_graph(g: LabeledGraph) -> StepGraphon:
    """A simple unlabeled graph as a uniform step graphon (0/1 kernel)."""
    if g.kind != "simple" or g.label_count != 0:
        raise InputError("from_simple_graph needs a simple unlabeled graph")
    n = g.node_count
    if n < 1:
        raise InputError("graph needs at least one node")
    a = [[Fraction(0)] * n for _ in range(n)]
    for u, v in g.edges:
        a[u][v] = a[v][u] = Fraction(1)
    return StepGraphon([Fraction(1, n)] * n, a, mode="exact")


def _require_same_weights(w1: _StepBase, w2: _StepBase):
    if w1.q != w2.q:
        raise InputError("weight vectors differ in length")
    if w1.mode == "exact" and w2.mode == "exact":
        if any(a != b for a, b in zip(w1.weights, w2.weights)):
            raise InputError("weight vectors differ")
    else:
        if not np.array_equal(w1.weights_float(), w2.weights_float()):
            raise InputError("weight vectors differ")


def operator_product(w1: _StepBase, w2: _StepBase) -> StepKernel:
    """Kernel of the operator product: A1 . diag(b) . A2."""
    _require_same_weights(w1, w2)
    if w1.mode == "exact" and w2.mode == "exact":
        n1, d1 = w1.scaled_matrix()
        n2, d2 = w2.scaled_matrix()
        m, s = w1.scaled_weights()
        q = w1.q
        bound = q * int(max(abs(int(v)) for v in np.asarray(n1).flat) or 1) \
            * int(max(int(v) for v in np.asarray(m).flat) or 1) \
            * int(max(abs(int(v)) for v in np.asarray(n2).flat) or 1)
        if bound < _INT64_SAFE and n1.dtype == np.int64 and n2.dtype == np.int64 \
                and m.dtype == np.int64:
            prod = (n1 * m) @ n2
        else:
            prod = (n1.astype(object) * m.astype(object)) @ n2.astype(object)
        den = d1 * d2 * s
        out = np.empty((q, q), dtype=object)
        for i in range(q):
            out[i, :] = [Fraction(int(v), den) for v in prod[i]]
        return StepKernel(w1.weights, out, mode="exact")
    a1 = w1.matrix_float()
    a2 = w2.matrix_float()
    b = w1.weights_float()
    return StepKernel(b, (a1 * b) @ a2, mode="float")


def operator_power(w: _StepBase, m: int) -> StepKernel:
    """m-fold operator product; m=1 returns the kernel itself."""
    if m < 1:
        raise InputError("operator power needs m >= 1")
    out = StepKernel(w.weights, w.matrix, mode=w.mode)
    for _ in range(m - 1):
        out = operator_product(out, w)
    return out


def operator_product_row(w: _StepBase, x: int) -> np.ndarray:
    """Row x of the operator square W o W, without forming the full matrix."""
    if w.mode == "exact":
        n, d = w.scaled_matrix()
        m, s = w.scaled_weights()
        row = (np.asarray(n[x]).astype(object) * m.astype(object)) @ n.astype(object)
        den = d * d * s
        out = np.empty(w.q, dtype=object)
        out[:] = [Fraction(int(v), den) for v in row]
        return out
    a = w.matrix_float()
    return (a[x] * w.weights_float()) @ a


def l1_distance(k1: _StepBase, k2: _StepBase):
    """Weighted L1 distance between two kernels on the same steps."""
    _require_same_weights(k1, k2)
    if k1.mode == "exact" and k2.mode == "exact":
        b = k1.weights
        total = Fraction(0)
        for i in range(k1.q):
            for j in range(k1.q):
                total += b[i] * b[j] * abs(k1.matrix[i, j] - k2.matrix[i, j])
        return total
    b = k1.weights_float()
    diff = np.abs(k1.matrix_float() - k2.matrix_float())
    return float(b @ diff @ b)


def pullback(w: StepGraphon, phi: Sequence[int], fine_weights: Sequence) -> StepGraphon:
    """Refine W along a step map; pushforward of fine weights must equal b."""
    if w.mode == "exact":
        fb = _fraction_vector(fine_weights)
        push = [Fraction(0)] * w.q
    else:
        fb = np.array([float(x) for x in fine_weights], dtype=float)
        push = [0.0] * w.q
    phi = [int(i) for i in phi]
    if len(phi) != len(fb):
        raise InputError("map and fine weights differ in length")
    for i, c in enumerate(phi):
        if not 0 <= c < w.q:
            raise InputError(f"map target {c} out of range")
        push[c] += fb[i]
    for c in range(w.q):
        ok = push[c] == w.weights[c] if w.mode == "exact" \
            else abs(push[c] - w.weights[c]) <= _FLOAT_SYM_TOL
        if not ok:
            raise InputError(f"pushforward weight mismatch at step {c}")
    a = w.matrix
    kernel = [[a[phi[i], phi[j]] for j in range(len(phi))] for i in range(len(phi))]
    return StepGraphon(list(fb), kernel, mode=w.mode, raw=w.raw)


def direct_sum(w1: StepGraphon, w2: StepGraphon, alpha) -> StepGraphon:
    """Block-diagonal combination with component masses alpha, 1 - alpha."""
    if w1.mode != w2.mode:
        raise InputError("direct_sum needs matching modes")
    if w1.mode == "exact":
        alpha = Fraction(alpha)
        if not 0 < alpha < 1:
            raise InputError("alpha must lie in (0,1)")
        zero = Fraction(0)
    else:
        alpha = float(alpha)
        if not 0 < alpha < 1:
            raise InputError("alpha must lie in (0,1)")
        zero = 0.0
    weights = [alpha * x for x in w1.weights] + [(1 - alpha) * x for x in w2.weights]
    q1, q2 = w1.q, w2.q
    kernel = [[zero] * (q1 + q2) for _ in range(q1 + q2)]
    for i in range(q1):
        for j in range(q1):
            kernel[i][j] = w1.matrix[i, j]
    for i in range(q2):
        for j in range(q2):
            kernel[q1 + i][q1 + j] = w2.matrix[i, j]
    return StepGraphon(weights, kernel, mode=w1.mode, raw=w1.raw or w2.raw)


# -- generators ----------------------------------------------------------------

def constant(p) -> StepGraphon:
    """One-step graphon with constant kernel p."""
    p = Fraction(p) if not isinstance(p, float) else p
    return StepGraphon([1] if not isinstance(p, float) else [1.0], [[p]])


def cyclic(n: int, alpha) -> StepGraphon:
    """The circulant graph on n nodes where each node is adjacent to its
    floor(alpha*n) nearest successors and predecessors, as a graphon."""
    alpha = Fraction(alpha)
    if not 0 < alpha < Fraction(1, 2):
        raise InputError("alpha must lie in (0, 1/2)")
    if n < 1:
        raise InputError("n must be >= 1")
    reach = math.floor(alpha * n)
    one, zero = Fraction(1), Fraction(0)
    a = [[zero] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = min(j - i, n - (j - i))
            if 1 <= d <= reach:
                a[i][j] = a[j][i] = one
    return StepGraphon([Fraction(1, n)] * n, a, mode="exact")


def circle(q: int, alpha) -> StepGraphon:
    """Discretized circle graphon: q equal arcs, adjacency when the circular
    distance of arc midpoints is at most alpha (ties resolve to 1)."""
    alpha = Fraction(alpha)
    if not 0 < alpha < Fraction(1, 2):
        raise InputError("alpha must lie in (0, 1/2)")
    if q < 1:
        raise InputError("q must be >= 1")
    one, zero = Fraction(1), Fraction(0)
    a = [[zero] * q for _ in range(q)]
    for i in range(q):
        for j in range(i, q):
            d = Fraction(j - i, q)
            dist = min(d, 1 - d)
            if dist <= alpha:
                a[i][j] = a[j][i] = one
    return StepGraphon([Fraction(1, q)] * q, a, mode="exact")


def dyadic(n: int) -> StepGraphon:
    """Step version of the binary-expansion graphon, truncated at depth n.

    The first half of the space splits into bands k=1..n (band k reads the
    k-th bit of the mirrored coordinate) plus a residual band of value 1/2;
    the second half splits into the 2^n depth-n dyadic intervals.  Band
    steps all have 2-path density 1/4 at themselves while the residual
    step has 1/8, at every resolution.
    """
    if n < 1:
        raise InputError("depth must be >= 1")
    if n > 16:
        raise CapExceeded("dyadic depth capped at 16")
    nv = 2 ** n
    q = n + 1 + nv
    # weights: band k has x-measure 2^-(k+1); residual and each dyadic
    # interval have 2^-(n+1)
    weights = [Fraction(1, 2 ** (k + 1)) for k in range(1, n + 1)]
    weights.append(Fraction(1, 2 ** (n + 1)))
    weights.extend([Fraction(1, 2 ** (n + 1))] * nv)
    f0, fh, f1 = Fraction(0), Fraction(1, 2), Fraction(1)
    a = np.full((q, q), f0, dtype=object)
    first = n + 1
    for k in range(1, n + 1):
        shift = n - k
        for j in range(nv):
            if (j >> shift) & 1:
                a[k - 1, first + j] = f1
                a[first + j, k - 1] = f1
    for j in range(nv):
        a[n, first + j] = fh
        a[first + j, n] = fh
    return StepGraphon(weights, a, mode="exact")


def nonlip(eps) -> StepGraphon:
    """The 4-step graphon whose last two steps are close in the similarity
    metric but have 1-edge densities 1/3-eps and 2/3-eps."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 3):
        raise InputError("eps must lie in (0, 1/3)")
    a = [[Fraction(1, 4), Fraction(1, 2), Fraction(0), Fraction(1)],
         [Fraction(1, 2), Fraction(1), Fraction(1), Fraction(0)],
         [Fraction(0), Fraction(1), Fraction(0), Fraction(0)],
         [Fraction(1), Fraction(0), Fraction(0), Fraction(0)]]
    b = [Fraction(2, 3) - eps, Fraction(1, 3) - eps, eps, eps]
    return StepGraphon(b, a, mode="exact")


def random_rational(q: int, seed: int, entry_denominator: int = 4,
                    max_weight: int = 4) -> StepGraphon:
    """Deterministic random graphon with small rational entries.

    Kernel entries are multiples of 1/entry_denominator; weights come from
    small random integers normalized to total 1.
    """
    if q < 1:
        raise InputError("q must be >= 1")
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, max_weight + 1, size=q)
    total = int(counts.sum())
    b = [Fraction(int(c), total) for c in counts]
    a = [[Fraction(0)] * q for _ in range(q)]
    for i in range(q):
        for j in range(i, q):
            v = Fraction(int(rng.integers(0, entry_denominator + 1)), entry_denominator)
            a[i][j] = a[j][i] = v
    return StepGraphon(b, a, mode="exact")


_GENERATORS = {
    "constant": constant,
    "cyclic": cyclic,
    "circle": circle,
    "dyadic": dyadic,
    "nonlip": nonlip,
    "random": random_rational,
}


def generator(name: str, **params) -> StepGraphon:
    """Dispatch to a named generator (constant, cyclic, circle, dyadic,
    nonlip, random)."""
    if name not in _GENERATORS:
        raise InputError(f"unknown generator {name!r}")
    return _GENERATORS[name](**params)


def sample_wrandom(w: StepGraphon, n: int, seed: int) -> LabeledGraph:
    """W-random graph: n step samples from b, edges Bernoulli(A)."""
    if n < 1:
        raise InputError("sample size must be >= 1")
    rng = np.random.default_rng(seed)
    b = w.weights_float()
    b = b / b.sum()
    xs = rng.choice(w.q, size=n, p=b)
    a = w.matrix_float()
    edges = []
    for i in range(n):
        ps = a[xs[i], xs[i + 1:]]
        hits = np.nonzero(rng.random(n - i - 1) < ps)[0]
        edges.extend((i, i + 1 + int(j)) for j in hits)
    return LabeledGraph(n, 0, edges, "simple")
