"""Spectral decomposition of step-graphon kernels, truncation, embedding.

The kernel operator on L2(b) is symmetrized as diag(sqrt(b)) A diag(sqrt(b));
eigenvectors u map to step eigenfunctions f = u / sqrt(b), which are
orthonormal under the weighted inner product sum_x b_x f(x) g(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InputError
from .stepgraphon import StepKernel, _StepBase


@dataclass
class SpectralDecomposition:
    """Nonzero eigenvalues (|lambda| descending, ties: larger first) and the
    matching weighted-orthonormal eigenfunctions evaluated on steps."""
    eigenvalues: np.ndarray
    functions: np.ndarray          # q x r, column r = f_r
    weights: np.ndarray            # float step weights
    rank_tol: float

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    def eigen_residual(self, kernel: np.ndarray) -> float:
        """max |sum_y A[x,y] b_y f_r(y) - lambda_r f_r(x)|."""
        lhs = kernel @ (self.weights[:, None] * self.functions)
        rhs = self.functions * self.eigenvalues[None, :]
        return float(np.abs(lhs - rhs).max()) if self.rank else 0.0

    def orthonormality_defect(self) -> float:
        gram = self.functions.T @ (self.weights[:, None] * self.functions)
        return float(np.abs(gram - np.eye(self.rank)).max()) if self.rank else 0.0

    def power_kernel(self, m: int) -> np.ndarray:
        """sum_r lambda_r^m f_r(x) f_r(y); matches operator powers for m >= 1."""
        lam = self.eigenvalues ** m
        return (self.functions * lam[None, :]) @ self.functions.T

    def eigenvalue_groups(self, tol: float = 1e-7) -> list[list[int]]:
        """Indices grouped by (numerically) equal eigenvalues."""
        groups: list[list[int]] = []
        for i, lam in enumerate(self.eigenvalues):
            if groups and abs(self.eigenvalues[groups[-1][0]] - lam) <= tol:
                groups[-1].append(i)
            else:
                groups.append([i])
        return groups


@dataclass
class SpectralEmbedding:
    """Step x maps to (f_1(x), ..., f_d(x)); with the step weights this point
    cloud is the embedding measure of the truncation."""
    dimension: int
    points: np.ndarray             # q x d
    weights: np.ndarray
    eigenvalues: np.ndarray        # the d retained eigenvalues

    def kernel_matrix(self) -> np.ndarray:
        """sum_i lambda_i x_i y_i over embedded coordinates."""
        return (self.points * self.eigenvalues[None, :]) @ self.points.T

    def separates_steps(self, tol: float = 1e-9) -> bool:
        q = len(self.points)
        for i in range(q):
            for j in range(i + 1, q):
                if np.abs(self.points[i] - self.points[j]).max() <= tol:
                    return False
        return True


def decompose(w: _StepBase, rank_tol: Optional[float] = None) -> SpectralDecomposition:
    """Eigen decomposition of the kernel operator; exact inputs are converted
    to floats.  Deterministic order and signs."""
    a = w.matrix_float()
    b = w.weights_float()
    q = w.q
    if rank_tol is None:
        rank_tol = 1e-10 * q
    sqrt_b = np.sqrt(b)
    sym = sqrt_b[:, None] * a * sqrt_b[None, :]
    vals, vecs = np.linalg.eigh(sym)
    keep = np.abs(vals) > rank_tol
    vals = vals[keep]
    vecs = vecs[:, keep]
    funcs = vecs / sqrt_b[:, None]
    cols = []
    for r in range(funcs.shape[1]):
        f = funcs[:, r]
        idx = int(np.argmax(np.abs(f)))
        if f[idx] < 0:
            f = -f
        cols.append((-abs(vals[r]), -vals[r], tuple(np.round(f, 10)), vals[r], f))
    cols.sort(key=lambda c: (c[0], c[1], c[2]))
    if cols:
        eigenvalues = np.array([c[3] for c in cols])
        functions = np.column_stack([c[4] for c in cols])
    else:
        eigenvalues = np.zeros(0)
        functions = np.zeros((q, 0))
    return SpectralDecomposition(eigenvalues, functions, b, rank_tol)


def _threshold_guard(decomp: SpectralDecomposition, threshold: float,
                     collision_tol: float):
    if threshold <= 0:
        raise InputError("truncation threshold must be positive")
    for lam in decomp.eigenvalues:
        if abs(abs(lam) - threshold) <= collision_tol:
            raise InputError(
                f"threshold {threshold} collides with eigenvalue {lam}")


def truncate(w: _StepBase, threshold: float,
             decomp: Optional[SpectralDecomposition] = None,
             collision_tol: float = 1e-9) -> StepKernel:
    """Partial spectral sum keeping |lambda_r| >= threshold.

    Entries may leave [0,1]; inspect ``value_range`` on the result.
    """
    if decomp is None:
        decomp = decompose(w)
    _threshold_guard(decomp, threshold, collision_tol)
    keep = np.abs(decomp.eigenvalues) >= threshold
    lam = decomp.eigenvalues[keep]
    funcs = decomp.functions[:, keep]
    mat = (funcs * lam[None, :]) @ funcs.T
    return StepKernel(decomp.weights, mat, mode="float")


def embedding(w: _StepBase, threshold: float,
              decomp: Optional[SpectralDecomposition] = None,
              collision_tol: float = 1e-9) -> SpectralEmbedding:
    """Spectral embedding by the eigenfunctions above the threshold."""
    if decomp is None:
        decomp = decompose(w)
    _threshold_guard(decomp, threshold, collision_tol)
    keep = np.abs(decomp.eigenvalues) >= threshold
    lam = decomp.eigenvalues[keep]
    funcs = decomp.functions[:, keep]
    return SpectralEmbedding(int(keep.sum()), funcs.copy(), decomp.weights, lam)
