"""Periodic Sturm-Liouville problem ``-g'' - q(s) g = lambda g`` on a closed curve.

Second-order central differences with periodic wrap, dense storage. The
zero-mean constrained problem is solved by restricting the matrix to an
orthonormal basis of the hyperplane ``sum(g) = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .curves import q_profile, rotation_field


@dataclass(frozen=True, eq=False)
class SLOperator:
    period: float
    potential: np.ndarray
    matrix: np.ndarray

    @property
    def n_grid(self):
        return len(self.potential)

    @property
    def h(self):
        return self.period / self.n_grid

    def apply(self, g):
        return self.matrix @ np.asarray(g, dtype=float)


@dataclass(frozen=True, eq=False)
class SpectrumSlice:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, normalized so that h * sum(v**2) = 1


def periodic_neg_laplacian(n, period):
    """Dense ``-D2`` with periodic wrap; every row sums to exactly zero."""
    h = period / n
    c = 1.0 / (h * h)
    m = np.zeros((n, n))
    idx = np.arange(n)
    m[idx, idx] = 2.0 * c
    m[idx, (idx + 1) % n] = -c
    m[idx, (idx - 1) % n] = -c
    return m


def resample_periodic(values, period, n_grid):
    """Values on ``n_grid`` uniform points of a periodic function sampled uniformly.

    Exact subsampling when the sizes divide, periodic cubic spline otherwise.
    """
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n == n_grid:
        return values.copy()
    if n % n_grid == 0:
        return values[:: n // n_grid].copy()
    s = np.arange(n + 1) * (period / n)
    spline = CubicSpline(s, np.append(values, values[0]), bc_type="periodic")
    return spline(np.arange(n_grid) * (period / n_grid))


def operator_from_potential(potential, period):
    potential = np.asarray(potential, dtype=float)
    if len(potential) < 32:
        raise ValueError("grid too coarse: n_grid must be >= 32")
    matrix = periodic_neg_laplacian(len(potential), period)
    matrix[np.diag_indices_from(matrix)] -= potential
    return SLOperator(float(period), potential, matrix)


def assemble_sl_operator(curve, n_grid=512):
    """Discrete ``-d2/ds2 - q(s)`` for ``curve`` on ``n_grid`` periodic points."""
    if n_grid < 32:
        raise ValueError("grid too coarse: n_grid must be >= 32")
    q = resample_periodic(q_profile(curve), curve.length, n_grid)
    return operator_from_potential(q, curve.length)


def _fix_signs(vecs):
    # deterministic sign: largest-magnitude entry of each eigenvector is positive
    pivot = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[pivot, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def eigen_spectrum(op, count):
    """The ``count`` smallest eigenpairs of the dense symmetric operator."""
    if not 1 <= count <= op.n_grid:
        raise ValueError("count must lie in [1, n_grid]")
    vals, vecs = np.linalg.eigh(op.matrix)
    vecs = _fix_signs(vecs[:, :count]) / np.sqrt(op.h)
    return SpectrumSlice(vals[:count], vecs)


def zero_mean_basis(n):
    """Orthonormal basis (n x n-1) of the complement of the constant vector.

    Columns 2..n of the Householder reflector sending e1 to ones/sqrt(n).
    """
    v = np.full(n, 1.0 / np.sqrt(n))
    v[0] -= 1.0
    v /= np.linalg.norm(v)
    house = np.eye(n) - 2.0 * np.outer(v, v)
    return house[:, 1:]


def constrained_min_eigenvalue(op):
    """Minimum of the Rayleigh quotient of ``op`` over ``sum(g) = 0``."""
    z = zero_mean_basis(op.n_grid)
    reduced = z.T @ op.matrix @ z
    return float(np.linalg.eigvalsh(0.5 * (reduced + reduced.T))[0])


def jacobi_field_residual(curve, n_grid):
    """Sup norm of the discrete operator applied to the rotational Jacobi field."""
    op = assemble_sl_operator(curve, n_grid)
    psi = resample_periodic(rotation_field(curve), curve.length, n_grid)
    return float(np.max(np.abs(op.apply(psi))))


def write_spectrum_csv(path, spectrum, with_vectors=False):
    """Dump ``index,eigenvalue`` rows, optionally followed by eigenvector columns."""
    vals = spectrum.eigenvalues
    with open(path, "w") as fh:
        header = ["index", "eigenvalue"]
        if with_vectors:
            header += [f"v{i}" for i in range(spectrum.eigenvectors.shape[0])]
        fh.write(",".join(header) + "\n")
        for j, lam in enumerate(vals):
            row = [str(j), format(lam, ".17g")]
            if with_vectors:
                row += [format(x, ".17g") for x in spectrum.eigenvectors[:, j]]
            fh.write(",".join(row) + "\n")
