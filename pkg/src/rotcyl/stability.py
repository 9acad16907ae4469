"""Stability of a column of a rotating cylindrical surface.

Three routes to the critical column length:

* closed-form necessary bounds (``theorem1_bound``, ``theorem2_bound``);
* separation of variables, one axial mode ``sin(m pi t / l)`` at a time,
  with the zero-mean constraint pushed onto the curve factor for odd ``m``;
* the full 2D quadratic form on ``[0, l] x [0, L]`` with the single global
  zero-mean constraint (``full_form_min``), which is the reference.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import fft, sparse
from scipy.sparse.linalg import LinearOperator, eigsh, splu

from .config import SolverConfig
from .curves import CurveScalars, GeneratingParams, curve_scalars, q_profile, tangent_components
from .errors import BracketError, InvariantViolation, NotApplicable
from .spectral import (
    assemble_sl_operator,
    constrained_min_eigenvalue,
    eigen_spectrum,
    resample_periodic,
    zero_mean_basis,
)

INF = math.inf


class ResolutionWarning(UserWarning):
    pass


class StrongerBound(str, Enum):
    THEOREM1 = "theorem1"
    THEOREM2 = "theorem2"
    TIE = "tie"
    NA = "n/a"


class Verdict(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


@dataclass(frozen=True, eq=False)
class CylinderColumn:
    curve: object
    column_length: float

    def __post_init__(self):
        if not self.column_length > 0:
            raise ValueError("column_length must be positive")


@dataclass(frozen=True)
class ModeAnalysis:
    mode_index: int
    constrained: bool
    eigenvalue: float
    threshold_length: float

    def to_dict(self):
        return {"mode_index": self.mode_index, "constrained": self.constrained,
                "eigenvalue": self.eigenvalue, "threshold_length": _enc(self.threshold_length)}


# --------------------------------------------------------------------------
# closed-form bounds

def theorem1_bound(scalars: CurveScalars, a: float) -> float:
    """Largest stable column length allowed when ``a > 0``: (pi/2) sqrt(L / (a |Omega|))."""
    if not a > 0:
        raise NotApplicable("the rotation bound needs a > 0")
    return 0.5 * math.pi * math.sqrt(scalars.length / (a * scalars.area))


def theorem2_bound(scalars: CurveScalars, a: float, b: float) -> float:
    """Largest stable column length allowed when ``a >= 0, b > 0``."""
    if a < 0 or not b > 0:
        raise NotApplicable("the offset bound needs a >= 0 and b > 0")
    L = scalars.length
    return 2.0 * math.pi * math.sqrt(L / (4.0 * a * scalars.area + L * b * b))


def bound_comparison(scalars, a, b, rtol=1e-10):
    """Which bound is smaller; agrees with the sign of ``a/b**2 - L/(12 |Omega|)``."""
    t1 = theorem1_bound(scalars, a)
    t2 = theorem2_bound(scalars, a, b)
    if abs(t1 - t2) <= rtol * max(t1, t2):
        return StrongerBound.TIE
    choice = StrongerBound.THEOREM2 if t2 < t1 else StrongerBound.THEOREM1
    predicted = a / (b * b) < scalars.length / (12.0 * scalars.area)
    if predicted != (choice is StrongerBound.THEOREM2):
        raise InvariantViolation("crossover", (t1, t2), "sign of a/b^2 - L/(12|Omega|)")
    return choice


def _maybe(fn, *args):
    try:
        return fn(*args)
    except NotApplicable:
        return None


def stronger_bound(scalars, a, b):
    t1 = _maybe(theorem1_bound, scalars, a)
    t2 = _maybe(theorem2_bound, scalars, a, b)
    if t1 is not None and t2 is not None:
        return bound_comparison(scalars, a, b)
    if t1 is not None:
        return StrongerBound.THEOREM1
    if t2 is not None:
        return StrongerBound.THEOREM2
    return StrongerBound.NA


# --------------------------------------------------------------------------
# per-mode reduction

def _threshold(m, lam, zero_tol=0.0):
    return m * math.pi / math.sqrt(-lam) if lam < -zero_tol else INF


def _pair(op):
    return constrained_min_eigenvalue(op), float(eigen_spectrum(op, 1).eigenvalues[0])


def modes_from_operator(op, m_max, coarse=None):
    """ModeAnalysis for m = 1..m_max from one assembled operator.

    With ``coarse`` (the same problem on half the grid) an eigenvalue whose
    magnitude is below the grid-to-grid change counts as zero, so a null
    direction does not turn into a spurious finite threshold.
    """
    fine = _pair(op)
    tols = [abs(f - c) for f, c in zip(fine, _pair(coarse))] if coarse is not None else [0.0, 0.0]
    out = []
    for m in range(1, m_max + 1):
        j = 0 if m % 2 else 1
        out.append(ModeAnalysis(m, bool(m % 2), fine[j], _threshold(m, fine[j], tols[j])))
    return out


def _resolved_modes(curve, m_max, n_grid):
    coarse = assemble_sl_operator(curve, max(32, n_grid // 2))
    return modes_from_operator(assemble_sl_operator(curve, n_grid), m_max, coarse)


def mode_threshold(curve, m, n_grid=512):
    """Critical length contributed by axial mode ``m``."""
    if m < 1:
        raise ValueError("mode index must be >= 1")
    return _resolved_modes(curve, m, n_grid)[m - 1]


def governing_mode(modes):
    return min(modes, key=lambda md: (md.threshold_length, md.mode_index))


def per_mode_critical_length(curve, m_max=8, n_grid=512):
    """Smallest per-mode threshold over m = 1..m_max (an estimate; see ``full_form_min``)."""
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    gov = governing_mode(_resolved_modes(curve, m_max, n_grid))
    if gov.mode_index > 4 and math.isfinite(gov.threshold_length):
        warnings.warn(f"mode {gov.mode_index} governs; expected m <= 4", ResolutionWarning)
    return gov.threshold_length


# --------------------------------------------------------------------------
# second variation on explicit test functions

def column_grid(column, n_t, n_s):
    t = np.linspace(0.0, column.column_length, n_t + 1)
    s = np.arange(n_s) * (column.curve.length / n_s)
    return t, s


def _phi_parts(column, u):
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or u.shape[0] < 3:
        raise ValueError("u must be a (n_t + 1, n_s) array")
    n_t, n_s = u.shape[0] - 1, u.shape[1]
    scale = max(1.0, float(np.max(np.abs(u))))
    if np.max(np.abs(u[[0, -1]])) > 1e-12 * scale:
        raise ValueError("u must vanish on the rows t = 0 and t = l")
    l, L = column.column_length, column.curve.length
    h_t, h_s = l / n_t, L / n_s
    q = resample_periodic(q_profile(column.curve), L, n_s)
    inner = u[1:-1]
    modes = fft.dst(inner, type=1, axis=0) / n_t
    kt = np.arange(1, n_t) * (math.pi / l)
    ks = 2.0 * math.pi * np.fft.fftfreq(n_s, d=h_s)
    coeff = np.fft.fft(inner, axis=1) / n_s
    return inner, modes, kt, coeff, ks, q, h_t, h_s, l, L


def phi_evaluate(column, u):
    """Second variation in gradient form, ``iint |grad u|^2 - q u^2``.

    ``u`` is sampled on ``column_grid``: rows are axial stations including
    both ends (which must be zero), columns are periodic curve samples.
    Derivatives are spectral (sine series in t, Fourier in s).
    """
    inner, modes, kt, coeff, ks, q, h_t, h_s, l, L = _phi_parts(column, u)
    grad_t = h_s * 0.5 * l * float(np.sum((modes * kt[:, None]) ** 2))
    grad_s = h_t * L * float(np.sum(np.abs(coeff) ** 2 * ks ** 2))
    pot = h_t * h_s * float(np.sum(q * inner ** 2))
    return grad_t + grad_s - pot


def phi_evaluate_raw(column, u):
    """Same functional in the form ``-iint u (Laplacian u + q u)``."""
    inner, modes, kt, coeff, ks, q, h_t, h_s, l, L = _phi_parts(column, u)
    u_tt = fft.dst(-(kt[:, None] ** 2) * modes, type=1, axis=0) / 2.0
    u_ss = np.real(np.fft.ifft(-(ks ** 2) * coeff, axis=1)) * inner.shape[1]
    return -h_t * h_s * float(np.sum(inner * (u_tt + u_ss + q * inner)))


def proof_witness(column, n_t=64, n_s=None):
    """``(Phi(u1), Phi(u2))`` for ``u_i = sin(pi t / l) * g_i(s)``, g the unit tangent."""
    n_s = n_s or column.curve.n_samples
    t, _ = column_grid(column, n_t, n_s)
    f = np.sin(math.pi * t / column.column_length)
    f[[0, -1]] = 0.0
    out = []
    for g in tangent_components(column.curve):
        g = resample_periodic(g, column.curve.length, n_s)
        out.append(phi_evaluate(column, np.outer(f, g)))
    return tuple(out)


def witness_identity(scalars, a, l):
    """Closed form of ``Phi(u1) + Phi(u2)`` obtained by integrating by parts."""
    return 0.5 * l * (math.pi ** 2 * scalars.length / l ** 2 - 2.0 * a * scalars.moment)


# --------------------------------------------------------------------------
# full 2D oracle

def _oracle_operator(q, period, l, n_t):
    n_s = len(q)
    h_t, h_s = l / n_t, period / n_s
    m = n_t - 1
    lap_t = sparse.diags([-1.0, 2.0, -1.0], [-1, 0, 1], shape=(m, m)) / h_t ** 2
    c = 1.0 / h_s ** 2
    lap_s = sparse.diags([-c, 2.0 * c, -c], [-1, 0, 1], shape=(n_s, n_s), format="lil")
    lap_s[0, n_s - 1] = -c
    lap_s[n_s - 1, 0] = -c
    op_s = lap_s.tocsr() - sparse.diags(q)
    return (sparse.kron(lap_t, sparse.identity(n_s)) + sparse.kron(sparse.identity(m), op_s)).tocsc()


def _projected_min_sparse(a_mat, shift):
    """Smallest eigenvalue on ``sum(u) = 0`` by shift-invert Lanczos on the bordered system."""
    n = a_mat.shape[0]
    c = np.full((n, 1), 1.0 / math.sqrt(n))
    bordered = sparse.bmat([[a_mat - shift * sparse.identity(n), c], [c.T, None]], format="csc")
    lu = splu(bordered)
    rhs = np.zeros(n + 1)

    def solve(v):
        rhs[:n] = v
        return lu.solve(rhs)[:n]

    v0 = np.cos(np.arange(n) * 0.7071) + 0.5
    v0 -= v0.mean()
    inv = LinearOperator((n, n), matvec=solve, dtype=float)
    theta = eigsh(inv, k=1, which="LA", v0=v0, tol=1e-12, return_eigenvectors=False)[0]
    return float(shift + 1.0 / theta)


def _projected_min_dense(a_mat):
    z = zero_mean_basis(a_mat.shape[0])
    reduced = z.T @ a_mat.toarray() @ z
    return float(np.linalg.eigvalsh(0.5 * (reduced + reduced.T))[0])


def _form_min(q, period, l, n_t, method):
    a_mat = _oracle_operator(q, period, l, n_t)
    if method == "dense":
        return _projected_min_dense(a_mat)
    if method != "sparse":
        raise ValueError("method must be 'sparse' or 'dense'")
    # -Laplacian >= 0, so the spectrum lies above -max(q)
    return _projected_min_sparse(a_mat, -float(np.max(q)) - 1.0)


def full_form_min(column, n_t=64, n_s=256, method="sparse", check_resolution=True):
    """Smallest eigenvalue of ``-Laplacian - q`` on the column, over ``sum(u) = 0``.

    Dirichlet rows at t = 0 and t = l (``n_t`` intervals), periodic in s with
    ``n_s`` samples. Negative means the column is unstable at this resolution.
    """
    if n_t < 32:
        raise ValueError("n_t must be >= 32")
    if n_s < 64:
        raise ValueError("n_s must be >= 64")
    curve = column.curve
    q_all = q_profile(curve)
    q = resample_periodic(q_all, curve.length, n_s)
    lam = _form_min(q, curve.length, column.column_length, n_t, method)
    if check_resolution:
        qc = resample_periodic(q_all, curve.length, n_s // 2)
        lam_c = _form_min(qc, curve.length, column.column_length, n_t // 2, method)
        err = abs(lam_c - lam) / 3.0
        if err > 0.1 * abs(lam):
            warnings.warn(f"Richardson error estimate {err:.3g} exceeds 10% of eigenvalue {lam:.3g}",
                          ResolutionWarning)
    return lam


def oracle_critical_length(curve, config=None, per_mode=None, method="sparse"):
    """Column length at which ``full_form_min`` changes sign, by bisection."""
    config = config or SolverConfig()
    if per_mode is None:
        per_mode = per_mode_critical_length(curve, config.m_max, config.n_grid)
    q = resample_periodic(q_profile(curve), curve.length, config.n_s)
    scanned = []

    def fmin(l):
        val = _form_min(q, curve.length, l, config.n_t, method)
        scanned.append((l, val))
        return val

    seed = per_mode if math.isfinite(per_mode) else curve.length
    hi = min(2.0 * seed, config.l_max)
    lo = min(0.5 * seed, 0.5 * hi)
    for _ in range(40):
        if fmin(lo) > 0:
            break
        lo *= 0.5
    else:
        raise BracketError("form minimum is negative even for very short columns", scanned)
    while fmin(hi) > 0:
        if hi >= config.l_max:
            return INF
        lo, hi = hi, min(2.0 * hi, config.l_max)
    while hi - lo > config.bisection_tol * lo:
        mid = 0.5 * (lo + hi)
        if fmin(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_min_eigenvalue(curve, lengths, config=None):
    """``(l, full_form_min)`` pairs for a plot of the oracle against column length."""
    config = config or SolverConfig()
    q = resample_periodic(q_profile(curve), curve.length, config.n_s)
    return [(float(l), _form_min(q, curve.length, float(l), config.n_t, "sparse")) for l in lengths]


# --------------------------------------------------------------------------
# report

def _enc(x):
    if x is None:
        return None
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return float(x)


@dataclass(frozen=True)
class StabilityReport:
    scalars: CurveScalars
    params: GeneratingParams
    theorem1: float | None
    theorem2: float | None
    stronger_bound: StrongerBound
    modes: tuple
    per_mode_critical: float
    oracle_critical: float | None
    verdict: Verdict | None = None
    column_length: float | None = None
    margin: float | None = None

    def to_dict(self):
        verdict = None
        if self.verdict is not None:
            verdict = {"state": self.verdict.value, "column_length": self.column_length,
                       "margin": self.margin}
        return {
            "scalars": self.scalars.to_dict(),
            "params": {"a": self.params.a, "b": self.params.b,
                       "symmetry_order": self.params.symmetry_order,
                       "rotation_index": self.params.rotation_index},
            "theorem1": _enc(self.theorem1),
            "theorem2": _enc(self.theorem2),
            "stronger_bound": self.stronger_bound.value,
            "modes": [m.to_dict() for m in self.modes],
            "per_mode_critical": _enc(self.per_mode_critical),
            "oracle_critical": _enc(self.oracle_critical),
            "verdict": verdict,
        }


def _classify(l, thresholds, band):
    governing = min(thresholds)
    margin = 1.0 - l / governing if math.isfinite(governing) else 1.0
    if any(math.isfinite(x) and abs(l / x - 1.0) <= band for x in thresholds):
        return Verdict.MARGINAL, margin
    if l > governing:
        return Verdict.UNSTABLE, margin
    return Verdict.STABLE, margin


def build_report(curve, l=None, config=None, compute_oracle=True):
    """Evaluate bounds, per-mode thresholds and (optionally) the oracle for ``curve``."""
    config = config or SolverConfig()
    params = curve.params
    scalars = curve_scalars(curve)
    a, b = params.a, params.b
    t1 = _maybe(theorem1_bound, scalars, a)
    t2 = _maybe(theorem2_bound, scalars, a, b)

    modes = _resolved_modes(curve, config.m_max, config.n_grid)
    per_mode = governing_mode(modes).threshold_length
    coarse = _resolved_modes(curve, 2, config.n_grid // 2)
    for fine_m, coarse_m in zip(modes[:2], coarse):
        change = abs(fine_m.eigenvalue - coarse_m.eigenvalue) / max(abs(fine_m.eigenvalue), 1e-12)
        # null directions (infinite threshold) are exempt: their relative change is meaningless
        if change >= 1e-3 and math.isfinite(fine_m.threshold_length):
            warnings.warn(f"per-mode eigenvalue changed by {change:.2g} between grids",
                          ResolutionWarning)

    oracle = oracle_critical_length(curve, config, per_mode) if compute_oracle else None
    if oracle is not None:
        if oracle > per_mode * (1.0 + 1e-2):
            raise InvariantViolation("oracle_le_per_mode", (oracle, per_mode), "oracle <= per-mode")
        embedded = curve.is_embedded()
        for name, bound in (("theorem1_necessity", t1), ("theorem2_necessity", t2)):
            if bound is not None and embedded and oracle > bound * (1.0 + 1e-2):
                raise InvariantViolation(name, (oracle, bound), "oracle <= bound * 1.01")

    verdict = margin = None
    if l is not None:
        if not l > 0:
            raise ValueError("column length must be positive")
        crit = oracle if oracle is not None else per_mode
        thresholds = [x for x in (t1, t2, crit) if x is not None]
        verdict, margin = _classify(float(l), thresholds, config.bisection_tol)
    return StabilityReport(scalars, params, t1, t2, stronger_bound(scalars, a, b), tuple(modes),
                           per_mode, oracle, verdict, None if l is None else float(l), margin)


def rayleigh_note(curve, report):
    """Contrast with the constant-mean-curvature reading of a circular column, if relevant."""
    if report.verdict is None or not curve.is_circle():
        return None
    r = float(np.sqrt(curve.radius_sq.mean()))
    l = report.column_length
    if report.verdict is Verdict.UNSTABLE and l < 2.0 * math.pi * r:
        return (f"unstable as a rotating surface, yet stable as a constant-mean-curvature "
                f"column since l = {l:g} < 2*pi*r = {2 * math.pi * r:.6f}")
    return None
