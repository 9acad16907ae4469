"""Generating curves of rotating cylindrical surfaces.

A generating curve is a closed, counterclockwise, arc-length parametrized
planar curve whose curvature obeys ``kappa = a*|alpha|**2 + b``. Curves are
either sampled analytically (circles) or built by shooting on the starting
radius and assembling the fundamental arc under dihedral symmetry.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq
from shapely.geometry import LinearRing

from . import _kernels
from .config import MAX_ARCLENGTH, MAX_SHOOT_ITER, R_BOUND, SolverConfig
from .errors import IntegrationError, InvariantViolation, NoConvergence, NoSignChange

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class GeneratingParams:
    """Coefficients of the curvature law and the symmetry class sought."""

    a: float
    b: float
    symmetry_order: int = 1
    rotation_index: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("a and b must be finite")
        if self.a == 0.0 and self.b == 0.0:
            raise ValueError("a and b cannot both vanish: zero curvature admits no closed curve")
        if self.a == 0.0 and self.b < 0.0:
            raise ValueError("a = 0 with b < 0 admits no counterclockwise closed curve")
        if int(self.symmetry_order) != self.symmetry_order or self.symmetry_order < 1:
            raise ValueError("symmetry_order must be a positive integer")
        if int(self.rotation_index) != self.rotation_index or self.rotation_index < 1:
            raise ValueError("rotation_index must be a positive integer")

    def law(self, r2):
        """Curvature prescribed at squared radius ``r2``."""
        return self.a * r2 + self.b


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    """Uniform arc-length samples of a closed generating curve.

    Sample ``i`` sits at ``s_i = i * length / n_samples``; the endpoint is not
    duplicated. ``theta`` is a continuous lift of the tangent angle.
    """

    params: GeneratingParams
    length: float
    points: np.ndarray
    theta: np.ndarray
    kappa: np.ndarray
    closure_residual: float = 0.0
    r0: float | None = field(default=None)

    @property
    def n_samples(self):
        return len(self.theta)

    @property
    def h(self):
        return self.length / self.n_samples

    @property
    def s(self):
        return np.arange(self.n_samples) * self.h

    @property
    def radius_sq(self):
        return np.einsum("ij,ij->i", self.points, self.points)

    def is_embedded(self):
        return LinearRing(self.points).is_simple

    def is_circle(self, rtol=1e-9):
        r = np.sqrt(self.radius_sq)
        return bool(np.ptp(r) <= rtol * r.mean())

    def residuals(self):
        """Measured value of every curve invariant, keyed by invariant name."""
        h = self.h
        chords = np.linalg.norm(np.roll(self.points, -1, axis=0) - self.points, axis=1)
        return {
            "arc_length": float(np.max(np.abs(chords - h)) / h),
            "closure": float(self.closure_residual),
            "orientation": float(0.5 * h * np.sum(
                self.points[:, 0] * np.sin(self.theta) - self.points[:, 1] * np.cos(self.theta))),
            "curvature_law": float(np.max(np.abs(self.kappa - self.params.law(self.radius_sq)))),
            "turning": float(abs(h * np.sum(self.kappa) - TWO_PI * self.params.rotation_index)),
        }

    def validate(self, config: SolverConfig | None = None):
        """Raise :class:`InvariantViolation` naming the first failed invariant."""
        config = config or SolverConfig()
        if self.n_samples < 16:
            raise InvariantViolation("n_samples", self.n_samples, ">= 16")
        if not (self.length > 0):
            raise InvariantViolation("length", self.length, "> 0")
        res = self.residuals()
        h = self.h
        limits = {
            "arc_length": (res["arc_length"], 10.0 * h * h),
            "closure": (res["closure"], config.closure_tol),
            "curvature_law": (res["curvature_law"], config.law_tol),
            "turning": (res["turning"], 1e-6),
        }
        if not res["orientation"] > 0:
            raise InvariantViolation("orientation", res["orientation"], "signed area > 0")
        for name, (measured, bound) in limits.items():
            if not measured <= bound:
                raise InvariantViolation(name, measured, f"<= {bound:.3g}")
        return self


@dataclass(frozen=True)
class CurveScalars:
    length: float
    area: float
    total_sq_curvature: float
    moment: float

    def to_dict(self):
        return {"length": self.length, "area": self.area,
                "total_sq_curvature": self.total_sq_curvature, "moment": self.moment}


@dataclass(frozen=True, eq=False)
class OpenArc:
    """Samples of one integration run plus the symmetry-line event, if reached."""

    params: GeneratingParams
    start_radius: float
    s: np.ndarray
    points: np.ndarray
    theta: np.ndarray
    event_s: float | None

    @property
    def event_theta(self):
        return None if self.event_s is None else float(self.theta[-1])

    @property
    def event_point(self):
        return None if self.event_s is None else self.points[-1].copy()


def circle_curve(r, a, n_samples=256):
    """Exact counterclockwise circle of radius ``r`` about the origin.

    ``b`` is forced to ``1/r - a*r**2`` so the curvature law holds identically.
    """
    if not r > 0:
        raise ValueError("radius must be positive")
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    r = float(r)
    params = GeneratingParams(float(a), 1.0 / r - a * r * r, 1, 1)
    length = TWO_PI * r
    s = np.arange(n_samples) * (length / n_samples)
    theta = 0.5 * math.pi + s / r
    # points built from theta so that <alpha, alpha'> cancels exactly in floating point
    points = np.column_stack([r * np.sin(theta), -r * np.cos(theta)])
    kappa = np.full(n_samples, 1.0 / r)
    return PlanarCurve(params, length, points, theta, kappa, 0.0, r)


def _step_size(start_radius, config):
    return min(config.h_ode, TWO_PI * start_radius / 1e4)


def integrate_arc(params, start_radius, max_arclength=MAX_ARCLENGTH, config=None,
                  r_bound=R_BOUND, kernels=None):
    """Integrate the curvature-law ODE from ``(start_radius, 0)`` heading along +x2.

    Stops at the first point where the continuous polar angle reaches
    ``pi / symmetry_order``.
    """
    config = config or SolverConfig()
    if not start_radius > 0:
        raise ValueError("start_radius must be positive")
    if not max_arclength > 0:
        raise ValueError("max_arclength must be positive")
    h = _step_size(start_radius, config)
    if h < 1e-12:
        raise IntegrationError(f"step size underflow (h={h:g})")
    rk4_arc = (kernels or _kernels).rk4_arc
    target = math.pi / params.symmetry_order
    s, y, _phi, status = rk4_arc(float(params.a), float(params.b), float(start_radius), h,
                                 target, int(math.ceil(max_arclength / h)), float(r_bound))
    if status == 1:
        raise IntegrationError(f"arc escaped radius {r_bound:g} at s={s[-1]:.6g}")
    if status == 2:
        raise IntegrationError(f"symmetry line not reached within arclength {max_arclength:g}")
    return OpenArc(params, float(start_radius), s, y[:, :2], y[:, 2], float(s[-1]))


def shooting_residual(params, r0, config=None, kernels=None):
    """Tangent-angle mismatch at the symmetry line; zero for a closed curve."""
    arc = integrate_arc(params, r0, config=config, kernels=kernels)
    k, n = params.symmetry_order, params.rotation_index
    return arc.event_theta - (0.5 * math.pi + n * math.pi / k)


def _assemble(arc):
    """Reflect the fundamental arc and rotate it into the full closed polyline."""
    k = arc.params.symmetry_order
    s, pts, th = arc.s, arc.points, arc.theta
    # drop a sliver step before the event; it only hurts the spline
    if len(s) > 2 and s[-1] - s[-2] < 0.1 * (s[1] - s[0]):
        s = np.delete(s, -2)
        pts = np.delete(pts, -2, axis=0)
        th = np.delete(th, -2)
    s_star, th_star = s[-1], th[-1]
    beta = 2.0 * math.pi / k
    refl = np.array([[math.cos(beta), math.sin(beta)], [math.sin(beta), -math.cos(beta)]])
    half_s = np.concatenate([s, 2.0 * s_star - s[-2::-1]])
    half_pts = np.vstack([pts, pts[-2::-1] @ refl.T])
    half_th = np.concatenate([th, 2.0 * th_star - th[-2::-1]])
    piece_len = 2.0 * s_star
    piece_turn = half_th[-1] - half_th[0]

    all_s, all_pts, all_th = [half_s], [half_pts], [half_th]
    for j in range(1, k):
        c, sn = math.cos(j * beta), math.sin(j * beta)
        rot = np.array([[c, -sn], [sn, c]])
        all_s.append(half_s[1:] + j * piece_len)
        all_pts.append(half_pts[1:] @ rot.T)
        all_th.append(half_th[1:] + j * piece_turn)
    return np.concatenate(all_s), np.vstack(all_pts), np.concatenate(all_th)


def _resample(params, s, pts, th, n_samples, closure_residual, r0):
    length = float(s[-1])
    turn = TWO_PI * params.rotation_index
    pts = pts.copy()
    pts[-1] = pts[0]
    drift = th - th[0] - turn * s / length
    drift[-1] = drift[0]
    xs = CubicSpline(s, pts, bc_type="periodic", axis=0)
    ds = CubicSpline(s, drift, bc_type="periodic")
    su = np.arange(n_samples) * (length / n_samples)
    theta = th[0] + turn * su / length + ds(su)
    kappa = turn / length + ds(su, 1)
    return PlanarCurve(params, length, xs(su), theta, kappa, closure_residual, r0)


def _solve_start_radius(params, lo, hi, config, kernels):
    def F(r0):
        return shooting_residual(params, r0, config, kernels)

    try:
        brackets = [(lo, hi, F(lo), F(hi))]
    except IntegrationError:
        # an endpoint never reaches the symmetry line; look inside the bracket
        grid, vals = scan_residuals(params, lo, hi, 33, config, kernels)
        brackets = [(grid[i], grid[i + 1], vals[i], vals[i + 1]) for i in range(32)
                    if np.isfinite(vals[i]) and np.isfinite(vals[i + 1])
                    and np.sign(vals[i]) != np.sign(vals[i + 1])]
        if not brackets:
            raise NoSignChange(f"no finite sign change of the residual inside ({lo:g}, {hi:g})")
    last_error = None
    for b_lo, b_hi, f_lo, f_hi in brackets:
        if f_lo == 0.0 or f_hi == 0.0:
            return b_lo if f_lo == 0.0 else b_hi
        if np.sign(f_lo) == np.sign(f_hi):
            raise NoSignChange(f"F({b_lo:g})={f_lo:.3g} and F({b_hi:g})={f_hi:.3g} share a sign")
        try:
            cand = brentq(F, b_lo, b_hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                          maxiter=MAX_SHOOT_ITER)
        except RuntimeError as exc:
            last_error = NoConvergence(str(exc))
            continue
        resid = F(cand)
        if abs(resid) <= config.shoot_tol:
            return cand
        last_error = NoConvergence(
            f"residual {resid:.3g} at r0={cand:.15g} exceeds {config.shoot_tol:g} (jump, not a root)")
    raise last_error


def shoot_closed_curve(params, r0_bracket, config=None, n_samples=1024, kernels=None):
    """Find the start radius that closes the curve and return the assembled curve.

    Raises
    ------
    NoSignChange
        The residual has the same sign at both bracket ends.
    NoConvergence
        The root finder stalled or converged onto a jump of the residual.
    InvariantViolation
        The assembled curve fails closure or the curvature law.
    """
    config = config or SolverConfig()
    lo, hi = map(float, r0_bracket)
    if not 0 < lo < hi:
        raise ValueError("bracket must satisfy 0 < r0_min < r0_max")
    k, n = params.symmetry_order, params.rotation_index
    if (n - 1) % k:
        raise ValueError("dihedral assembly needs rotation_index = 1 (mod symmetry_order)")

    if params.a == 0.0 and lo <= 1.0 / params.b <= hi:
        # translation invariance: every start radius closes; take the centred circle
        r0 = 1.0 / params.b
    else:
        r0 = _solve_start_radius(params, lo, hi, config, kernels)

    arc = integrate_arc(params, r0, config=config, kernels=kernels)
    s, pts, th = _assemble(arc)
    closure = float(np.linalg.norm(pts[-1] - pts[0]))
    curve = _resample(params, s, pts, th, n_samples, closure, r0)
    return curve.validate(config)


def scan_residuals(params, r0_min, r0_max, points=64, config=None, kernels=None):
    """Shooting residual on a uniform grid of start radii (NaN where integration fails)."""
    grid = np.linspace(r0_min, r0_max, points)
    vals = np.empty(points)
    for i, r0 in enumerate(grid):
        try:
            vals[i] = shooting_residual(params, r0, config, kernels)
        except IntegrationError:
            vals[i] = np.nan
    return grid, vals


def find_closed_curves(params, r0_min, r0_max, points=64, config=None, n_samples=1024,
                       kernels=None):
    """Scan for sign changes of the residual and shoot on each bracket.

    Returns ``(curves, failures)`` where ``failures`` lists ``(bracket, error)``
    for brackets that straddle a jump rather than a root.
    """
    if params.a == 0.0:
        # the residual vanishes identically; only the centred circle is reported
        if not r0_min <= 1.0 / params.b <= r0_max:
            return [], []
        return [shoot_closed_curve(params, (r0_min, r0_max), config, n_samples, kernels)], []
    grid, vals = scan_residuals(params, r0_min, r0_max, points, config, kernels)
    curves, failures = [], []
    for i in range(points - 1):
        f0, f1 = vals[i], vals[i + 1]
        if not (np.isfinite(f0) and np.isfinite(f1)) or np.sign(f0) == np.sign(f1):
            continue
        bracket = (grid[i], grid[i + 1])
        try:
            curves.append(shoot_closed_curve(params, bracket, config, n_samples, kernels))
        except (NoConvergence, NoSignChange, InvariantViolation, IntegrationError) as exc:
            failures.append((bracket, exc))
    return curves, failures


def _trapz(h, f):
    return h * float(np.sum(f))


def curve_scalars(curve):
    """Length, enclosed area, total squared curvature and the moment integral.

    Area uses the one-sided Green form, the moment the symmetric one, so
    ``moment - 2*area`` is a genuine quadrature check.
    """
    h = curve.h
    x1, x2 = curve.points[:, 0], curve.points[:, 1]
    c, s = np.cos(curve.theta), np.sin(curve.theta)
    area = _trapz(h, x1 * s)
    if not area > 0:
        raise InvariantViolation("orientation", area, "signed area > 0")
    moment = _trapz(h, x1 * s - x2 * c)
    return CurveScalars(curve.length, area, _trapz(h, curve.kappa ** 2), moment)


def shoelace_area(points):
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def q_profile(curve):
    """Reduced potential ``kappa**2 + 2a <alpha ^ alpha', E3>`` at the samples."""
    x1, x2 = curve.points[:, 0], curve.points[:, 1]
    cross = x1 * np.sin(curve.theta) - x2 * np.cos(curve.theta)
    return curve.kappa ** 2 + 2.0 * curve.params.a * cross


def rotation_field(curve):
    """Rotational Jacobi field ``<alpha, alpha'>`` at the samples."""
    x1, x2 = curve.points[:, 0], curve.points[:, 1]
    return x1 * np.cos(curve.theta) + x2 * np.sin(curve.theta)


def tangent_components(curve):
    return np.cos(curve.theta), np.sin(curve.theta)
