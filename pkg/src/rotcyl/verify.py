"""Invariant suite over a corpus of generating curves (backs ``rotcyl verify``)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import SolverConfig
from .curves import (
    GeneratingParams,
    circle_curve,
    curve_scalars,
    shoelace_area,
    shoot_closed_curve,
    tangent_components,
)
from .errors import InvariantViolation
from .io import read_curve_csv, write_curve_csv
from .spectral import (
    assemble_sl_operator,
    constrained_min_eigenvalue,
    eigen_spectrum,
    jacobi_field_residual,
    operator_from_potential,
)
from .stability import (
    CylinderColumn,
    StrongerBound,
    bound_comparison,
    full_form_min,
    oracle_critical_length,
    per_mode_critical_length,
    proof_witness,
    theorem1_bound,
    theorem2_bound,
)

# (r, a) pairs for analytic circles
CORPUS_CIRCLES = [(1.0, 0.0), (1.0, 1.0), (1.0, 0.1), (1.0, 0.3), (2.0, 0.25), (0.5, 3.0)]
# (a, b, k, r0 bracket) for shot non-circular curves, brackets located by residual scans
CORPUS_SOLVED = [
    (1.0, -0.45, 2, (0.85, 0.95)),
    (1.0, -0.5, 2, (0.55, 0.65)),
    (1.0, -2.0, 4, (0.55, 0.70)),
]


@dataclass
class Check:
    name: str
    measured: float
    required: str
    passed: bool

    def line(self):
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: measured {self.measured:.6g} (required {self.required})"


def builtin_corpus(config=None, n_samples=1024):
    """Named curves: analytic circles followed by shot non-circular curves."""
    config = config or SolverConfig()
    corpus = [(f"circle r={r:g} a={a:g}", circle_curve(r, a, n_samples)) for r, a in CORPUS_CIRCLES]
    for a, b, k, bracket in CORPUS_SOLVED:
        curve = shoot_closed_curve(GeneratingParams(a, b, k), bracket, config, n_samples)
        corpus.append((f"solved a={a:g} b={b:g} k={k}", curve))
    return corpus


def load_corpus_dir(path, config=None):
    """Every ``*.csv`` curve in ``path``; invalid files surface as failed checks."""
    out = []
    for f in sorted(Path(path).glob("*.csv")):
        try:
            out.append((f.name, read_curve_csv(f, config)))
        except InvariantViolation as exc:
            out.append((f.name, exc))
    return out


def _order(e_coarse, e_fine):
    return math.log2(e_coarse / e_fine) if e_fine > 0 and e_coarse > 0 else math.inf


def _tangent_sq_error(curve):
    g1, g2 = tangent_components(curve)
    h = curve.h
    d1 = (np.roll(g1, -1) - np.roll(g1, 1)) / (2 * h)
    d2 = (np.roll(g2, -1) - np.roll(g2, 1)) / (2 * h)
    return float(np.max(np.abs(d1 ** 2 + d2 ** 2 - curve.kappa ** 2)))


def curve_checks(name, curve, config):
    checks = []
    res = curve.residuals()
    checks.append(Check(f"{name}: closure", res["closure"], f"<= {config.closure_tol:g}",
                        res["closure"] <= config.closure_tol))
    checks.append(Check(f"{name}: curvature law", res["curvature_law"], f"<= {config.law_tol:g}",
                        res["curvature_law"] <= config.law_tol))
    checks.append(Check(f"{name}: turning", res["turning"], "<= 1e-06", res["turning"] <= 1e-6))
    checks.append(Check(f"{name}: orientation (signed area)", res["orientation"], "> 0",
                        res["orientation"] > 0))
    sc = curve_scalars(curve)
    gap = abs(sc.moment - 2 * sc.area)
    checks.append(Check(f"{name}: moment - 2 area", gap, "<= 1e-06", gap <= 1e-6))
    iso = sc.length ** 2 - 4 * math.pi * sc.area
    checks.append(Check(f"{name}: isoperimetric L^2 - 4 pi A", iso, ">= 0", iso >= -1e-9))
    g1, g2 = tangent_components(curve)
    unit = float(np.max(np.abs(g1 ** 2 + g2 ** 2 - 1)))
    tol_unit = 1e-12 if curve.is_circle() else 1e-6
    checks.append(Check(f"{name}: g1^2 + g2^2 = 1", unit, f"<= {tol_unit:g}", unit <= tol_unit))
    mean = max(abs(curve.h * g1.sum()), abs(curve.h * g2.sum()))
    checks.append(Check(f"{name}: integral of g_i", mean, "<= 1e-08", mean <= 1e-8))
    return checks


def refinement_checks(config):
    """Convergence orders measured on one shot curve at two sample counts."""
    a, b, k, bracket = CORPUS_SOLVED[1]
    params = GeneratingParams(a, b, k)
    coarse = shoot_closed_curve(params, bracket, config, 256)
    fine = shoot_closed_curve(params, bracket, config, 512)
    checks = []
    order = _order(_tangent_sq_error(coarse), _tangent_sq_error(fine))
    checks.append(Check("g1'^2 + g2'^2 = kappa^2 convergence order", order, ">= 1.8", order >= 1.8))
    e_c = abs(shoelace_area(coarse.points) - curve_scalars(coarse).area)
    e_f = abs(shoelace_area(fine.points) - curve_scalars(fine).area)
    order = _order(e_c, e_f)
    checks.append(Check("shoelace vs Green area convergence order", order, ">= 1.8", order >= 1.8))
    again = shoot_closed_curve(params, bracket, config, 512)
    same = bool(np.array_equal(again.points, fine.points) and np.array_equal(again.theta, fine.theta))
    checks.append(Check("determinism (bit-identical reshoot)", float(not same), "== 0", same))
    c = shoot_closed_curve(GeneratingParams(0.0, 1.0 / 1.3), (0.5, 2.0), config, 512)
    dist = float(np.max(np.abs(np.sqrt(c.radius_sq) - 1.3)))
    checks.append(Check("a=0 shot returns circle r=1.3", dist, "<= 1e-06", dist <= 1e-6))
    return checks


def spectral_checks(corpus, config):
    checks = []
    n, L = 256, 2 * math.pi
    h = L / n
    base = eigen_spectrum(operator_from_potential(np.zeros(n), L), n).eigenvalues
    k = (np.arange(n) + 1) // 2
    exact = 4 * np.sin(np.pi * k / n) ** 2 / h ** 2
    mask = k < n / 4
    for c in (0.0, 1.0, 3.0):
        vals = eigen_spectrum(operator_from_potential(np.full(n, c), L), n).eigenvalues
        err = float(np.max(np.abs(vals[mask] - (exact[mask] - c))))
        checks.append(Check(f"dispersion relation q={c:g}", err, "<= 1e-10", err <= 1e-10))
        shift = float(np.max(np.abs(vals - (base - c))))
        checks.append(Check(f"shift covariance q={c:g}", shift, "<= 1e-10", shift <= 1e-10))
    for name, curve in corpus:
        op = assemble_sl_operator(curve, 256)
        gap = constrained_min_eigenvalue(op) - float(eigen_spectrum(op, 1).eigenvalues[0])
        checks.append(Check(f"{name}: constrained >= unconstrained", gap, ">= 0", gap >= -1e-10))
        if curve.is_circle():
            res = jacobi_field_residual(curve, 256)
            checks.append(Check(f"{name}: Jacobi residual", res, "<= 1e-12", res <= 1e-12))
        else:
            ratio = jacobi_field_residual(curve, 128) / jacobi_field_residual(curve, 256)
            checks.append(Check(f"{name}: Jacobi residual ratio n/2n", ratio, "in [3.2, 4.8]",
                                3.2 <= ratio <= 4.8))
    return checks


def stability_checks(corpus, config):
    checks = []
    for name, curve in corpus:
        p = curve.params
        sc = curve_scalars(curve)
        per_mode = per_mode_critical_length(curve, config.m_max, config.n_grid)
        oracle = oracle_critical_length(curve, config, per_mode)
        embedded = curve.is_embedded()
        if p.a > 0 and embedded:
            t1 = theorem1_bound(sc, p.a)
            checks.append(Check(f"{name}: oracle / theorem1", oracle / t1, "<= 1.01",
                                oracle <= 1.01 * t1))
            l = 1.01 * t1
            col = CylinderColumn(curve, l)
            wsum = sum(proof_witness(col, 64, config.n_s))
            checks.append(Check(f"{name}: witness sum at 1.01 x theorem1", wsum, "< 0", wsum < 0))
            fm = full_form_min(col, config.n_t, config.n_s, check_resolution=False)
            checks.append(Check(f"{name}: form minimum at 1.01 x theorem1", fm, "< 0", fm < 0))
        if p.a >= 0 and p.b > 0 and embedded:
            t2 = theorem2_bound(sc, p.a, p.b)
            checks.append(Check(f"{name}: oracle / theorem2", oracle / t2, "<= 1.01",
                                oracle <= 1.01 * t2))
        gap = oracle / per_mode - 1
        checks.append(Check(f"{name}: oracle <= per-mode", gap, "<= 0.01", gap <= 1e-2))
        if curve.is_circle():
            checks.append(Check(f"{name}: |oracle - per-mode| / per-mode", abs(gap), "<= 0.02",
                                abs(gap) <= 2e-2))
        ls = np.array([0.5, 1.0, 1.5]) * per_mode
        vals = [full_form_min(CylinderColumn(curve, l), config.n_t, config.n_s,
                              check_resolution=False) for l in ls]
        worst = float(np.max(np.diff(vals)))
        checks.append(Check(f"{name}: form minimum non-increasing in l", worst, "<= 0",
                            worst <= 1e-12))
    return checks


def crossover_checks():
    checks = []
    sc = curve_scalars(circle_curve(1.0, 0.0, 256))
    predicted = 4 - math.sqrt(15)  # a / (1 - a)^2 = 1/6 on the unit circle
    flips = []
    for a in np.linspace(0.05, 0.5, 10):
        b = 1 - a
        choice = bound_comparison(sc, a, b)
        flips.append(choice)
        ok = (choice is StrongerBound.THEOREM2) == (a < predicted)
        checks.append(Check(f"crossover a={a:.3f}", a / b ** 2, "stronger bound matches a/b^2 vs 1/6", ok))
    t1 = theorem1_bound(sc, predicted)
    t2 = theorem2_bound(sc, predicted, 1 - predicted)
    checks.append(Check("bounds equal at a/b^2 = 1/6", abs(t1 - t2), "<= 1e-06", abs(t1 - t2) <= 1e-6))
    return checks


def roundtrip_checks(corpus, tmpdir):
    checks = []
    for i, (name, curve) in enumerate(corpus):
        path = Path(tmpdir) / f"roundtrip_{i}.csv"
        write_curve_csv(path, curve)
        back = read_curve_csv(path)
        same = bool(np.array_equal(back.points, curve.points) and np.array_equal(back.theta, curve.theta)
                    and np.array_equal(back.kappa, curve.kappa))
        checks.append(Check(f"{name}: CSV round trip bit-exact", float(not same), "== 0", same))
    return checks


def run_all(config=None, corpus_dir=None, tmpdir=None, include_stability=True):
    """Run every check; returns the list of :class:`Check` results."""
    import tempfile

    config = config or SolverConfig()
    corpus = builtin_corpus(config)
    checks = []
    if corpus_dir is not None:
        for name, item in load_corpus_dir(corpus_dir, config):
            if isinstance(item, InvariantViolation):
                checks.append(Check(f"{name}: {item.name}", float("nan"), str(item.required), False))
            else:
                corpus.append((name, item))
    for name, curve in corpus:
        checks.extend(curve_checks(name, curve, config))
    checks.extend(refinement_checks(config))
    checks.extend(spectral_checks(corpus, config))
    if include_stability:
        checks.extend(stability_checks(corpus, config))
    checks.extend(crossover_checks())
    with tempfile.TemporaryDirectory(dir=tmpdir) as d:
        checks.extend(roundtrip_checks(corpus, d))
    return checks
