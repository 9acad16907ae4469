"""Solver and run configuration."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path


@dataclass(frozen=True)
class SolverConfig:
    """Numerical knobs for every stage of the pipeline.

    Attributes
    ----------
    h_ode : float
        Upper bound on the fixed RK4 step. The step actually used is
        ``min(h_ode, 2*pi*r0 / 1e4)``.
    closure_tol, law_tol : float
        Curve validation tolerances (closure gap, curvature-law residual).
    shoot_tol : float
        Target on the tangent-angle residual of the shooting method.
    n_grid : int
        Grid size of the periodic 1D operator used in reports.
    n_t, n_s : int
        Axial intervals and periodic samples of the 2D oracle grid.
    m_max : int
        Highest axial mode scanned by the per-mode analysis.
    bisection_tol : float
        Relative tolerance on the oracle critical length; also the
        half-width of the "marginal" verdict band.
    l_max : float
        Column length beyond which the oracle reports an infinite critical length.
    """

    h_ode: float = 1e-3
    closure_tol: float = 1e-8
    law_tol: float = 1e-6
    shoot_tol: float = 1e-10
    n_grid: int = 512
    n_t: int = 64
    n_s: int = 256
    m_max: int = 8
    bisection_tol: float = 1e-3
    l_max: float = 1e3

    def __post_init__(self):
        for name in ("h_ode", "closure_tol", "law_tol", "shoot_tol", "bisection_tol", "l_max"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.n_grid < 32:
            raise ValueError("n_grid must be >= 32")
        if self.n_t < 32:
            raise ValueError("n_t must be >= 32")
        if self.n_s < 64:
            raise ValueError("n_s must be >= 64")
        if self.m_max < 2:
            raise ValueError("m_max must be >= 2")

    def with_(self, **changes):
        return replace(self, **changes)


# integration limits not exposed in the JSON schema
MAX_ARCLENGTH = 64.0
R_BOUND = 1e3
MAX_SHOOT_ITER = 200


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig = field(default_factory=SolverConfig)
    output_dir: Path = Path(".")

    @classmethod
    def keys(cls):
        return [f.name for f in fields(SolverConfig)] + ["output_dir"]

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls.keys())
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        solver_keys = {f.name: f.type for f in fields(SolverConfig)}
        solver = {}
        for k, v in data.items():
            if k in solver_keys:
                solver[k] = int(v) if solver_keys[k] == "int" else float(v)
        return cls(SolverConfig(**solver), Path(data.get("output_dir", ".")))

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        d = asdict(self.solver)
        d["output_dir"] = str(self.output_dir)
        return d
