from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from typing import Any

from clideps.env_vars.env_enum import EnvEnum
from typing_extensions import override


class Env(EnvEnum):
    """
    Environment variable settings for morseig. CLI flags override these.
    """

    MORSEIG_TOL_DEF = "MORSEIG_TOL_DEF"
    """Margin a definite matrix must clear to count as definite."""

    MORSEIG_TOL_HESS = "MORSEIG_TOL_HESS"
    """Relative threshold below which Hessian eigenvalues count as zero."""

    MORSEIG_TOL_CLUSTER = "MORSEIG_TOL_CLUSTER"
    """Relative gap below which neighboring eigenvalues are grouped."""

    MORSEIG_TOL_RES = "MORSEIG_TOL_RES"
    """Relative residual at which stratum projection stops."""

    MORSEIG_SEED = "MORSEIG_SEED"
    """Seed for all randomized searches."""

    MORSEIG_WORKERS = "MORSEIG_WORKERS"
    """Thread pool size for grid evaluation and candidate refinement."""


def _default_workers() -> int:
    return min(8, os.cpu_count() or 1)


@dataclass(frozen=True)
class AnalysisOptions:
    """
    Every tolerance and knob of the analysis. Relative tolerances are scaled by the norm of
    the relevant quantity where they are used.
    """

    tol_def: float = 1e-7
    tol_hess: float = 1e-6
    tol_cluster: float = 1e-6
    tol_res: float = 1e-10
    rank_tol: float = 1e-8
    seed: int = 0
    workers: int = 1
    max_projection_iters: int = 50
    definite_iters: int = 300
    starts_per_dim: int = 8

    def with_overrides(self, **overrides: Any) -> AnalysisOptions:
        """Replace fields whose override value is not None."""
        valid = {f.name for f in fields(self)}
        unknown = set(overrides) - valid
        if unknown:
            raise ValueError(f"Unknown analysis options: {sorted(unknown)}")
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    @override
    def __str__(self) -> str:
        return (
            f"tol_def={self.tol_def:g}, tol_hess={self.tol_hess:g}, "
            f"tol_cluster={self.tol_cluster:g}, "
            f"tol_res={self.tol_res:g}, seed={self.seed}, workers={self.workers}"
        )


DEFAULT_OPTIONS = AnalysisOptions()


def get_options(**overrides: Any) -> AnalysisOptions:
    """
    Options from the environment variables, then any non-None keyword overrides.
    """
    d = DEFAULT_OPTIONS
    opts = AnalysisOptions(
        tol_def=float(Env.MORSEIG_TOL_DEF.read_str(default=str(d.tol_def))),
        tol_hess=float(Env.MORSEIG_TOL_HESS.read_str(default=str(d.tol_hess))),
        tol_cluster=float(Env.MORSEIG_TOL_CLUSTER.read_str(default=str(d.tol_cluster))),
        tol_res=float(Env.MORSEIG_TOL_RES.read_str(default=str(d.tol_res))),
        seed=int(Env.MORSEIG_SEED.read_str(default=str(d.seed))),
        workers=int(Env.MORSEIG_WORKERS.read_str(default=str(_default_workers()))),
    )
    for name in ("tol_def", "tol_hess", "tol_cluster", "tol_res"):
        if getattr(opts, name) <= 0:
            raise ValueError(f"Tolerance {name} must be positive: {getattr(opts, name)}")
    return opts.with_overrides(**overrides)
