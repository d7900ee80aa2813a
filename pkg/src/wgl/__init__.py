"""Long-time Strichartz numerics on waveguide manifolds R^m x T^n."""

from __future__ import annotations

__version__ = "0.1.0"

from .core import (  # noqa: E402
    PhysicalField,
    SpectralField,
    WaveguideSpec,
    build_grid,
    forward_transform,
    inverse_transform,
    l2_norm,
    project_leq_N,
    propagate,
)
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "__version__",
    "BACKEND",
    "WaveguideSpec",
    "SpectralField",
    "PhysicalField",
    "build_grid",
    "forward_transform",
    "inverse_transform",
    "project_leq_N",
    "propagate",
    "l2_norm",
]
