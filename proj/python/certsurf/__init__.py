"""Certified interval box approximations of smooth curves and surfaces."""

from ._core import (
    CertificationError,
    Interval,
    SurfaceResult,
    approximate_surface,
    graph_approximation,
    krawczyk_test,
    parse_system,
    read_boxes,
    verify,
)

__all__ = [
    "CertificationError",
    "Interval",
    "SurfaceResult",
    "approximate_surface",
    "graph_approximation",
    "krawczyk_test",
    "parse_system",
    "read_boxes",
    "verify",
]
