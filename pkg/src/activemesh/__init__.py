"""Active surface model numerics on irregular triangle meshes.

Builds per-vertex finite-difference stencils through barycentric charts,
assembles the sparse regularization operator, and evolves meshes with a
semi-implicit scheme whose linear solve is a truncated power series.
Smoothing can be uniform, sigmoid-gated per vertex, or recursed to a
fixed point, and a pluggable force field drives fitting to targets.
"""

from .mesh import (
    MeshFormatError,
    MeshValidationError,
    NonManifoldError,
    TriangleMesh,
    VertexAdjacency,
    add_noise,
    build_adjacency,
    load_mesh,
    make_icosphere,
    make_latlong_sphere,
    make_plane,
    make_spiked_sphere,
    save_mesh,
)

__all__ = [
    "MeshFormatError",
    "MeshValidationError",
    "NonManifoldError",
    "TriangleMesh",
    "VertexAdjacency",
    "add_noise",
    "build_adjacency",
    "load_mesh",
    "make_icosphere",
    "make_latlong_sphere",
    "make_plane",
    "make_spiked_sphere",
    "save_mesh",
]
