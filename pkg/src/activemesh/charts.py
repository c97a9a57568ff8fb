"""Per-vertex 2D charts over the 1-ring and barycentric interpolation rows.

Each vertex gets a local plane: the vertex at the origin, its ordered
1-ring at unit radius and uniform angles.  Points inside the ring polygon
are expressed as barycentric combinations of a chart triangle, which turns
off-vertex samples into weighted sums of actual vertex values.
"""

from dataclasses import dataclass

import numpy as np

_SAFETY = 0.9
_STENCIL_REACH = 2 * np.sqrt(2.0)  # farthest stencil offset is (2d, 2d)


class ChartError(ValueError):
    """Chart construction or point location failed."""


@dataclass(frozen=True)
class LocalChart:
    """Chart of one vertex: ``neighbors[j]`` sits at ``coords[j]``, center at origin.

    ``delta`` is the finite-difference step; every stencil offset
    (k1*delta, k2*delta) with |k1|, |k2| <= 2 lies strictly inside the
    neighbor polygon.  Canonical charts produced by ``build_chart`` place
    neighbor j at angle 2*pi*j/d and radius 1.
    """

    center: int
    neighbors: np.ndarray
    coords: np.ndarray
    delta: float

    @property
    def degree(self):
        return len(self.neighbors)


def build_chart(mesh, adjacency, vertex):
    """Lay out the 1-ring of ``vertex`` at uniform angles and pick its step."""
    ring = adjacency.neighbors[vertex]
    d = len(ring)
    if d < 3:
        raise ChartError(f"vertex {vertex} has degree {d} < 3")
    angles = 2.0 * np.pi * np.arange(d) / d
    coords = np.column_stack([np.cos(angles), np.sin(angles)])
    chart = LocalChart(center=vertex, neighbors=ring, coords=coords, delta=0.0)
    delta = choose_delta(chart)
    return LocalChart(center=vertex, neighbors=ring, coords=coords, delta=delta)


def build_all_charts(mesh, adjacency):
    return [build_chart(mesh, adjacency, v) for v in range(mesh.n_vertices)]


def _polygon_inradius(coords):
    """Distance from the origin to the boundary of the neighbor polygon."""
    d = len(coords)
    inradius = np.inf
    for j in range(d):
        a = coords[j]
        b = coords[(j + 1) % d]
        e = b - a
        length = np.linalg.norm(e)
        if length < 1e-30:
            return 0.0
        # perpendicular distance from origin to the segment's supporting line
        inradius = min(inradius, abs(np.cross(e, -a)) / length)
    return float(inradius)


def _point_in_polygon(coords, p, tol=0.0):
    """Strict containment in the (convex, CCW) neighbor polygon."""
    d = len(coords)
    for j in range(d):
        a = coords[j]
        b = coords[(j + 1) % d]
        if np.cross(b - a, p - a) <= tol:
            return False
    return True


def stencil_offsets(delta):
    """All (k1*delta, k2*delta) offsets with |k1|, |k2| <= 2."""
    k = np.arange(-2, 3)
    return np.array([(i * delta, j * delta) for i in k for j in k])


def choose_delta(chart):
    """Largest safe step: 0.9 * inradius / (2*sqrt(2)), verified by containment.

    The farthest stencil sample sits at radius 2*sqrt(2)*delta, so this
    keeps every sample strictly inside the 1-ring polygon.
    """
    inradius = _polygon_inradius(chart.coords)
    if inradius <= 1e-12:
        raise ChartError(f"degenerate chart polygon at vertex {chart.center}")
    delta = _SAFETY * inradius / _STENCIL_REACH
    for p in stencil_offsets(delta):
        if not _point_in_polygon(chart.coords, p):
            raise ChartError(
                f"stencil offset {p} escapes the 1-ring polygon at vertex {chart.center}"
            )
    return float(delta)


def _facet_local(chart, offset):
    """Fan triangle index j and barycentric weights of ``offset`` in facet
    (center, neighbor j, neighbor j+1).  Ties go to the lowest facet index."""
    coords = chart.coords
    d = len(coords)
    x, y = float(offset[0]), float(offset[1])

    def solve(j):
        s1, r1 = coords[j]
        s2, r2 = coords[(j + 1) % d]
        m = np.array([[0.0, s1, s2], [0.0, r1, r2], [1.0, 1.0, 1.0]])
        return np.linalg.solve(m, np.array([x, y, 1.0]))

    # fast path: the angular sector usually identifies the facet
    theta = np.arctan2(y, x) % (2.0 * np.pi)
    angles = np.arctan2(coords[:, 1], coords[:, 0]) % (2.0 * np.pi)
    guess = int(np.searchsorted(angles, theta, side="right") - 1) % d
    lam = solve(guess)
    if lam.min() >= -1e-12:
        return guess, lam
    for j in range(d):  # deterministic scan, lowest facet index wins
        lam = solve(j)
        if lam.min() >= -1e-12:
            return j, lam
    raise ChartError(
        f"offset ({x}, {y}) lies outside every chart triangle of vertex {chart.center}"
    )


def locate_point(chart, offset):
    """Facet (center, n_j, n_{j+1}) containing ``offset`` and its barycentric weights.

    Solves the 3x3 system  [offset; 1] = [[corners]; [1 1 1]] * lambda, so the
    weights sum to one exactly up to round-off.
    """
    j, lam = _facet_local(chart, offset)
    d = chart.degree
    facet = (
        int(chart.center),
        int(chart.neighbors[j]),
        int(chart.neighbors[(j + 1) % d]),
    )
    return facet, (float(lam[0]), float(lam[1]), float(lam[2]))


@dataclass(frozen=True)
class InterpolationRow:
    """Sparse weights over global vertex ids reproducing a chart-plane sample."""

    entries: dict

    def apply(self, values):
        """Weighted sum of ``values[vertex_id]`` (works on scalars or vectors)."""
        out = None
        for vid, w in self.entries.items():
            term = w * np.asarray(values[vid])
            out = term if out is None else out + term
        return out


def interpolation_row(chart, offset):
    """Barycentric weights of ``offset`` keyed by global vertex ids."""
    facet, lam = locate_point(chart, offset)
    entries = {}
    for vid, w in zip(facet, lam):
        entries[vid] = entries.get(vid, 0.0) + w
    return InterpolationRow(entries=entries)


def local_interpolation(degree, offset_over_delta, delta):
    """Interpolation weights in local slots (0 = center, 1 + j = neighbor j).

    Canonical charts are degree-determined, so rows for stencil offsets can
    be cached per degree; ``offset_over_delta`` is the offset in units of
    the chart step.
    """
    angles = 2.0 * np.pi * np.arange(degree) / degree
    coords = np.column_stack([np.cos(angles), np.sin(angles)])
    chart = LocalChart(
        center=-1, neighbors=np.arange(degree), coords=coords, delta=delta
    )
    offset = (offset_over_delta[0] * delta, offset_over_delta[1] * delta)
    j, lam = _facet_local(chart, offset)
    slots = np.array([0, 1 + j, 1 + (j + 1) % degree], dtype=np.int64)
    return slots, np.asarray(lam)
