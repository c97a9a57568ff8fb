"""Triangle meshes: validation, ordered 1-ring adjacency, OBJ/OFF I/O, test shapes."""

import warnings
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np


class MeshValidationError(ValueError):
    """Mesh violates a structural invariant (bad index, degenerate face, ...)."""


class MeshFormatError(ValueError):
    """File could not be parsed under the requested format."""


class NonManifoldError(MeshValidationError):
    """Mesh is not a closed, consistently oriented 2-manifold."""


class TriangleMesh:
    """Immutable triangle mesh.

    Parameters
    ----------
    vertices : (N, 3) float array
        Vertex positions.  Stacked, these are the coordinate state the
        solver evolves.
    faces : (F, 3) int array
        Vertex index triples.  Winding defines the outward orientation.
    """

    def __init__(self, vertices, faces, validate=True):
        self.vertices = np.array(vertices, dtype=np.float64, order="C")
        self.faces = np.array(faces, dtype=np.int64, order="C")
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshValidationError("vertices must be an (N, 3) array")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise MeshValidationError("faces must be an (F, 3) array")
        if validate:
            self._validate()
        self.vertices.setflags(write=False)
        self.faces.setflags(write=False)

    def _validate(self):
        n = len(self.vertices)
        if n == 0:
            raise MeshValidationError("mesh has no vertices")
        if len(self.faces) == 0:
            raise MeshValidationError("mesh has no faces")
        if self.faces.min() < 0 or self.faces.max() >= n:
            bad = self.faces[(self.faces < 0) | (self.faces >= n)][0]
            raise MeshValidationError(f"face index {bad} out of range [0, {n})")
        f = self.faces
        if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
            raise MeshValidationError("degenerate face repeats a vertex index")
        refs = np.bincount(f.ravel(), minlength=n)
        if refs.min() == 0:
            raise MeshValidationError(
                f"isolated vertex {int(np.argmin(refs))} referenced by no face"
            )

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @cached_property
    def edges(self):
        """Unique undirected edges as a sorted (E, 2) index array."""
        he = self.faces[:, [0, 1, 1, 2, 2, 0]].reshape(-1, 2)
        return np.unique(np.sort(he, axis=1), axis=0)

    @cached_property
    def neighbor_lists(self):
        """Unordered 1-ring neighbor ids per vertex (no manifoldness required)."""
        nbr = [[] for _ in range(self.n_vertices)]
        for a, b in self.edges:
            nbr[a].append(b)
            nbr[b].append(a)
        return [np.array(ns, dtype=np.int64) for ns in nbr]

    def replace_vertices(self, vertices):
        """Same topology with new positions (skips topological re-validation)."""
        vertices = np.asarray(vertices, dtype=np.float64)
        if vertices.shape != self.vertices.shape:
            raise MeshValidationError("replacement vertices have a different shape")
        return TriangleMesh(vertices, self.faces, validate=False)

    def bounding_box_diagonal(self):
        return float(np.linalg.norm(self.vertices.max(0) - self.vertices.min(0)))


@dataclass(frozen=True)
class VertexAdjacency:
    """Ordered 1-ring structure of a closed oriented mesh.

    ``neighbors[i]`` lists the 1-ring of vertex i counter-clockwise with
    respect to the outward normal (the orientation induced by face winding),
    starting from the smallest neighbor id.  ``incident_faces[i]`` lists the
    faces touching vertex i.
    """

    neighbors: list
    incident_faces: list

    def degree(self, vertex):
        return len(self.neighbors[vertex])


def build_adjacency(mesh):
    """Build ordered 1-rings; reject boundaries and non-manifold connectivity.

    Raises
    ------
    NonManifoldError
        If a directed edge occurs twice (inconsistent winding or non-manifold
        fan), if an edge lacks its opposite (open boundary), or if a vertex
        fan does not close into a single cycle.
    """
    n = mesh.n_vertices
    succ = [dict() for _ in range(n)]
    incident = [[] for _ in range(n)]
    for fi, (a, b, c) in enumerate(mesh.faces):
        for v, x, y in ((a, b, c), (b, c, a), (c, a, b)):
            if x in succ[v]:
                raise NonManifoldError(
                    f"directed edge ({v}, {x}) used by two faces: "
                    "non-manifold edge or inconsistent winding"
                )
            succ[v][x] = y
            incident[v].append(fi)

    neighbors = []
    for v in range(n):
        fan = succ[v]
        d = len(fan)
        if d < 3:
            raise NonManifoldError(f"vertex {v} has degree {d} < 3")
        start = min(fan)
        ring = [start]
        cur = fan[start]
        while cur != start:
            if cur not in fan or len(ring) > d:
                raise NonManifoldError(f"open or broken fan at vertex {v}")
            ring.append(cur)
            cur = fan[cur]
        if len(ring) != d:
            raise NonManifoldError(f"fan at vertex {v} splits into several cycles")
        neighbors.append(np.array(ring, dtype=np.int64))

    return VertexAdjacency(
        neighbors=neighbors,
        incident_faces=[np.array(fs, dtype=np.int64) for fs in incident],
    )


# ---------------------------------------------------------------------------
# File I/O

def _infer_format(path, fmt):
    if fmt is not None:
        fmt = fmt.lower()
        if fmt not in ("obj", "off"):
            raise MeshFormatError(f"unsupported format {fmt!r} (use 'obj' or 'off')")
        return fmt
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix in ("obj", "off"):
        return suffix
    raise MeshFormatError(f"cannot infer format from {path!r}; pass format=")


def load_mesh(path, fmt=None):
    """Load an OBJ or OFF triangle mesh and validate it.

    Only ``v x y z`` and ``f i j k`` OBJ records are interpreted; any other
    directive is skipped with a warning.  OFF files must be ASCII with
    triangular faces.
    """
    fmt = _infer_format(path, fmt)
    with open(path, "r", encoding="utf-8") as fh:
        if fmt == "obj":
            vertices, faces = _parse_obj(fh, path)
        else:
            vertices, faces = _parse_off(fh, path)
    return TriangleMesh(vertices, faces)


def _parse_obj(fh, path):
    vertices, faces = [], []
    warned = set()
    for lineno, raw in enumerate(fh, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        tag = tokens[0]
        if tag == "v":
            if len(tokens) < 4:
                raise MeshFormatError(f"{path}:{lineno}: vertex line needs 3 coordinates")
            try:
                vertices.append([float(t) for t in tokens[1:4]])
            except ValueError as exc:
                raise MeshFormatError(f"{path}:{lineno}: bad vertex coordinate") from exc
        elif tag == "f":
            if len(tokens) != 4:
                raise MeshFormatError(
                    f"{path}:{lineno}: only triangular faces are supported"
                )
            idx = []
            for t in tokens[1:]:
                head = t.split("/", 1)[0]
                try:
                    i = int(head)
                except ValueError as exc:
                    raise MeshFormatError(f"{path}:{lineno}: bad face index {t!r}") from exc
                if i < 1:
                    raise MeshFormatError(
                        f"{path}:{lineno}: face index {i} not positive (1-based expected)"
                    )
                idx.append(i - 1)
            faces.append(idx)
        else:
            if tag not in warned:
                warned.add(tag)
                warnings.warn(f"{path}: ignoring OBJ directive {tag!r}")
    return vertices, faces


def _parse_off(fh, path):
    def content_lines():
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                yield line

    lines = content_lines()
    try:
        header = next(lines)
    except StopIteration:
        raise MeshFormatError(f"{path}: empty OFF file") from None
    if header != "OFF":
        raise MeshFormatError(f"{path}: missing OFF header (got {header!r})")
    try:
        nv, nf, _ = (int(t) for t in next(lines).split())
        vertices = [[float(t) for t in next(lines).split()[:3]] for _ in range(nv)]
        faces = []
        for _ in range(nf):
            tokens = next(lines).split()
            if int(tokens[0]) != 3:
                raise MeshFormatError(f"{path}: only triangular OFF faces are supported")
            faces.append([int(t) for t in tokens[1:4]])
    except StopIteration:
        raise MeshFormatError(f"{path}: truncated OFF file") from None
    except ValueError as exc:
        raise MeshFormatError(f"{path}: malformed OFF record") from exc
    return vertices, faces


def save_mesh(mesh, path, fmt=None):
    """Write a validated mesh so that ``load_mesh`` reproduces it."""
    if not isinstance(mesh, TriangleMesh):
        raise TypeError("save_mesh expects a TriangleMesh")
    mesh._validate()
    fmt = _infer_format(path, fmt)
    with open(path, "w", encoding="utf-8") as fh:
        if fmt == "obj":
            for x, y, z in mesh.vertices:
                fh.write(f"v {x:.17g} {y:.17g} {z:.17g}\n")
            for a, b, c in mesh.faces:
                fh.write(f"f {a + 1} {b + 1} {c + 1}\n")
        else:
            fh.write("OFF\n")
            fh.write(f"{mesh.n_vertices} {mesh.n_faces} {len(mesh.edges)}\n")
            for x, y, z in mesh.vertices:
                fh.write(f"{x:.17g} {y:.17g} {z:.17g}\n")
            for a, b, c in mesh.faces:
                fh.write(f"3 {a} {b} {c}\n")


# ---------------------------------------------------------------------------
# Synthetic shapes

_ICO_T = (1.0 + np.sqrt(5.0)) / 2.0

_ICO_VERTS = np.array(
    [
        (-1, _ICO_T, 0), (1, _ICO_T, 0), (-1, -_ICO_T, 0), (1, -_ICO_T, 0),
        (0, -1, _ICO_T), (0, 1, _ICO_T), (0, -1, -_ICO_T), (0, 1, -_ICO_T),
        (_ICO_T, 0, -1), (_ICO_T, 0, 1), (-_ICO_T, 0, -1), (-_ICO_T, 0, 1),
    ],
    dtype=np.float64,
)

_ICO_FACES = np.array(
    [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ],
    dtype=np.int64,
)


def make_icosphere(subdivisions, radius=1.0):
    """Icosahedron refined by ``subdivisions`` 4-to-1 splits, projected to a sphere."""
    if subdivisions < 0:
        raise ValueError("subdivisions must be >= 0")
    verts = _ICO_VERTS / np.linalg.norm(_ICO_VERTS[0])
    faces = _ICO_FACES.copy()
    for _ in range(subdivisions):
        verts, faces = _subdivide_once(verts, faces)
        verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    return TriangleMesh(verts * radius, faces)


def _subdivide_once(verts, faces):
    verts = list(map(tuple, verts))
    midpoint = {}

    def mid(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in midpoint:
            pa, pb = np.array(verts[a]), np.array(verts[b])
            verts.append(tuple((pa + pb) / 2.0))
            midpoint[key] = len(verts) - 1
        return midpoint[key]

    out = []
    for a, b, c in faces:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out.extend([(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)])
    return np.array(verts, dtype=np.float64), np.array(out, dtype=np.int64)


def make_latlong_sphere(segments, rings, radius=1.0):
    """Pole-capped latitude/longitude sphere with segments*rings + 2 vertices."""
    if segments < 3 or rings < 1:
        raise ValueError("need segments >= 3 and rings >= 1")
    verts = [(0.0, 0.0, radius)]
    for k in range(1, rings + 1):
        phi = np.pi * k / (rings + 1)
        for j in range(segments):
            theta = 2.0 * np.pi * j / segments
            verts.append(
                (
                    radius * np.sin(phi) * np.cos(theta),
                    radius * np.sin(phi) * np.sin(theta),
                    radius * np.cos(phi),
                )
            )
    verts.append((0.0, 0.0, -radius))
    top, bottom = 0, len(verts) - 1

    def ring_vertex(k, j):
        return 1 + k * segments + (j % segments)

    faces = []
    for j in range(segments):
        faces.append((top, ring_vertex(0, j), ring_vertex(0, j + 1)))
    for k in range(rings - 1):
        for j in range(segments):
            a, b = ring_vertex(k, j), ring_vertex(k, j + 1)
            c, d = ring_vertex(k + 1, j), ring_vertex(k + 1, j + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    for j in range(segments):
        faces.append((bottom, ring_vertex(rings - 1, j + 1), ring_vertex(rings - 1, j)))
    return TriangleMesh(np.array(verts), np.array(faces, dtype=np.int64))


def make_plane(divisions, size=1.0):
    """Regular triangulated grid in the z=0 plane (open boundary)."""
    if divisions < 1:
        raise ValueError("divisions must be >= 1")
    n = divisions + 1
    xs = np.linspace(0.0, size, n)
    verts = [(x, y, 0.0) for y in xs for x in xs]
    faces = []
    for j in range(divisions):
        for i in range(divisions):
            a = j * n + i
            b, c, d = a + 1, a + n, a + n + 1
            faces.append((a, b, d))
            faces.append((a, d, c))
    return TriangleMesh(np.array(verts), np.array(faces, dtype=np.int64))


def make_spiked_sphere(subdivisions=3, radius=1.0, spike=0.5, spike_vertex=0):
    """Icosphere with one vertex pushed outward by ``spike``*radius."""
    base = make_icosphere(subdivisions, radius)
    verts = base.vertices.copy()
    verts[spike_vertex] *= 1.0 + spike
    return TriangleMesh(verts, base.faces, validate=False)


def add_noise(mesh, amplitude, seed):
    """Displace vertices by deterministic offsets of norm <= amplitude."""
    if amplitude < 0:
        raise ValueError("amplitude must be >= 0")
    rng = np.random.default_rng(seed)
    directions = rng.normal(size=(mesh.n_vertices, 3))
    directions /= np.maximum(np.linalg.norm(directions, axis=1, keepdims=True), 1e-300)
    radii = amplitude * rng.random(mesh.n_vertices) ** (1.0 / 3.0)
    return TriangleMesh(
        mesh.vertices + directions * radii[:, None], mesh.faces, validate=False
    )
