"""Finite ordered simplicial (Delta-) complexes and the maps between them.

A complex is a table of face incidences: for each dimension ``n >= 1`` and
each n-simplex ``s``, ``face(n, s, i)`` is the id of the (n-1)-simplex
obtained by deleting the i-th vertex.  Vertices are ``0 .. n_vertices - 1``.
Everything is immutable after construction and all algorithms iterate in id
order, so results are deterministic.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

from .errors import BadBaseError, ValidationError

FORWARD = 1
BACKWARD = -1


class DeltaComplex:
    """A finite semi-simplicial complex given by its face tables."""

    def __init__(self, n_vertices, faces=None):
        self.n_vertices = int(n_vertices)
        if self.n_vertices < 0:
            raise ValidationError("negative vertex count")
        faces = faces or {}
        table = {}
        for n in sorted(int(k) for k in faces):
            rows = tuple(tuple(int(i) for i in row) for row in faces[n])
            if n < 1:
                raise ValidationError("face tables start at dimension 1")
            for s, row in enumerate(rows):
                if len(row) != n + 1:
                    raise ValidationError(
                        f"{n}-simplex {s} has {len(row)} faces, expected {n + 1}"
                    )
            table[n] = rows
        for n in table:
            if n > 1 and n - 1 not in table:
                raise ValidationError(f"dimension {n} present but {n - 1} missing")
        self.faces = table
        self.dim = max(table) if table else 0
        self._vertex_tuples = {}

    def count(self, n):
        if n == 0:
            return self.n_vertices
        return len(self.faces.get(n, ()))

    def simplices(self, n):
        return range(self.count(n))

    def face(self, n, s, i):
        return self.faces[n][s][i]

    def edge_endpoints(self, e):
        """(initial, terminal) vertices of an edge; faces are [term, init]."""
        row = self.faces[1][e]
        return row[1], row[0]

    def vertex_tuple(self, n, s):
        """Ordered vertices (v0, ..., vn) of an n-simplex."""
        if n == 0:
            return (s,)
        key = (n, s)
        cached = self._vertex_tuples.get(key)
        if cached is not None:
            return cached
        last = s
        for d in range(n, 0, -1):
            last = self.faces[d][last][0]
        out = self.vertex_tuple(n - 1, self.faces[n][s][n]) + (last,)
        self._vertex_tuples[key] = out
        return out

    def vertex_of(self, n, s, j):
        return self.vertex_tuple(n, s)[j]

    def subsimplex(self, n, s, positions):
        """Id of the face of ``s`` spanned by the given vertex positions."""
        positions = sorted(positions)
        keep = set(positions)
        cur, d = s, n
        for i in range(n, -1, -1):
            if i not in keep:
                cur = self.faces[d][cur][i] if d >= 1 else cur
                d -= 1
        return cur

    def edge_between(self, n, s, a, b):
        """The 1-face of an n-simplex joining vertex positions a < b."""
        return self.subsimplex(n, s, (a, b))

    def __eq__(self, other):
        return (
            isinstance(other, DeltaComplex)
            and self.n_vertices == other.n_vertices
            and self.faces == other.faces
        )

    def __repr__(self):
        counts = [self.count(n) for n in range(self.dim + 1)]
        return f"DeltaComplex(counts={counts})"


def validate(complex):
    """All simplicial-identity and face-range violations, as strings."""
    out = []
    bad = set()
    for n in sorted(complex.faces):
        below = complex.count(n - 1)
        for s, row in enumerate(complex.faces[n]):
            for i, f in enumerate(row):
                if not 0 <= f < below:
                    out.append(f"face {i} of {n}-simplex {s} points at missing id {f}")
                    bad.add((n, s))
    for n in sorted(complex.faces):
        if n < 2:
            continue
        for s in complex.simplices(n):
            if (n, s) in bad:
                continue
            if any((n - 1, complex.face(n, s, i)) in bad for i in range(n + 1)):
                continue
            for j in range(n + 1):
                for i in range(j):
                    lhs = complex.face(n - 1, complex.face(n, s, j), i)
                    rhs = complex.face(n - 1, complex.face(n, s, i), j - 1)
                    if lhs != rhs:
                        out.append(f"{n}-simplex {s}: d_{i} d_{j} != d_{j - 1} d_{i}")
    return out


def components(complex):
    """Partition of the vertex set into path components (tuples, by min id)."""
    parent = list(range(complex.n_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in complex.simplices(1):
        u, v = complex.edge_endpoints(e)
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    blocks = {}
    for v in range(complex.n_vertices):
        blocks.setdefault(find(v), []).append(v)
    return tuple(tuple(blocks[r]) for r in sorted(blocks))


def component_index(complex):
    """Vertex id -> index of its component in components(complex)."""
    idx = [0] * complex.n_vertices
    for c, block in enumerate(components(complex)):
        for v in block:
            idx[v] = c
    return idx


@dataclass(frozen=True)
class EdgePath:
    """A walk along edges; each step is (edge id, FORWARD/BACKWARD)."""

    complex: DeltaComplex
    start: int
    steps: tuple = ()

    def __post_init__(self):
        at = self.start
        for e, d in self.steps:
            u, v = self.complex.edge_endpoints(e)
            src, dst = (u, v) if d == FORWARD else (v, u)
            if src != at:
                raise ValidationError("path steps are not endpoint-compatible")
            at = dst

    @property
    def end(self):
        at = self.start
        for e, d in self.steps:
            u, v = self.complex.edge_endpoints(e)
            at = v if d == FORWARD else u
        return at

    def reversed(self):
        rev = tuple((e, -d) for e, d in reversed(self.steps))
        return EdgePath(self.complex, self.end, rev)

    def then(self, other):
        if other.start != self.end:
            raise ValidationError("paths do not compose")
        return EdgePath(self.complex, self.start, self.steps + other.steps)


@dataclass(frozen=True)
class Polarization:
    """A rooted spanning forest: one base per component, parent edges up."""

    complex: DeltaComplex
    bases: tuple
    parent: tuple  # vertex -> (edge, direction from the vertex) or None

    def parent_of(self, v):
        return self.parent[v]


def polarize(complex, bases=None):
    """Deterministic BFS spanning forest (edges scanned in id order)."""
    comps = components(complex)
    cidx = component_index(complex)
    if bases is None:
        bases = tuple(block[0] for block in comps)
    else:
        bases = tuple(int(b) for b in bases)
        seen = {}
        for b in bases:
            if not 0 <= b < complex.n_vertices:
                raise BadBaseError(f"base {b} is not a vertex")
            if cidx[b] in seen:
                raise BadBaseError(f"bases {seen[cidx[b]]} and {b} share a component")
            seen[cidx[b]] = b
        if len(seen) != len(comps):
            raise BadBaseError("some component has no base")
        bases = tuple(seen[c] for c in range(len(comps)))

    adj = [[] for _ in range(complex.n_vertices)]
    for e in complex.simplices(1):
        u, v = complex.edge_endpoints(e)
        adj[u].append((e, v, BACKWARD))  # reach v; v's way back is backward
        adj[v].append((e, u, FORWARD))

    parent = [None] * complex.n_vertices
    visited = [False] * complex.n_vertices
    queue = deque()
    for b in bases:
        visited[b] = True
        queue.append(b)
    while queue:
        u = queue.popleft()
        for e, w, back_dir in adj[u]:
            if not visited[w]:
                visited[w] = True
                parent[w] = (e, back_dir)
                queue.append(w)
    return Polarization(complex, bases, tuple(parent))


def forest_path(polarization, v):
    """The forest walk from ``v`` to its component's base vertex."""
    complex = polarization.complex
    steps = []
    at = v
    while polarization.parent[at] is not None:
        e, d = polarization.parent[at]
        steps.append((e, d))
        u0, u1 = complex.edge_endpoints(e)
        at = u1 if d == FORWARD else u0
    return EdgePath(complex, v, tuple(steps))


class SimplicialMap:
    """A map of complexes: a vertex map plus per-dimension simplex tables.

    ``simplex_map[n][s]`` is ``(target id, permutation sign)`` or ``None``
    (degenerate: the image vertex list has a repeat).  The sign is the parity
    of the reordering from the image vertex order to the target's stored
    order; it is +1 whenever the map is order-preserving on the simplex.
    """

    def __init__(self, source, target, vertex_map, simplex_map):
        self.source = source
        self.target = target
        self.vertex_map = tuple(int(v) for v in vertex_map)
        if len(self.vertex_map) != source.n_vertices:
            raise ValidationError("vertex map has the wrong length")
        for v in self.vertex_map:
            if not 0 <= v < target.n_vertices:
                raise ValidationError("vertex map leaves the target")
        sm = {}
        for n in sorted(int(k) for k in simplex_map):
            rows = []
            for entry in simplex_map[n]:
                if entry is None:
                    rows.append(None)
                else:
                    t, sgn = entry
                    rows.append((int(t), int(sgn)))
            sm[n] = tuple(rows)
        self.simplex_map = sm
        for n in range(1, source.dim + 1):
            if len(self.simplex_map.get(n, ())) != source.count(n):
                raise ValidationError(f"simplex table for dimension {n} is incomplete")

    def image_vertex(self, v):
        return self.vertex_map[v]

    def image(self, n, s):
        if n == 0:
            return (self.vertex_map[s], 1)
        return self.simplex_map[n][s]

    def image_vertex_tuple(self, n, s):
        return tuple(self.vertex_map[v] for v in self.source.vertex_tuple(n, s))

    def validate(self):
        """Violations of the degeneracy and face-compatibility invariants."""
        out = []
        for n in range(1, self.source.dim + 1):
            for s in self.source.simplices(n):
                img = self.image_vertex_tuple(n, s)
                entry = self.simplex_map[n][s]
                if len(set(img)) < len(img):
                    if entry is not None:
                        out.append(f"{n}-simplex {s}: repeated image marked non-degenerate")
                    continue
                if entry is None:
                    out.append(f"{n}-simplex {s}: injective image marked degenerate")
                    continue
                t, sgn = entry
                if not 0 <= t < self.target.count(n):
                    out.append(f"{n}-simplex {s}: target id {t} out of range")
                    continue
                stored = self.target.vertex_tuple(n, t)
                if sorted(stored) != sorted(img):
                    out.append(f"{n}-simplex {s}: image vertices do not match target")
                    continue
                if img == stored:
                    perm = tuple(range(n + 1))
                elif len(set(stored)) == len(stored):
                    perm = tuple(stored.index(v) for v in img)
                else:
                    out.append(
                        f"{n}-simplex {s}: reordered map onto a repeated-vertex simplex"
                    )
                    continue
                if permutation_sign(perm) != sgn:
                    out.append(f"{n}-simplex {s}: wrong permutation sign")
                    continue
                for i in range(n + 1):
                    want_t = self.target.face(n, t, perm[i])
                    want_sgn = permutation_sign(_delete_position(perm, i))
                    got = self.image(n - 1, self.source.face(n, s, i))
                    if got != (want_t, want_sgn):
                        out.append(f"{n}-simplex {s}: face {i} incompatible")
        return out

    def initial_position(self, n, s):
        """Position of the image of v0(s) in the target simplex's order."""
        entry = self.simplex_map[n][s]
        if entry is None:
            return None
        t, _ = entry
        img = self.image_vertex_tuple(n, s)
        stored = self.target.vertex_tuple(n, t)
        if img == stored:
            return 0
        return stored.index(img[0])

    def __eq__(self, other):
        return (
            isinstance(other, SimplicialMap)
            and self.source == other.source
            and self.target == other.target
            and self.vertex_map == other.vertex_map
            and self.simplex_map == other.simplex_map
        )

    @classmethod
    def from_vertex_map(cls, source, target, vertex_map):
        """Build the simplex tables when target simplices are determined by
        their vertex sets (a genuine simplicial complex)."""
        lookup = {}
        for n in range(1, target.dim + 1):
            table = {}
            for t in target.simplices(n):
                vt = target.vertex_tuple(n, t)
                key = frozenset(vt)
                if len(key) != n + 1 or key in table:
                    raise ValidationError("target is not vertex-determined")
                table[key] = (t, vt)
            lookup[n] = table
        sm = {}
        for n in range(1, source.dim + 1):
            rows = []
            for s in source.simplices(n):
                img = tuple(vertex_map[v] for v in source.vertex_tuple(n, s))
                if len(set(img)) < len(img):
                    rows.append(None)
                    continue
                key = frozenset(img)
                if key not in lookup.get(n, {}):
                    raise ValidationError(
                        f"image of {n}-simplex {s} spans no target simplex"
                    )
                t, stored = lookup[n][key]
                perm = tuple(stored.index(v) for v in img)
                rows.append((t, permutation_sign(perm)))
            sm[n] = rows
        return cls(source, target, vertex_map, sm)


def permutation_sign(perm):
    sgn = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sgn = -sgn
    return sgn


def _delete_position(perm, i):
    """Induced permutation after deleting source position i / target perm[i]."""
    kept = [perm[j] for j in range(len(perm)) if j != i]
    return tuple(p - 1 if p > perm[i] else p for p in kept)


def identity_map(complex):
    sm = {
        n: [(s, 1) for s in complex.simplices(n)]
        for n in range(1, complex.dim + 1)
    }
    return SimplicialMap(complex, complex, tuple(range(complex.n_vertices)), sm)


def constant_map(source, target, vertex):
    """Collapse everything to one vertex of the target."""
    sm = {n: [None] * source.count(n) for n in range(1, source.dim + 1)}
    return SimplicialMap(source, target, (vertex,) * source.n_vertices, sm)


def compose(g, f):
    """g after f."""
    if f.target != g.source:
        raise ValidationError("maps do not compose")
    vm = tuple(g.vertex_map[v] for v in f.vertex_map)
    sm = {}
    for n in range(1, f.source.dim + 1):
        rows = []
        for s in f.source.simplices(n):
            a = f.image(n, s)
            if a is None:
                rows.append(None)
                continue
            t, s1 = a
            b = g.image(n, t)
            if b is None:
                rows.append(None)
                continue
            u, s2 = b
            rows.append((u, s1 * s2))
        sm[n] = rows
    return SimplicialMap(f.source, g.target, vm, sm)


@dataclass
class Subcomplex:
    """Member flags over a parent complex, closed under faces."""

    parent: DeltaComplex
    members: dict  # n -> frozenset of simplex ids

    def __post_init__(self):
        clean = {}
        for n, ids in self.members.items():
            ids = frozenset(int(s) for s in ids)
            for s in ids:
                if not 0 <= s < self.parent.count(int(n)):
                    raise ValidationError(f"subcomplex references missing {n}-simplex {s}")
            clean[int(n)] = ids
        for n in range(self.parent.dim, 0, -1):
            for s in clean.get(n, ()):
                for i in range(n + 1):
                    f = self.parent.face(n, s, i)
                    if f not in clean.get(n - 1, frozenset()):
                        raise ValidationError(
                            f"subcomplex not closed under faces at {n}-simplex {s}"
                        )
        self.members = clean
        self._extracted = None

    @property
    def dim(self):
        dims = [n for n, ids in self.members.items() if ids]
        return max(dims) if dims else 0

    def contains(self, n, s):
        return s in self.members.get(n, frozenset())

    def extract(self):
        """(complex, to_parent) where to_parent[n] lists parent ids in order."""
        if self._extracted is not None:
            return self._extracted
        to_parent = {
            n: tuple(sorted(self.members.get(n, frozenset())))
            for n in range(self.dim + 1)
        }
        from_parent = {
            n: {p: i for i, p in enumerate(to_parent[n])} for n in to_parent
        }
        faces = {}
        for n in range(1, self.dim + 1):
            rows = []
            for p in to_parent[n]:
                rows.append(
                    [from_parent[n - 1][self.parent.face(n, p, i)] for i in range(n + 1)]
                )
            faces[n] = rows
        sub = DeltaComplex(len(to_parent[0]), faces)
        self._extracted = (sub, to_parent)
        return self._extracted

    def inclusion(self):
        sub, to_parent = self.extract()
        sm = {
            n: [(p, 1) for p in to_parent[n]]
            for n in range(1, sub.dim + 1)
        }
        return SimplicialMap(sub, self.parent, to_parent[0], sm)


def full_subcomplex(complex):
    members = {n: frozenset(complex.simplices(n)) for n in range(complex.dim + 1)}
    return Subcomplex(complex, members)


def subcomplex_from_top(complex, top):
    """Close a set of (dimension, id) pairs under faces."""
    members = {n: set() for n in range(complex.dim + 1)}
    stack = [(int(n), int(s)) for n, s in top]
    while stack:
        n, s = stack.pop()
        if s in members[n]:
            continue
        members[n].add(s)
        if n >= 1:
            for i in range(n + 1):
                stack.append((n - 1, complex.face(n, s, i)))
    return Subcomplex(complex, {n: frozenset(v) for n, v in members.items()})


# ---------------------------------------------------------------------------
# shuffle (staircase) products
# ---------------------------------------------------------------------------

STEP_ORDER = "DRU"  # fixed alphabet order for path enumeration


def _paths(p, q, d):
    """All monotone staircases on a p x q grid with d diagonal steps."""
    letters = "D" * d + "R" * (p - d) + "U" * (q - d)
    seen = sorted(set(itertools.permutations(letters)))
    return ["".join(w) for w in seen]


def _points(path):
    pts = [(0, 0)]
    for c in path:
        x, y = pts[-1]
        pts.append((x + (c in "RD"), y + (c in "UD")))
    return pts


@dataclass
class ProductComplex:
    """Shuffle triangulation of a product, with projection bookkeeping."""

    complex: DeltaComplex
    left: DeltaComplex
    right: DeltaComplex
    vertex_pairs: tuple  # product vertex -> (left vertex, right vertex)
    edge_steps: tuple    # product edge -> (left step, right step);
                         # a step is ("edge", id) or ("const", vertex)
    info: dict           # n -> tuple of (p, q, s_left, s_right, path)
    index: dict = field(repr=False, default=None)

    def simplex_id(self, p, q, s_left, s_right, path):
        return self.index[(p, q, s_left, s_right, path)]


def product(x0, x1):
    """The shuffle/staircase triangulation of ``|x0| x |x1|``."""
    dim = x0.dim + x1.dim
    info = {}
    index = {}
    for n in range(dim + 1):
        entries = []
        for p in range(0, min(n, x0.dim) + 1):
            for q in range(0, x1.dim + 1):
                d = p + q - n
                if d < 0 or d > min(p, q):
                    continue
                paths = _paths(p, q, d)
                for s0 in x0.simplices(p):
                    for s1 in x1.simplices(q):
                        for path in paths:
                            index[(p, q, s0, s1, path)] = len(entries)
                            entries.append((p, q, s0, s1, path))
        info[n] = tuple(entries)

    def face_key(p, q, s0, s1, path, i):
        pts = _points(path)
        del pts[i]
        xs = {x for x, _ in pts}
        ys = {y for _, y in pts}
        np_, nq, ns0, ns1 = p, q, s0, s1
        if len(xs) < p + 1:
            (mx,) = set(range(p + 1)) - xs
            ns0 = x0.face(p, s0, mx)
            np_ -= 1
            pts = [(x - 1 if x > mx else x, y) for x, y in pts]
        if len(ys) < q + 1:
            (my,) = set(range(q + 1)) - ys
            ns1 = x1.face(q, s1, my)
            nq -= 1
            pts = [(x, y - 1 if y > my else y) for x, y in pts]
        letters = []
        for (xa, ya), (xb, yb) in zip(pts, pts[1:]):
            dx, dy = xb - xa, yb - ya
            letters.append({(1, 0): "R", (0, 1): "U", (1, 1): "D"}[(dx, dy)])
        return (np_, nq, ns0, ns1, "".join(letters))

    faces = {}
    for n in range(1, dim + 1):
        rows = []
        for (p, q, s0, s1, path) in info[n]:
            rows.append([index[face_key(p, q, s0, s1, path, i)] for i in range(n + 1)])
        faces[n] = rows
    prod = DeltaComplex(len(info[0]), faces)

    vertex_pairs = tuple((s0, s1) for (_, _, s0, s1, _) in info[0])
    edge_steps = []
    for (p, q, s0, s1, path) in info.get(1, ()):
        if path == "R":
            edge_steps.append((("edge", s0), ("const", x1.vertex_tuple(0, s1)[0])))
        elif path == "U":
            edge_steps.append((("const", x0.vertex_tuple(0, s0)[0]), ("edge", s1)))
        else:
            edge_steps.append((("edge", s0), ("edge", s1)))
    return ProductComplex(prod, x0, x1, vertex_pairs, tuple(edge_steps), info, index)


def interval():
    """The standard 1-simplex: vertices 0, 1 and the edge [0, 1]."""
    return DeltaComplex(2, {1: [[1, 0]]})


@dataclass
class Cylinder:
    """X x [0,1] with its two end inclusions and the projection back to X."""

    product: ProductComplex
    space: DeltaComplex
    end0: SimplicialMap
    end1: SimplicialMap
    projection: SimplicialMap

    @property
    def base(self):
        return self.product.left

    def vertical_edge(self, v):
        return self.product.simplex_id(0, 1, v, 0, "U")

    def vertex_id(self, v, t):
        return self.product.index[(0, 0, v, t, "")]


def cylinder(x):
    """Shuffle cylinder over ``x`` plus (end0, end1, projection)."""
    prod = product(x, interval())
    cyl = prod.complex

    def end(t):
        vm = [prod.index[(0, 0, v, t, "")] for v in range(x.n_vertices)]
        sm = {}
        for n in range(1, x.dim + 1):
            sm[n] = [
                (prod.index[(n, 0, s, t, "R" * n)], 1) for s in x.simplices(n)
            ]
        return SimplicialMap(x, cyl, vm, sm)

    vm = [pair[0] for pair in prod.vertex_pairs]
    sm = {}
    for n in range(1, cyl.dim + 1):
        rows = []
        for (p, q, s0, s1, path) in prod.info[n]:
            if "U" in path:
                rows.append(None)
            else:
                rows.append((s0, 1))
        sm[n] = rows
    proj = SimplicialMap(cyl, x, vm, sm)
    return Cylinder(prod, cyl, end(0), end(1), proj)
