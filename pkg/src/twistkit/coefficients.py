"""Sign-valued local coefficient systems on a complex, their twists,
morphisms, and the extension constructions.

A system assigns a sign to every edge subject to the triangle condition
(the product over two sides of a 2-simplex equals the third); this is
exactly a groupoid homomorphism from the edge-path groupoid to {+1, -1}.
Its twist is the induced class in H^1 with mod-2 coefficients, represented
canonically by gauge-fixing to zero on a spanning forest.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import complexes as cx
from .errors import (
    BadBaseValueError,
    NotAMorphismError,
    NotConstantOnComponentError,
    NotExtendableError,
    TwistMismatchError,
    ValidationError,
)
from .linalg import gf2_nullspace


@dataclass(frozen=True)
class CoefficientSystem:
    complex: cx.DeltaComplex
    edge_signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "edge_signs", tuple(int(s) for s in self.edge_signs))
        if len(self.edge_signs) != self.complex.count(1):
            raise ValidationError("one sign per edge required")
        if any(s not in (1, -1) for s in self.edge_signs):
            raise ValidationError("edge signs must be +1 or -1")
        for t in self.complex.simplices(2):
            a = self.edge_signs[self.complex.face(2, t, 2)]
            b = self.edge_signs[self.complex.face(2, t, 0)]
            c = self.edge_signs[self.complex.face(2, t, 1)]
            if a * b != c:
                raise ValidationError(f"triangle condition fails on 2-simplex {t}")

    @classmethod
    def trivial(cls, complex):
        return cls(complex, (1,) * complex.count(1))

    def sign(self, edge):
        return self.edge_signs[edge]


def evaluate(system, path):
    """Value of the system on an edge path (direction-independent)."""
    out = 1
    for e, _ in path.steps:
        out *= system.edge_signs[e]
    return out


@dataclass(frozen=True)
class Morphism:
    """A natural transformation between two systems on one complex."""

    source: CoefficientSystem
    target: CoefficientSystem
    vertex_signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertex_signs", tuple(int(s) for s in self.vertex_signs))
        complex = self.source.complex
        if self.target.complex != complex:
            raise NotAMorphismError("source and target live on different complexes")
        if len(self.vertex_signs) != complex.n_vertices:
            raise NotAMorphismError("one sign per vertex required")
        if any(s not in (1, -1) for s in self.vertex_signs):
            raise NotAMorphismError("vertex signs must be +1 or -1")
        for e in complex.simplices(1):
            u, v = complex.edge_endpoints(e)
            if (
                self.source.edge_signs[e] * self.target.edge_signs[e]
                != self.vertex_signs[u] * self.vertex_signs[v]
            ):
                raise NotAMorphismError(f"morphism identity fails on edge {e}")

    def sign(self, vertex):
        return self.vertex_signs[vertex]

    @classmethod
    def identity(cls, system):
        return cls(system, system, (1,) * system.complex.n_vertices)


@dataclass(frozen=True)
class ZeroClass:
    """A sign per path component, i.e. an element of H^0 with mod-2 signs."""

    complex: cx.DeltaComplex
    vertex_signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertex_signs", tuple(int(s) for s in self.vertex_signs))
        if len(self.vertex_signs) != self.complex.n_vertices:
            raise ValidationError("one sign per vertex required")
        for block in cx.components(self.complex):
            vals = {self.vertex_signs[v] for v in block}
            if len(vals) > 1:
                raise NotConstantOnComponentError(
                    f"signs differ inside component containing vertex {block[0]}"
                )

    @classmethod
    def from_components(cls, complex, comp_signs):
        idx = cx.component_index(complex)
        return cls(complex, tuple(comp_signs[idx[v]] for v in range(complex.n_vertices)))

    @classmethod
    def all_plus(cls, complex):
        return cls(complex, (1,) * complex.n_vertices)

    def sign(self, vertex):
        return self.vertex_signs[vertex]


def torsor_act(zero_class, morphism):
    """Pointwise product of a component sign field with a morphism."""
    signs = tuple(
        zero_class.vertex_signs[v] * morphism.vertex_signs[v]
        for v in range(len(morphism.vertex_signs))
    )
    return Morphism(morphism.source, morphism.target, signs)


def involve(morphism):
    """The involution: flip the morphism's sign everywhere."""
    return torsor_act(
        ZeroClass(morphism.source.complex, (-1,) * morphism.source.complex.n_vertices),
        morphism,
    )


@dataclass(frozen=True)
class TwistClass:
    """Forest-gauged representative of a mod-2 one-cocycle class.

    ``bits`` holds the edges carrying a 1; it never touches forest edges,
    which makes class equality a plain set comparison for a fixed forest.
    """

    polarization: cx.Polarization
    bits: frozenset

    def __post_init__(self):
        object.__setattr__(self, "bits", frozenset(int(e) for e in self.bits))
        complex = self.complex
        forest = {e for (e, _) in (p for p in self.polarization.parent if p)}
        for e in self.bits:
            if not 0 <= e < complex.count(1):
                raise ValidationError(f"bit on missing edge {e}")
            if e in forest:
                raise ValidationError(f"bit on forest edge {e} breaks the gauge")
        for t in complex.simplices(2):
            total = sum(
                1 for i in (0, 1, 2) if complex.face(2, t, i) in self.bits
            )
            if total % 2:
                raise ValidationError(f"cocycle condition fails on 2-simplex {t}")

    @property
    def complex(self):
        return self.polarization.complex

    def bit(self, edge):
        return 1 if edge in self.bits else 0

    def is_zero(self):
        return not self.bits


def twist(system, polarization=None):
    """The forest-gauged twist class of a system."""
    complex = system.complex
    if polarization is None:
        polarization = cx.polarize(complex)
    gauge = [0] * complex.n_vertices
    for v in range(complex.n_vertices):
        gauge[v] = 0 if evaluate(system, cx.forest_path(polarization, v)) == 1 else 1
    bits = set()
    for e in complex.simplices(1):
        u, v = complex.edge_endpoints(e)
        z = 0 if system.edge_signs[e] == 1 else 1
        if (z + gauge[u] + gauge[v]) % 2:
            bits.add(e)
    return TwistClass(polarization, frozenset(bits))


def from_twist(complex, polarization, twist_class, f):
    """The unique system with the given twist whose forest transport is f.

    ``f`` is a sign per vertex with f == +1 at every base vertex.
    """
    if twist_class.polarization != polarization:
        raise ValidationError("twist class is gauged over a different polarization")
    f = tuple(int(x) for x in f)
    if len(f) != complex.n_vertices:
        raise ValidationError("one sign per vertex required")
    for b in polarization.bases:
        if f[b] != 1:
            raise BadBaseValueError(f"f must be +1 at base vertex {b}")
    signs = []
    for e in complex.simplices(1):
        u, v = complex.edge_endpoints(e)
        signs.append(f[u] * (-1 if e in twist_class.bits else 1) * f[v])
    return CoefficientSystem(complex, tuple(signs))


def same_class(t0, t1):
    """Whether two twist classes (possibly differently gauged) agree."""
    if t0.complex != t1.complex:
        return False
    if t0.polarization == t1.polarization:
        return t0.bits == t1.bits
    pol = cx.polarize(t0.complex)
    s0 = from_twist(t0.complex, t0.polarization, t0, (1,) * t0.complex.n_vertices)
    s1 = from_twist(t1.complex, t1.polarization, t1, (1,) * t1.complex.n_vertices)
    return twist(s0, pol) == twist(s1, pol)


def all_twist_classes(complex, polarization=None):
    """Every twist class, enumerated deterministically (the zero class first)."""
    if polarization is None:
        polarization = cx.polarize(complex)
    forest = {e for (e, _) in (p for p in polarization.parent if p)}
    free = [e for e in complex.simplices(1) if e not in forest]
    pos = {e: i for i, e in enumerate(free)}
    rows = []
    for t in complex.simplices(2):
        mask = 0
        for i in (0, 1, 2):
            e = complex.face(2, t, i)
            if e in pos:
                mask ^= 1 << pos[e]
        if mask:
            rows.append(mask)
    basis = gf2_nullspace(rows, len(free))
    out = []
    for combo in range(1 << len(basis)):
        mask = 0
        for i, b in enumerate(basis):
            if (combo >> i) & 1:
                mask ^= b
        bits = frozenset(free[i] for i in range(len(free)) if (mask >> i) & 1)
        out.append(TwistClass(polarization, bits))
    return out


def is_equivalent(lam0, lam1):
    """A morphism lam0 -> lam1 if the twists agree, else None."""
    if lam0.complex != lam1.complex:
        raise ValidationError("systems live on different complexes")
    pol = cx.polarize(lam0.complex)
    if twist(lam0, pol) != twist(lam1, pol):
        return None
    signs = []
    for v in range(lam0.complex.n_vertices):
        path = cx.forest_path(pol, v)
        signs.append(evaluate(lam0, path) * evaluate(lam1, path))
    return Morphism(lam0, lam1, tuple(signs))


def pullback(f, lam_target):
    """Pull a system on the target of a map back to its source."""
    if lam_target.complex != f.target:
        raise ValidationError("system does not live on the map's target")
    signs = []
    for e in f.source.simplices(1):
        img = f.image(1, e)
        signs.append(1 if img is None else lam_target.edge_signs[img[0]])
    return CoefficientSystem(f.source, tuple(signs))


def bullet(lam0, lam1, prod):
    """The product pairing of systems on a shuffle product complex."""
    if lam0.complex != prod.left or lam1.complex != prod.right:
        raise ValidationError("systems do not match the product's factors")

    def step_sign(lam, step):
        kind, idx = step
        return lam.edge_signs[idx] if kind == "edge" else 1

    signs = tuple(
        step_sign(lam0, s0) * step_sign(lam1, s1) for s0, s1 in prod.edge_steps
    )
    return CoefficientSystem(prod.complex, signs)


def pointwise_product(lam0, lam1):
    """Edgewise product of two systems on the same complex (diagonal pairing)."""
    if lam0.complex != lam1.complex:
        raise ValidationError("systems live on different complexes")
    signs = tuple(a * b for a, b in zip(lam0.edge_signs, lam1.edge_signs))
    return CoefficientSystem(lam0.complex, signs)


def restrict_system(lam, sub):
    """Restriction of a system on the parent to a subcomplex."""
    if lam.complex != sub.parent:
        raise ValidationError("system does not live on the subcomplex's parent")
    subc, to_parent = sub.extract()
    return CoefficientSystem(subc, tuple(lam.edge_signs[p] for p in to_parent[1]))


def extended_polarization(sub, sub_polarization):
    """A spanning forest of the parent containing the subcomplex's forest.

    Bases are chosen inside the subcomplex whenever a component meets it;
    only non-subcomplex edges are scanned when growing the forest (the
    subcomplex forest already spans every subcomplex component).
    """
    parent = sub.parent
    subc, to_parent = sub.extract()
    sub_vertices = set(to_parent[0])

    forest_edges = set()
    for v in range(subc.n_vertices):
        p = sub_polarization.parent[v]
        if p is not None:
            forest_edges.add(to_parent[1][p[0]])

    uf = list(range(parent.n_vertices))

    def find(x):
        while uf[x] != x:
            uf[x] = uf[uf[x]]
            x = uf[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        uf[max(ra, rb)] = min(ra, rb)
        return True

    for e in sorted(forest_edges):
        u, v = parent.edge_endpoints(e)
        union(u, v)
    sub_edge_ids = set(to_parent[1])
    for e in parent.simplices(1):
        if e in sub_edge_ids:
            continue
        u, v = parent.edge_endpoints(e)
        if union(u, v):
            forest_edges.add(e)

    comps = cx.components(parent)
    cidx = cx.component_index(parent)
    sub_bases_parent = [to_parent[0][b] for b in sub_polarization.bases]
    bases = []
    for block in comps:
        inside = [b for b in sub_bases_parent if cidx[b] == cidx[block[0]]]
        bases.append(min(inside) if inside else block[0])

    # orient the chosen forest from the bases
    adj = [[] for _ in range(parent.n_vertices)]
    for e in sorted(forest_edges):
        u, v = parent.edge_endpoints(e)
        adj[u].append((e, v, cx.BACKWARD))
        adj[v].append((e, u, cx.FORWARD))
    parent_edge = [None] * parent.n_vertices
    visited = [False] * parent.n_vertices
    from collections import deque

    queue = deque()
    for b in bases:
        visited[b] = True
        queue.append(b)
    while queue:
        u = queue.popleft()
        for e, w, back in adj[u]:
            if not visited[w]:
                visited[w] = True
                parent_edge[w] = (e, back)
                queue.append(w)
    return cx.Polarization(parent, tuple(bases), tuple(parent_edge))


def extend_from_subcomplex(sub, lam_sub, omega):
    """Extend a system on a subcomplex to one on the parent with twist omega.

    Raises TwistMismatch when omega does not restrict to the twist of the
    given system (checked, not assumed).
    """
    parent = sub.parent
    subc, to_parent = sub.extract()
    if lam_sub.complex != subc:
        raise ValidationError("system does not live on the extracted subcomplex")
    pol_sub = cx.polarize(subc)

    ones = (1,) * parent.n_vertices
    lam_omega = from_twist(parent, omega.polarization, omega, ones)
    if twist(restrict_system(lam_omega, sub), pol_sub) != twist(lam_sub, pol_sub):
        raise TwistMismatchError("twist does not restrict to the subcomplex twist")

    pol_ext = extended_polarization(sub, pol_sub)
    omega_ext = twist(lam_omega, pol_ext)

    sub_vertex = {p: i for i, p in enumerate(to_parent[0])}
    f = []
    for v in range(parent.n_vertices):
        if v in sub_vertex:
            f.append(evaluate(lam_sub, cx.forest_path(pol_sub, sub_vertex[v])))
        else:
            f.append(1)
    lam_parent = from_twist(parent, pol_ext, omega_ext, tuple(f))

    for e_sub, e_parent in enumerate(to_parent[1]):
        assert lam_parent.edge_signs[e_parent] == lam_sub.edge_signs[e_sub]
    assert same_class(twist(lam_parent, omega.polarization), omega)
    return lam_parent


def extend_morphism(sub, lam0, lam1, zeta_sub, anchors=None):
    """Extend a morphism defined on a subcomplex to the whole complex.

    ``zeta_sub`` is a morphism between the restrictions of ``lam0`` and
    ``lam1``.  When some component of the parent meets several subcomplex
    components with conflicting correction signs, anchor paths (one per
    subcomplex component, ending at a common subcomplex vertex inside each
    parent component) decide the extension; without usable anchors the
    conflict is reported via NotExtendable.
    """
    parent = sub.parent
    subc, to_parent = sub.extract()
    r0 = restrict_system(lam0, sub)
    r1 = restrict_system(lam1, sub)
    if zeta_sub.source != r0 or zeta_sub.target != r1:
        raise NotAMorphismError("morphism does not match the restricted systems")

    zeta_full = is_equivalent(lam0, lam1)
    if zeta_full is None:
        raise TwistMismatchError("systems have different twists")

    sub_comps = cx.components(subc)
    parent_cidx = cx.component_index(parent)
    # correction constant of each subcomplex component
    corrections = []
    for block in sub_comps:
        vals = {
            zeta_sub.vertex_signs[v] * zeta_full.vertex_signs[to_parent[0][v]]
            for v in block
        }
        assert len(vals) == 1
        corrections.append(vals.pop())

    by_parent_comp = {}
    for ci, block in enumerate(sub_comps):
        pc = parent_cidx[to_parent[0][block[0]]]
        by_parent_comp.setdefault(pc, []).append(ci)

    conflicts = [
        cis
        for cis in by_parent_comp.values()
        if len({corrections[ci] for ci in cis}) > 1
    ]
    if not conflicts:
        comp_signs = []
        for pc in range(len(cx.components(parent))):
            cis = by_parent_comp.get(pc)
            comp_signs.append(corrections[cis[0]] if cis else 1)
        zeta = torsor_act(ZeroClass.from_components(parent, comp_signs), zeta_full)
    else:
        if anchors is None:
            raise NotExtendableError(
                "conflicting correction signs and no anchor paths given",
                conflicts=conflicts,
            )
        zeta = _extend_via_anchors(
            sub, lam0, lam1, zeta_sub, zeta_full, anchors, sub_comps, to_parent
        )

    for v_sub, v_parent in enumerate(to_parent[0]):
        if zeta.vertex_signs[v_parent] != zeta_sub.vertex_signs[v_sub]:
            raise NotExtendableError(
                "anchored extension does not restrict to the given morphism",
                conflicts=conflicts,
            )
    return zeta


def _extend_via_anchors(sub, lam0, lam1, zeta_sub, zeta_full, anchors,
                        sub_comps, to_parent):
    parent = sub.parent
    parent_cidx = cx.component_index(parent)
    sub_vertex = {p: i for i, p in enumerate(to_parent[0])}
    if len(anchors) != len(sub_comps):
        raise NotExtendableError("one anchor path per subcomplex component required")
    ends = {}
    for ci, path in enumerate(anchors):
        start = to_parent[0][sub_comps[ci][0]]
        if path.start != start:
            raise NotExtendableError(
                f"anchor {ci} must start at the component's lowest vertex {start}"
            )
        if path.end not in sub_vertex:
            raise NotExtendableError(f"anchor {ci} must end at a subcomplex vertex")
        pc = parent_cidx[path.end]
        ends.setdefault(pc, path.end)
        if ends[pc] != path.end:
            raise NotExtendableError(
                "anchors within one parent component must share their endpoint"
            )
    # flip the global morphism so it matches zeta_sub at each shared endpoint
    comp_signs = [1] * len(cx.components(parent))
    for pc, b in ends.items():
        comp_signs[pc] = (
            zeta_sub.vertex_signs[sub_vertex[b]] * zeta_full.vertex_signs[b]
        )
    zeta = torsor_act(ZeroClass.from_components(parent, comp_signs), zeta_full)
    # the anchored compatibility condition, checked per anchor
    bad = []
    for ci, path in enumerate(anchors):
        lhs = evaluate(lam0, path) * evaluate(lam1, path)
        rhs = (
            zeta_sub.vertex_signs[sub_vertex[path.start]]
            * zeta_sub.vertex_signs[sub_vertex[path.end]]
        )
        if lhs != rhs:
            bad.append(ci)
    if bad:
        raise NotExtendableError(
            f"anchor compatibility fails for subcomplex components {bad}",
            conflicts=[bad],
        )
    return zeta


def extend_system_and_map(complex, lam0, sub, lam_sub, zeta):
    """Extend a system on a subcomplex together with a map into lam0.

    Returns (lam1, zeta1) with lam1 restricting to the subcomplex system and
    zeta1 a morphism lam1 -> lam0 extending zeta.
    """
    if sub.parent != complex or lam0.complex != complex:
        raise ValidationError("inputs do not live on the given complex")
    subc, to_parent = sub.extract()
    if zeta.source != lam_sub or zeta.target != restrict_system(lam0, sub):
        raise NotAMorphismError("map does not go from the subcomplex system to lam0")

    pol = cx.polarize(complex)
    f0 = tuple(
        evaluate(lam0, cx.forest_path(pol, v)) for v in range(complex.n_vertices)
    )
    sub_vertex = {p: i for i, p in enumerate(to_parent[0])}
    f1 = tuple(
        f0[v] * zeta.vertex_signs[sub_vertex[v]] if v in sub_vertex else 1
        for v in range(complex.n_vertices)
    )
    omega = twist(lam0, pol)
    # the main-lemma formula, applied directly so f1 = -1 at a base (which can
    # happen when zeta is -1 there) still produces the advertised system
    signs = []
    for e in complex.simplices(1):
        u, v = complex.edge_endpoints(e)
        signs.append(f1[u] * (-1 if e in omega.bits else 1) * f1[v])
    lam1 = CoefficientSystem(complex, tuple(signs))

    zeta1 = Morphism(
        lam1, lam0, tuple(f1[v] * f0[v] for v in range(complex.n_vertices))
    )
    for e_sub, e_parent in enumerate(to_parent[1]):
        assert lam1.edge_signs[e_parent] == lam_sub.edge_signs[e_sub]
    for v_parent, v_sub in sub_vertex.items():
        assert zeta1.vertex_signs[v_parent] == zeta.vertex_signs[v_sub]
    return lam1, zeta1
