"""Simplicial homotopies on the shuffle cylinder: the forced lift of a
morphism along a homotopy, and the component-sign correction comparing its
two ends.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import coefficients as co
from . import complexes as cx
from .errors import NotAMorphismError, ValidationError


@dataclass
class Homotopy:
    """A simplicial map out of a cylinder, with its two ends."""

    cylinder: cx.Cylinder
    map: cx.SimplicialMap

    def __post_init__(self):
        if self.map.source != self.cylinder.space:
            raise ValidationError("homotopy is not defined on the given cylinder")
        self.end0 = cx.compose(self.map, self.cylinder.end0)
        self.end1 = cx.compose(self.map, self.cylinder.end1)

    @property
    def base(self):
        return self.cylinder.base

    @property
    def target(self):
        return self.map.target

    def track_sign(self, lam_target, v):
        """Value of the target system on the track of vertex v."""
        img = self.map.image(1, self.cylinder.vertical_edge(v))
        return 1 if img is None else lam_target.edge_signs[img[0]]


def constant_homotopy(f):
    """The homotopy f о r from f to itself."""
    cyl = cx.cylinder(f.source)
    return Homotopy(cyl, cx.compose(f, cyl.projection))


def lift_zeta(homotopy, lam_base, lam_target, zeta0):
    """The unique morphism over the cylinder restricting to zeta0 at end 0.

    Values at the far end are forced along vertical edges; the full morphism
    identity is then verified on every cylinder edge.
    """
    x = homotopy.base
    if zeta0.source != lam_base or zeta0.target != co.pullback(homotopy.end0, lam_target):
        raise NotAMorphismError("zeta0 is not a morphism at end 0")
    cyl = homotopy.cylinder
    signs = [1] * cyl.space.n_vertices
    for v in range(x.n_vertices):
        signs[cyl.vertex_id(v, 0)] = zeta0.vertex_signs[v]
        signs[cyl.vertex_id(v, 1)] = zeta0.vertex_signs[v] * homotopy.track_sign(
            lam_target, v
        )
    source = co.bullet(lam_base, co.CoefficientSystem.trivial(cx.interval()), cyl.product)
    target = co.pullback(homotopy.map, lam_target)
    return co.Morphism(source, target, tuple(signs))


def end_restriction(homotopy, zeta_cyl, end=1):
    """Restrict a cylinder morphism to one end, as a morphism over the base."""
    x = homotopy.base
    cyl = homotopy.cylinder
    inc = cyl.end1 if end else cyl.end0
    lam_base = co.pullback(inc, zeta_cyl.source)
    lam_end = co.pullback(inc, zeta_cyl.target)
    signs = tuple(
        zeta_cyl.vertex_signs[cyl.vertex_id(v, end)] for v in range(x.n_vertices)
    )
    return co.Morphism(lam_base, lam_end, signs)


def correction_class(homotopy, lam_base, lam_target, zeta0, zeta1):
    """The component signs comparing (end0, zeta0) with (end1, zeta1).

    Per vertex this is the track sign times zeta0 times zeta1; constancy on
    components is asserted, not assumed.
    """
    if zeta0.source != lam_base or zeta0.target != co.pullback(homotopy.end0, lam_target):
        raise NotAMorphismError("zeta0 is not a morphism at end 0")
    if zeta1.source != lam_base or zeta1.target != co.pullback(homotopy.end1, lam_target):
        raise NotAMorphismError("zeta1 is not a morphism at end 1")
    x = homotopy.base
    signs = tuple(
        homotopy.track_sign(lam_target, v)
        * zeta0.vertex_signs[v]
        * zeta1.vertex_signs[v]
        for v in range(x.n_vertices)
    )
    return co.ZeroClass(x, signs)
