"""Twisted chain and cochain complexes over a sign system, their homology,
induced maps of pairs, cap products, fundamental classes and degrees.

Conventions (pinned; every structural identity is asserted by the tests):

* The twisted boundary weights only the 0-th face: the column of an
  n-simplex [v0, ..., vn] is  sign(v0 v1) * d0  +  sum_{i>=1} (-1)^i d_i.
  Transport is anchored at the initial vertex of each simplex.
* A map of pairs (f, zeta) acts on chains by
      sigma  |->  zeta(v0 sigma) * t * perm_sign * f(sigma),
  where t is the target system evaluated on the edge of f(sigma) joining
  its initial vertex to the image of v0(sigma).  For order-preserving maps
  t = +1 and the formula reduces to the bare pushforward.
* cap(phi, c) on a simplex is (-1)^{rs} * (product system on the front
  path) * phi(front r-face) * (back s-face); the chain-level Leibniz rule
  it satisfies is  d(phi ^ c) = (-1)^s (delta phi) ^ c + phi ^ (d c).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import complexes as cx
from . import coefficients as co
from .errors import (
    DegreeMismatchError,
    NoFundamentalClassError,
    NotAChainMapError,
    NotUniqueError,
    OutOfValidRangeError,
    TwistNotPreservedError,
    ValidationError,
)
from .linalg import QuotientPresentation, checked_matmul, zeros


@dataclass
class TwistedChainComplex:
    complex: cx.DeltaComplex
    system: co.CoefficientSystem
    boundaries: dict  # n -> int64 matrix (count(n-1) x count(n)), n = 1..dim

    def boundary(self, n):
        if n in self.boundaries:
            return self.boundaries[n]
        rows = self.complex.count(n - 1) if n >= 1 else 0
        return zeros(rows, self.complex.count(n))


def twisted_boundary(complex, system):
    """The twisted chain complex of a system; checks d о d == 0."""
    if system.complex != complex:
        raise ValidationError("system does not live on the complex")
    mats = {}
    for n in range(1, complex.dim + 1):
        m = zeros(complex.count(n - 1), complex.count(n))
        for s in complex.simplices(n):
            init_edge = complex.edge_between(n, s, 0, 1)
            m[complex.face(n, s, 0), s] += system.edge_signs[init_edge]
            for i in range(1, n + 1):
                m[complex.face(n, s, i), s] += -1 if i % 2 else 1
        mats[n] = m
    tcc = TwistedChainComplex(complex, system, mats)
    for n in range(2, complex.dim + 1):
        if (checked_matmul(tcc.boundary(n - 1), tcc.boundary(n)) != 0).any():
            raise ValidationError(f"d o d != 0 between degrees {n} and {n - 2}")
    return tcc


@dataclass
class HomologyGroup:
    """rank, ordered torsion coefficients, and basis cycles (free first)."""

    rank: int
    torsion: tuple
    basis: tuple
    presentation: QuotientPresentation = field(compare=False, repr=False, default=None)

    @property
    def n_generators(self):
        return self.rank + len(self.torsion)

    def is_zero(self):
        return self.n_generators == 0

    def coords(self, vec):
        return self.presentation.coords(vec)


def _group_from_presentation(pres):
    return HomologyGroup(
        rank=pres.rank,
        torsion=tuple(pres.torsion),
        basis=tuple(pres.generators),
        presentation=pres,
    )


def homology(complex, system, n, tcc=None):
    """H_n of the twisted chain complex, via deterministic Smith reduction."""
    if not 0 <= n <= complex.dim:
        raise OutOfValidRangeError(f"degree {n} outside 0..{complex.dim}")
    tcc = tcc or twisted_boundary(complex, system)
    return _group_from_presentation(
        QuotientPresentation(tcc.boundary(n), tcc.boundary(n + 1))
    )


def cohomology(complex, system, n, tcc=None):
    """H^n of the twisted cochain complex (transposed boundaries)."""
    if not 0 <= n <= complex.dim:
        raise OutOfValidRangeError(f"degree {n} outside 0..{complex.dim}")
    tcc = tcc or twisted_boundary(complex, system)
    out = tcc.boundary(n + 1).T  # delta^n
    into = tcc.boundary(n).T     # delta^{n-1}
    return _group_from_presentation(QuotientPresentation(out, into))


def zeta_chain_map(zeta):
    """Diagonal +/-1 matrices of the chain map induced by a morphism."""
    complex = zeta.source.complex
    out = []
    for n in range(complex.dim + 1):
        d = np.zeros((complex.count(n), complex.count(n)), dtype=np.int64)
        for s in complex.simplices(n):
            d[s, s] = zeta.vertex_signs[complex.vertex_of(n, s, 0)]
        out.append(d)
    return out


def chain_map_matrices(f, lam_source, lam_target, zeta):
    """Chain matrices of a pair map (f, zeta); verified to be a chain map.

    ``zeta`` must be a morphism from ``lam_source`` to the pullback of
    ``lam_target`` along ``f``.
    """
    if zeta.source != lam_source:
        raise ValidationError("morphism source is not the given system")
    if zeta.target != co.pullback(f, lam_target):
        raise NotAChainMapError("morphism target is not the pullback system")
    bad = f.validate()
    if bad:
        raise ValidationError("; ".join(bad))
    src, dst = f.source, f.target
    mats = {}
    for n in range(src.dim + 1):
        m = zeros(dst.count(n), src.count(n))
        for s in src.simplices(n):
            img = f.image(n, s)
            if img is None:
                continue
            t, sgn = img
            v0 = src.vertex_of(n, s, 0)
            factor = zeta.vertex_signs[v0] * sgn
            pos = f.initial_position(n, s)
            if pos:
                e = dst.edge_between(n, t, 0, pos)
                factor *= lam_target.edge_signs[e]
            m[t, s] += factor
        mats[n] = m
    src_b = twisted_boundary(src, lam_source)
    dst_b = twisted_boundary(dst, lam_target)
    for n in range(1, src.dim + 1):
        lhs = checked_matmul(dst_b.boundary(n), mats[n])
        rhs = checked_matmul(mats[n - 1], src_b.boundary(n))
        if (lhs != rhs).any():
            raise NotAChainMapError(f"boundaries do not commute in degree {n}")
    return mats


def induced_map(f, lam_source, lam_target, zeta, n):
    """Matrix of (f, zeta) on H_n, in the deterministic homology bases."""
    mats = chain_map_matrices(f, lam_source, lam_target, zeta)
    hs = homology(f.source, lam_source, n) if n <= f.source.dim else None
    if n > f.source.dim or n > f.target.dim:
        src_gens = hs.n_generators if hs else 0
        if n <= f.target.dim:
            ht = homology(f.target, lam_target, n)
            return zeros(ht.n_generators, src_gens)
        return zeros(0, src_gens)
    ht = homology(f.target, lam_target, n)
    cols = []
    for g in hs.basis:
        image = checked_matmul(mats[n], np.array(g, dtype=np.int64).reshape(-1, 1))
        cols.append(ht.coords(image[:, 0]))
    out = zeros(ht.n_generators, hs.n_generators)
    for j, c in enumerate(cols):
        for i, v in enumerate(c):
            out[i, j] = v
    return out


def front_face(complex, n, s, r):
    return complex.subsimplex(n, s, range(r + 1))


def back_face(complex, n, s, r):
    """The back face spanned by positions r..n."""
    return complex.subsimplex(n, s, range(r, n + 1))


def cap(lam0, lam1, phi, r, chain, n):
    """Chain-level cap of an r-cochain over lam0 with an n-chain over lam1.

    Returns an (n - r)-chain over the pointwise product system.
    """
    complex = lam0.complex
    if lam1.complex != complex:
        raise ValidationError("systems live on different complexes")
    s_deg = n - r
    if r < 0 or s_deg < 0 or n > complex.dim:
        raise DegreeMismatchError(f"cap degrees (r={r}, n={n}) are inconsistent")
    phi = np.asarray(phi, dtype=np.int64)
    chain = np.asarray(chain, dtype=np.int64)
    if phi.shape != (complex.count(r),) or chain.shape != (complex.count(n),):
        raise DegreeMismatchError("cochain/chain lengths do not match their degrees")
    eps = -1 if (r * s_deg) % 2 else 1
    out = np.zeros(complex.count(s_deg), dtype=np.int64)
    for s in complex.simplices(n):
        c = int(chain[s])
        if c == 0:
            continue
        t = 1
        if r >= 1:
            e = complex.edge_between(n, s, 0, r)
            t = lam0.edge_signs[e] * lam1.edge_signs[e]
        fr = front_face(complex, n, s, r)
        bk = back_face(complex, n, s, r)
        out[bk] += eps * t * int(phi[fr]) * c
    return out


@dataclass
class FundamentalData:
    """Top degree, the duality twist, and a normalized generating cycle."""

    dimension: int
    twist: co.TwistClass
    cycle: tuple


def fundamental_twist(complex, m):
    """The unique twist class with H_m infinite cyclic, or None.

    Raises NotUnique when several classes qualify (the complex is then not
    a closed manifold of dimension m).
    """
    comps = cx.components(complex)
    if len(comps) != 1:
        raise ValidationError("fundamental data requires a connected complex")
    if not 0 <= m <= complex.dim:
        raise OutOfValidRangeError(f"degree {m} outside 0..{complex.dim}")
    pol = cx.polarize(complex)
    winners = []
    for omega in co.all_twist_classes(complex, pol):
        lam = co.from_twist(complex, pol, omega, (1,) * complex.n_vertices)
        h = homology(complex, lam, m)
        if h.rank == 1 and not h.torsion:
            winners.append((omega, h))
    if not winners:
        return None
    if len(winners) > 1:
        raise NotUniqueError(f"{len(winners)} twist classes have H_{m} = Z")
    omega, h = winners[0]
    cycle = list(h.basis[0])
    for c in cycle:
        if c != 0:
            if c < 0:
                cycle = [-x for x in cycle]
            break
    return FundamentalData(m, omega, tuple(int(x) for x in cycle))


def fundamental_system(fund):
    """The canonical system representing the fundamental twist."""
    complex = fund.twist.complex
    return co.from_twist(
        complex, fund.twist.polarization, fund.twist, (1,) * complex.n_vertices
    )


def duality_check(complex, m, fund, lam_prime, r):
    """Whether capping with the fundamental class is an isomorphism
    H^r(lam') -> H_{m-r}(lam * lam')."""
    lam = fundamental_system(fund)
    tcc_prime = twisted_boundary(complex, lam_prime)
    hr = cohomology(complex, lam_prime, r, tcc=tcc_prime)
    target_sys = co.pointwise_product(lam, lam_prime)
    ht = homology(complex, target_sys, m - r)
    if hr.rank != ht.rank or hr.torsion != ht.torsion:
        return False
    cycle = np.array(fund.cycle, dtype=np.int64)
    mat = zeros(ht.n_generators, hr.n_generators)
    for j, phi in enumerate(hr.basis):
        image = cap(lam_prime, lam, phi, r, cycle, m)
        for i, v in enumerate(ht.coords(image)):
            mat[i, j] = v
    return _is_group_isomorphism(mat, hr, ht)


def _is_group_isomorphism(mat, source, target):
    """Whether a matrix in (free..., torsion...) coordinates is invertible."""
    if source.rank != target.rank or source.torsion != target.torsion:
        return False
    rk = target.rank
    a = mat[:rk, :source.rank]
    if source.rank:
        from .linalg import smith_form

        sf = smith_form(a)
        if sf.rank != source.rank or any(d != 1 for d in sf.diag[: sf.rank]):
            return False
    # torsion generators must not hit anything of infinite order
    if (mat[:rk, source.rank:] != 0).any():
        return False
    # surjectivity of the torsion-to-torsion block modulo the relations
    tor = list(target.torsion)
    if tor:
        d = mat[rk:, source.rank:]
        rel = zeros(len(tor), len(tor))
        for i, t in enumerate(tor):
            rel[i, i] = t
        aug = np.concatenate([d, rel], axis=1)
        from .linalg import smith_form

        sf = smith_form(aug)
        if sf.rank != len(tor) or any(x != 1 for x in sf.diag[: sf.rank]):
            return False
    return True


def degree(f, zeta, fund_source, fund_target):
    """The integer d with (f, zeta) [M] = d [N] on top twisted homology."""
    m = fund_source.dimension
    if fund_target.dimension != m:
        raise DegreeMismatchError("fundamental data in different dimensions")
    lam_m = fundamental_system(fund_source)
    lam_n = fundamental_system(fund_target)
    pulled = co.pullback(f, lam_n)
    if not co.same_class(co.twist(pulled), fund_source.twist):
        raise TwistNotPreservedError("map does not preserve the duality twist")
    mats = chain_map_matrices(f, lam_m, lam_n, zeta)
    ht = homology(f.target, lam_n, m)
    image = checked_matmul(
        mats[m], np.array(fund_source.cycle, dtype=np.int64).reshape(-1, 1)
    )
    coords = ht.coords(image[:, 0])
    ref = ht.coords(np.array(fund_target.cycle, dtype=np.int64))
    assert list(ref).count(0) == len(ref) - 1
    k = next(i for i, v in enumerate(ref) if v != 0)
    assert abs(ref[k]) == 1
    for i, v in enumerate(coords):
        if i != k and v != 0:
            raise NoFundamentalClassError("image is not a multiple of the target class")
    return int(coords[k]) * int(ref[k])
