"""Finite groups, sign characters, and the truncated normalized bar complex
of the classifying space, twisted by a character.

Chains in degree k are freely generated by k-tuples of non-identity
elements.  The boundary of (g1, ..., gk) is

    w(g1) (g2, ..., gk)
  + sum_{0<i<k} (-1)^i (g1, ..., g_i g_{i+1}, ..., gk)
  + (-1)^k (g1, ..., g_{k-1})

with any tuple containing the identity sent to zero.  The w(g1) factor is
the sign transport along the initial edge, matching the initial-vertex
convention used for complexes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import (
    DepthTooSmallError,
    NotAChainMapError,
    NotAHomomorphismError,
    NotScalarError,
    OutOfValidRangeError,
    TrivialHomologyError,
    ValidationError,
)
from .linalg import QuotientPresentation, zeros
from .twisted import HomologyGroup, _group_from_presentation


class FiniteGroup:
    """A finite group as a multiplication table over 0..n-1."""

    def __init__(self, mul, names=None):
        self.mul = tuple(tuple(int(x) for x in row) for row in mul)
        self.order = len(self.mul)
        for row in self.mul:
            if len(row) != self.order:
                raise ValidationError("multiplication table is not square")
            for x in row:
                if not 0 <= x < self.order:
                    raise ValidationError("table entry out of range")
        ident = [
            e
            for e in range(self.order)
            if all(self.mul[e][x] == x == self.mul[x][e] for x in range(self.order))
        ]
        if len(ident) != 1:
            raise ValidationError("no unique identity element")
        self.identity = ident[0]
        inv = [None] * self.order
        for a in range(self.order):
            for b in range(self.order):
                if self.mul[a][b] == self.identity and self.mul[b][a] == self.identity:
                    inv[a] = b
        if any(v is None for v in inv):
            raise ValidationError("some element has no inverse")
        self.inverse = tuple(inv)
        for a in range(self.order):
            for b in range(self.order):
                for c in range(self.order):
                    if self.mul[self.mul[a][b]][c] != self.mul[a][self.mul[b][c]]:
                        raise ValidationError("multiplication is not associative")
        self.names = tuple(names) if names else tuple(str(i) for i in range(self.order))
        if len(self.names) != self.order:
            raise ValidationError("one name per element required")

    def op(self, a, b):
        return self.mul[a][b]

    def inv(self, a):
        return self.inverse[a]

    def element_named(self, name):
        return self.names.index(name)

    def key(self):
        return self.mul

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.mul == other.mul

    def __repr__(self):
        return f"FiniteGroup(order={self.order})"

    @classmethod
    def cyclic(cls, n):
        mul = [[(a + b) % n for b in range(n)] for a in range(n)]
        return cls(mul, [str(i) for i in range(n)])

    @classmethod
    def direct_product(cls, g, h):
        n = g.order * h.order

        def pack(a, b):
            return a * h.order + b

        mul = [[0] * n for _ in range(n)]
        names = [None] * n
        for a1 in range(g.order):
            for b1 in range(h.order):
                names[pack(a1, b1)] = f"({g.names[a1]},{h.names[b1]})"
                for a2 in range(g.order):
                    for b2 in range(h.order):
                        mul[pack(a1, b1)][pack(a2, b2)] = pack(
                            g.op(a1, a2), h.op(b1, b2)
                        )
        return cls(mul, names)


@dataclass(frozen=True)
class OrientationChar:
    """A sign character: a homomorphism from the group to {+1, -1}."""

    group: FiniteGroup
    signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(int(s) for s in self.signs))
        g = self.group
        if len(self.signs) != g.order or any(s not in (1, -1) for s in self.signs):
            raise ValidationError("one sign in {+1,-1} per element required")
        for a in range(g.order):
            for b in range(g.order):
                if self.signs[g.op(a, b)] != self.signs[a] * self.signs[b]:
                    raise NotAHomomorphismError("signs are not multiplicative")

    def __call__(self, g):
        return self.signs[g]

    @classmethod
    def trivial(cls, group):
        return cls(group, (1,) * group.order)


def sign_characters(group):
    """All sign characters, the trivial one first, in lexicographic order."""
    out = []
    for signs in itertools.product((1, -1), repeat=group.order):
        ok = all(
            signs[group.op(a, b)] == signs[a] * signs[b]
            for a in range(group.order)
            for b in range(group.order)
        )
        if ok:
            out.append(OrientationChar(group, signs))
    return out


@dataclass(frozen=True)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    images: tuple

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(x) for x in self.images))
        if len(self.images) != self.source.order:
            raise NotAHomomorphismError("one image per element required")
        for a in range(self.source.order):
            for b in range(self.source.order):
                if (
                    self.images[self.source.op(a, b)]
                    != self.target.op(self.images[a], self.images[b])
                ):
                    raise NotAHomomorphismError("images are not multiplicative")

    def __call__(self, g):
        return self.images[g]

    @classmethod
    def identity(cls, group):
        return cls(group, group, tuple(range(group.order)))

    def then(self, other):
        if other.source != self.target:
            raise ValidationError("homomorphisms do not compose")
        return GroupHom(
            self.source, other.target, tuple(other.images[i] for i in self.images)
        )


def conjugation(group, g):
    """The inner automorphism h -> g^{-1} h g."""
    gi = group.inv(g)
    return GroupHom(
        group, group, tuple(group.op(group.op(gi, h), g) for h in range(group.order))
    )


class BarComplex:
    """Truncated normalized bar chains of a finite group, twisted by a
    character; boundary matrices and homology are built on demand."""

    def __init__(self, group, char, depth):
        if depth < 1:
            raise DepthTooSmallError("depth must be at least 1")
        if char.group != group:
            raise ValidationError("character belongs to a different group")
        self.group = group
        self.char = char
        self.depth = depth
        self._non_identity = tuple(
            g for g in range(group.order) if g != group.identity
        )
        self._bases = {}
        self._index = {}
        self._boundaries = {}
        self._presentations = {}

    def basis(self, k):
        if k < 0 or k > self.depth:
            return ()
        if k not in self._bases:
            tuples = tuple(itertools.product(self._non_identity, repeat=k))
            self._bases[k] = tuples
            self._index[k] = {t: i for i, t in enumerate(tuples)}
        return self._bases[k]

    def index(self, tup):
        self.basis(len(tup))
        return self._index[len(tup)].get(tup)

    def boundary_of(self, tup):
        """Coefficient dict of the boundary of one basis tuple."""
        k = len(tup)
        g = self.group
        out = {}

        def add(t, c):
            if g.identity in t:
                return
            out[t] = out.get(t, 0) + c

        add(tup[1:], self.char(tup[0]))
        for i in range(1, k):
            add(
                tup[: i - 1] + (g.op(tup[i - 1], tup[i]),) + tup[i + 1 :],
                -1 if i % 2 else 1,
            )
        add(tup[:-1], -1 if k % 2 else 1)
        return out

    def boundary(self, k):
        """Dense boundary matrix from degree k to degree k - 1."""
        if k < 1 or k > self.depth:
            rows = len(self.basis(k - 1)) if 0 <= k - 1 <= self.depth else 0
            return zeros(rows, len(self.basis(k)) if 0 <= k <= self.depth else 0)
        if k not in self._boundaries:
            src = self.basis(k)
            self.basis(k - 1)
            dst_index = self._index[k - 1]
            m = zeros(len(self.basis(k - 1)), len(src))
            for j, tup in enumerate(src):
                for t, c in self.boundary_of(tup).items():
                    m[dst_index[t], j] += c
            self._boundaries[k] = m
        return self._boundaries[k]

    def _presentation(self, n):
        if not 0 <= n <= self.depth - 1:
            raise OutOfValidRangeError(
                f"H_{n} needs depth at least {n + 1}, have {self.depth}"
            )
        if n not in self._presentations:
            self._presentations[n] = QuotientPresentation(
                self.boundary(n), self.boundary(n + 1)
            )
        return self._presentations[n]

    def homology(self, n):
        return _group_from_presentation(self._presentation(n))

    def chain_matrix(self, hom, source, k):
        """Matrix of the tuple-wise map induced by a homomorphism, from the
        k-chains of ``source`` (over the pulled-back character) to ours."""
        src = source.basis(k)
        self.basis(k)
        m = zeros(len(self.basis(k)), len(src))
        for j, tup in enumerate(src):
            img = tuple(hom(x) for x in tup)
            if self.group.identity in img:
                continue
            m[self._index[k][img], j] += 1
        return m

    def conjugation_sign(self, g, n):
        """Sign s with the map induced by conjugation by g equal to s times
        the identity on H_n; raises NotScalar if it is not scalar.

        When H_n has exponent two, +identity and -identity coincide as maps;
        the matrix is still verified to be scalar and the character value
        (one of the scalars realizing it) is reported.
        """
        h = self.homology(n)
        if h.is_zero():
            raise TrivialHomologyError(f"H_{n} is zero; no sign to extract")
        hom = conjugation(self.group, g)
        pulled = OrientationChar(
            self.group, tuple(self.char(hom(x)) for x in range(self.group.order))
        )
        assert pulled == self.char  # signs commute, so conjugation fixes the twist
        _verify_bar_chain_map(self, self, hom, min(self.depth, n + 1))
        mat = self.chain_matrix(hom, self, n)
        cols = []
        for gvec in h.basis:
            image = mat @ np.array(gvec, dtype=np.int64).reshape(-1, 1)
            cols.append(h.coords(image[:, 0]))
        return _scalar_sign(cols, h, tie_break=self.char(g))


def _scalar_sign(cols, group, tie_break=1):
    """Extract s in {+1,-1} from induced-map columns equal to s * identity.

    ``tie_break`` is returned when both scalars match the matrix, which
    happens exactly when every generator has order dividing two.
    """
    rank = group.rank
    orders = [0] * rank + list(group.torsion)
    candidates = []
    for s in (1, -1):
        ok = True
        for j, col in enumerate(cols):
            for i, v in enumerate(col):
                want = s if i == j else 0
                if orders[i]:
                    if (v - want) % orders[i]:
                        ok = False
                elif v != want:
                    ok = False
        if ok:
            candidates.append(s)
    if len(candidates) == 1:
        return candidates[0]
    if len(candidates) == 2:
        return tie_break
    raise NotScalarError("induced map is not +/- identity")


def _verify_bar_chain_map(target, source, hom, top):
    """Check d(psi t) == psi(d t) symbolically through degree ``top``."""
    g_t = target.group
    for k in range(1, top + 1):
        for tup in source.basis(k):
            img = tuple(hom(x) for x in tup)
            lhs = {}
            if g_t.identity not in img:
                for t, c in target.boundary_of(img).items():
                    lhs[t] = lhs.get(t, 0) + c
            rhs = {}
            for t, c in source.boundary_of(tup).items():
                it = tuple(hom(x) for x in t)
                if g_t.identity in it:
                    continue
                rhs[it] = rhs.get(it, 0) + c
            lhs = {t: c for t, c in lhs.items() if c}
            rhs = {t: c for t, c in rhs.items() if c}
            if lhs != rhs:
                raise NotAChainMapError(
                    f"bar chain map fails to commute on {tup} in degree {k}"
                )


@dataclass
class BarChainMap:
    """A verified chain map between two bar complexes."""

    source: BarComplex
    target: BarComplex
    hom: GroupHom

    def matrix(self, k):
        return self.target.chain_matrix(self.hom, self.source, k)


def bar(group, char, depth):
    """The normalized twisted bar complex through the given depth."""
    return BarComplex(group, char, depth)


def bar_homology(group, char, n, depth=None):
    """H_n of the twisted bar complex (default truncation depth n + 2)."""
    depth = depth if depth is not None else n + 2
    if n > depth - 1:
        raise OutOfValidRangeError(f"H_{n} is not valid at depth {depth}")
    return bar(group, char, depth).homology(n)


def bmap(hom, char, depth):
    """The chain map of bar complexes induced by a group homomorphism.

    The source carries the pulled-back character; commutation with the
    twisted boundaries is verified symbolically through the given depth.
    """
    pulled = OrientationChar(
        hom.source, tuple(char(hom(x)) for x in range(hom.source.order))
    )
    source = bar(hom.source, pulled, depth)
    target = bar(hom.target, char, depth)
    _verify_bar_chain_map(target, source, hom, depth)
    return BarChainMap(source, target, hom)


def conjugation_sign(group, char, g, n, depth=None):
    """The scalar by which conjugation by g acts on twisted H_n."""
    depth = depth if depth is not None else n + 2
    key = (group.key(), char.signs, depth)
    bc = _BAR_CACHE.get(key)
    if bc is None:
        bc = bar(group, char, depth)
        _BAR_CACHE[key] = bc
    return bc.conjugation_sign(g, n)


_BAR_CACHE = {}
