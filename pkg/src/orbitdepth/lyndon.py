"""Lyndon word bases of the free Lie algebra and the Dynkin primitivity test."""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .series import NCSeries, TruncationContext, SeriesError, bracket


def lyndon_words(n: int, d: int) -> list[tuple[int, ...]]:
    """All Lyndon words of length exactly d over {1..n}, lexicographic order.

    Duval's generation of Lyndon words of length <= d, filtered to length d.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    out = []
    w = [1]
    while w:
        if len(w) == d:
            out.append(tuple(w))
        # extend periodically to length d, then increment the last letter
        ext = [w[i % len(w)] for i in range(d)]
        while ext and ext[-1] == n:
            ext.pop()
        if ext:
            ext[-1] += 1
            w = ext
        else:
            w = []
    return out


def is_lyndon(w) -> bool:
    w = tuple(w)
    return len(w) > 0 and all(w < w[i:] + w[:i] for i in range(1, len(w)))


@lru_cache(maxsize=None)
def standard_factorization(w: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split a Lyndon word as uv with v its longest proper Lyndon suffix."""
    if len(w) < 2:
        raise ValueError("need length >= 2")
    if not is_lyndon(w):
        raise ValueError(f"{w} is not a Lyndon word")
    for i in range(1, len(w)):
        if is_lyndon(w[i:]):
            return w[:i], w[i:]
    raise ValueError(f"{w} is not a Lyndon word")


@lru_cache(maxsize=None)
def _bracketing(rank: int, degree: int, w: tuple[int, ...]) -> NCSeries:
    ctx = TruncationContext(rank, degree)
    if len(w) == 1:
        return NCSeries.gen(ctx, w[0])
    u, v = standard_factorization(w)
    return bracket(_bracketing(rank, degree, u), _bracketing(rank, degree, v))


def lyndon_bracketing(word, ctx: TruncationContext) -> NCSeries:
    """Standard right-normed bracketing of a Lyndon word, as a series.

    These bracketings, over all Lyndon words of length d, form a basis of the
    degree-d homogeneous component of the free Lie algebra.
    """
    w = tuple(word)
    if not is_lyndon(w):
        raise ValueError(f"{w} is not a Lyndon word")
    return _bracketing(ctx.rank, ctx.degree, w)


def lie_coords(x: NCSeries, d: int) -> dict[tuple[int, ...], Fraction]:
    """Coordinates of a homogeneous degree-d Lie element in the Lyndon basis.

    Uses triangularity: the bracketing of a Lyndon word w equals w plus
    lexicographically larger words, so coordinates peel off greedily.
    Raises SeriesError if x is not homogeneous of degree d or not a Lie element.
    """
    if any(len(w) != d for w in x.coeffs):
        raise SeriesError("input not homogeneous of the stated degree")
    rest = x
    coords = {}
    while not rest.is_zero():
        w = min(rest.coeffs)
        if not is_lyndon(w):
            raise SeriesError("not a Lie element (leading word not Lyndon)")
        c = rest.coeffs[w]
        coords[w] = c
        rest = rest - _bracketing(x.ctx.rank, x.ctx.degree, w).scale(c)
    return coords


def lie_coords_graded(x: NCSeries):
    """Per-degree Lyndon coordinates of a (possibly inhomogeneous) Lie series."""
    if x.constant_term() != 0:
        raise SeriesError("Lie elements have zero constant term")
    out = {}
    for d in range(1, x.ctx.degree + 1):
        part = x.homogeneous_part(d)
        if not part.is_zero():
            out[d] = lie_coords(part, d)
    return out


def from_lie_coords(coords_by_degree, ctx: TruncationContext) -> NCSeries:
    out = NCSeries.zero(ctx)
    for coords in coords_by_degree.values():
        for w, c in coords.items():
            out = out + _bracketing(ctx.rank, ctx.degree, w).scale(c)
    return out


def dynkin_map(x: NCSeries) -> NCSeries:
    """Left-to-right bracketing operator: word (i1..id) -> [..[X_i1,X_i2]..,X_id]."""
    ctx = x.ctx
    out = NCSeries.zero(ctx)
    for w, c in x.coeffs.items():
        if not w:
            continue
        term = NCSeries.gen(ctx, w[0])
        for a in w[1:]:
            term = bracket(term, NCSeries.gen(ctx, a))
        out = out + term.scale(c)
    return out


def is_primitive(s: NCSeries) -> bool:
    """Dynkin criterion: each homogeneous degree-d part y satisfies D(y) = d*y."""
    if s.constant_term() != 0:
        return False
    for d in range(1, s.ctx.degree + 1):
        y = s.homogeneous_part(d)
        if y.is_zero():
            continue
        if dynkin_map(y) != y.scale(Fraction(d)):
            return False
    return True


class LieElement:
    """A primitive series together with cached Lyndon coordinates."""

    __slots__ = ("series", "_coords")

    def __init__(self, series: NCSeries, check: bool = True):
        if check and not is_primitive(series):
            raise SeriesError("series is not a Lie element")
        self.series = series
        self._coords = None

    @property
    def coords(self):
        if self._coords is None:
            self._coords = lie_coords_graded(self.series)
        return self._coords

    def __eq__(self, other):
        return isinstance(other, LieElement) and self.series == other.series

    def __repr__(self):
        return f"LieElement({self.series!r})"


class LyndonIndex:
    """Flat indexing of all Lyndon words of degree 1..degree, degree-major.

    Used to express Lie elements as coordinate vectors for the graded
    linear algebra; the (degree, lex) order fixes deterministic pivoting.
    """

    def __init__(self, ctx: TruncationContext):
        self.ctx = ctx
        self.words = []
        self.degree_start = {}
        for d in range(1, ctx.degree + 1):
            self.degree_start[d] = len(self.words)
            self.words.extend(lyndon_words(ctx.rank, d))
        self.index = {w: i for i, w in enumerate(self.words)}

    def __len__(self):
        return len(self.words)

    def degree_of(self, i: int) -> int:
        return len(self.words[i])

    def degree_slice(self, d: int):
        start = self.degree_start[d]
        end = self.degree_start.get(d + 1, len(self.words))
        return range(start, end)

    def dim(self, d: int) -> int:
        return len(self.degree_slice(d))

    def vector(self, x: NCSeries) -> dict[int, Fraction]:
        """Sparse Lyndon coordinate vector of a Lie series."""
        out = {}
        for coords in lie_coords_graded(x).values():
            for w, c in coords.items():
                out[self.index[w]] = c
        return out

    def series(self, vec) -> NCSeries:
        out = NCSeries.zero(self.ctx)
        for i, c in vec.items():
            out = out + _bracketing(self.ctx.rank, self.ctx.degree, self.words[i]).scale(c)
        return out


@lru_cache(maxsize=None)
def lyndon_index(rank: int, degree: int) -> LyndonIndex:
    return LyndonIndex(TruncationContext(rank, degree))
