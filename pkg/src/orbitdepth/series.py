"""Truncated noncommutative power series.

Series live in Q<X_1..X_n> modulo words of length > degree, stored sparsely
as {word tuple: coefficient}.  Coefficients are exact Fractions in all the
group-theoretic computations; the same container is reused with complex
floats by the numeric transport code (same word indexing, inexact field).
Words are tuples of letters in 1..rank; the empty tuple is the constant term.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .words import Word, WordError


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class TruncationContext:
    rank: int
    degree: int

    def __post_init__(self):
        if self.rank < 1 or self.degree < 1:
            raise SeriesError("rank and degree must be >= 1")

    def words(self):
        """All words of length <= degree in (length, lex) order."""

        def gen(prefix):
            yield prefix
            if len(prefix) < self.degree:
                for i in range(1, self.rank + 1):
                    yield from gen(prefix + (i,))

        return sorted(gen(()), key=lambda w: (len(w), w))


def word_key(w):
    return (len(w), w)


class NCSeries:
    """Element of the truncated free associative algebra."""

    __slots__ = ("ctx", "coeffs")

    def __init__(self, ctx: TruncationContext, coeffs=None):
        self.ctx = ctx
        self.coeffs = {}
        if coeffs:
            for w, c in coeffs.items():
                if len(w) > ctx.degree:
                    continue
                if any(a < 1 or a > ctx.rank for a in w):
                    raise SeriesError(f"word {w} out of alphabet 1..{ctx.rank}")
                if c != 0:
                    self.coeffs[w] = c

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls(ctx)

    @classmethod
    def one(cls, ctx):
        return cls(ctx, {(): Fraction(1)})

    @classmethod
    def gen(cls, ctx, i):
        if i < 1 or i > ctx.rank:
            raise SeriesError(f"generator index {i} out of range")
        return cls(ctx, {(i,): Fraction(1)})

    # -- basic structure ---------------------------------------------------

    def __getitem__(self, w):
        return self.coeffs.get(tuple(w), 0)

    def __eq__(self, other):
        return isinstance(other, NCSeries) and self.ctx == other.ctx and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.ctx, frozenset(self.coeffs.items())))

    def is_zero(self):
        return not self.coeffs

    def constant_term(self):
        return self.coeffs.get((), 0)

    def items(self):
        """Coefficients in deterministic (length, lex) order."""
        return sorted(self.coeffs.items(), key=lambda kv: word_key(kv[0]))

    def min_degree(self):
        """Smallest word length with a nonzero coefficient; None for zero."""
        if not self.coeffs:
            return None
        return min(len(w) for w in self.coeffs)

    def homogeneous_part(self, d):
        return NCSeries(self.ctx, {w: c for w, c in self.coeffs.items() if len(w) == d})

    def without_constant(self):
        return NCSeries(self.ctx, {w: c for w, c in self.coeffs.items() if w})

    def map_coefficients(self, f):
        return NCSeries(self.ctx, {w: f(c) for w, c in self.coeffs.items()})

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for w, c in self.items():
            mono = "*".join(f"X{i}" for i in w) if w else "1"
            parts.append(f"{c}*{mono}" if w else f"{c}")
        return " + ".join(parts)

    # -- ring operations ---------------------------------------------------

    def _same_ctx(self, other):
        if self.ctx != other.ctx:
            raise SeriesError("context mismatch")

    def __add__(self, other):
        self._same_ctx(other)
        out = dict(self.coeffs)
        for w, c in other.coeffs.items():
            s = out.get(w, 0) + c
            if s == 0:
                out.pop(w, None)
            else:
                out[w] = s
        return NCSeries(self.ctx, out)

    def __neg__(self):
        return NCSeries(self.ctx, {w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if c == 0:
            return NCSeries(self.ctx)
        return NCSeries(self.ctx, {w: c * v for w, v in self.coeffs.items()})

    def __mul__(self, other):
        self._same_ctx(other)
        deg = self.ctx.degree
        out = {}
        for wa, ca in self.coeffs.items():
            la = len(wa)
            for wb, cb in other.coeffs.items():
                if la + len(wb) > deg:
                    continue
                w = wa + wb
                s = out.get(w, 0) + ca * cb
                if s == 0:
                    out.pop(w, None)
                else:
                    out[w] = s
        return NCSeries(self.ctx, out)

    def to_json(self):
        terms = []
        for w, c in self.items():
            f = Fraction(c)
            terms.append({"word": list(w), "num": str(f.numerator), "den": str(f.denominator)})
        return {"rank": self.ctx.rank, "degree": self.ctx.degree, "terms": terms}

    @classmethod
    def from_json(cls, data):
        ctx = TruncationContext(data["rank"], data["degree"])
        coeffs = {
            tuple(t["word"]): Fraction(int(t["num"]), int(t["den"])) for t in data["terms"]
        }
        return cls(ctx, coeffs)


def bracket(a: NCSeries, b: NCSeries) -> NCSeries:
    """Commutator ab - ba, truncated."""
    return a * b - b * a


def exp(x: NCSeries) -> NCSeries:
    if x.constant_term() != 0:
        raise SeriesError("exp needs zero constant term")
    out = NCSeries.one(x.ctx)
    term = NCSeries.one(x.ctx)
    for k in range(1, x.ctx.degree + 1):
        term = (term * x).scale(Fraction(1, k))
        if term.is_zero():
            break
        out = out + term
    return out


def log(s: NCSeries) -> NCSeries:
    if s.constant_term() != 1:
        raise SeriesError("log needs constant term 1")
    x = s.without_constant()
    out = NCSeries.zero(s.ctx)
    power = NCSeries.one(s.ctx)
    for k in range(1, s.ctx.degree + 1):
        power = power * x
        if power.is_zero():
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    return out


@lru_cache(maxsize=None)
def _gen_exp(rank: int, degree: int, letter: int) -> NCSeries:
    ctx = TruncationContext(rank, degree)
    sign = 1 if letter > 0 else -1
    return exp(NCSeries.gen(ctx, abs(letter)).scale(Fraction(sign)))


def magnus(w: Word, ctx: TruncationContext) -> NCSeries:
    """Group-like embedding x_i -> exp(X_i), extended multiplicatively.

    Detects the lower central series: log(magnus(w)) has leading degree >= c
    exactly when w lies in L_c.
    """
    if w.rank != ctx.rank:
        raise WordError("rank mismatch")
    out = NCSeries.one(ctx)
    for a in w.letters:
        out = out * _gen_exp(ctx.rank, ctx.degree, a)
    return out


def log_magnus(w: Word, ctx: TruncationContext) -> NCSeries:
    return log(magnus(w, ctx))


def bch(a: NCSeries, b: NCSeries) -> NCSeries:
    """Baker-Campbell-Hausdorff product log(exp(a) exp(b))."""
    if a.ctx != b.ctx:
        raise SeriesError("context mismatch")
    return log(exp(a) * exp(b))


def shuffle(u, v):
    """All riffle interleavings of u and v with multiplicity: {word: count}."""
    u, v = tuple(u), tuple(v)
    out = {}

    def rec(i, j, prefix):
        if i == len(u) and j == len(v):
            out[prefix] = out.get(prefix, 0) + 1
            return
        if i < len(u):
            rec(i + 1, j, prefix + (u[i],))
        if j < len(v):
            rec(i, j + 1, prefix + (v[j],))

    rec(0, 0, ())
    return out
