"""Degree-graded echelon form over exact rationals.

The workhorse is a sparse reduced echelon basis keyed by arbitrary totally
ordered positions; FilteredSubspace specializes it to series with positions
(word length, word), so pivots ascend by degree first and the vectors with
leading degree >= j span exactly (subspace intersect m^j).
"""

from __future__ import annotations

from fractions import Fraction

from .series import NCSeries, SeriesError, word_key


class SparseEchelon:
    """Reduced echelon basis of sparse vectors {position: coefficient}.

    Rows are kept pivot-normalized (pivot coefficient 1), mutually reduced,
    and sorted by pivot position.  Positions must be comparable; the pivot
    of a row is its smallest position.
    """

    def __init__(self):
        self.rows: list[dict] = []
        self._pivots: list = []

    def __len__(self):
        return len(self.rows)

    def copy(self):
        out = SparseEchelon()
        out.rows = [dict(r) for r in self.rows]
        out._pivots = list(self._pivots)
        return out

    def reduce(self, vec: dict) -> dict:
        """Residual of vec after eliminating all pivots."""
        v = {k: c for k, c in vec.items() if c != 0}
        for piv, row in zip(self._pivots, self.rows):
            c = v.get(piv)
            if not c:
                continue
            for k, rc in row.items():
                s = v.get(k, 0) - c * rc
                if s == 0:
                    v.pop(k, None)
                else:
                    v[k] = s
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict) -> bool:
        """Insert vec into the span; returns True iff the span grew."""
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = Fraction(1) / v[piv] if isinstance(v[piv], Fraction) else 1 / v[piv]
        v = {k: c * inv for k, c in v.items()}
        # back-reduce existing rows against the new pivot
        for row in self.rows:
            c = row.get(piv)
            if not c:
                continue
            for k, vc in v.items():
                s = row.get(k, 0) - c * vc
                if s == 0:
                    row.pop(k, None)
                else:
                    row[k] = s
        i = 0
        while i < len(self._pivots) and self._pivots[i] < piv:
            i += 1
        self.rows.insert(i, v)
        self._pivots.insert(i, piv)
        return True


class FilteredSubspace:
    """Q-subspace of the augmentation ideal in degree-graded echelon form."""

    def __init__(self, ctx):
        self.ctx = ctx
        self._ech = SparseEchelon()

    @property
    def dim(self):
        return len(self._ech)

    def copy(self):
        out = FilteredSubspace(self.ctx)
        out._ech = self._ech.copy()
        return out

    @staticmethod
    def _vec(v: NCSeries) -> dict:
        if v.constant_term() != 0:
            raise SeriesError("subspace vectors need zero constant term")
        return {word_key(w): c for w, c in v.coeffs.items()}

    def add(self, v: NCSeries) -> bool:
        return self._ech.add(self._vec(v))

    def contains(self, v: NCSeries) -> bool:
        return self._ech.contains(self._vec(v))

    def basis(self) -> list[NCSeries]:
        return [NCSeries(self.ctx, {w: c for (_, w), c in row.items()}) for row in self._ech.rows]

    def leading_degrees(self) -> list[int]:
        return [piv[0] for piv in self._ech._pivots]

    def leading_space(self, j: int) -> list[NCSeries]:
        """Homogeneous degree-j projections of rows with leading degree j."""
        if j < 1 or j > self.ctx.degree:
            raise SeriesError(f"degree {j} out of range 1..{self.ctx.degree}")
        out = []
        for piv, row in zip(self._ech._pivots, self._ech.rows):
            if piv[0] == j:
                out.append(NCSeries(self.ctx, {w: c for (l, w), c in row.items() if l == j}))
        return out


def span_add(S: FilteredSubspace, v: NCSeries):
    """Functional add: returns (new subspace, grew)."""
    out = S.copy()
    grew = out.add(v)
    return out, grew


def subspace_contains(A: list[NCSeries], B: list[NCSeries]) -> bool:
    """True iff span(B) is contained in span(A); bases must be homogeneous of one degree."""
    degs = {v.min_degree() for v in A + B if not v.is_zero()}
    for v in A + B:
        if any(len(w) != d for d in degs for w in v.coeffs):
            raise SeriesError("bases must be homogeneous")
    if len(degs) > 1:
        raise SeriesError("degree mismatch")
    ech = SparseEchelon()
    for v in A:
        ech.add(dict(v.coeffs))
    return all(ech.contains(dict(v.coeffs)) for v in B)
