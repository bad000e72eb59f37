"""Integer lattice arithmetic: Hermite/Smith normal forms and torsion data.

Lattices are stored per homogeneous degree as integer generator matrices in
row-style HNF with a common positive denominator, so rational generating
vectors (Lyndon coordinates of logs of group words) can be accumulated
exactly and compared integrally.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm


class LatticeError(ValueError):
    pass


# -- normal forms ----------------------------------------------------------


def hnf(M: list[list[int]]) -> list[list[int]]:
    """Row-style Hermite normal form; zero rows dropped, pivots positive,
    entries above a pivot reduced into [0, pivot)."""
    A = [list(map(int, row)) for row in M]
    if not A:
        return []
    nrows, ncols = len(A), len(A[0])
    r = 0
    for c in range(ncols):
        # clear column c below row r by repeated remainder steps
        while True:
            nz = [i for i in range(r, nrows) if A[i][c] != 0]
            if not nz:
                break
            i = min(nz, key=lambda i: abs(A[i][c]))
            A[r], A[i] = A[i], A[r]
            done = True
            for j in range(r + 1, nrows):
                if A[j][c] != 0:
                    q = A[j][c] // A[r][c]
                    A[j] = [a - q * b for a, b in zip(A[j], A[r])]
                    if A[j][c] != 0:
                        done = False
            if done:
                break
        if r < nrows and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-a for a in A[r]]
            for j in range(r):
                q = A[j][c] // A[r][c]
                if q:
                    A[j] = [a - q * b for a, b in zip(A[j], A[r])]
            r += 1
            if r == nrows:
                break
    return [row for row in A[:r] if any(row)]


def snf(M: list[list[int]]):
    """Smith normal form with transforms: returns (D, U, V), U*M*V = D,
    U and V unimodular, diagonal of D nonnegative with d1 | d2 | ..."""
    A = [list(map(int, row)) for row in M]
    m = len(A)
    n = len(A[0]) if A else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def addmul_row(dst, src, q):
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def addmul_col(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        # pick the smallest nonzero entry of the trailing block as pivot
        entries = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            dirty = False
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    addmul_row(i, t, -q)
                    if A[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    addmul_col(j, t, -q)
                    if A[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if not dirty and all(A[i][t] == 0 for i in range(t + 1, m)) and all(
                A[t][j] == 0 for j in range(t + 1, n)
            ):
                # enforce divisibility of the trailing block by the pivot
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % A[t][t] != 0:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                addmul_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
        t += 1
    return A, U, V


def snf_diagonal(M: list[list[int]]) -> list[int]:
    D, _, _ = snf(M)
    return [D[i][i] for i in range(min(len(D), len(D[0]) if D else 0))]


def integer_row_kernel(M: list[list[int]]) -> list[list[int]]:
    """Saturated basis of {c integer row : c*M = 0}."""
    if not M:
        return []
    D, U, _ = snf(M)
    n = len(D[0]) if D else 0
    out = []
    for i, urow in enumerate(U):
        if all(D[i][j] == 0 for j in range(n)):
            out.append(list(urow))
    return out


# -- rational helpers ------------------------------------------------------


def solve_in_rowspace(rows, target):
    """Coefficients x with sum x_i rows_i = target, or None if unsolvable."""
    if not rows:
        return [] if all(t == 0 for t in target) else None
    ncols = len(rows[0])
    # eliminate on augmented [rows^T | target^T]
    aug = [[Fraction(rows[r][c]) for r in range(len(rows))] + [Fraction(target[c])] for c in range(ncols)]
    nvars = len(rows)
    piv_rows = []
    r = 0
    for c in range(nvars):
        p = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if p is None:
            piv_rows.append(None)
            continue
        aug[r], aug[p] = aug[p], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [a * inv for a in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[r])]
        piv_rows.append(r)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][-1] != 0:
            return None
    x = [Fraction(0)] * nvars
    for c, pr in enumerate(piv_rows):
        if pr is not None:
            x[c] = aug[pr][-1]
    return x


def right_nullspace(rows):
    """Rational basis of {v : rows * v = 0}."""
    if not rows:
        return []
    A = [[Fraction(a) for a in row] for row in rows]
    ncols = len(A[0])
    pivots = {}
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [a * inv for a in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots[c] = r
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for c, pr in pivots.items():
            v[c] = -A[pr][f]
        basis.append(v)
    return basis


# -- graded lattices -------------------------------------------------------


class GradedLattice:
    """Integer lattice of degree-d Lyndon coordinate vectors.

    Generators are rows of an HNF integer matrix over a common positive
    denominator; (mat, den) is normalized by the gcd of all entries with den,
    so equal lattices compare equal.
    """

    def __init__(self, degree: int, ncols: int, mat=None, den: int = 1):
        if den <= 0:
            raise LatticeError("denominator must be positive")
        self.degree = degree
        self.ncols = ncols
        self.mat = hnf(mat or [])
        self.den = den
        self._normalize()

    def _normalize(self):
        g = self.den
        for row in self.mat:
            for a in row:
                g = gcd(g, a)
        if g > 1:
            self.mat = [[a // g for a in row] for row in self.mat]
            self.den //= g

    @property
    def rank(self):
        return len(self.mat)

    def vectors(self):
        """Generators as rational row vectors."""
        return [[Fraction(a, self.den) for a in row] for row in self.mat]

    def __eq__(self, other):
        return (
            isinstance(other, GradedLattice)
            and (self.degree, self.ncols, self.den, self.mat)
            == (other.degree, other.ncols, other.den, other.mat)
        )

    def contains(self, vec) -> bool:
        """Membership of a rational vector via HNF back-substitution."""
        w = [Fraction(v) * self.den for v in vec]
        for row in self.mat:
            p = next((j for j, a in enumerate(row) if a), None)
            if p is None:
                continue
            if w[p] != 0:
                q = w[p] / row[p]
                if q.denominator != 1:
                    return False
                w = [a - q * b for a, b in zip(w, row)]
        return all(a == 0 for a in w)

    def add(self, vec) -> bool:
        """Adjoin a rational vector; returns True iff the lattice grew."""
        if self.contains(vec):
            return False
        d = lcm(self.den, *(Fraction(v).denominator for v in vec)) if vec else self.den
        scale = d // self.den
        rows = [[a * scale for a in row] for row in self.mat]
        rows.append([int(Fraction(v) * d) for v in vec])
        self.mat = hnf(rows)
        self.den = d
        self._normalize()
        return True

    def contains_lattice(self, other: "GradedLattice") -> bool:
        return all(self.contains(v) for v in other.vectors())


def _prime_power_parts(n: int) -> list[int]:
    """Prime-power factors of n (trial division; torsion orders are tiny)."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                q *= p
                n //= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def _hnf_coordinates(mat: list[list[int]], den: int, vec):
    """x with x * (mat/den) = vec by back-substitution, or None if outside span.

    Valid because mat is in row HNF: pivot columns increase, and each pivot
    column is zero in all later rows, so coefficients peel off top to bottom.
    """
    w = [Fraction(v) * den for v in vec]
    x = []
    for row in mat:
        p = next(j for j, a in enumerate(row) if a)
        q = w[p] / row[p]
        x.append(q)
        if q:
            w = [a - q * b for a, b in zip(w, row)]
    if any(a != 0 for a in w):
        return None
    return x


def torsion_invariants(sub: GradedLattice, sup: GradedLattice) -> list[int]:
    """Elementary divisors > 1 (prime-power form) of
    (saturation of sub inside sup) / sub.

    Empty result means the quotient of sup by sub is torsion-free along the
    Q-span of sub.  Requires sub to lie inside sup.
    """
    if sub.degree != sup.degree or sub.ncols != sup.ncols:
        raise LatticeError("degree mismatch")
    if not sub.mat:
        return []
    # write each sub generator in the HNF basis of sup; the saturation
    # quotient is then the torsion of Z^rank(sup) modulo the coordinate rows
    C = []
    for v in sub.vectors():
        x = _hnf_coordinates(sup.mat, sup.den, v)
        if x is None:
            raise LatticeError("sub is not inside the Q-span of sup")
        if any(f.denominator != 1 for f in x):
            raise LatticeError("sub is not inside sup")
        C.append([int(f) for f in x])
    out = []
    for d in snf_diagonal(C):
        if d > 1:
            out.extend(_prime_power_parts(d))
    return sorted(out)
