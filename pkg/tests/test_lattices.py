from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orbitdepth.lattices import (
    hnf,
    snf,
    snf_diagonal,
    integer_row_kernel,
    solve_in_rowspace,
    right_nullspace,
    GradedLattice,
    torsion_invariants,
    LatticeError,
)

small_matrices = st.lists(
    st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4
)


def test_hnf_frozen():
    assert hnf([[2, 4], [1, 3]]) == [[1, 1], [0, 2]]
    assert hnf([[0, 0], [0, 0]]) == []
    assert hnf([[4, 6]]) == [[4, 6]]


def test_hnf_idempotent_and_pivots_positive():
    M = [[3, -1, 2], [6, 0, 1], [0, 5, 5]]
    H = hnf(M)
    assert hnf(H) == H
    for row in H:
        piv = next(a for a in row if a)
        assert piv > 0


@settings(max_examples=80)
@given(small_matrices)
def test_snf_transforms_and_divisibility(M):
    D, U, V = snf(M)
    m, n = len(M), len(M[0])
    # U*M*V == D
    UM = [[sum(U[i][k] * M[k][j] for k in range(m)) for j in range(n)] for i in range(m)]
    UMV = [[sum(UM[i][k] * V[k][j] for k in range(n)) for j in range(n)] for i in range(m)]
    assert UMV == D
    diag = [D[i][i] for i in range(min(m, n))]
    for a, b in zip(diag, diag[1:]):
        if b != 0:
            assert a != 0 and b % a == 0
    for i in range(m):
        for j in range(n):
            if i != j:
                assert D[i][j] == 0


def test_snf_frozen():
    assert snf_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert snf_diagonal([[2, 4], [6, 8]]) == [2, 4]


def test_integer_row_kernel():
    M = [[1, 2, 3], [2, 4, 6]]
    K = integer_row_kernel(M)
    assert len(K) == 1
    c = K[0]
    assert all(sum(ci * M[i][j] for i, ci in enumerate(c)) == 0 for j in range(3))


def test_solve_in_rowspace():
    rows = [[1, 0, 1], [0, 2, 0]]
    x = solve_in_rowspace(rows, [3, 4, 3])
    assert x == [Fraction(3), Fraction(2)]
    assert solve_in_rowspace(rows, [0, 0, 1]) is None


def test_right_nullspace():
    rows = [[1, 1, 0]]
    basis = right_nullspace(rows)
    assert len(basis) == 2
    for v in basis:
        assert sum(a * b for a, b in zip(rows[0], v)) == 0


def test_graded_lattice_membership():
    L = GradedLattice(1, 2, [[2, 0], [0, 3]])
    assert L.contains([2, 3])
    assert L.contains([Fraction(4), Fraction(0)])
    assert not L.contains([1, 0])
    assert not L.contains([Fraction(1, 2), Fraction(0)])


def test_graded_lattice_add_and_normalize():
    L = GradedLattice(1, 2)
    assert L.add([Fraction(1, 2), Fraction(0)])
    assert not L.add([Fraction(1), Fraction(0)])
    assert L.add([Fraction(0), Fraction(1, 3)])
    assert L.den == 6
    # equal lattices normalize to equal representations
    M = GradedLattice(1, 2, [[3, 0], [0, 2]], den=6)
    assert L == M


def test_contains_lattice():
    big = GradedLattice(1, 2, [[1, 0], [0, 1]])
    small = GradedLattice(1, 2, [[2, 0], [0, 2]])
    assert big.contains_lattice(small)
    assert not small.contains_lattice(big)


def test_torsion_invariants_frozen():
    Z2 = GradedLattice(1, 2, [[1, 0], [0, 1]])
    assert torsion_invariants(GradedLattice(1, 2, [[2, 0]]), Z2) == [2]
    assert torsion_invariants(GradedLattice(1, 2, [[2, 0], [0, 3]]), Z2) == [2, 3]
    # prime-power form: 12 splits as 4 * 3
    assert torsion_invariants(GradedLattice(1, 2, [[12, 0], [0, 1]]), Z2) == [3, 4]
    assert torsion_invariants(Z2, Z2) == []
    assert torsion_invariants(GradedLattice(1, 2), Z2) == []


def test_torsion_saturation_only_along_sub():
    # sub spans one line; the quotient is torsion-free along it
    Z2 = GradedLattice(1, 2, [[1, 0], [0, 1]])
    assert torsion_invariants(GradedLattice(1, 2, [[1, 1]]), Z2) == []
    assert torsion_invariants(GradedLattice(1, 2, [[2, 2]]), Z2) == [2]


def test_torsion_requires_containment():
    sup = GradedLattice(1, 2, [[2, 0], [0, 1]])
    sub = GradedLattice(1, 2, [[1, 0]])
    with pytest.raises(LatticeError):
        torsion_invariants(sub, sup)
    off_span = GradedLattice(1, 1, [[1]])
    with pytest.raises(LatticeError):
        torsion_invariants(off_span, GradedLattice(1, 1, []))


def test_degree_mismatch_rejected():
    with pytest.raises(LatticeError):
        torsion_invariants(GradedLattice(1, 2), GradedLattice(2, 2))
