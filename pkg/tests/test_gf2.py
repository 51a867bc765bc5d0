"""Bit-matrix layer, checked against exhaustive enumeration oracles."""

import random

import pytest

from krtool.gf2 import (
    F2Matrix,
    intersect_row_spaces,
    kernel_basis,
    rank,
    rref,
    solve,
    solve_row,
    span_contains,
    subquotient_basis,
)


def random_matrix(rng, nrows, ncols):
    return F2Matrix.from_rows([rng.getrandbits(ncols) for _ in range(nrows)],
                              ncols)


def span_vectors(m):
    """Every vector in the row span, by enumerating row combinations."""
    out = set()
    for mask in range(1 << m.nrows):
        acc = 0
        r = mask
        while r:
            i = (r & -r).bit_length() - 1
            acc ^= m.rows[i]
            r &= r - 1
        out.add(acc)
    return out


def test_rref_identity():
    ident = F2Matrix.identity(2)
    r, piv = rref(ident)
    assert r == ident and piv == (0, 1)


def test_rref_zero():
    z = F2Matrix.zero(3, 4)
    r, piv = rref(z)
    assert r == z and piv == ()


def test_rref_rank_matches_span_oracle():
    rng = random.Random(11)
    for _ in range(25):
        m = random_matrix(rng, 4, 6)
        span = span_vectors(m)
        assert 1 << rank(m) == len(span)


def test_rref_idempotent():
    rng = random.Random(5)
    for _ in range(20):
        m = random_matrix(rng, 5, 5)
        r1, _ = rref(m)
        r2, _ = rref(r1)
        assert r1 == r2


def test_kernel_identity_and_zero():
    assert kernel_basis(F2Matrix.identity(4)).nrows == 0
    assert kernel_basis(F2Matrix.zero(2, 3)).nrows == 3


def test_kernel_exhaustive_oracle():
    rng = random.Random(7)
    for _ in range(15):
        m = random_matrix(rng, 5, 7)
        ker = kernel_basis(m)
        assert ker.nrows == 7 - rank(m)
        # every vector of the returned span is annihilated
        for v in span_vectors(ker):
            assert all((bin(row & v).count("1") % 2) == 0 for row in m.rows)


def test_rank_nullity():
    rng = random.Random(3)
    for _ in range(30):
        m = random_matrix(rng, rng.randint(1, 6), rng.randint(1, 8))
        assert rank(m) + kernel_basis(m).nrows == m.ncols


def test_solve_identity_and_zero():
    ident = F2Matrix.identity(3)
    assert solve(ident, 0b101) == 0b101
    assert solve(F2Matrix.zero(3, 3), 0b010) is None


def test_solve_substitution_oracle():
    rng = random.Random(13)
    hits = 0
    for _ in range(40):
        m = random_matrix(rng, 4, 4)
        x0 = rng.getrandbits(4)
        b = 0
        for i, row in enumerate(m.rows):
            if bin(row & x0).count("1") % 2:
                b |= 1 << i
        x = solve(m, b)
        assert x is not None
        check = 0
        for i, row in enumerate(m.rows):
            if bin(row & x).count("1") % 2:
                check |= 1 << i
        assert check == b
        hits += 1
    assert hits == 40


def test_solve_dimension_mismatch():
    with pytest.raises(ValueError):
        solve(F2Matrix.identity(2), 0b111)


def test_subquotient_trivial_cases():
    ident = F2Matrix.identity(3)
    empty = F2Matrix.zero(0, 3)
    assert subquotient_basis(ident, empty).nrows == 3
    assert subquotient_basis(ident, ident).nrows == 0


def test_subquotient_containment_error():
    a = F2Matrix.from_rows([0b01], 2)
    b = F2Matrix.from_rows([0b10], 2)
    with pytest.raises(ValueError):
        subquotient_basis(a, b)


def test_subquotient_coset_oracle():
    rng = random.Random(17)
    for _ in range(15):
        a = random_matrix(rng, 5, 6)
        coeffs = [rng.getrandbits(5) for _ in range(2)]
        brows = []
        for c in coeffs:
            acc = 0
            r = c
            while r:
                i = (r & -r).bit_length() - 1
                acc ^= a.rows[i]
                r &= r - 1
            brows.append(acc)
        b = F2Matrix.from_rows(brows, 6)
        reps = subquotient_basis(a, b)
        assert reps.nrows == rank(a) - rank(b)
        # cosets of span(b) inside span(a) are enumerated exactly once
        span_b = span_vectors(b)
        cosets = {min(v ^ w for w in span_b) for v in span_vectors(a)}
        assert len(cosets) == 1 << reps.nrows


def test_intersection_oracle():
    rng = random.Random(23)
    for _ in range(15):
        a = random_matrix(rng, 3, 6)
        b = random_matrix(rng, 3, 6)
        inter = intersect_row_spaces(a, b)
        expected = span_vectors(a) & span_vectors(b)
        assert 1 << inter.nrows == len(expected)
        for v in inter.rows:
            assert v in expected


def test_solve_row_and_span_contains():
    m = F2Matrix.from_rows([0b011, 0b110], 3)
    assert span_contains(m, 0b101)
    c = solve_row(0b101, m)
    assert c == 0b11
    assert solve_row(0b001, m) is None


def test_transpose_involution():
    rng = random.Random(29)
    m = random_matrix(rng, 4, 7)
    assert m.transpose().transpose() == m
