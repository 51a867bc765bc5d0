"""Graded spaces and maps: tensor counting, duality, twist truncation,
operator-commuting map solving."""

from krtool.a1 import std_a1
from krtool.gf2 import F2Matrix
from krtool.graded import (
    GradedMap,
    GradedSpace,
    OperatorPair,
    Window,
    dual_space,
    hom_space,
    identity_map,
    tensor,
    truncate_twist,
)


def line(window, d, name="e"):
    return GradedSpace(window, {d: [name]})


def test_tensor_unit():
    w = Window(-4, 8, -4, 4)
    a = line(w, (0, 0))
    b = GradedSpace(w, {(d, 0): [f"x{d}"] for d in range(1, 8)})
    t = tensor(a, b, w)
    assert t.dims() == b.dims()


def test_tensor_pair_counting():
    w = Window(0, 12, 0, 0)
    p = GradedSpace(w, {(d, 0): [f"x{d}"] for d in range(1, 13)})
    t = tensor(p, p, w)
    for nn in range(2, 13):
        assert t.dim((nn, 0)) == nn - 1


def test_tensor_triple_counting():
    w = Window(0, 8, 0, 0)
    p = GradedSpace(w, {(d, 0): [f"x{d}"] for d in range(1, 9)})
    t = tensor(tensor(p, p, w), p, w)
    assert t.dim((6, 0)) == 10  # compositions of 6 into three positive parts


def test_tensor_convolution_invariant():
    w = Window(-2, 6, -2, 2)
    a = GradedSpace(w, {(0, 0): ["u"], (1, 1): ["v"], (2, -1): ["w", "z"]})
    b = GradedSpace(w, {(0, 0): ["p"], (1, 0): ["q"]})
    t = tensor(a, b, w)
    for d in w.degrees():
        total = 0
        for da in a.degrees():
            db = (d[0] - da[0], d[1] - da[1])
            total += a.dim(da) * b.dim(db)
        assert t.dim(d) == total


def test_dual_space_involution_and_reversal():
    s = std_a1().space()
    d = dual_space(s)
    assert [d.dim((-i, 0)) for i in range(7)] == [1, 1, 1, 2, 1, 1, 1]
    dd = dual_space(d)
    assert dd.basis == s.basis


def test_truncate_twist():
    w = Window(-4, 4, -4, 4)
    s = GradedSpace(w, {(0, k): [f"c{k}"] for k in range(-3, 4)})
    up = truncate_twist(s, ">=", 0)
    dn = truncate_twist(s, "<=", -2)
    assert sorted(d[1] for d in up.degrees()) == [0, 1, 2, 3]
    assert sorted(d[1] for d in dn.degrees()) == [-3, -2]
    assert not (set(up.degrees()) & set(dn.degrees()))
    assert truncate_twist(up, ">=", 0).dims() == up.dims()
    assert truncate_twist(up, "<=", -2).total_dim() == 0


def test_hom_space_unconstrained_dimension():
    w = Window(0, 4, 0, 0)
    a = GradedSpace(w, {(0, 0): ["x"], (1, 0): ["y", "z"]})
    b = GradedSpace(w, {(0, 0): ["p", "q"], (1, 0): ["r"]})
    sols = hom_space(a, b, (0, 0), [], w)
    expected = a.dim((0, 0)) * b.dim((0, 0)) + a.dim((1, 0)) * b.dim((1, 0))
    assert len(sols) == expected


def test_hom_space_identity_only():
    w = Window(0, 0, 0, 0)
    a = line(w, (0, 0))
    sols = hom_space(a, a, (0, 0), [], w)
    assert len(sols) == 1
    assert sols[0].block((0, 0)).entry(0, 0) == 1


def test_hom_space_empty_target():
    w = Window(0, 2, 0, 0)
    a = line(w, (0, 0))
    b = GradedSpace(w, {})
    assert hom_space(a, b, (0, 0), [], w) == []


def test_hom_space_with_operator_constraint():
    # two-step string with a nilpotent operator: equivariance forces the
    # two diagonal entries equal, leaving only multiples of the identity
    w = Window(0, 1, 0, 0)
    s = GradedSpace(w, {(0, 0): ["u"], (1, 0): ["v"]})
    op = GradedMap(s, s, (1, 0), {(0, 0): F2Matrix.from_rows([1], 1)})
    sols = hom_space(s, s, (0, 0), [OperatorPair("N", op, op)], w)
    assert len(sols) == 1
    assert sols[0] == identity_map(s)
    free = hom_space(s, s, (0, 0), [], w)
    assert len(free) == 2
