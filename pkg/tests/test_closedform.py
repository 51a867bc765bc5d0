"""Closed-form dimension models against the socle and loop oracles."""

from math import comb

from krtool.a1 import loop_power, socle_dims, std_pn
from krtool.closedform import (
    borel_hv_closed,
    borel_pn_dim,
    h01_pn_closed,
    h01_pn_dim,
    hp_dim,
    hv_closed_dims,
    sigma4_shift_bijective,
    soc_has,
)
from krtool.graded import Window


def test_soc_patterns_match_module_tables():
    for n in range(0, 5):
        table = socle_dims(std_pn(n, -2, 30))
        for d in range(-1, 22):
            assert (table.get(d, 0) == 1) == soc_has(n, d), (n, d)


def test_soc_periodicity():
    for n in range(-6, 7):
        for d in range(-20, 21):
            assert soc_has(n, d) == soc_has(n + 4, d + 8)


def test_hp_dim_examples():
    assert hp_dim((0, 0)) == 1
    assert hp_dim((8, 0)) == 1
    assert hp_dim((1, 1)) == 1
    assert hp_dim((0, 1)) == 1      # the Euler class line
    # the naive monomial reading would also place a class here; the
    # brute-force comparison rules it out
    assert hp_dim((4, 1)) == 0
    assert hp_dim((-1, 3)) == 1     # the orientation-twisted Euler class


def test_h01_pn_twist_zero_is_socle():
    for n in range(0, 5):
        for m in range(-2, 20):
            assert h01_pn_dim(n, (m, 0)) == (1 if soc_has(n, m) else 0)


def test_h01_pn_minus_one_twist_empty():
    for n in range(0, 5):
        for m in range(-16, 17):
            assert h01_pn_dim(n, (m, -1)) == 0


def test_h01_pn_positive_twist_is_loop_socle():
    # twist t slice equals the socle of the t-fold inverse loop, shifted
    n = 0
    base = std_pn(0, -2, 30)
    for t in (1, 2):
        looped = loop_power(base, -t)
        soc = socle_dims(looped)
        for m in range(-6, 12):
            expect = soc.get(m - 2 * t, 0)
            assert h01_pn_dim(n, (m, t)) == expect, (t, m)


def test_h01_pn_closed_space():
    w = Window(-10, 10, -5, 5)
    sp = h01_pn_closed(1, w)
    assert sp.dims() == {d: 1 for d in w.degrees() if h01_pn_dim(1, d)}


def test_truncation_complementarity():
    w = Window(-12, 12, -6, 6)
    for n in range(0, 4):
        for d in w.degrees():
            # positive and negative parts never meet: twist -1 separates
            if d[1] >= 0:
                assert h01_pn_dim(n, d) == borel_pn_dim(n, d)


def test_hv_closed_binomials():
    w = Window(-8, 8, -4, 4)
    for n in (1, 2, 3):
        dims = hv_closed_dims(n, w)
        for d in w.degrees():
            expect = sum(comb(n, i) * h01_pn_dim(i, d) for i in range(1, n + 1))
            assert dims.get(d, 0) == expect


def test_borel_periodicity():
    w = Window(-12, 12, -8, 8)
    b = borel_hv_closed(2, w)
    assert sigma4_shift_bijective(b.dims(), w)


def test_borel_matches_truncation_on_positive_twists():
    w = Window(-10, 10, 0, 6)
    for n in range(1, 4):
        for d in w.degrees():
            assert borel_pn_dim(n, d) == h01_pn_dim(n, d)


def test_borel_euler_action_squares_and_heights():
    w = Window(-12, 12, -6, 6)
    b = borel_hv_closed(1, w)
    a3 = b.act_a.compose(b.act_a).compose(b.act_a)
    assert a3.is_zero()
    a2 = b.act_a.compose(b.act_a)
    assert not a2.is_zero()


def test_borel_euler_action_per_class_model():
    # injective on tower classes below the top, zero on the lattice
    w = Window(-12, 12, -6, 6)
    b = borel_hv_closed(2, w)
    inner = Window(-8, 8, -4, 4)
    for d in b.space.degrees():
        if not inner.contains(d):
            continue
        blk = b.act_a.block(d)
        for i, name in enumerate(b.space.names(d)):
            row = blk.rows[i] if blk.nrows else 0
            kind = name.split(":", 1)[1][0]
            if kind == "v" or ":e2" in name:
                assert row == 0, name
            else:
                assert row != 0, name
