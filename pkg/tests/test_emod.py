"""Relative homological algebra over the exterior pair."""

from krtool.a1 import std_a1, std_f, std_p, std_pn, proj_cover_and_loop
from krtool.emod import (
    EModule,
    _lambda1_tensor,
    dual_e,
    h01,
    h01_dual_dims,
    is_rel_projective,
    les_h01,
    rel_ext,
    rel_ext_tate,
    tate_complex,
    tate_exactness_report,
    validate,
)
from krtool.gf2 import F2Matrix
from krtool.graded import GradedMap, GradedSpace, Window, zero_map
from krtool.rfun import A1Map, apply_r, check_sec_r


def trivial_emodule(w):
    s = GradedSpace(w, {(0, 0): ["i"]})
    return EModule(s, zero_map(s, s, (1, 0)), zero_map(s, s, (2, 1)), w)


def free_e(w):
    """Free rank-one module over the exterior pair: 1, q0, q1, q0q1."""
    s = GradedSpace(w, {(0, 0): ["1"], (1, 0): ["q0"],
                        (2, 1): ["q1"], (3, 1): ["q0q1"]})

    def mk(shift, images):
        blocks = {}
        for d in s.degrees():
            td = (d[0] + shift[0], d[1] + shift[1])
            rows = []
            for n in s.names(d):
                bits = 0
                for t in images.get(n, ()):
                    if s.has(td, t):
                        bits |= 1 << s.index(td, t)
                rows.append(bits)
            blocks[d] = F2Matrix.from_rows(rows, s.dim(td))
        return GradedMap(s, s, shift, blocks)

    q0 = mk((1, 0), {"1": ("q0",), "q1": ("q0q1",)})
    q1 = mk((2, 1), {"1": ("q1",), "q0": ("q0q1",)})
    return EModule(s, q0, q1, w)


def test_free_module_h01_vanishes():
    w = Window(-4, 6, -3, 3)
    e = free_e(w)
    assert validate(e) == []
    assert h01(e).dims() == {}


def test_trivial_module_h01():
    w = Window(-4, 4, -3, 3)
    f = trivial_emodule(w)
    assert h01(f).dims() == {(0, 0): 1}


def test_rel_projective_yes_no():
    w = Window(-4, 6, -3, 3)
    assert is_rel_projective(free_e(w)) == (True, None)
    ok, witness = is_rel_projective(trivial_emodule(w))
    assert not ok and witness == (0, 0)


def test_lambda1_tensor_is_projective():
    w = Window(-6, 8, -3, 4)
    rm = apply_r(std_pn(1, 0, 14), w)
    lam = _lambda1_tensor(rm.emod, (0, 0), 0)
    ok, _ = is_rel_projective(lam)
    assert ok
    assert h01(lam).dims() == {}  # relative projectives are acyclic


def test_tate_complex_of_trivial_module():
    w = Window(-8, 8, -4, 4)
    f = trivial_emodule(w)
    t = tate_complex(f, -2, 2)
    for i, term in t.terms.items():
        ok, _ = is_rel_projective(term)
        assert ok, f"term {i}"
    inner = Window(-4, 4, -2, 2)
    assert tate_exactness_report(t, inner) == []


def test_rel_ext_of_trivial_module():
    w = Window(-6, 8, -3, 4)
    f = trivial_emodule(w)
    assert rel_ext(f, 0) == {(0, 0): 1}
    assert rel_ext(f, 1) == {(2, 1): 1}
    assert rel_ext(f, 2) == {(4, 2): 1}
    assert rel_ext_tate(f, 1) == {(2, 1): 1}
    assert rel_ext_tate(f, 2) == {(4, 2): 1}


def test_rel_ext_tate_matches_shifted_h01():
    w = Window(-10, 10, -5, 5)
    for base in (std_pn(0, -11, 16), std_a1()):
        m = apply_r(base, w).emod
        for n in (1, 2):
            direct = rel_ext(m, n)
            indep = rel_ext_tate(m, n)
            common = [d for d in direct
                      if w.shrink(4, 4, 2, 2) and w.shrink(4, 4, 2, 2).contains(d)]
            for d in common:
                assert direct.get(d, 0) == indep.get(d, 0), (n, d)


def test_rel_ext_recursion():
    w = Window(-10, 10, -5, 5)
    m = apply_r(std_pn(0, -11, 16), w).emod
    r1, r2, r3 = rel_ext(m, 1), rel_ext(m, 2), rel_ext(m, 3)
    for d, v in r1.items():
        assert r2.get((d[0] + 2, d[1] + 1), 0) == v
    for d, v in r2.items():
        assert r3.get((d[0] + 2, d[1] + 1), 0) == v


def test_rel_ext_zero_slot_is_kernel_intersection():
    w = Window(-8, 8, -4, 4)
    m = apply_r(std_f(), w).emod
    kk = rel_ext(m, 0)
    assert kk.get((0, 0), 0) == 1


def test_h01_additive():
    from krtool.a1 import direct_sum_a1
    w = Window(-8, 8, -4, 4)
    a = std_pn(1, 0, 14)
    b = std_pn(2, 0, 14)
    s = direct_sum_a1([a, b], ["u.", "v."])
    hs = h01(apply_r(s, w).emod).dims()
    ha = h01(apply_r(a, w).emod).dims()
    hb = h01(apply_r(b, w).emod).dims()
    for d in set(hs) | set(ha) | set(hb):
        assert hs.get(d, 0) == ha.get(d, 0) + hb.get(d, 0)


def test_h01_dual_relation_for_acyclic_module():
    # for modules with vanishing first-differential homology the
    # coinvariants homology is a single suspension away
    w = Window(-9, 9, -4, 4)
    m = apply_r(std_p(1, 14), w).emod
    hd = h01_dual_dims(m)
    hh = h01(m).dims()
    inner = Window(-5, 5, -2, 2)
    for d in inner.degrees():
        assert hh.get(d, 0) == hd.get((d[0] - 1, d[1]), 0), d


def test_les_h01_cover_sequence():
    p1 = std_p(1, 20)
    res = proj_cover_and_loop(p1)
    f = A1Map(res.loop, res.cover, res.loop_rows)
    g = A1Map(res.cover, p1, res.epi_blocks)
    w = Window(-8, 10, -4, 4)
    out = check_sec_r(f, g, w)
    assert out.ok, out.detail
    assert out.les is not None and out.les.slots_checked > 0


def test_les_h01_split_sequence():
    from krtool.a1 import direct_sum_a1
    a = std_pn(1, 0, 14)
    b = std_pn(2, 0, 14)
    s = direct_sum_a1([a, b], ["u.", "v."])
    fb: dict[int, F2Matrix] = {}
    gb: dict[int, F2Matrix] = {}
    for d in s.degrees():
        rows_f = []
        for n in a.names(d):
            rows_f.append(1 << s.index(d, "u." + n))
        fb[d] = F2Matrix.from_rows(rows_f, s.dim(d))
        rows_g = []
        for n in s.names(d):
            if n.startswith("v."):
                rows_g.append(1 << b.index(d, n[2:]))
            else:
                rows_g.append(0)
        gb[d] = F2Matrix.from_rows(rows_g, b.dim(d))
    f = A1Map(a, s, fb)
    g = A1Map(s, b, gb)
    out = check_sec_r(f, g, Window(-8, 10, -4, 4))
    assert out.ok, out.detail


def test_sec_r_rejects_non_split():
    # the nontrivial extension of the trivial module by its suspension
    # is not split over the first generator
    lam0 = std_a1()  # stand-in construction below uses a two-class module
    from krtool.a1 import A1Module
    basis = {0: ("u",), 1: ("v",)}
    sq1 = {0: F2Matrix.from_rows([1], 1)}
    lam = A1Module(basis, sq1, {}, 0, 1, -10 ** 6, 10 ** 6)
    top = std_f(1)
    bottom = std_f(0)
    fb = {0: F2Matrix.from_rows([1], 1)}
    gb = {0: F2Matrix.from_rows([0], 1), 1: F2Matrix.from_rows([1], 1)}
    f = A1Map(bottom, lam, fb)
    g = A1Map(lam, top, gb)
    out = check_sec_r(f, g, Window(-6, 6, -3, 3))
    assert not out.ok


def test_les_trivial_shapes():
    # identical ends with zero quotient: every connecting map vanishes
    w = Window(-6, 8, -3, 3)
    rm = apply_r(std_pn(1, 0, 14), w).emod
    empty = EModule(GradedSpace(w, {}),
                    zero_map(GradedSpace(w, {}), GradedSpace(w, {}), (1, 0)),
                    zero_map(GradedSpace(w, {}), GradedSpace(w, {}), (2, 1)), w)
    from krtool.graded import identity_map
    out = les_h01(rm, rm, empty, identity_map(rm.space),
                  zero_map(rm.space, empty.space, (0, 0)),
                  Window(-4, 4, -2, 2))
    assert out.ok, out.detail


def test_tate_slot_zero_is_unshifted_homology():
    w = Window(-10, 10, -5, 5)
    m = apply_r(std_p(1, 16), w).emod
    slot0 = rel_ext_tate(m, 0)
    hom = h01(m).dims()
    inner = Window(-5, 5, -2, 2)
    for d in inner.degrees():
        assert slot0.get(d, 0) == hom.get(d, 0), d


def test_dual_e_validates():
    w = Window(-8, 8, -4, 4)
    m = apply_r(std_pn(1, 0, 14), w).emod
    d = dual_e(m)
    assert validate(d) == []
