"""Extension of scalars from Sq1/Sq2-modules to coefficient-equipped
modules over the exterior Milnor operations.

The underlying space is the coefficient ring tensored with the module;
the first differential is the coefficient differential plus Sq1, the
second follows the Cartan rule

    q1(h | x) = Q1(h) | x  +  a Q0(h) | Sq1 x  +  a h | Sq2 x  +  s h | Q1 x

with all coefficient products taken in the window model.  The positive
and negative cones never interact (the twist -1 column of the coefficient
ring is empty), which is validated rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from . import coeff as cf
from .a1 import A1Module, dual_a1, margolis
from .coeff import A, CoeffMonomial, S, multiply, q0_coeff, q1_coeff
from .emod import EModule, H01Result, h01, les_h01, LesReport
from .gf2 import F2Matrix, rank, solve
from .graded import (
    Degree,
    GradedMap,
    GradedSpace,
    Window,
    add_deg,
    sub_deg,
)


def cone_of_name(name: str) -> str:
    return "-" if name[0] in "AS" else "+"


@dataclass
class RModule:
    base: A1Module
    emod: EModule

    def space(self) -> GradedSpace:
        return self.emod.space


def required_top(w: Window) -> int:
    return w.m_hi + max(w.k_hi, 0)


def required_bottom(w: Window) -> int:
    return w.m_lo + min(w.k_lo, 0)


def _check_base_window(m: A1Module, w: Window) -> None:
    lo, hi = required_bottom(w), required_top(w)
    if m.complete_lo > lo or m.complete_hi < hi:
        raise ValueError(
            f"base module exact on [{m.complete_lo},{m.complete_hi}] but the "
            f"window requires [{lo},{hi}]; rebuild the module accordingly")


def _decompose(name: str) -> tuple[CoeffMonomial, str]:
    mono, x = name.split("|", 1)
    return CoeffMonomial.parse(mono), x


def apply_r(m: A1Module, w: Window) -> RModule:
    """Build the coefficient extension of ``m`` on the window ``w``."""
    _check_base_window(m, w)

    basis: dict[Degree, list[str]] = {}
    for mm in range(w.m_lo, w.m_hi + 1):
        for k in range(w.k_lo, w.k_hi + 1):
            for mono in cf.monomials_with_twist(k, -10 ** 9, 10 ** 9):
                xd = mm - mono.degree()[0]
                for xn in m.names(xd):
                    basis.setdefault((mm, k), []).append(f"{mono.name()}|{xn}")
    space = GradedSpace(w, basis)

    def image_bits(td: Degree, terms: list[tuple[Optional[CoeffMonomial], int, int]]
                   ) -> int:
        # terms: (monomial or None, module degree, module bits)
        bits = 0
        for mono, xd, xb in terms:
            if mono is None or xb == 0:
                continue
            names = m.names(xd)
            for i in range(len(names)):
                if (xb >> i) & 1:
                    nm = f"{mono.name()}|{names[i]}"
                    if space.has(td, nm):
                        bits ^= 1 << space.index(td, nm)
        return bits

    def build(shift: Degree, rule: Callable[[CoeffMonomial, int, int],
                                            list[tuple[Optional[CoeffMonomial], int, int]]]
              ) -> GradedMap:
        blocks: dict[Degree, F2Matrix] = {}
        for d in space.degrees():
            td = add_deg(d, shift)
            rows = []
            for name in space.names(d):
                mono, xn = _decompose(name)
                xd = d[0] - mono.degree()[0]
                xi = m.index(xd, xn)
                rows.append(image_bits(td, rule(mono, xd, 1 << xi)))
            blocks[d] = F2Matrix.from_rows(rows, space.dim(td))
        return GradedMap(space, space, shift, blocks)

    def q0_rule(mono, xd, xb):
        return [(q0_coeff(mono), xd, xb), (mono, xd + 1, m.apply_sq1(xd, xb))]

    def q1_rule(mono, xd, xb):
        q0m = q0_coeff(mono)
        return [
            (q1_coeff(mono), xd, xb),
            (multiply(A, q0m) if q0m else None, xd + 1, m.apply_sq1(xd, xb)),
            (multiply(A, mono), xd + 2, m.apply_sq2(xd, xb)),
            (multiply(S, mono), xd + 3, m.apply_q1(xd, xb)),
        ]

    def a_rule(mono, xd, xb):
        return [(multiply(A, mono), xd, xb)]

    def s_rule(mono, xd, xb):
        return [(multiply(S, mono), xd, xb)]

    em = EModule(space, build((1, 0), q0_rule), build((2, 1), q1_rule), w,
                 act_a=build((0, 1), a_rule), act_s=build((-1, 1), s_rule),
                 s_compat_cartan=True)
    return RModule(m, em)


def check_cone_separation(rm: RModule) -> bool:
    """No differential entry crosses between the two cones."""
    sp = rm.emod.space
    for mp in (rm.emod.q0, rm.emod.q1):
        for d, blk in mp.blocks.items():
            td = add_deg(d, mp.shift)
            tnames = sp.names(td)
            for i, n in enumerate(sp.names(d)):
                cone = cone_of_name(n)
                for j, tn in enumerate(tnames):
                    if blk.entry(i, j) and cone_of_name(tn) != cone:
                        return False
    return True


def restrict_by_names(em: EModule, keep: Callable[[str], bool]) -> EModule:
    """Sub- or quotient module spanned by the kept basis lines.

    Valid when the complementary lines are not linked to the kept ones by
    any stored operator (checked by the caller's context).
    """
    sp = em.space
    basis = {d: tuple(n for n in sp.names(d) if keep(n)) for d in sp.degrees()}
    new = GradedSpace(sp.window, {d: ns for d, ns in basis.items() if ns})

    def cut(mp: Optional[GradedMap]) -> Optional[GradedMap]:
        if mp is None:
            return None
        blocks: dict[Degree, F2Matrix] = {}
        for d in new.degrees():
            td = add_deg(d, mp.shift)
            blk = mp.block(d)
            rows = []
            for n in new.names(d):
                v = blk.rows[sp.index(d, n)]
                bits = 0
                for tn in new.names(td):
                    if (v >> sp.index(td, tn)) & 1:
                        bits |= 1 << new.index(td, tn)
                rows.append(bits)
            blocks[d] = F2Matrix.from_rows(rows, new.dim(td))
        return GradedMap(new, new, mp.shift, blocks)

    return EModule(new, cut(em.q0), cut(em.q1), em.complete,
                   act_a=cut(em.act_a), act_s=cut(em.act_s),
                   s_compat_cartan=em.s_compat_cartan)


def cone_part(rm: RModule, which: str) -> EModule:
    """The positive or negative cone summand."""
    sign = "+" if which in ("+", "plus") else "-"
    return restrict_by_names(rm.emod, lambda n: cone_of_name(n) == sign)


def mod_a(m: A1Module, w: Window) -> EModule:
    """The positive cone reduced modulo the Euler class.

    Carries the orientation-linear Sq1 as first differential and the
    orientation times the derived degree-3 operation as the second.
    """
    _check_base_window(m, w)
    basis: dict[Degree, list[str]] = {}
    for mm in range(w.m_lo, w.m_hi + 1):
        for k in range(max(0, w.k_lo), w.k_hi + 1):
            mono = CoeffMonomial("+", 0, k)
            for xn in m.names(mm + k):
                basis.setdefault((mm, k), []).append(f"{mono.name()}|{xn}")
    space = GradedSpace(w, basis)

    def build(shift: Degree, rule) -> GradedMap:
        blocks: dict[Degree, F2Matrix] = {}
        for d in space.degrees():
            td = add_deg(d, shift)
            rows = []
            for name in space.names(d):
                mono, xn = _decompose(name)
                xd = d[0] + mono.e2
                tm, txd, txb = rule(mono.e2, xd, 1 << m.index(xd, xn))
                bits = 0
                names = m.names(txd)
                for i in range(len(names)):
                    if (txb >> i) & 1:
                        nm = f"{CoeffMonomial('+', 0, tm).name()}|{names[i]}"
                        if space.has(td, nm):
                            bits ^= 1 << space.index(td, nm)
                rows.append(bits)
            blocks[d] = F2Matrix.from_rows(rows, space.dim(td))
        return GradedMap(space, space, shift, blocks)

    q0 = build((1, 0), lambda n, xd, xb: (n, xd + 1, m.apply_sq1(xd, xb)))
    q1 = build((2, 1), lambda n, xd, xb: (n + 1, xd + 3, m.apply_q1(xd, xb)))
    act_s = build((-1, 1), lambda n, xd, xb: (n + 1, xd, xb))
    return EModule(space, q0, q1, w, act_s=act_s)


# -- duality -----------------------------------------------------------------------

@dataclass
class PsiCertificate:
    ok: bool
    detail: str
    checked_degrees: int


def psi_duality(m: A1Module, w: Window) -> PsiCertificate:
    """Explicit isomorphism between the extension of the dual and the
    shifted dual of the extension, checked to commute with both
    differentials degreewise.

    A basis functional of the left side at degree d corresponds to the
    basis vector obtained by dualizing the coefficient monomial through
    the pairing; it sits at the reflected degree (2,-2) - d.
    """
    md = dual_a1(m)
    lhs = apply_r(md, w)
    wref = Window(2 - w.m_hi, 2 - w.m_lo, -2 - w.k_hi, -2 - w.k_lo)
    rhs = apply_r(m, wref)
    rsp = rhs.emod.space

    def reflect(d: Degree) -> Degree:
        return (2 - d[0], -2 - d[1])

    def pair_name(name: str) -> str:
        """The basis vector of the reflected extension paired with a
        left-hand basis element ``mono|x^``."""
        mono, xdual = _decompose(name)
        xplain = xdual[:-1] if xdual.endswith("^") else xdual
        return f"{cf.duality_w(mono).name()}|{xplain}"

    checked = 0
    for d in w.degrees():
        lnames = lhs.emod.space.names(d)
        rnames = rsp.names(reflect(d))
        if sorted(pair_name(n) for n in lnames) != sorted(rnames):
            return PsiCertificate(False, f"pairing bijection fails at {d}",
                                  checked)
        checked += 1

    for shift, lmap, rmap in (((1, 0), lhs.emod.q0, rhs.emod.q0),
                              ((2, 1), lhs.emod.q1, rhs.emod.q1)):
        for d in w.degrees():
            td = add_deg(d, shift)
            if not w.contains(td):
                continue
            lnames = lhs.emod.space.names(d)
            tnames = lhs.emod.space.names(td)
            for i, n in enumerate(lnames):
                v = lmap.apply(d, 1 << i)
                lhs_set = {pair_name(tn) for j, tn in enumerate(tnames)
                           if (v >> j) & 1}
                # dual differential: pi_y pulls back to pi_z over all z
                # whose differential contains y
                y = pair_name(n)
                ydeg = reflect(d)
                zdeg = sub_deg(ydeg, shift)
                blk = rmap.block(zdeg)
                yi = rsp.index(ydeg, y)
                rhs_set = {zn for zi, zn in enumerate(rsp.names(zdeg))
                           if blk.entry(zi, yi)}
                if lhs_set != rhs_set:
                    return PsiCertificate(
                        False,
                        f"commutation with shift {shift} fails at {d} on {n}",
                        checked)
    return PsiCertificate(True, "bijection commuting with both differentials "
                                f"on {checked} degrees", checked)


# -- Euler-class Bockstein ------------------------------------------------------------

@dataclass
class BocksteinD1:
    fm: EModule
    homology: H01Result
    d1: dict[Degree, F2Matrix]

    def kernel_dims(self) -> dict[Degree, int]:
        out: dict[Degree, int] = {}
        for d in self.homology.region:
            n = self.homology.dim(d)
            if n == 0:
                continue
            mat = self.d1.get(d, F2Matrix.zero(n, 0))
            out[d] = n - rank(mat)
        return {d: v for d, v in out.items() if v}

    def squares_to_zero(self) -> bool:
        for d, mat in self.d1.items():
            nxt = self.d1.get(add_deg(d, (2, 0)))
            if nxt is None:
                continue
            if not mat.mul(nxt).is_zero():
                return False
        return True


def bockstein_d1(m: A1Module, w: Window) -> BocksteinD1:
    """First differential of the Euler-class exact couple on the mod-a
    homology, computed mechanically from lifts."""
    mg = margolis(m, "q0")
    if mg:
        raise ValueError(f"base module is not q0-acyclic (witness {min(mg)})")
    # the quotient vanishes in negative twists; extend the window so the
    # homology region reaches twist zero
    w = Window(w.m_lo, w.m_hi, min(w.k_lo, -2), w.k_hi)
    rm = apply_r(m, w)
    rplus = cone_part(rm, "+")
    fm = mod_a(m, w)
    hom = h01(fm)
    d1: dict[Degree, F2Matrix] = {}
    for d in hom.region:
        reps = hom.sub.reps(d)
        if reps.nrows == 0:
            continue
        td = add_deg(d, (2, 0))
        if td not in hom.region:
            continue
        rows = []
        ok = True
        for v in reps.rows:
            # lift to the positive cone by the identity on monomial lines
            lift = 0
            for i, name in enumerate(fm.space.names(d)):
                if (v >> i) & 1:
                    lift ^= 1 << rplus.space.index(d, name)
            q1l = rplus.q1.apply(d, lift)
            # divide by the Euler class
            ad = add_deg(d, (2, 0))
            ablk = rplus.act_a.block(ad)
            u = solve(ablk.transpose(), q1l) if q1l else 0
            if u is None:
                ok = False
                break
            # reduce modulo the Euler class: keep exponent-zero lines
            proj = 0
            for i, name in enumerate(rplus.space.names(ad)):
                if (u >> i) & 1:
                    mono, _ = _decompose(name)
                    if mono.e1 == 0:
                        if fm.space.has(ad, name):
                            proj ^= 1 << fm.space.index(ad, name)
            c = hom.sub.express(td, proj)
            if c is None:
                ok = False
                break
            rows.append(c)
        if ok and rows:
            d1[d] = F2Matrix.from_rows(rows, hom.sub.dim(td))
    return BocksteinD1(fm, hom, d1)


# -- short exact sequences through the extension --------------------------------------

@dataclass
class A1Map:
    source: A1Module
    target: A1Module
    blocks: dict[int, F2Matrix]

    def block(self, d: int) -> F2Matrix:
        return self.blocks.get(d) or F2Matrix.zero(self.source.dim(d),
                                                   self.target.dim(d))

    def apply(self, d: int, bits: int) -> int:
        return self.block(d).vec_mul(bits)

    def commutes(self) -> bool:
        s, t = self.source, self.target
        lo = max(s.complete_lo, t.complete_lo)
        hi = min(s.complete_hi, t.complete_hi)
        for d in s.degrees():
            for reach in (1, 2):
                if d < lo or d + reach > hi:
                    continue
                for i in range(s.dim(d)):
                    img = (s.apply_sq1(d, 1 << i) if reach == 1
                           else s.apply_sq2(d, 1 << i))
                    lhs = self.apply(d + reach, img)
                    v = self.apply(d, 1 << i)
                    rhs = (t.apply_sq1(d, v) if reach == 1
                           else t.apply_sq2(d, v))
                    if lhs != rhs:
                        return False
        return True


def lift_map(f: A1Map, src: RModule, dst: RModule) -> GradedMap:
    """The extension applied to a degree-zero module map."""
    ssp, tsp = src.emod.space, dst.emod.space
    blocks: dict[Degree, F2Matrix] = {}
    for d in ssp.degrees():
        rows = []
        for name in ssp.names(d):
            mono, xn = _decompose(name)
            xd = d[0] - mono.degree()[0]
            img = f.apply(xd, 1 << f.source.index(xd, xn))
            bits = 0
            for i, tn in enumerate(f.target.names(xd)):
                if (img >> i) & 1:
                    nm = f"{mono.name()}|{tn}"
                    if tsp.has(d, nm):
                        bits ^= 1 << tsp.index(d, nm)
            rows.append(bits)
        blocks[d] = F2Matrix.from_rows(rows, tsp.dim(d))
    return GradedMap(ssp, tsp, (0, 0), blocks)


@dataclass
class SecRResult:
    ok: bool
    detail: str
    les: Optional[LesReport]


def check_sec_r(f: A1Map, g: A1Map, w: Window,
                les_region: Optional[Window] = None) -> SecRResult:
    """Verify a short exact sequence of base modules split over the first
    exterior factor, extend it, and certify the induced long exact
    sequence degreewise."""
    a, b, c = f.source, f.target, g.target
    if g.source is not b:
        return SecRResult(False, "maps not composable", None)
    if not (f.commutes() and g.commutes()):
        return SecRResult(False, "maps do not commute with the operations", None)
    lo = max(a.complete_lo, b.complete_lo, c.complete_lo)
    hi = min(a.complete_hi, b.complete_hi, c.complete_hi)
    for d in range(lo, hi + 1):
        fa, gb = f.block(d), g.block(d)
        if rank(fa) != a.dim(d) or rank(gb) != c.dim(d) \
                or rank(fa) + rank(gb) != b.dim(d):
            return SecRResult(False, f"not short exact at degree {d}", None)

    # splitness over the first factor: the quotient must be q0-free
    mg = margolis(c, "q0")
    if mg:
        split = _sq1_section(f, g)
        if split is None:
            return SecRResult(
                False, f"quotient not q0-acyclic (witness {min(mg)}) and no "
                       "sq1-linear section exists", None)

    ra, rb, rc = apply_r(a, w), apply_r(b, w), apply_r(c, w)
    rf, rg = lift_map(f, ra, rb), lift_map(g, rb, rc)
    region = les_region or w.shrink(2, 2, 1, 1)
    if region is None:
        return SecRResult(False, "window too small for the sequence check", None)
    rep = les_h01(ra.emod, rb.emod, rc.emod, rf, rg, region)
    return SecRResult(rep.ok, rep.detail, rep)


def _sq1_section(f: A1Map, g: A1Map) -> Optional[dict[int, F2Matrix]]:
    """Section of ``g`` commuting with Sq1, by linear solving."""
    b, c = g.source, g.target
    lo = max(b.complete_lo, c.complete_lo)
    hi = min(b.complete_hi, c.complete_hi)
    degrees = [d for d in c.degrees() if lo <= d <= hi]
    offsets: dict[int, int] = {}
    nvars = 0
    for d in degrees:
        offsets[d] = nvars
        nvars += c.dim(d) * b.dim(d)

    def var(d: int, i: int, j: int) -> int:
        return offsets[d] + i * b.dim(d) + j

    eqs: list[int] = []
    rhs = 0

    def push(row: int, r: int) -> None:
        nonlocal rhs
        if row or r:
            if r:
                rhs |= 1 << len(eqs)
            eqs.append(row)

    for d in degrees:
        gb = g.block(d)
        for i in range(c.dim(d)):
            for j in range(c.dim(d)):
                row = 0
                for p in range(b.dim(d)):
                    if gb.entry(p, j):
                        row ^= 1 << var(d, i, p)
                push(row, 1 if i == j else 0)
        if d + 1 in offsets:
            for i in range(c.dim(d)):
                for j in range(b.dim(d + 1)):
                    row = 0
                    csq = c.sq1_block(d)
                    for p in range(c.dim(d + 1)):
                        if csq.entry(i, p):
                            row ^= 1 << var(d + 1, p, j)
                    bsq = b.sq1_block(d)
                    for q in range(b.dim(d)):
                        if bsq.entry(q, j):
                            row ^= 1 << var(d, i, q)
                    push(row, 0)
    if nvars == 0:
        return {}
    sol = solve(F2Matrix.from_rows(eqs, nvars), rhs)
    if sol is None:
        return None
    out = {}
    for d in degrees:
        rows = []
        for i in range(c.dim(d)):
            bits = 0
            for j in range(b.dim(d)):
                if (sol >> var(d, i, j)) & 1:
                    bits |= 1 << j
            rows.append(bits)
        out[d] = F2Matrix.from_rows(rows, b.dim(d))
    return out
