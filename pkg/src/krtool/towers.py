"""Finite-data towers and the height detection framework.

A tower is a ladder of graded spaces with structure maps down the ladder,
compatible maps to a colimit space, and per-level cofiber data forming
long exact sequences.  Detection of height ``h`` at a level asks that the
kernel of the colimit comparison inject into the cokernel of ``h``
consecutive structure maps; for the multiplication-by-x towers built here
this is equivalent to all torsion orders being at most ``h``, which the
randomized tests exploit as an independent oracle.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .gf2 import (
    F2Matrix,
    intersect_row_spaces,
    rank,
    solve_row,
)
from .graded import (
    Degree,
    GradedMap,
    GradedSpace,
    Subquotient,
    Window,
    add_deg,
)


@dataclass
class TowerLevel:
    space: GradedSpace                 # k_n
    layer: GradedSpace                 # C_n
    e: Optional[GradedMap]            # k_n -> k_{n-1}
    f: GradedMap                      # k_n -> K
    c: GradedMap                      # k_n -> C_n
    delta: Optional[GradedMap]        # C_n -> k_{n+1}, degree (1,0)


@dataclass
class TowerData:
    levels: dict[int, TowerLevel]
    colimit: GradedSpace
    level_lo: int
    level_hi: int
    region: Window                     # degrees where the data is complete

    def level(self, n: int) -> TowerLevel:
        return self.levels[n]

    def theta(self, n: int) -> Optional[GradedMap]:
        """Composite of the boundary with the next projection; degree (1,0)."""
        if n + 1 > self.level_hi:
            return None
        dn = self.levels[n].delta
        if dn is None:
            return None
        return dn.compose(self.levels[n + 1].c)

    def boundary_levels(self) -> tuple[int, int]:
        """The two edge levels, where only partial checks are possible."""
        return (self.level_lo, self.level_hi)


@dataclass
class TowerWitness:
    level: int
    degree: Degree
    relation: str

    def __str__(self) -> str:
        return f"level {self.level} degree {self.degree}: {self.relation}"


def validate_tower(t: TowerData) -> list[TowerWitness]:
    """Check the tower identity and the three exactness statements."""
    out: list[TowerWitness] = []
    for n in range(t.level_lo + 1, t.level_hi + 1):
        lev, prev = t.levels[n], t.levels[n - 1]
        for d in t.region.degrees():
            lhs = lev.e.compose(prev.f).block(d)
            rhs = lev.f.block(d)
            if lhs != rhs:
                out.append(TowerWitness(n, d, "colimit maps do not commute"))
                break
    for n in range(t.level_lo, t.level_hi):
        lev, above = t.levels[n], t.levels[n + 1]
        for d in t.region.degrees():
            if not t.region.contains(add_deg(d, (1, 0))):
                continue
            # exactness at k_n: image of e_{n+1} = kernel of c_n
            img = above.e.image_at(d)
            ker = lev.c.kernel_at(d)
            if rank(img) != ker.nrows or not all(
                    solve_row(v, ker) is not None for v in img.rows):
                out.append(TowerWitness(n, d, "not exact at the level space"))
                break
            # exactness at C_n: image of c_n = kernel of delta_n
            img_c = lev.c.image_at(d)
            ker_d = lev.delta.kernel_at(d)
            if rank(img_c) != ker_d.nrows or not all(
                    solve_row(v, ker_d) is not None for v in img_c.rows):
                out.append(TowerWitness(n, d, "not exact at the layer"))
                break
            # exactness at k_{n+1}: image of delta_n = kernel of e_{n+1}
            dd = add_deg(d, (1, 0))
            img_d = lev.delta.image_at(dd)
            ker_e = above.e.kernel_at(dd)
            if rank(img_d) != ker_e.nrows or not all(
                    solve_row(v, ker_e) is not None for v in img_d.rows):
                out.append(TowerWitness(n, d, "not exact at the next level"))
                break
    return out


@dataclass
class Filtration:
    t_n: dict[Degree, F2Matrix]
    ker_e: dict[Degree, F2Matrix]
    f0: dict[Degree, F2Matrix]
    f1: Subquotient
    f2: Subquotient

    def dims(self, which: str) -> dict[Degree, int]:
        if which == "T":
            return {d: m.nrows for d, m in self.t_n.items() if m.nrows}
        if which == "F0":
            return {d: m.nrows for d, m in self.f0.items() if m.nrows}
        if which == "F1":
            return self.f1.dims()
        if which == "F2":
            return self.f2.dims()
        raise ValueError(which)


def filtration(t: TowerData, n: int) -> Filtration:
    """Colimit kernel and its three-step filtration at level ``n``."""
    if not (t.level_lo + 1 <= n <= t.level_hi - 1):
        raise ValueError(f"level {n} lacks neighbors in [{t.level_lo},{t.level_hi}]")
    lev = t.levels[n]
    above = t.levels[n + 1]
    t_n: dict[Degree, F2Matrix] = {}
    ker_e: dict[Degree, F2Matrix] = {}
    f0: dict[Degree, F2Matrix] = {}
    for d in t.region.degrees():
        tn = lev.f.kernel_at(d)
        ke = lev.e.kernel_at(d)
        ime = above.e.image_at(d)
        t_n[d] = tn
        ker_e[d] = ke
        f0[d] = intersect_row_spaces(ke, ime)
    amb = lev.space
    f1 = Subquotient(amb, ker_e, f0)
    f2 = Subquotient(amb, t_n, ker_e)
    return Filtration(t_n, ker_e, f0, f1, f2)


@dataclass
class DetectReport:
    holds: bool
    height: int
    level: int
    witness: Optional[Degree]


def detect(t: TowerData, h: int, n: int) -> DetectReport:
    """Injectivity of the colimit kernel into the h-fold cokernel."""
    if not (t.level_lo + 1 <= n and n + h <= t.level_hi):
        raise ValueError("level out of range for this height")
    lev = t.levels[n]
    for d in t.region.degrees():
        tn = lev.f.kernel_at(d)
        if tn.nrows == 0:
            continue
        comp = t.levels[n + h].e
        for step in range(h - 1, 0, -1):
            comp = comp.compose(t.levels[n + step].e)
        img = comp.image_at(d)
        inter = intersect_row_spaces(tn, img)
        if inter.nrows:
            return DetectReport(False, h, n, d)
    return DetectReport(True, h, n, None)


def iota_injective(t: TowerData, n: int) -> bool:
    """The canonical map of the bottom filtration step into the next
    level's top quotient is injective (dimension check)."""
    fil_n = filtration(t, n)
    fil_n1 = filtration(t, n + 1)
    for d in t.region.degrees():
        # iota sends F0_n into F2_{n+1} by choosing a preimage along e_{n+1}
        src = fil_n.f0[d]
        if src.nrows == 0:
            continue
        e = t.levels[n + 1].e
        rows = []
        for v in src.rows:
            pre = _preimage(e, d, v)
            if pre is None:
                return False
            cexp = fil_n1.f2.express(d, pre)
            if cexp is None:
                return False
            rows.append(cexp)
        mat = F2Matrix.from_rows(rows, fil_n1.f2.dim(d))
        if rank(mat) != src.nrows:
            return False
    return True


def _preimage(mp: GradedMap, d: Degree, v: int) -> Optional[int]:
    blk = mp.block(d)
    return solve_row(v, blk) if blk.nrows else (0 if v == 0 else None)


@dataclass
class ChainComplexReport:
    ok: bool
    detail: str
    homology_dims: dict[Degree, int]
    phi_quotient_dims: dict[Degree, int]
    first_injective: bool = True
    second_surjective: bool = True


def chain_complex_at(t: TowerData, n: int) -> ChainComplexReport:
    """The two-step complex through the layer homology at level ``n`` and
    the certified isomorphism of its middle homology with the colimit
    filtration quotient."""
    if not (t.level_lo + 1 <= n - 1 and n + 2 <= t.level_hi):
        raise ValueError("levels out of range for the chain complex")
    lev = t.levels[n]
    th_n = t.theta(n)
    th_prev = t.theta(n - 1)
    fil = filtration(t, n)
    fil_next = filtration(t, n + 1)

    mid_num: dict[Degree, F2Matrix] = {}
    mid_den: dict[Degree, F2Matrix] = {}
    for d in t.region.degrees():
        mid_num[d] = th_n.kernel_at(d)
        mid_den[d] = th_prev.image_at(d)
    middle = Subquotient(lev.layer, mid_num, mid_den)

    hom_dims: dict[Degree, int] = {}
    phi_dims: dict[Degree, int] = {}
    detail = []
    ok = True
    injective = True
    surjective = True
    for d in t.region.degrees():
        if not t.region.contains(add_deg(d, (1, 0))):
            continue
        # first map: F2 reps through the projection c_n
        f2_reps = fil.f2.reps(d)
        rows = []
        good = True
        for v in f2_reps.rows:
            cv = lev.c.apply(d, v)
            cexp = middle.express(d, cv)
            if cexp is None:
                good = False
                break
            rows.append(cexp)
        if not good:
            ok = False
            detail.append(f"projection does not land in the middle at {d}")
            continue
        cbar = F2Matrix.from_rows(rows, middle.dim(d))
        if rank(cbar) != f2_reps.nrows:
            # happens only when detection of height two fails
            injective = False
        # second map: middle reps through the boundary into F0_{n+1}
        mid_reps = middle.reps(d)
        dd = add_deg(d, (1, 0))
        f0_next = Subquotient(t.levels[n + 1].space, fil_next.f0, {})
        rows2 = []
        for v in mid_reps.rows:
            dv = lev.delta.apply(d, v)
            cexp = f0_next.express(dd, dv)
            if cexp is None:
                rows2 = None
                break
            rows2.append(cexp)
        if rows2 is None:
            ok = False
            detail.append(f"boundary does not land in the bottom step at {d}")
            continue
        dbar = F2Matrix.from_rows(rows2, f0_next.dim(dd))
        if rank(dbar) != f0_next.dim(dd):
            surjective = False
            ok = False
            detail.append(f"second map not surjective at {d}")
        # composite zero
        if not cbar.mul(dbar).is_zero():
            ok = False
            detail.append(f"composite nonzero at {d}")
        hom = (mid_reps.nrows - rank(dbar)) - rank(cbar)
        if hom:
            hom_dims[d] = hom
        # independent side: image filtration of the colimit comparison
        phi_n = lev.f.image_at(d)
        phi_n1 = t.levels[n + 1].f.image_at(d)
        q = rank(phi_n) - rank(phi_n1)
        if q:
            phi_dims[d] = q
        if hom != q:
            ok = False
            detail.append(f"homology {hom} != filtration quotient {q} at {d}")
    return ChainComplexReport(ok, "; ".join(detail) or "certified",
                              hom_dims, phi_dims, injective, surjective)


# -- synthetic multiplication towers ------------------------------------------

@dataclass(frozen=True)
class Summand:
    kind: str          # "cyclic" or "free"
    shift: int
    order: int = 0     # torsion order for cyclic summands

    def __post_init__(self) -> None:
        if self.kind not in ("cyclic", "free"):
            raise ValueError("summand kind must be cyclic or free")
        if self.kind == "cyclic" and self.order < 1:
            raise ValueError("cyclic summand needs a positive order")


@dataclass(frozen=True)
class XTowerSpec:
    xdeg: int
    summands: tuple[Summand, ...]

    def max_order(self) -> int:
        orders = [s.order for s in self.summands if s.kind == "cyclic"]
        return max(orders) if orders else 0


def _module_names(spec: XTowerSpec, mdeg: int) -> list[str]:
    out = []
    for i, s in enumerate(spec.summands):
        if (mdeg - s.shift) % spec.xdeg:
            continue
        j = (mdeg - s.shift) // spec.xdeg
        if j < 0:
            continue
        if s.kind == "cyclic" and j >= s.order:
            continue
        out.append(f"{'t' if s.kind == 'cyclic' else 'f'}{i}p{j}")
    return sorted(out)


def _x_image(spec: XTowerSpec, name: str) -> Optional[str]:
    i = int(name[1:name.index("p")])
    j = int(name[name.index("p") + 1:])
    s = spec.summands[i]
    if s.kind == "cyclic" and j + 1 >= s.order:
        return None
    return f"{name[0]}{i}p{j + 1}"


def build_x_tower(spec: XTowerSpec, window: Window,
                  level_lo: int, level_hi: int) -> TowerData:
    """The multiplication tower of a graded module over one variable."""
    d = spec.xdeg
    if window.k_lo != 0 or window.k_hi != 0:
        raise ValueError("multiplication towers are singly graded")

    def level_space(n: int) -> GradedSpace:
        basis = {}
        for m in range(window.m_lo, window.m_hi + 1):
            names = [f"L{n}.{x}" for x in _module_names(spec, m - n * d)]
            if names:
                basis[(m, 0)] = names
        return GradedSpace(window, basis)

    colim_basis: dict[Degree, list[str]] = {}
    for m in range(window.m_lo, window.m_hi + 1):
        names = []
        for i, s in enumerate(spec.summands):
            if s.kind == "free" and (m - s.shift) % d == 0:
                names.append(f"K.f{i}p{(m - s.shift) // d}")
        if names:
            colim_basis[(m, 0)] = names
    colim = GradedSpace(window, colim_basis)

    spaces = {n: level_space(n) for n in range(level_lo, level_hi + 1)}

    def layer_space(n: int) -> GradedSpace:
        basis: dict[Degree, list[str]] = {}
        for i, s in enumerate(spec.summands):
            gdeg = s.shift + n * d
            if window.m_lo <= gdeg <= window.m_hi:
                tag = "t" if s.kind == "cyclic" else "f"
                basis.setdefault((gdeg, 0), []).append(f"C{n}.q.{tag}{i}p0")
            if s.kind == "cyclic":
                tdeg = s.shift + (s.order - 1) * d + (n + 1) * d - 1
                if window.m_lo <= tdeg <= window.m_hi:
                    basis.setdefault((tdeg, 0), []).append(
                        f"C{n}.g.t{i}p{s.order - 1}")
        return GradedSpace(window, basis)

    layers = {n: layer_space(n) for n in range(level_lo, level_hi + 1)}

    def name_map(src: GradedSpace, tgt: GradedSpace, shift: Degree, fn) -> GradedMap:
        blocks: dict[Degree, F2Matrix] = {}
        for dg in src.degrees():
            td = add_deg(dg, shift)
            rows = []
            for nm in src.names(dg):
                out = fn(dg, nm)
                bits = 0
                if out is not None and tgt.has(td, out):
                    bits = 1 << tgt.index(td, out)
                rows.append(bits)
            blocks[dg] = F2Matrix.from_rows(rows, tgt.dim(td))
        return GradedMap(src, tgt, shift, blocks)

    levels: dict[int, TowerLevel] = {}
    for n in range(level_lo, level_hi + 1):
        sp = spaces[n]

        def e_fn(dg: Degree, nm: str, n=n) -> Optional[str]:
            img = _x_image(spec, nm.split(".", 1)[1])
            return f"L{n - 1}.{img}" if img else None

        def f_fn(dg: Degree, nm: str, n=n) -> Optional[str]:
            base = nm.split(".", 1)[1]
            if base[0] != "f":
                return None
            i = int(base[1:base.index("p")])
            j = int(base[base.index("p") + 1:])
            return f"K.f{i}p{j + n}"

        def c_fn(dg: Degree, nm: str, n=n) -> Optional[str]:
            base = nm.split(".", 1)[1]
            j = int(base[base.index("p") + 1:])
            return f"C{n}.q.{base}" if j == 0 else None

        def delta_fn(dg: Degree, nm: str, n=n) -> Optional[str]:
            kind, base = nm.split(".", 2)[1:]
            return f"L{n + 1}.{base}" if kind == "g" else None

        e = name_map(sp, spaces[n - 1], (0, 0), e_fn) if n - 1 >= level_lo else None
        f = name_map(sp, colim, (0, 0), f_fn)
        c = name_map(sp, layers[n], (0, 0), c_fn)
        delta = (name_map(layers[n], spaces[n + 1], (1, 0), delta_fn)
                 if n + 1 <= level_hi else None)
        levels[n] = TowerLevel(sp, layers[n], e, f, c, delta)

    return TowerData(levels, colim, level_lo, level_hi, window)


def random_x_tower_spec(rng: random.Random, max_summands: int = 4,
                        max_order: int = 3) -> XTowerSpec:
    n = rng.randint(1, max_summands)
    summands = []
    for _ in range(n):
        if rng.random() < 0.75:
            summands.append(Summand("cyclic", rng.randint(-2, 4),
                                    rng.randint(1, max_order)))
        else:
            summands.append(Summand("free", rng.randint(-2, 4)))
    return XTowerSpec(rng.choice([1, 2]), tuple(summands))


def oracle_detect(spec: XTowerSpec, h: int) -> bool:
    """Brute criterion: every torsion order is at most ``h``."""
    return spec.max_order() <= h
