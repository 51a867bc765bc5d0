"""Modules over the 8-dimensional subalgebra generated by Sq1 and Sq2.

An ``A1Module`` is a finite window of a Z-graded module together with the
two generating operations.  The ``complete`` range records where the data
agrees with the untruncated module: the basis is exact on
``[complete_lo, complete_hi]`` and every action block whose source and
target both lie in that range is exact.  Every operation states where its
output can be trusted.

Standard modules: the trivial module, the free rank-one module, the
reduced projective-space module ``P = x F[x]`` and its loop companions
``P0..P3`` (period eight under four loops), and the reduced cohomology of
elementary abelian 2-groups assembled by tensoring copies of ``P``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .gf2 import (
    F2Matrix,
    intersect_row_spaces,
    left_kernel_basis,
    rank,
    row_basis,
    solve,
    solve_row,
    span_contains,
    subquotient_basis,
)
from .graded import GradedSpace, GradedMap, Window

# Completeness bound meaning "exact in every degree in that direction".
INF = 10 ** 6

# Basis words of the free rank-one module and their degrees.
A1_WORDS: tuple[tuple[str, int], ...] = (
    ("1", 0), ("Sq1", 1), ("Sq2", 2), ("Q1", 3),
    ("Sq1Sq2", 3), ("Q0Q1", 4), ("Q1Sq2", 5), ("Q0Q1Sq2", 6),
)
A1_SQ1: dict[str, tuple[str, ...]] = {
    "1": ("Sq1",), "Sq1": (), "Sq2": ("Sq1Sq2",), "Q1": ("Q0Q1",),
    "Sq1Sq2": (), "Q0Q1": (), "Q1Sq2": ("Q0Q1Sq2",), "Q0Q1Sq2": (),
}
A1_SQ2: dict[str, tuple[str, ...]] = {
    "1": ("Sq2",), "Sq1": ("Q1", "Sq1Sq2"), "Sq2": ("Q0Q1",),
    "Q1": ("Q1Sq2",), "Sq1Sq2": ("Q1Sq2",), "Q0Q1": ("Q0Q1Sq2",),
    "Q1Sq2": (), "Q0Q1Sq2": (),
}
# Each word as a sum of application sequences (first entry acts first).
A1_WORD_SEQS: dict[str, tuple[tuple[int, ...], ...]] = {
    "1": ((),),
    "Sq1": ((1,),),
    "Sq2": ((2,),),
    "Sq1Sq2": ((2, 1),),
    "Q1": ((2, 1), (1, 2)),
    "Q0Q1": ((2, 1, 1), (1, 2, 1)),
    "Q1Sq2": ((2, 2, 1), (2, 1, 2)),
    "Q0Q1Sq2": ((2, 2, 1, 1), (2, 1, 2, 1)),
}


class A1Module:
    """Finite window of a graded module over the Sq1/Sq2 algebra."""

    def __init__(self, basis: dict[int, Iterable[str]],
                 sq1: dict[int, F2Matrix], sq2: dict[int, F2Matrix],
                 lo: int, hi: int, complete_lo: int, complete_hi: int):
        self.basis: dict[int, tuple[str, ...]] = {
            d: tuple(names) for d, names in basis.items() if tuple(names)
        }
        for d, names in self.basis.items():
            if list(names) != sorted(names) or len(set(names)) != len(names):
                raise ValueError(f"basis at {d} not sorted or not unique")
        self._index = {d: {n: i for i, n in enumerate(names)}
                       for d, names in self.basis.items()}
        self.lo, self.hi = lo, hi
        self.complete_lo, self.complete_hi = complete_lo, complete_hi
        self.sq1 = {d: m for d, m in sq1.items() if not m.is_zero()}
        self.sq2 = {d: m for d, m in sq2.items() if not m.is_zero()}
        for d, m in self.sq1.items():
            if m.nrows != self.dim(d) or m.ncols != self.dim(d + 1):
                raise ValueError(f"sq1 block shape mismatch at {d}")
        for d, m in self.sq2.items():
            if m.nrows != self.dim(d) or m.ncols != self.dim(d + 2):
                raise ValueError(f"sq2 block shape mismatch at {d}")

    # -- access ----------------------------------------------------------

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def names(self, d: int) -> tuple[str, ...]:
        return self.basis.get(d, ())

    def index(self, d: int, name: str) -> int:
        return self._index[d][name]

    def degrees(self) -> list[int]:
        return sorted(self.basis)

    def total_dim(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def dims(self) -> dict[int, int]:
        return {d: len(v) for d, v in self.basis.items()}

    def bottom(self) -> Optional[int]:
        ds = self.degrees()
        return ds[0] if ds else None

    def sq1_block(self, d: int) -> F2Matrix:
        return self.sq1.get(d) or F2Matrix.zero(self.dim(d), self.dim(d + 1))

    def sq2_block(self, d: int) -> F2Matrix:
        return self.sq2.get(d) or F2Matrix.zero(self.dim(d), self.dim(d + 2))

    def apply_sq1(self, d: int, bits: int) -> int:
        return self.sq1_block(d).vec_mul(bits)

    def apply_sq2(self, d: int, bits: int) -> int:
        return self.sq2_block(d).vec_mul(bits)

    def apply_q1(self, d: int, bits: int) -> int:
        """The degree-3 derived operation Sq1 Sq2 + Sq2 Sq1."""
        a = self.apply_sq1(d + 2, self.apply_sq2(d, bits))
        b = self.apply_sq2(d + 1, self.apply_sq1(d, bits))
        return a ^ b

    def apply_theta(self, d: int, bits: int) -> int:
        """The degree-6 operation Sq2 Sq2 Sq2 detecting free summands."""
        return self.apply_sq2(d + 4, self.apply_sq2(d + 2, self.apply_sq2(d, bits)))

    def apply_word(self, word: str, d: int, bits: int) -> int:
        """Value of a free-module basis word on a vector of degree d."""
        total = 0
        for seq in A1_WORD_SEQS[word]:
            vec, cd = bits, d
            for sq in seq:
                vec = self.apply_sq1(cd, vec) if sq == 1 else self.apply_sq2(cd, vec)
                cd += sq
            total ^= vec
        return total

    def vector_name(self, d: int, bits: int) -> str:
        names = self.names(d)
        return "+".join(n for i, n in enumerate(names) if (bits >> i) & 1) or "0"

    def is_complete_below(self) -> bool:
        """True when the untruncated module is known to vanish below the
        window (the exactness range extends strictly below it)."""
        return self.complete_lo < self.lo or not self.basis

    def incoming_ok(self, d: int, reach: int) -> bool:
        """All actions landing in degree d from ``reach`` below are faithful."""
        return d - reach >= self.complete_lo or self.is_complete_below()

    # -- views -------------------------------------------------------------

    def space(self) -> GradedSpace:
        w = Window(min(self.lo, 0), max(self.hi, 0), 0, 0)
        return GradedSpace(w, {(d, 0): names for d, names in self.basis.items()})

    def sq1_map(self) -> GradedMap:
        s = self.space()
        return GradedMap(s, s, (1, 0), {(d, 0): m for d, m in self.sq1.items()})

    def sq2_map(self) -> GradedMap:
        s = self.space()
        return GradedMap(s, s, (2, 0), {(d, 0): m for d, m in self.sq2.items()})

    def __repr__(self) -> str:
        return (f"A1Module(dim={self.total_dim()}, window=[{self.lo},{self.hi}], "
                f"complete=[{self.complete_lo},{self.complete_hi}])")


def _sorted_module(basis: dict[int, list[str]],
                   images1: dict[tuple[int, str], tuple[str, ...]],
                   images2: dict[tuple[int, str], tuple[str, ...]],
                   lo: int, hi: int, c_lo: int, c_hi: int) -> A1Module:
    """Assemble a module from name-level action tables (targets clipped)."""
    mod_basis = {d: tuple(sorted(set(names))) for d, names in basis.items() if names}
    idx = {d: {n: i for i, n in enumerate(names)} for d, names in mod_basis.items()}

    def build(images: dict[tuple[int, str], tuple[str, ...]], reach: int
              ) -> dict[int, F2Matrix]:
        out = {}
        for d, names in mod_basis.items():
            td = d + reach
            tnames = mod_basis.get(td, ())
            rows = []
            for n in names:
                bits = 0
                for t in images.get((d, n), ()):
                    if t in idx.get(td, {}):
                        bits ^= 1 << idx[td][t]
                rows.append(bits)
            out[d] = F2Matrix.from_rows(rows, len(tnames))
        return out

    return A1Module(mod_basis, build(images1, 1), build(images2, 2),
                    lo, hi, c_lo, c_hi)


# -- standard modules ---------------------------------------------------------

def std_f(shift: int = 0) -> A1Module:
    """The trivial one-dimensional module, optionally suspended."""
    name = f"i{shift}"
    return _sorted_module({shift: [name]}, {}, {}, shift, shift, -INF, INF)


def std_a1(shift: int = 0) -> A1Module:
    """The free rank-one module (dimension 8, degrees 0..6), suspended."""
    def nm(w: str) -> str:
        return w if shift == 0 else f"{w}@{shift}"

    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}
    for w, d in A1_WORDS:
        basis.setdefault(d + shift, []).append(nm(w))
        im1[(d + shift, nm(w))] = tuple(nm(t) for t in A1_SQ1[w])
        im2[(d + shift, nm(w))] = tuple(nm(t) for t in A1_SQ2[w])
    return _sorted_module(basis, im1, im2, shift, shift + 6, -INF, INF)


def _p_sq1(s: int) -> bool:
    return s % 2 == 1


def _p_sq2(s: int) -> bool:
    return s % 4 in (2, 3)


def std_p(lo: int, hi: int) -> A1Module:
    """Truncation of the reduced projective-space module x F[x]."""
    if hi < 1:
        raise ValueError("window too small to contain any generator")
    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}
    for s in range(1, hi + 1):
        basis.setdefault(s, []).append(f"x{s}")
        if _p_sq1(s):
            im1[(s, f"x{s}")] = (f"x{s + 1}",)
        if _p_sq2(s):
            im2[(s, f"x{s}")] = (f"x{s + 2}",)
    eff_lo = min(lo, 1)
    return _sorted_module(basis, im1, im2, eff_lo, hi, -INF, hi)


def std_pn(n: int, lo: int, hi: int) -> A1Module:
    """Loop companions of the projective module, period eight in fours.

    Transcribes the standard diagrams for the residues 0..3; other indices
    are suspensions by eight per four steps.
    """
    r = n % 4
    s8 = 8 * ((n - r) // 4)
    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}

    def add(name: str, d: int, t1: tuple[str, ...], t2: tuple[str, ...]) -> None:
        d += s8
        if not (d <= hi):
            return
        basis.setdefault(d, []).append(name)
        if t1:
            im1[(d, name)] = t1
        if t2:
            im2[(d, name)] = t2

    def x(s: int) -> str:
        return f"x{s + s8}"

    def y(s: int) -> str:
        return f"y{s + s8}"

    def generic(s_min: int, override2: dict[int, tuple[str, ...]]) -> None:
        for s in range(s_min, hi - s8 + 1):
            t1 = (x(s + 1),) if _p_sq1(s) else ()
            t2 = override2.get(s, (x(s + 2),) if _p_sq2(s) else ())
            add(x(s), s, t1, t2)

    if r == 0:
        add(x(-1), -1, (x(0),), (x(1),))
        add(x(0), 0, (), ())
        generic(1, {})
        bottom = -1 + s8
    elif r == 1:
        generic(1, {})
        bottom = 1 + s8
    elif r == 2:
        add(y(2), 2, (y(3),), (x(4),))
        add(y(3), 3, (), (y(5),))
        add(y(5), 5, (y(6),), ())
        add(y(6), 6, (), ())
        generic(3, {4: (y(6),)})
        bottom = 2 + s8
    else:
        add(y(3), 3, (y(4),), (x(5),))
        add(y(4), 4, (), (y(6),))
        add(y(6), 6, (y(7),), ())
        add(y(7), 7, (), ())
        generic(5, {5: (y(7),)})
        bottom = 3 + s8

    if hi < bottom:
        raise ValueError("window too small to contain any generator")
    eff_lo = min(lo, bottom)
    return _sorted_module(basis, im1, im2, eff_lo, hi, -INF, hi)


def suspend(m: A1Module, t: int) -> A1Module:
    """Degree shift by ``t``; names are tagged to stay distinct."""
    if t == 0:
        return m

    def nm(n: str) -> str:
        return f"{n}@{t}"

    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}
    for d in m.degrees():
        for i, n in enumerate(m.names(d)):
            basis.setdefault(d + t, []).append(nm(n))
            v1 = m.apply_sq1(d, 1 << i)
            v2 = m.apply_sq2(d, 1 << i)
            im1[(d + t, nm(n))] = tuple(nm(x) for j, x in enumerate(m.names(d + 1))
                                        if (v1 >> j) & 1)
            im2[(d + t, nm(n))] = tuple(nm(x) for j, x in enumerate(m.names(d + 2))
                                        if (v2 >> j) & 1)
    return _sorted_module(basis, im1, im2, m.lo + t, m.hi + t,
                          m.complete_lo + t, m.complete_hi + t)


def direct_sum_a1(mods: list[A1Module], tags: Optional[list[str]] = None) -> A1Module:
    if not mods:
        raise ValueError("empty direct sum")
    tags = tags or [f"s{i}." for i in range(len(mods))]
    lo = min(m.lo for m in mods)
    hi = max(m.hi for m in mods)
    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}
    for tag, m in zip(tags, mods):
        for d in m.degrees():
            for i, n in enumerate(m.names(d)):
                basis.setdefault(d, []).append(tag + n)
                v1 = m.apply_sq1(d, 1 << i)
                v2 = m.apply_sq2(d, 1 << i)
                im1[(d, tag + n)] = tuple(tag + x for j, x in
                                          enumerate(m.names(d + 1)) if (v1 >> j) & 1)
                im2[(d, tag + n)] = tuple(tag + x for j, x in
                                          enumerate(m.names(d + 2)) if (v2 >> j) & 1)
    c_lo = max(m.complete_lo for m in mods)
    c_hi = min(m.complete_hi for m in mods)
    return _sorted_module(basis, im1, im2, lo, hi, c_lo, c_hi)


def tensor_a1(a: A1Module, b: A1Module, hi: Optional[int] = None,
              sep: str = "*") -> A1Module:
    """Tensor product with the diagonal action (Cartan rule)."""
    if not (a.is_complete_below() and b.is_complete_below()):
        raise ValueError("tensor factors must be complete at the bottom")
    ab, bb = a.bottom(), b.bottom()
    if ab is None or bb is None:
        raise ValueError("tensor with the zero module")

    def sat(x: int, y: int) -> int:
        return INF if x >= INF else x + y

    a_top, b_top = max(a.degrees()), max(b.degrees())
    cap = min(sat(a.complete_hi, bb), sat(b.complete_hi, ab), a_top + b_top)
    hi = hi if hi is not None else cap
    lo = ab + bb
    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}

    def pair_names(da: int, va: int, db: int, vb: int) -> list[str]:
        out = []
        for p, na in enumerate(a.names(da)):
            if not (va >> p) & 1:
                continue
            for q, nb in enumerate(b.names(db)):
                if (vb >> q) & 1:
                    out.append(na + sep + nb)
        return out

    for da in a.degrees():
        for db in b.degrees():
            d = da + db
            if d > hi:
                continue
            for i, na in enumerate(a.names(da)):
                for j, nb in enumerate(b.names(db)):
                    name = na + sep + nb
                    basis.setdefault(d, []).append(name)
                    if d + 1 <= hi:
                        t1 = (pair_names(da + 1, a.apply_sq1(da, 1 << i), db, 1 << j)
                              + pair_names(da, 1 << i, db + 1, b.apply_sq1(db, 1 << j)))
                        im1[(d, name)] = _cancel(t1)
                    if d + 2 <= hi:
                        t2 = (pair_names(da + 2, a.apply_sq2(da, 1 << i), db, 1 << j)
                              + pair_names(da + 1, a.apply_sq1(da, 1 << i),
                                           db + 1, b.apply_sq1(db, 1 << j))
                              + pair_names(da, 1 << i, db + 2, b.apply_sq2(db, 1 << j)))
                        im2[(d, name)] = _cancel(t2)
    c_hi = min(cap, hi)
    if a.complete_hi >= INF and b.complete_hi >= INF and hi >= a_top + b_top:
        c_hi = INF
    return _sorted_module(basis, im1, im2, lo, hi, -INF, c_hi)


def _cancel(names: list[str]) -> tuple[str, ...]:
    out = []
    for n in names:
        if n in out:
            out.remove(n)
        else:
            out.append(n)
    return tuple(out)


def dual_a1(m: A1Module, mark: str = "^") -> A1Module:
    """Linear dual: transposed actions on the negated grading."""
    def nm(n: str) -> str:
        return n[: -len(mark)] if n.endswith(mark) else n + mark

    basis: dict[int, list[str]] = {}
    im1: dict[tuple[int, str], tuple[str, ...]] = {}
    im2: dict[tuple[int, str], tuple[str, ...]] = {}
    for d in m.degrees():
        for n in m.names(d):
            basis.setdefault(-d, []).append(nm(n))
    for d in m.degrees():
        for reach, im in ((1, im1), (2, im2)):
            blk = m.sq1_block(d) if reach == 1 else m.sq2_block(d)
            # dual of block (d -> d+reach) acts (-d-reach) -> (-d)
            for j, tn in enumerate(m.names(d + reach)):
                targets = [nm(sn) for i, sn in enumerate(m.names(d))
                           if blk.entry(i, j)]
                if targets:
                    im[(-d - reach, nm(tn))] = tuple(targets)
    return _sorted_module(basis, im1, im2, -m.hi, -m.lo,
                          -m.complete_hi, -m.complete_lo)


# -- validation and homological functionals -----------------------------------

@dataclass
class Violation:
    relation: str
    degree: int
    element: str

    def __str__(self) -> str:
        return f"{self.relation} fails at degree {self.degree} on {self.element}"


def validate(m: A1Module) -> list[Violation]:
    """Check Sq1 Sq1 = 0 and Sq2 Sq2 = Sq1 Sq2 Sq1 on the trustable range."""
    out: list[Violation] = []
    for d in m.degrees():
        if d < m.complete_lo:
            continue
        if d + 2 <= m.complete_hi:
            for i, name in enumerate(m.names(d)):
                if m.apply_sq1(d + 1, m.apply_sq1(d, 1 << i)):
                    out.append(Violation("Sq1 Sq1 = 0", d, name))
        if d + 4 <= m.complete_hi:
            for i, name in enumerate(m.names(d)):
                lhs = m.apply_sq2(d + 2, m.apply_sq2(d, 1 << i))
                rhs = m.apply_sq1(d + 3, m.apply_sq2(d + 1, m.apply_sq1(d, 1 << i)))
                if lhs != rhs:
                    out.append(Violation("Sq2 Sq2 = Sq1 Sq2 Sq1", d, name))
    return out


def margolis(m: A1Module, which: str) -> dict[int, int]:
    """Degreewise Ker/Im dimensions for Sq1 (``q0``) or the degree-3
    derived operation (``q1``), on the trustable range."""
    reach = 1 if which == "q0" else 3

    def op(d: int, bits: int) -> int:
        return m.apply_sq1(d, bits) if which == "q0" else m.apply_q1(d, bits)

    out: dict[int, int] = {}
    for d in m.degrees():
        if d + reach > m.complete_hi or d < m.complete_lo:
            continue
        if not m.incoming_ok(d, reach):
            continue
        mat = F2Matrix.from_rows([op(d, 1 << i) for i in range(m.dim(d))],
                                 m.dim(d + reach))
        ker = left_kernel_basis(mat)
        prev = F2Matrix.from_rows(
            [op(d - reach, 1 << i) for i in range(m.dim(d - reach))], m.dim(d))
        h = ker.nrows - rank(prev)
        if h:
            out[d] = h
    return out


def socle(m: A1Module) -> dict[int, F2Matrix]:
    """Degreewise basis of Ker Sq1 intersected with Ker Sq2."""
    out: dict[int, F2Matrix] = {}
    for d in m.degrees():
        if d + 2 > m.complete_hi or d < m.complete_lo:
            continue
        k1 = left_kernel_basis(m.sq1_block(d))
        k2 = left_kernel_basis(m.sq2_block(d))
        inter = intersect_row_spaces(k1, k2)
        if inter.nrows:
            out[d] = inter
    return out


def socle_dims(m: A1Module) -> dict[int, int]:
    return {d: b.nrows for d, b in socle(m).items()}


# -- free-summand reduction -----------------------------------------------------

@dataclass
class ReduceResult:
    module: A1Module
    free_gens: list[int]          # degrees of split-off free generators
    certified_hi: int             # theta known to vanish up to here


def _cyclic_span(m: A1Module, d0: int, bits: int) -> dict[int, F2Matrix]:
    """Row basis of the submodule generated by one vector of degree d0."""
    vecs: dict[int, list[int]] = {d0: [bits]}
    frontier = [(d0, bits)]
    while frontier:
        d, v = frontier.pop()
        for reach in (1, 2):
            img = m.apply_sq1(d, v) if reach == 1 else m.apply_sq2(d, v)
            if img:
                cur = vecs.setdefault(d + reach, [])
                if not span_contains(F2Matrix.from_rows(cur, m.dim(d + reach)), img):
                    cur.append(img)
                    frontier.append((d + reach, img))
    return {d: row_basis(F2Matrix.from_rows(v, m.dim(d)))
            for d, v in vecs.items()}


def _submodule(m: A1Module, rows: dict[int, F2Matrix], prefix: str) -> A1Module:
    """Module structure on per-degree row spans (closed under the action
    wherever the ambient data is trustable)."""
    kept = {d: b for d, b in rows.items() if b.nrows}
    basis = {d: tuple(f"{prefix}{d}_{i:04d}" for i in range(b.nrows))
             for d, b in kept.items()}
    sq1: dict[int, F2Matrix] = {}
    sq2: dict[int, F2Matrix] = {}
    for d, b in kept.items():
        for reach, store in ((1, sq1), (2, sq2)):
            tgt = kept.get(d + reach)
            tdim = tgt.nrows if tgt else 0
            out_rows = []
            for v in b.rows:
                img = m.apply_sq1(d, v) if reach == 1 else m.apply_sq2(d, v)
                if img == 0 or tgt is None:
                    out_rows.append(0)
                    continue
                c = solve_row(img, tgt)
                out_rows.append(c if c is not None else 0)
            store[d] = F2Matrix.from_rows(out_rows, tdim)
    return A1Module(basis, sq1, sq2, m.lo, m.hi, m.complete_lo, m.complete_hi)


def _retraction_kernel(m: A1Module, cyc: dict[int, F2Matrix]) -> dict[int, F2Matrix]:
    """Kernel of a module retraction onto the free cyclic summand ``cyc``.

    The retraction is found by linear solving (identity on the summand
    plus commutation with both operations); self-injectivity of the
    8-dimensional algebra guarantees a solution.
    """
    band = sorted(cyc)
    offsets: dict[int, int] = {}
    nvars = 0
    for d in band:
        offsets[d] = nvars
        nvars += m.dim(d) * cyc[d].nrows

    def var(d: int, i: int, j: int) -> int:
        return offsets[d] + i * cyc[d].nrows + j

    cyc_blocks: dict[tuple[int, int], F2Matrix] = {}
    for d in band:
        for reach in (1, 2):
            tgt = cyc.get(d + reach)
            tdim = tgt.nrows if tgt else 0
            rows = []
            for v in cyc[d].rows:
                img = m.apply_sq1(d, v) if reach == 1 else m.apply_sq2(d, v)
                c = solve_row(img, tgt) if (img and tgt) else 0
                rows.append(c or 0)
            cyc_blocks[(d, reach)] = F2Matrix.from_rows(rows, tdim)

    eqs: list[int] = []
    rhs_bits = 0

    def push(row: int, r: int) -> None:
        nonlocal rhs_bits
        if row or r:
            if r:
                rhs_bits |= 1 << len(eqs)
            eqs.append(row)

    # identity on the summand
    for d in band:
        for j, v in enumerate(cyc[d].rows):
            for jj in range(cyc[d].nrows):
                row = 0
                for i in range(m.dim(d)):
                    if (v >> i) & 1:
                        row ^= 1 << var(d, i, jj)
                push(row, 1 if jj == j else 0)

    # commutation with both operations wherever the data is trustable
    for reach in (1, 2):
        for d in range(min(band) - 2, max(band) + 1):
            if d + reach > m.complete_hi:
                continue
            if d < m.complete_lo and not m.is_complete_below():
                continue
            sdim = m.dim(d)
            if sdim == 0:
                continue
            cdim_t = cyc[d + reach].nrows if d + reach in cyc else 0
            cdim_s = cyc[d].nrows if d in cyc else 0
            if cdim_t == 0 and cdim_s == 0:
                continue
            blk = cyc_blocks.get((d, reach))
            for i in range(sdim):
                img = (m.apply_sq1(d, 1 << i) if reach == 1
                       else m.apply_sq2(d, 1 << i))
                for j in range(max(cdim_t, 1) if cdim_t else 0):
                    row = 0
                    if d + reach in offsets:
                        tdim = m.dim(d + reach)
                        for p in range(tdim):
                            if (img >> p) & 1:
                                row ^= 1 << var(d + reach, p, j)
                    if d in offsets and blk is not None and blk.ncols:
                        for q in range(cdim_s):
                            if blk.entry(q, j):
                                row ^= 1 << var(d, i, q)
                    push(row, 0)
                if cdim_t == 0 and d in offsets and blk is not None and blk.ncols:
                    pass  # nothing to constrain: target side of cyc is zero

    sol = solve(F2Matrix.from_rows(eqs, nvars), rhs_bits) if nvars else 0
    if sol is None:
        raise RuntimeError("retraction system unsolvable; summand not split")

    kernel_rows: dict[int, F2Matrix] = {}
    for d in m.degrees():
        if d not in offsets:
            kernel_rows[d] = F2Matrix.identity(m.dim(d))
            continue
        rows = []
        for i in range(m.dim(d)):
            bits = 0
            for j in range(cyc[d].nrows):
                if (sol >> var(d, i, j)) & 1:
                    bits |= 1 << j
            rows.append(bits)
        kernel_rows[d] = left_kernel_basis(F2Matrix.from_rows(rows, cyc[d].nrows))
    return kernel_rows


def reduce(m: A1Module) -> ReduceResult:
    """Split off free summands until the top operation acts by zero.

    Scans the basis in canonical order for a vector not killed by
    Sq2 Sq2 Sq2; the cyclic module it generates is free and splits off.
    """
    certified_hi = m.complete_hi - 6
    if certified_hi < m.complete_lo and m.total_dim():
        raise ValueError(
            "window too narrow to certify reduction: need at least 7 complete "
            f"degrees, have [{m.complete_lo},{m.complete_hi}]")
    cur = m
    gens: list[int] = []
    progress = True
    while progress:
        progress = False
        for d in cur.degrees():
            if d < cur.complete_lo or d + 6 > cur.complete_hi:
                continue
            hit = None
            for i in range(cur.dim(d)):
                if cur.apply_theta(d, 1 << i):
                    hit = 1 << i
                    break
            if hit is None:
                continue
            cyc = _cyclic_span(cur, d, hit)
            if sum(b.nrows for b in cyc.values()) != 8:
                raise RuntimeError("cyclic module with nonzero top not free")
            ker = _retraction_kernel(cur, cyc)
            cur = _submodule(cur, ker, "r")
            gens.append(d)
            progress = True
            break
    return ReduceResult(cur, sorted(gens), certified_hi)


def is_reduced(m: A1Module) -> bool:
    for d in m.degrees():
        if d < m.complete_lo or d + 6 > m.complete_hi:
            continue
        for i in range(m.dim(d)):
            if m.apply_theta(d, 1 << i):
                return False
    return True


# -- projective covers and loops --------------------------------------------------

@dataclass
class CoverResult:
    cover: A1Module
    gen_reps: dict[int, F2Matrix]   # generator degree -> chosen lift rows
    loop: A1Module
    loop_rows: dict[int, F2Matrix]  # loop basis in cover coordinates
    epi_blocks: dict[int, F2Matrix]  # cover basis -> module coordinates


def generator_degrees(m: A1Module) -> dict[int, F2Matrix]:
    """Representatives of M / (Sq1 M + Sq2 M), degreewise where trustable."""
    out: dict[int, F2Matrix] = {}
    for d in m.degrees():
        if d > m.complete_hi or d < m.complete_lo:
            continue
        if not m.incoming_ok(d, 2):
            continue
        img_rows = [m.apply_sq1(d - 1, 1 << i) for i in range(m.dim(d - 1))]
        img_rows += [m.apply_sq2(d - 2, 1 << i) for i in range(m.dim(d - 2))]
        img = row_basis(F2Matrix.from_rows(img_rows, m.dim(d)))
        full = F2Matrix.identity(m.dim(d))
        reps = subquotient_basis(full.stack(img), img)
        if reps.nrows:
            out[d] = reps
    return out


def proj_cover_and_loop(m: A1Module) -> CoverResult:
    """Minimal free cover and its kernel (the loop of the module)."""
    if not is_reduced(m):
        raise ValueError("module has free summands; call reduce first")
    gens = generator_degrees(m)
    summands: list[A1Module] = []
    tags: list[str] = []
    reps: dict[str, tuple[int, int]] = {}
    for d in sorted(gens):
        for i in range(gens[d].nrows):
            tag = f"g{d}n{i}"
            summands.append(std_a1(d))
            tags.append(tag + ".")
            reps[tag] = (d, gens[d].rows[i])
    if not summands:
        empty = A1Module({}, {}, {}, m.lo, m.hi, m.complete_lo, m.complete_hi)
        return CoverResult(empty, gens, empty, {}, {})
    big = direct_sum_a1(summands, tags)
    top_gen = max(d for d in gens)
    cover_hi = m.hi
    if m.complete_hi >= max(m.hi, top_gen + 6):
        cover_hi = max(m.hi, top_gen + 6)
    if m.complete_hi > cover_hi:
        cover_c_hi = m.complete_hi if top_gen + 6 <= cover_hi else cover_hi
    else:
        cover_c_hi = m.complete_hi
    cover_c_lo = m.complete_lo if m.is_complete_below() else m.complete_lo + 2
    cover = A1Module({d: n for d, n in big.basis.items() if d <= cover_hi},
                     {d: b for d, b in big.sq1.items() if d + 1 <= cover_hi},
                     {d: b for d, b in big.sq2.items() if d + 2 <= cover_hi},
                     m.lo, cover_hi, cover_c_lo, cover_c_hi)

    def epi_vec(d: int, name: str) -> int:
        tag, word = name.split(".", 1)
        word = word.split("@", 1)[0]
        gd, rep = reps[tag]
        return m.apply_word(word, gd, rep)

    epi_blocks: dict[int, F2Matrix] = {}
    ker_rows: dict[int, F2Matrix] = {}
    for d in cover.degrees():
        rows = [epi_vec(d, n) for n in cover.names(d)]
        mat = F2Matrix.from_rows(rows, m.dim(d))
        epi_blocks[d] = mat
        ker_rows[d] = left_kernel_basis(mat)
    loop = _submodule(cover, ker_rows, "w")
    return CoverResult(cover, gens, loop, ker_rows, epi_blocks)


def loop_power(m: A1Module, n: int) -> A1Module:
    """Iterated reduced loops; negative powers via duality."""
    if n == 0:
        return reduce(m).module
    if n < 0:
        return dual_a1(loop_power(dual_a1(m), -n))
    cur = reduce(m).module
    for _ in range(n):
        cur = reduce(proj_cover_and_loop(cur).loop).module
    return cur


def std_bv(n: int, lo: int, hi: int) -> A1Module:
    """Reduced cohomology of the rank-n elementary abelian group:
    binomially many tensor powers of the projective module."""
    if n < 1:
        raise ValueError("rank must be at least 1")
    from math import comb

    p = std_p(lo, hi)
    powers: dict[int, A1Module] = {1: p}
    for i in range(2, n + 1):
        powers[i] = tensor_a1(powers[i - 1], p, hi=hi)
    parts: list[A1Module] = []
    tags: list[str] = []
    for i in range(1, n + 1):
        for c in range(comb(n, i)):
            parts.append(powers[i])
            tags.append(f"B{i}c{c}.")
    return direct_sum_a1(parts, tags)


# -- stable comparison ---------------------------------------------------------

@dataclass
class EvidenceReport:
    consistent: bool
    detail: str


def iso_search(a: A1Module, b: A1Module, lo: int, hi: int,
               budget: int = 4096) -> Optional[dict[int, F2Matrix]]:
    """Exhaustive search for a degreewise bijection commuting with both
    operations on [lo, hi].  Exponential in the solution-space dimension,
    so the enumeration is capped by ``budget``; None means none found
    within the cap (or dimensions already disagree)."""
    from .graded import OperatorPair, Window, hom_space

    for d in range(lo, hi + 1):
        if a.dim(d) != b.dim(d):
            return None
    region = Window(lo, hi, 0, 0)
    ops = [OperatorPair("sq1", a.sq1_map(), b.sq1_map()),
           OperatorPair("sq2", a.sq2_map(), b.sq2_map())]
    sols = hom_space(a.space(), b.space(), (0, 0), ops, region)
    if 1 << len(sols) > budget:
        sols = sols[: budget.bit_length() - 1]
    for mask in range(1, 1 << len(sols)):
        blocks: dict[int, F2Matrix] = {}
        good = True
        for d in range(lo, hi + 1):
            acc = F2Matrix.zero(a.dim(d), b.dim(d))
            for i, t in enumerate(sols):
                if (mask >> i) & 1:
                    acc = acc.add(t.block((d, 0)))
            if rank(acc) != a.dim(d):
                good = False
                break
            blocks[d] = acc
        if good:
            return blocks
    return None


def stable_evidence(a: A1Module, b: A1Module) -> EvidenceReport:
    """Compare reduced graded dimensions and both Margolis homologies on
    the common certified range."""
    ra, rb = reduce(a), reduce(b)
    lo = max(ra.module.complete_lo, rb.module.complete_lo)
    if ra.module.is_complete_below() and rb.module.is_complete_below():
        bots = [x for x in (ra.module.bottom(), rb.module.bottom()) if x is not None]
        if bots:
            lo = min(lo, min(bots))
    hi = min(ra.certified_hi, rb.certified_hi)
    for d in range(lo, hi + 1):
        if ra.module.dim(d) != rb.module.dim(d):
            return EvidenceReport(
                False, f"reduced dimensions differ at degree {d}: "
                       f"{ra.module.dim(d)} vs {rb.module.dim(d)}")
    for which in ("q0", "q1"):
        ma = margolis(ra.module, which)
        mb = margolis(rb.module, which)
        for d in range(lo, hi - 3 + 1):
            if ma.get(d, 0) != mb.get(d, 0):
                return EvidenceReport(
                    False, f"{which}-homology differs at degree {d}")
    return EvidenceReport(True, f"consistent on degrees [{lo},{hi}]")
