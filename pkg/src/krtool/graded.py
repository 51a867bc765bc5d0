"""Bigraded vector spaces over GF(2) with truncation-window bookkeeping.

Degrees are pairs ``(m, k)``: ``m`` is the integer part, ``k`` the twist.
A ``GradedSpace`` holds named bases per degree inside a window; a
``GradedMap`` holds one bit matrix per populated source degree, with rows
indexed by the source basis and columns by the target basis at the shifted
degree.  Every operation records the subwindow on which its output is
complete, so downstream comparisons never read truncation artifacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Optional

from .gf2 import (
    F2Matrix,
    kernel_basis,
    left_kernel_basis,
    rank,
    row_basis,
    solve_row,
    subquotient_basis,
)

Degree = tuple[int, int]


@dataclass(frozen=True)
class Window:
    m_lo: int
    m_hi: int
    k_lo: int
    k_hi: int

    def __post_init__(self) -> None:
        if self.m_lo > self.m_hi or self.k_lo > self.k_hi:
            raise ValueError("empty window bounds")

    def contains(self, d: Degree) -> bool:
        m, k = d
        return self.m_lo <= m <= self.m_hi and self.k_lo <= k <= self.k_hi

    def degrees(self) -> Iterator[Degree]:
        for m in range(self.m_lo, self.m_hi + 1):
            for k in range(self.k_lo, self.k_hi + 1):
                yield (m, k)

    def shrink(self, dm_lo: int = 0, dm_hi: int = 0, dk_lo: int = 0,
               dk_hi: int = 0) -> Optional["Window"]:
        m_lo, m_hi = self.m_lo + dm_lo, self.m_hi - dm_hi
        k_lo, k_hi = self.k_lo + dk_lo, self.k_hi - dk_hi
        if m_lo > m_hi or k_lo > k_hi:
            return None
        return Window(m_lo, m_hi, k_lo, k_hi)

    def intersect(self, other: "Window") -> Optional["Window"]:
        m_lo = max(self.m_lo, other.m_lo)
        m_hi = min(self.m_hi, other.m_hi)
        k_lo = max(self.k_lo, other.k_lo)
        k_hi = min(self.k_hi, other.k_hi)
        if m_lo > m_hi or k_lo > k_hi:
            return None
        return Window(m_lo, m_hi, k_lo, k_hi)

    def shift(self, d: Degree) -> "Window":
        return Window(self.m_lo + d[0], self.m_hi + d[0],
                      self.k_lo + d[1], self.k_hi + d[1])

    def negate(self) -> "Window":
        return Window(-self.m_hi, -self.m_lo, -self.k_hi, -self.k_lo)


def add_deg(a: Degree, b: Degree) -> Degree:
    return (a[0] + b[0], a[1] + b[1])


def sub_deg(a: Degree, b: Degree) -> Degree:
    return (a[0] - b[0], a[1] - b[1])


def neg_deg(a: Degree) -> Degree:
    return (-a[0], -a[1])


class GradedSpace:
    """Finite bigraded space with lexicographically ordered named bases."""

    def __init__(self, window: Window,
                 basis: dict[Degree, Iterable[str]] | None = None):
        self.window = window
        self.basis: dict[Degree, tuple[str, ...]] = {}
        if basis:
            for d, names in basis.items():
                names = tuple(sorted(names))
                if not names:
                    continue
                if not window.contains(d):
                    raise ValueError(f"degree {d} outside window")
                if len(set(names)) != len(names):
                    raise ValueError(f"duplicate names at {d}")
                self.basis[d] = names
        self._index: dict[Degree, dict[str, int]] = {
            d: {n: i for i, n in enumerate(names)}
            for d, names in self.basis.items()
        }

    def dim(self, d: Degree) -> int:
        return len(self.basis.get(d, ()))

    def names(self, d: Degree) -> tuple[str, ...]:
        return self.basis.get(d, ())

    def index(self, d: Degree, name: str) -> int:
        return self._index[d][name]

    def has(self, d: Degree, name: str) -> bool:
        return name in self._index.get(d, {})

    def degrees(self) -> list[Degree]:
        return sorted(self.basis)

    def total_dim(self) -> int:
        return sum(len(v) for v in self.basis.values())

    def dims(self) -> dict[Degree, int]:
        return {d: len(v) for d, v in self.basis.items()}

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, GradedSpace)
                and self.window == other.window and self.basis == other.basis)

    def __repr__(self) -> str:
        return f"GradedSpace(dim={self.total_dim()}, window={self.window})"

    def restrict(self, window: Window) -> "GradedSpace":
        return GradedSpace(window, {d: n for d, n in self.basis.items()
                                    if window.contains(d)})

    def shifted(self, s: Degree, rename: Callable[[str], str] | None = None) -> "GradedSpace":
        f = rename or (lambda n: n)
        return GradedSpace(self.window.shift(s),
                           {add_deg(d, s): tuple(f(n) for n in names)
                            for d, names in self.basis.items()})

    def vector_name(self, d: Degree, bits: int) -> str:
        names = self.names(d)
        return "+".join(names[i] for i in range(len(names)) if (bits >> i) & 1) or "0"


def dual_space(a: GradedSpace, mark: str = "^") -> GradedSpace:
    """Dual with negated grading; names get a dual marker (involutive)."""

    def dualname(n: str) -> str:
        return n[: -len(mark)] if n.endswith(mark) else n + mark

    return GradedSpace(
        a.window.negate(),
        {neg_deg(d): tuple(dualname(n) for n in names)
         for d, names in a.basis.items()},
    )


def truncate_twist(a: GradedSpace, mode: str, t: int) -> GradedSpace:
    """Keep degrees whose twist satisfies ``>= t`` or ``<= t``."""
    if mode == ">=":
        keep = {d: n for d, n in a.basis.items() if d[1] >= t}
    elif mode == "<=":
        keep = {d: n for d, n in a.basis.items() if d[1] <= t}
    else:
        raise ValueError("mode must be '>=' or '<='")
    return GradedSpace(a.window, keep)


def direct_sum(a: GradedSpace, b: GradedSpace, out: Window,
               tag_a: str = "", tag_b: str = "") -> GradedSpace:
    basis: dict[Degree, list[str]] = {}
    for d, names in a.basis.items():
        if out.contains(d):
            basis.setdefault(d, []).extend(tag_a + n for n in names)
    for d, names in b.basis.items():
        if out.contains(d):
            basis.setdefault(d, []).extend(tag_b + n for n in names)
    return GradedSpace(out, basis)


def tensor(a: GradedSpace, b: GradedSpace, out: Window,
           sep: str = "*") -> GradedSpace:
    """Graded tensor product clipped to ``out``; names are pair names."""
    basis: dict[Degree, list[str]] = {}
    for da, names_a in a.basis.items():
        for db, names_b in b.basis.items():
            d = add_deg(da, db)
            if not out.contains(d):
                continue
            basis.setdefault(d, []).extend(
                na + sep + nb for na in names_a for nb in names_b)
    return GradedSpace(out, basis)


class GradedMap:
    """Degree-shifting linear map given per source degree.

    Blocks map row vectors: ``image_bits = block.vec_mul(source_bits)``.
    Missing blocks are zero.  Blocks whose shifted target degree falls
    outside the target window are not stored.
    """

    def __init__(self, source: GradedSpace, target: GradedSpace, shift: Degree,
                 blocks: dict[Degree, F2Matrix] | None = None):
        self.source = source
        self.target = target
        self.shift = shift
        self.blocks: dict[Degree, F2Matrix] = {}
        for d, m in (blocks or {}).items():
            td = add_deg(d, shift)
            if m.nrows != source.dim(d) or m.ncols != target.dim(td):
                raise ValueError(f"block shape mismatch at {d}")
            if not m.is_zero():
                self.blocks[d] = m

    def block(self, d: Degree) -> F2Matrix:
        td = add_deg(d, self.shift)
        got = self.blocks.get(d)
        if got is not None:
            return got
        return F2Matrix.zero(self.source.dim(d), self.target.dim(td))

    def apply(self, d: Degree, bits: int) -> int:
        return self.block(d).vec_mul(bits)

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedMap):
            return False
        if (self.shift != other.shift or self.source != other.source
                or self.target != other.target):
            return False
        degs = set(self.blocks) | set(other.blocks)
        return all(self.block(d) == other.block(d) for d in degs)

    def compose(self, then: "GradedMap") -> "GradedMap":
        """self followed by ``then`` (shifts add)."""
        out: dict[Degree, F2Matrix] = {}
        for d in self.source.degrees():
            mid = add_deg(d, self.shift)
            b1 = self.block(d)
            b2 = then.block(mid)
            if b1.ncols != b2.nrows:
                raise ValueError("composition block mismatch")
            out[d] = b1.mul(b2)
        return GradedMap(self.source, then.target,
                         add_deg(self.shift, then.shift), out)

    def add(self, other: "GradedMap") -> "GradedMap":
        if self.shift != other.shift:
            raise ValueError("cannot add maps of different shifts")
        out: dict[Degree, F2Matrix] = {}
        for d in set(self.blocks) | set(other.blocks):
            out[d] = self.block(d).add(other.block(d))
        return GradedMap(self.source, self.target, self.shift, out)

    def dual(self, source_dual: GradedSpace, target_dual: GradedSpace) -> "GradedMap":
        """Transpose map on the dual spaces, same shift."""
        out: dict[Degree, F2Matrix] = {}
        for d, m in self.blocks.items():
            td = add_deg(d, self.shift)
            out[neg_deg(td)] = m.transpose()
        return GradedMap(target_dual, source_dual, self.shift, out)

    def kernel_at(self, d: Degree) -> F2Matrix:
        """Rows spanning the kernel at source degree d."""
        return left_kernel_basis(self.block(d))

    def image_at(self, d: Degree) -> F2Matrix:
        """Rows spanning the image inside target degree ``d``."""
        sd = sub_deg(d, self.shift)
        return row_basis(self.block(sd))

    def rank_at(self, d: Degree) -> int:
        return rank(self.block(d))


def zero_map(source: GradedSpace, target: GradedSpace, shift: Degree) -> GradedMap:
    return GradedMap(source, target, shift, {})


def identity_map(space: GradedSpace) -> GradedMap:
    return GradedMap(space, space, (0, 0),
                     {d: F2Matrix.identity(space.dim(d))
                      for d in space.degrees()})


def map_from_images(source: GradedSpace, target: GradedSpace, shift: Degree,
                    images: Callable[[Degree, str], Iterable[str]]) -> GradedMap:
    """Build a map from a name-level image function (sum of target names)."""
    blocks: dict[Degree, F2Matrix] = {}
    for d in source.degrees():
        td = add_deg(d, shift)
        tdim = target.dim(td)
        rows = []
        for name in source.names(d):
            bits = 0
            for out in images(d, name):
                if out == "0" or out == "":
                    continue
                if target.window.contains(td):
                    bits ^= 1 << target.index(td, out)
            rows.append(bits)
        if tdim or rows:
            blocks[d] = F2Matrix.from_rows(rows, tdim)
    return GradedMap(source, target, shift, blocks)


# -- subquotient helpers -----------------------------------------------------

@dataclass
class Subquotient:
    """Numerator/denominator row bases per degree in an ambient space."""

    ambient: GradedSpace
    numerators: dict[Degree, F2Matrix]
    denominators: dict[Degree, F2Matrix]

    def reps(self, d: Degree) -> F2Matrix:
        num = self.numerators.get(d)
        if num is None:
            return F2Matrix.zero(0, self.ambient.dim(d))
        den = self.denominators.get(d)
        if den is None or den.nrows == 0:
            return row_basis(num)
        return subquotient_basis(num.stack(den), den)

    def dim(self, d: Degree) -> int:
        return self.reps(d).nrows

    def dims(self) -> dict[Degree, int]:
        out = {}
        for d in set(self.numerators):
            n = self.dim(d)
            if n:
                out[d] = n
        return out

    def space(self, prefix: str = "c") -> GradedSpace:
        basis = {}
        for d, n in self.dims().items():
            basis[d] = tuple(f"{prefix}({d[0]},{d[1]})#{i}" for i in range(n))
        return GradedSpace(self.ambient.window, basis)

    def express(self, d: Degree, vec: int) -> Optional[int]:
        """Coordinates of an ambient vector in the rep basis, mod denominator."""
        reps = self.reps(d)
        den = self.denominators.get(d, F2Matrix.zero(0, self.ambient.dim(d)))
        full = reps.stack(den)
        c = solve_row(vec, full)
        if c is None:
            return None
        return c & ((1 << reps.nrows) - 1)


def induced_block(f: GradedMap, src: Subquotient, dst: Subquotient,
                  d: Degree) -> Optional[F2Matrix]:
    """Matrix of the map induced by ``f`` between subquotients at degree d."""
    reps = src.reps(d)
    td = add_deg(d, f.shift)
    tdim = dst.dim(td)
    rows = []
    for v in reps.rows:
        w = f.apply(d, v)
        c = dst.express(td, w)
        if c is None:
            return None
        rows.append(c)
    return F2Matrix.from_rows(rows, tdim)


# -- solver for operator-commuting graded maps -------------------------------

@dataclass(frozen=True)
class OperatorPair:
    """An operator present on both source and target of a hom problem."""

    name: str
    on_source: GradedMap
    on_target: GradedMap


def _components(degrees: list[Degree], shifts: list[Degree]) -> list[list[Degree]]:
    parent = {d: d for d in degrees}

    def find(x: Degree) -> Degree:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    degset = set(degrees)
    for d in degrees:
        for s in shifts:
            e = add_deg(d, s)
            if e in degset:
                ra, rb = find(d), find(e)
                if ra != rb:
                    parent[ra] = rb
    comps: dict[Degree, list[Degree]] = {}
    for d in degrees:
        comps.setdefault(find(d), []).append(d)
    return list(comps.values())


def hom_space(source: GradedSpace, target: GradedSpace, shift: Degree,
              operators: list[OperatorPair], region: Window) -> list[GradedMap]:
    """Basis of maps ``source -> target`` of the given degree shift that
    commute with every named operator, solved on ``region`` only.

    A map variable exists at each region degree where both the source and
    the shifted target are nonzero; everywhere else the map is the zero
    matrix.  Commutation is imposed at every source degree whose operator
    image stays inside the region, so truncated data is never trusted.
    The system splits into independent components along operator shifts.
    """
    var_degrees = [d for d in source.degrees()
                   if region.contains(d) and source.dim(d)
                   and target.dim(add_deg(d, shift))]
    op_shifts = [op.on_source.shift for op in operators]
    constraint_sites = []
    for op in operators:
        s_op = op.on_source.shift
        for d in source.degrees():
            if not region.contains(d) or not source.dim(d):
                continue
            d2 = add_deg(d, s_op)
            if region.contains(d2):
                constraint_sites.append((op, d, d2))

    total: list[GradedMap] = []
    for comp in _components(var_degrees, op_shifts + [neg_deg(s) for s in op_shifts]):
        compset = set(comp)
        offsets: dict[Degree, int] = {}
        nvars = 0
        for d in sorted(comp):
            offsets[d] = nvars
            nvars += source.dim(d) * target.dim(add_deg(d, shift))
        if nvars == 0:
            continue
        eq_rows: list[int] = []
        for op, d, d2 in constraint_sites:
            if d not in compset and d2 not in compset:
                continue
            a = op.on_source.block(d)                  # source_d -> source_d2
            b = op.on_target.block(add_deg(d, shift))  # shifted target blocks
            rs = source.dim(d)
            cs = target.dim(add_deg(d, shift))
            rt = source.dim(d2)
            ct = target.dim(add_deg(d2, shift))
            off2 = offsets.get(d2)
            off1 = offsets.get(d)
            for i in range(rs):
                for j in range(ct):
                    row = 0
                    if off2 is not None:
                        for p in range(rt):
                            if a.entry(i, p):
                                row ^= 1 << (off2 + p * ct + j)
                    if off1 is not None:
                        for q in range(cs):
                            if b.entry(q, j):
                                row ^= 1 << (off1 + i * cs + q)
                    if row:
                        eq_rows.append(row)
        system = F2Matrix.from_rows(eq_rows, nvars)
        null = kernel_basis(system)
        for sol in null.rows:
            blocks: dict[Degree, F2Matrix] = {}
            for d in comp:
                rs = source.dim(d)
                cs = target.dim(add_deg(d, shift))
                off = offsets[d]
                rows = []
                for i in range(rs):
                    bits = 0
                    for q in range(cs):
                        if (sol >> (off + i * cs + q)) & 1:
                            bits |= 1 << q
                    rows.append(bits)
                blocks[d] = F2Matrix.from_rows(rows, cs)
            total.append(GradedMap(source, target, shift, blocks))
    return total


def hom_space_dim(source: GradedSpace, target: GradedSpace, shift: Degree,
                  operators: list[OperatorPair], region: Window) -> int:
    return len(hom_space(source, target, shift, operators, region))
