"""Line-based text formats for modules and synthetic towers.

The grammar is deliberately small: a ``kind`` header, a ``window`` line,
``gen`` lines declaring named classes with their degree, and action lines
``op name = name [+ name]...`` (omitted lines mean zero).  Printing is
canonical: generators sorted by degree then name, action lines sorted the
same way with sorted right-hand sides, so parse-print round-trips are
byte exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .a1 import A1Module
from .emod import EModule
from .gf2 import F2Matrix
from .graded import GradedMap, GradedSpace, Window, add_deg
from .towers import Summand, XTowerSpec

A1_OPS = {"sq1": 1, "sq2": 2}
E_OPS = {"q0": (1, 0), "q1": (2, 1), "a": (0, 1), "s": (-1, 1)}


class ParseError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass
class ModuleFile:
    kind: str
    window: Window
    gens: dict[str, tuple[int, int]]
    actions: dict[tuple[str, str], tuple[str, ...]]   # (op, name) -> targets
    tower: Optional[XTowerSpec] = None
    tower_levels: tuple[int, int] = (0, 0)


def parse_module_file(text: str) -> ModuleFile:
    kind = ""
    window: Optional[Window] = None
    gens: dict[str, tuple[int, int]] = {}
    actions: dict[tuple[str, str], tuple[str, ...]] = {}
    xdeg = 1
    levels = (0, 0)
    summands: list[Summand] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0]
        if head == "kind":
            if len(parts) != 2 or parts[1] not in ("a1", "e", "tower"):
                raise ParseError(line_no, "kind must be a1, e or tower")
            kind = parts[1]
        elif head == "window":
            if len(parts) != 5:
                raise ParseError(line_no, "window needs four integers")
            try:
                window = Window(*[int(x) for x in parts[1:]])
            except ValueError as exc:
                raise ParseError(line_no, str(exc)) from exc
        elif head == "gen":
            if len(parts) not in (3, 4):
                raise ParseError(line_no, "gen needs a name and 1 or 2 degrees")
            name = parts[1]
            if name in gens:
                raise ParseError(line_no, f"duplicate generator {name}")
            m = int(parts[2])
            k = int(parts[3]) if len(parts) == 4 else 0
            gens[name] = (m, k)
        elif head in A1_OPS or head in E_OPS:
            body = " ".join(parts[1:])
            if "=" not in body:
                raise ParseError(line_no, "action line needs '='")
            lhs, rhs = (x.strip() for x in body.split("=", 1))
            targets = tuple(x.strip() for x in rhs.split("+")) \
                if rhs != "0" else ()
            if lhs not in gens:
                raise ParseError(line_no, f"unknown source {lhs}")
            for tname in targets:
                if tname not in gens:
                    raise ParseError(line_no, f"unknown target {tname}")
            shift = (A1_OPS[head], 0) if head in A1_OPS else E_OPS[head]
            src = gens[lhs]
            for tname in targets:
                td = gens[tname]
                if (src[0] + shift[0], src[1] + shift[1]) != td:
                    raise ParseError(
                        line_no, f"degree mismatch: {head} moves {src} to "
                                 f"{(src[0] + shift[0], src[1] + shift[1])}, "
                                 f"target {tname} sits at {td}")
            actions[(head, lhs)] = targets
        elif head == "xdeg":
            xdeg = int(parts[1])
        elif head == "levels":
            levels = (int(parts[1]), int(parts[2]))
        elif head == "summand":
            if parts[1] == "cyclic":
                summands.append(Summand("cyclic", int(parts[2]), int(parts[3])))
            elif parts[1] == "free":
                summands.append(Summand("free", int(parts[2])))
            else:
                raise ParseError(line_no, "summand must be cyclic or free")
        else:
            raise ParseError(line_no, f"unknown directive {head}")
    if not kind:
        raise ParseError(0, "missing kind header")
    if window is None:
        raise ParseError(0, "missing window header")
    tower = XTowerSpec(xdeg, tuple(summands)) if kind == "tower" else None
    return ModuleFile(kind, window, gens, actions, tower, levels)


def module_file_to_a1(mf: ModuleFile) -> A1Module:
    if mf.kind != "a1":
        raise ValueError("not an a1 module file")
    basis: dict[int, list[str]] = {}
    for name, (m, _) in sorted(mf.gens.items(), key=lambda kv: (kv[1], kv[0])):
        basis.setdefault(m, []).append(name)
    sorted_basis = {d: tuple(sorted(ns)) for d, ns in basis.items()}
    idx = {d: {n: i for i, n in enumerate(ns)} for d, ns in sorted_basis.items()}

    def blocks(op: str, reach: int) -> dict[int, F2Matrix]:
        out = {}
        for d, ns in sorted_basis.items():
            tdim = len(sorted_basis.get(d + reach, ()))
            rows = []
            for nm in ns:
                bits = 0
                for t in mf.actions.get((op, nm), ()):
                    bits ^= 1 << idx[d + reach][t]
                rows.append(bits)
            out[d] = F2Matrix.from_rows(rows, tdim)
        return out

    w = mf.window
    return A1Module(sorted_basis, blocks("sq1", 1), blocks("sq2", 2),
                    w.m_lo, w.m_hi, w.m_lo, w.m_hi)


def a1_to_module_file_text(m: A1Module) -> str:
    lines = ["kind a1", f"window {m.lo} {m.hi} 0 0"]
    entries = []
    for d in m.degrees():
        for name in m.names(d):
            entries.append((d, name))
    for d, name in sorted(entries):
        lines.append(f"gen {name} {d}")
    action_lines = []
    for d, name in sorted(entries):
        i = m.index(d, name)
        for op, img, td in (("sq1", m.apply_sq1(d, 1 << i), d + 1),
                            ("sq2", m.apply_sq2(d, 1 << i), d + 2)):
            targets = sorted(n for j, n in enumerate(m.names(td))
                             if (img >> j) & 1)
            if targets:
                action_lines.append(f"{op} {name} = {' + '.join(targets)}")
    lines.extend(sorted(action_lines))
    return "\n".join(lines) + "\n"


def module_file_to_e(mf: ModuleFile) -> EModule:
    if mf.kind != "e":
        raise ValueError("not an e module file")
    w = mf.window
    basis: dict[tuple[int, int], list[str]] = {}
    for name, d in mf.gens.items():
        basis.setdefault(d, []).append(name)
    space = GradedSpace(w, basis)

    def build(op: str) -> GradedMap:
        shift = E_OPS[op]
        blocks = {}
        for d in space.degrees():
            td = add_deg(d, shift)
            rows = []
            for nm in space.names(d):
                bits = 0
                for t in mf.actions.get((op, nm), ()):
                    bits ^= 1 << space.index(td, t)
                rows.append(bits)
            blocks[d] = F2Matrix.from_rows(rows, space.dim(td))
        return GradedMap(space, space, shift, blocks)

    has_a = any(op == "a" for op, _ in mf.actions)
    has_s = any(op == "s" for op, _ in mf.actions)
    return EModule(space, build("q0"), build("q1"), w,
                   act_a=build("a") if has_a else None,
                   act_s=build("s") if has_s else None)


def e_to_module_file_text(m: EModule) -> str:
    lines = ["kind e", f"window {m.space.window.m_lo} {m.space.window.m_hi} "
                       f"{m.space.window.k_lo} {m.space.window.k_hi}"]
    entries = []
    for d in m.space.degrees():
        for name in m.space.names(d):
            entries.append((d, name))
    for d, name in sorted(entries):
        lines.append(f"gen {name} {d[0]} {d[1]}")
    action_lines = []
    ops = [("q0", m.q0), ("q1", m.q1)]
    if m.act_a is not None:
        ops.append(("a", m.act_a))
    if m.act_s is not None:
        ops.append(("s", m.act_s))
    for d, name in sorted(entries):
        i = m.space.index(d, name)
        for op, mp in ops:
            td = add_deg(d, mp.shift)
            img = mp.apply(d, 1 << i)
            targets = sorted(n for j, n in enumerate(m.space.names(td))
                             if (img >> j) & 1)
            if targets:
                action_lines.append(f"{op} {name} = {' + '.join(targets)}")
    lines.extend(sorted(action_lines))
    return "\n".join(lines) + "\n"


def tower_to_module_file_text(spec: XTowerSpec, window: Window,
                              levels: tuple[int, int]) -> str:
    lines = ["kind tower",
             f"window {window.m_lo} {window.m_hi} {window.k_lo} {window.k_hi}",
             f"xdeg {spec.xdeg}",
             f"levels {levels[0]} {levels[1]}"]
    for s in spec.summands:
        if s.kind == "cyclic":
            lines.append(f"summand cyclic {s.shift} {s.order}")
        else:
            lines.append(f"summand free {s.shift}")
    return "\n".join(lines) + "\n"
