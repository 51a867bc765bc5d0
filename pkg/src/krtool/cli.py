"""Command line front end: verification driver, computations, charts.

    krtool verify [SUITE ...]             run acceptance suites (default all)
    krtool compute TASK [options]         run one computation, emit a table

Common options: ``--window M_LO M_HI K_LO K_HI``, ``--out PATH``,
``--format tsv|txt|svg``, ``--builtin NAME``, ``--in FILE``, ``--bv N``,
``--layers J``, ``--seed S``, ``--which q0|q1``, ``--n N``.
Builtin module names: A1, F, P, P0..P3, BV<n>, RP<n>, HP.
The environment variable KRTOOL_THREADS caps verifier parallelism.
"""

from __future__ import annotations

import argparse
import random
import sys
from typing import Optional

from . import closedform as cfm
from .a1 import (
    A1Module,
    margolis,
    reduce,
    socle_dims,
    std_a1,
    std_bv,
    std_f,
    std_p,
    std_pn,
)
from .emod import EModule, h01, rel_ext
from .graded import Window
from .io import (
    a1_to_module_file_text,
    module_file_to_a1,
    module_file_to_e,
    parse_module_file,
)
from .kr import assemble_kr
from .rfun import apply_r, required_top
from .towers import build_x_tower, detect, random_x_tower_spec, validate_tower
from .verify import SUITES, run_all


def _window(args) -> Window:
    return Window(*args.window)


def _builtin_a1(name: str, w: Window) -> Optional[A1Module]:
    top = required_top(w)
    if name == "A1":
        return std_a1()
    if name == "F":
        return std_f()
    if name == "P":
        return std_p(w.m_lo, max(top, w.m_hi))
    if name.startswith("P") and name[1:].isdigit():
        return std_pn(int(name[1:]), w.m_lo - 1, max(top, w.m_hi))
    if name.startswith("BV") and name[2:].isdigit():
        return std_bv(int(name[2:]), 1, max(top, w.m_hi))
    return None


def _load_a1(args, w: Window) -> A1Module:
    if args.builtin:
        m = _builtin_a1(args.builtin, w)
        if m is None:
            raise SystemExit(f"unknown builtin module {args.builtin!r}")
        return m
    if args.infile:
        mf = parse_module_file(open(args.infile).read())
        return module_file_to_a1(mf)
    raise SystemExit("need --builtin or --in")


def _load_e(args, w: Window) -> EModule:
    if args.builtin and args.builtin.startswith("RP") \
            and args.builtin[2:].isdigit():
        m = std_pn(int(args.builtin[2:]), w.m_lo - 1, required_top(w))
        return apply_r(m, w).emod
    if args.builtin:
        base = _builtin_a1(args.builtin, w)
        if base is not None:
            return apply_r(base, w).emod
        raise SystemExit(f"unknown builtin module {args.builtin!r}")
    if args.infile:
        mf = parse_module_file(open(args.infile).read())
        if mf.kind == "e":
            return module_file_to_e(mf)
        return apply_r(module_file_to_a1(mf), w).emod
    raise SystemExit("need --builtin or --in")


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid_txt(dims: dict, w: Window) -> str:
    lines = []
    header = "k\\m " + " ".join(f"{m:3d}" for m in range(w.m_lo, w.m_hi + 1))
    lines.append(header)
    for k in range(w.k_hi, w.k_lo - 1, -1):
        cells = []
        for m in range(w.m_lo, w.m_hi + 1):
            v = dims.get((m, k), 0)
            cells.append("  ." if v == 0 else f"{min(v, 99):3d}")
        lines.append(f"{k:3d} " + " ".join(cells))
    return "\n".join(lines) + "\n"


def _grid_tsv(dims: dict, w: Window, tag: str = "dim") -> str:
    lines = ["m\tk\tdim\ttag"]
    for (m, k) in sorted(d for d in dims if w.contains(d)):
        lines.append(f"{m}\t{k}\t{dims[(m, k)]}\t{tag}")
    return "\n".join(lines) + "\n"


def _grid_svg(dims: dict, w: Window) -> str:
    cell = 18
    width = (w.m_hi - w.m_lo + 1) * cell + 40
    height = (w.k_hi - w.k_lo + 1) * cell + 40
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}">']
    for (m, k), v in sorted(dims.items()):
        if not w.contains((m, k)) or v == 0:
            continue
        x = 20 + (m - w.m_lo) * cell
        y = 20 + (w.k_hi - k) * cell
        parts.append(f'<rect x="{x}" y="{y}" width="{cell - 2}" '
                     f'height="{cell - 2}" fill="#ccd" />')
        parts.append(f'<text x="{x + 4}" y="{y + cell - 6}" '
                     f'font-size="10">{v}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _emit_dims(dims: dict, w: Window, args) -> None:
    if args.format == "txt":
        _emit(_grid_txt(dims, w), args.out)
    elif args.format == "svg":
        _emit(_grid_svg(dims, w), args.out)
    else:
        _emit(_grid_tsv(dims, w), args.out)


def cmd_verify(args) -> int:
    names = args.suites or list(SUITES)
    if names == ["all"]:
        names = list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        print(f"unknown suite name(s): {', '.join(unknown)}", file=sys.stderr)
        print(f"available: {', '.join(SUITES)}", file=sys.stderr)
        return 2
    results = run_all(names)
    rows = ["suite\tstatus\tseconds\tdetail"]
    worst = 0
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {r.name} ({r.seconds:.2f}s): {r.detail}")
        rows.append(f"{r.name}\t{status}\t{r.seconds:.2f}\t{r.detail}")
        if not r.ok:
            worst = 1
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("\n".join(rows) + "\n")
    return worst


def cmd_compute(args) -> int:
    w = _window(args)
    task = args.task
    if task == "margolis":
        m = _load_a1(args, w)
        dims = margolis(m, args.which)
        _emit_dims({(d, 0): v for d, v in dims.items()}, w, args)
    elif task == "socle":
        m = _load_a1(args, w)
        _emit_dims({(d, 0): v for d, v in socle_dims(m).items()}, w, args)
    elif task == "reduce":
        m = _load_a1(args, w)
        red = reduce(m)
        lines = ["degree\tfree_generators"]
        for g in sorted(set(red.free_gens)):
            lines.append(f"{g}\t{red.free_gens.count(g)}")
        lines.append(f"# reduced dims: {red.module.dims()}")
        lines.append(f"# certified through degree {red.certified_hi}")
        _emit("\n".join(lines) + "\n", args.out)
    elif task == "h01":
        em = _load_e(args, w)
        _emit_dims(h01(em).dims(), w, args)
    elif task == "relext":
        em = _load_e(args, w)
        _emit_dims(rel_ext(em, args.n), w, args)
    elif task == "tower-detect":
        rng = random.Random(args.seed)
        spec = random_x_tower_spec(rng)
        d = spec.xdeg
        shifts = [s.shift for s in spec.summands]
        orders = [s.order for s in spec.summands if s.kind == "cyclic"]
        tw = Window(min(shifts) - 2 * d - 1,
                    max(shifts) + (max(orders, default=1) + 10) * d + 2, 0, 0)
        t = build_x_tower(spec, tw, -2, 4)
        bad = validate_tower(t)
        lines = [f"# seed {args.seed}: {spec}"]
        lines.append(f"valid\t{not bad}")
        for h in (1, 2, 3):
            holds = all(detect(t, h, n).holds for n in (0, 1))
            lines.append(f"height{h}\t{'holds' if holds else 'fails'}")
        _emit("\n".join(lines) + "\n", args.out)
    elif task == "kr-table":
        rep = assemble_kr(args.bv, w, max_layer=args.layers)
        _emit(rep.to_tsv(), args.out)
    elif task == "chart":
        if args.builtin == "HP":
            dims = {d: cfm.hp_dim(d) for d in w.degrees() if cfm.hp_dim(d)}
        elif args.builtin and args.builtin.startswith("RP"):
            em = _load_e(args, w)
            dims = h01(em).dims()
        elif args.bv:
            dims = cfm.hv_closed_dims(args.bv, w)
        else:
            em = _load_e(args, w)
            dims = em.space.dims()
        _emit_dims(dims, w, args)
    elif task == "print":
        m = _load_a1(args, w)
        _emit(a1_to_module_file_text(m), args.out)
    else:
        raise SystemExit(f"unknown task {task!r}")
    return 0


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="krtool",
        description="windowed GF(2) homological algebra and the assembled "
                    "charts of real connective K-theory of elementary "
                    "abelian 2-groups")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run verification suites")
    pv.add_argument("suites", nargs="*", metavar="SUITE",
                    help=f"suites to run (default all): {', '.join(SUITES)}")
    pv.add_argument("--out", help="write a TSV summary")
    pv.set_defaults(func=cmd_verify)

    pc = sub.add_parser("compute", help="run one computation")
    pc.add_argument("task", choices=["margolis", "socle", "reduce", "h01",
                                     "relext", "tower-detect", "kr-table",
                                     "chart", "print"])
    pc.add_argument("--window", nargs=4, type=int,
                    default=[-12, 12, -6, 6],
                    metavar=("M_LO", "M_HI", "K_LO", "K_HI"))
    pc.add_argument("--builtin", help="builtin module name")
    pc.add_argument("--in", dest="infile", help="module file")
    pc.add_argument("--out", help="output path (default stdout)")
    pc.add_argument("--format", choices=["tsv", "txt", "svg"], default="tsv")
    pc.add_argument("--bv", type=int, default=0, help="group rank")
    pc.add_argument("--layers", type=int, default=3)
    pc.add_argument("--seed", type=int, default=1)
    pc.add_argument("--which", choices=["q0", "q1"], default="q0")
    pc.add_argument("--n", type=int, default=1, help="extension slot")
    pc.set_defaults(func=cmd_compute)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
