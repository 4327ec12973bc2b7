"""Command-line driver.

Exit codes: 0 success, 1 specification error (parse, cover, placement,
strict mode), 2 conformance failure, 3 file I/O.
"""

from __future__ import annotations

import argparse
import itertools
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from genesyst.errors import (
    ConformanceError, GenesystError, IoError, SpecError,
)
from genesyst.frontend import MachineModel, parse, resolve_refinement
from genesyst.lts import (
    EXISTENTIAL, BuildResult, build, build_refined, emit_aut, emit_dot, emit_intermediate,
    parse_intermediate,
)
from genesyst.oracle import conformance, coverage_union, explore
from genesyst.prover import ProverConfig, export_obligation

FORMATS = {"inter": ".lts", "dot": ".dot", "aut": ".aut"}
TIME_BUDGET_ENV = "GENESYS_TIME_BUDGET_MS"


class UsageError(GenesystError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _range(text: str) -> Tuple[str, List[int]]:
    name, eq, rng = text.partition("=")
    if not eq or not name:
        raise UsageError("expected NAME=lo..hi or NAME=v, got %r" % text)
    lo, dots, hi = rng.partition("..")
    try:
        lo_i = int(lo)
        hi_i = int(hi) if dots else lo_i
    except ValueError:
        raise UsageError("bad integer range in %r" % text) from None
    if hi_i < lo_i:
        raise UsageError("empty range in %r" % text)
    return name.strip(), list(range(lo_i, hi_i + 1))


def prover_config(m: MachineModel, bounds: Sequence[str],
                  export_dir: Optional[str] = None) -> ProverConfig:
    consts, variables = {}, {}
    for b in bounds:
        name, values = _range(b)
        if name in m.constants:
            consts[name] = tuple(values)
        elif name in m.variables:
            variables[name] = (values[0], values[-1])
        else:
            raise UsageError("--bound names unknown identifier %r" % name)
    budget = 10.0
    env = os.environ.get(TIME_BUDGET_ENV)
    if env:
        try:
            budget = int(env) / 1000.0
        except ValueError:
            raise UsageError("%s must be an integer number of milliseconds" % TIME_BUDGET_ENV) \
                from None
    return ProverConfig(consts, variables, budget, export_dir)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError("cannot read %s: %s" % (path, exc.strerror or exc)) from None


def _write(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoError("cannot write %s: %s" % (path, exc.strerror or exc)) from None


def _parse_file(path: str) -> MachineModel:
    text = _read(path)
    try:
        return parse(text)
    except SpecError as exc:
        raise _with_file(exc, path)


def _with_file(exc: Exception, path: str) -> Exception:
    exc.args = ("%s: %s" % (path, exc),)
    return exc


def _load(args) -> Tuple[MachineModel, Optional[object]]:
    """The model to generate from and, for a refinement, the linked pair."""
    m = _parse_file(args.input)
    abstract = getattr(args, "abstract", None)
    if m.kind == "refinement":
        if not abstract:
            raise UsageError("%s is a refinement; pass --abstract FILE" % args.input)
        a = _parse_file(abstract)
        linked = resolve_refinement(m, a)
        return linked.model, linked
    if abstract:
        raise UsageError("%s is a machine; --abstract only applies to refinements"
                         % args.input)
    return m, None


def _generate(model, linked, cfg, allow_uncovered) -> BuildResult:
    if linked is None:
        return build(model, cfg, allow_uncovered)
    abstract_res = build(linked.abstract, cfg, allow_uncovered)
    res = build_refined(linked, abstract_res.lts, cfg, allow_uncovered)
    prefix = linked.abstract.name + "."
    res.report[:0] = [(replace(po, id=prefix + po.id), r) for po, r in abstract_res.report]
    res.warnings[:0] = ["abstract: " + w for w in abstract_res.warnings]
    return res


def po_report(res: BuildResult) -> str:
    out = ["# proof obligations for %s" % res.lts.name]
    for po, r in res.report:
        line = "%s %s %s %s" % (po.id, po.kind, r.verdict, r.method)
        if r.counterexample:
            tag = "witness" if po.kind in EXISTENTIAL else "cex"
            line += " %s " % tag + ",".join("%s=%s" % kv for kv in sorted(r.counterexample.items()))
        out.append(line)
    return "\n".join(out) + "\n"


def _formats(text: str) -> List[str]:
    fs = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fs if f not in FORMATS]
    if bad or not fs:
        raise UsageError("--format takes a comma list of %s" % ", ".join(FORMATS))
    return fs


def cmd_generate(args) -> int:
    formats = _formats(args.format)
    model, linked = _load(args)
    if args.command == "refine" and linked is None:
        raise UsageError("refine expects a REFINEMENT file")
    cfg = prover_config(model, args.bound)
    res = _generate(model, linked, cfg, args.allow_uncovered)
    out = Path(args.out)
    name = res.lts.name
    texts = {}
    for f in formats:
        if f == "inter":
            texts[f] = emit_intermediate(res.lts)
        elif f == "dot":
            texts[f] = emit_dot(res.lts)
        else:
            texts[f] = emit_aut(res.lts, args.allow_multiple_initial)
    for f in formats:
        _write(out / (name + FORMATS[f]), texts[f])
    _write(out / (name + ".po.txt"), po_report(res))
    for w in res.warnings:
        print("warning: %s" % w, file=sys.stderr)
    defaults = res.default_transitions()
    if args.strict and defaults:
        print("strict: %d transitions kept by default:" % len(defaults), file=sys.stderr)
        for t in defaults:
            print("  %s --%s--> %s" % t.key, file=sys.stderr)
        return 1
    return 0


def cmd_conform(args) -> int:
    model, linked = _load(args)
    ranges = [_range(s) for s in args.instantiate]
    names = [n for n, _ in ranges]
    unknown = [n for n in names if n not in model.constants]
    if unknown:
        raise UsageError("--instantiate names non-constant %s" % ", ".join(unknown))
    missing = [c for c in model.constants if c not in names]
    if missing:
        raise UsageError("no --instantiate value for constant %s" % ", ".join(missing))
    if args.lts:
        try:
            lts = parse_intermediate(_read(args.lts))
        except SpecError as exc:
            raise _with_file(exc, args.lts)
    else:
        bounds = list(args.bound) or list(args.instantiate)
        lts = _generate(model, linked, prover_config(model, bounds), False).lts
    reports = []
    for values in itertools.product(*(vs for _, vs in ranges)):
        inst: Dict[str, int] = dict(zip(names, values))
        x = explore(model, inst, args.max_states)
        rep = conformance(x, lts, model)
        label = ",".join("%s=%s" % kv for kv in inst.items())
        print("# instantiation %s" % label)
        sys.stdout.write(rep.text())
        reports.append(rep)
    missing_t = coverage_union(reports, lts)
    for k in missing_t:
        print("CHECK coverage-union WARN %s --%s--> %s never witnessed" % k)
    if not missing_t:
        print("CHECK coverage-union PASS all %d symbolic transitions witnessed"
              % len(lts.transitions))
    return 0 if all(r.ok for r in reports) else 2


def cmd_export_po(args) -> int:
    model, linked = _load(args)
    cfg = prover_config(model, args.bound)
    res = _generate(model, linked, cfg, True)
    out = Path(args.out)
    lines = []
    for po, _ in res.report:
        lines.append(po.to_text())
        try:
            export_obligation(po, str(out))
        except OSError as exc:
            raise IoError(str(exc)) from None
    _write(out / (res.lts.name + ".obligations.txt"), "\n".join(lines) + "\n")
    _write(out / (res.lts.name + ".po.txt"), po_report(res))
    print("%d obligations written to %s" % (len(lines), out))
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="genesyst",
                description="Generate symbolic transition systems from event-B models.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, abstract_required=False):
        sp.add_argument("input", help="machine (.mch) or refinement (.ref) file")
        sp.add_argument("--abstract", required=abstract_required,
                        help="abstract machine refined by INPUT")
        sp.add_argument("--bound", action="append", default=[], metavar="NAME=lo..hi",
                        help="enumeration bound for a constant or variable")

    for name in ("generate", "refine"):
        sp = sub.add_parser(name, help="build the symbolic LTS")
        common(sp, abstract_required=(name == "refine"))
        sp.add_argument("--format", default="inter,dot,aut",
                        help="comma list of inter, dot, aut (default: all)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--strict", action="store_true",
                        help="fail when a transition is kept only by default")
        sp.add_argument("--allow-uncovered", action="store_true",
                        help="generate even if the cover obligation is not proven")
        sp.add_argument("--allow-multiple-initial", action="store_true",
                        help="let AUT output pick the first of several initial states")
        sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("conform", help="check the symbolic LTS against explicit exploration")
    common(sp)
    sp.add_argument("--instantiate", action="append", default=[], metavar="NAME=v",
                    help="constant value or range lo..hi (one run per value)")
    sp.add_argument("--lts", help="intermediate file to check instead of regenerating")
    sp.add_argument("--max-states", type=int, default=100_000)
    sp.set_defaults(func=cmd_conform)

    sp = sub.add_parser("export-po", help="write obligations as SMT-LIB 2 files")
    common(sp)
    sp.add_argument("--out", default=".", help="output directory")
    sp.set_defaults(func=cmd_export_po)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except IoError as exc:
        print("genesyst: %s" % exc, file=sys.stderr)
        return 3
    except ConformanceError as exc:
        print("genesyst: %s" % exc, file=sys.stderr)
        return 2
    except GenesystError as exc:
        print("genesyst: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
