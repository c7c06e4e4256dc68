"""Command-line front end.

One subcommand per library entry point, a three-way exit code mirroring the
verdict type (0 proven/success, 1 refuted, 2 unknown at budget, 64 usage),
and byte-identical JSON reports for scripting.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .words import parse_word, word_str
from .automorphism import EqBudget, equal, is_trivial
from .group_defs import GroupDefinitionError, ggs, grigorchuk, parse_group, print_group
from .level_quotient import build_quotient, factored_order
from .structure import (spherical_transitivity, tree_primitive, check_prop_4_2,
                        check_prop_4_3, regular_branch_check,
                        maximal_branching_candidate)
from .blocks import (DiagonalSpec, BlockStructure, build_block, diagonal_spec,
                     serialize_structure, verify_block)
from .detect import DetectBudget, SubgroupHandle, block_detect
from .verdict import Verdict, proven, refuted, unknown

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    """argparse with the usage exit code fixed at 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _load_group(spec: str):
    if spec == "grigorchuk":
        return grigorchuk()
    if spec.startswith("ggs:"):
        bits = spec.split(":")
        if len(bits) != 3:
            raise GroupDefinitionError(f"bad ggs spec {spec!r}; want ggs:<d>:<e0,e1,...>")
        group, _ = ggs(int(bits[1]), tuple(int(x) for x in bits[2].split(",")))
        return group
    path = Path(spec)
    if not path.is_file():
        raise GroupDefinitionError(f"unknown preset or missing file: {spec!r}")
    return parse_group(path.read_text())


def _elements(group, text: str):
    return [group.element(tok.strip()) for tok in text.split(",") if tok.strip()]


def _parse_parts(group, text: str) -> list[list]:
    parts = []
    for chunk in text.split("|"):
        vs = [parse_word(tok, group.d) for tok in chunk.split(",") if tok.strip()]
        if not vs:
            raise ValueError("empty part in --parts")
        parts.append(vs)
    return parts


def _eq_budget(args) -> EqBudget:
    return EqBudget(max_depth=args.budget_depth, max_states=args.budget_states)


def _emit(args, payload: dict, text_lines: list[str]) -> None:
    if args.report == "json":
        print(json.dumps(payload, sort_keys=True, separators=(",", ":")))
    else:
        for line in text_lines:
            print(line)


def _verdict_lines(v: Verdict) -> list[str]:
    lines = [str(v)]
    for k in sorted(v.certificate):
        lines.append(f"  {k}: {v.certificate[k]}")
    return lines


def _combined_exit(verdicts) -> int:
    codes = [v.exit_code() for v in verdicts]
    if any(c == 1 for c in codes):
        return 1
    if any(c == 2 for c in codes):
        return 2
    return 0


# -- subcommands -------------------------------------------------------------

def _cmd_act(args) -> int:
    group = _load_group(args.group)
    el = group.element(args.elem)
    w = parse_word(args.word, group.d)
    image = el.act(w)
    _emit(args, {"elem": args.elem, "image": word_str(image), "word": word_str(w)},
          [word_str(image)])
    return 0


def _cmd_section(args) -> int:
    group = _load_group(args.group)
    el = group.element(args.elem)
    v = parse_word(args.vertex, group.d)
    sec = el.section(v)
    _emit(args, {"elem": args.elem, "section": str(sec), "vertex": word_str(v)},
          [str(sec)])
    return 0


def _cmd_eq(args) -> int:
    group = _load_group(args.group)
    left = group.element(args.left)
    right = group.element(args.right)
    v = equal(left, right, _eq_budget(args))
    _emit(args, {"left": args.left, "right": args.right, "verdict": v.to_json()},
          _verdict_lines(v))
    return v.exit_code()


def _cmd_quotient(args) -> int:
    group = _load_group(args.group)
    q = build_quotient(group, args.level)
    order = q.order()
    payload = {"domain": q.domain_size, "level": args.level,
               "order": order, "order_factored": factored_order(order)}
    _emit(args, payload,
          [f"level {args.level}: order {order} = {factored_order(order)}, "
           f"domain {q.domain_size} points"])
    return 0


def _cmd_orbits(args) -> int:
    group = _load_group(args.group)
    flags = spherical_transitivity(group, args.level)
    lines = [f"level {k + 1}: {'transitive' if ok else 'intransitive'}"
             for k, ok in enumerate(flags)]
    if all(flags):
        v = proven(levels=args.level)
    else:
        v = refuted(first_intransitive_level=flags.index(False) + 1)
    _emit(args, {"transitive": flags, "verdict": v.to_json()}, lines + [str(v)])
    return v.exit_code()


def _cmd_treeprim(args) -> int:
    group = _load_group(args.group)
    v = tree_primitive(group, args.level)
    lines = [str(v)]
    if v.is_proven:
        census = v.certificate["census"]
        lines.append(f"levels 0..{args.level}: "
                     f"{','.join(str(c) for c in census)} invariant partitions")
    else:
        lines.extend(_verdict_lines(v)[1:])
    _emit(args, {"level": args.level, "verdict": v.to_json()}, lines)
    return v.exit_code()


def _cmd_prop42(args) -> int:
    group = _load_group(args.group)
    out = check_prop_4_2(group, args.level)
    lines = []
    for name in sorted(out):
        lines.append(f"{name}: {out[name]}")
    _emit(args, {name: v.to_json() for name, v in out.items()}, lines)
    return _combined_exit(out.values())


def _cmd_prop43(args) -> int:
    group = _load_group(args.group)
    v = check_prop_4_3(group, args.level, x0=args.x0, y0=args.y0)
    _emit(args, {"level": args.level, "verdict": v.to_json()}, _verdict_lines(v))
    return v.exit_code()


def _branching_or_flag(group, kgens: str | None):
    if kgens:
        return _elements(group, kgens)
    els = group.branching_elements()
    if not els:
        raise GroupDefinitionError("group declares no branching subgroup; pass --kgens")
    return els


def _cmd_branch_check(args) -> int:
    group = _load_group(args.group)
    K = _branching_or_flag(group, args.kgens)
    v = regular_branch_check(group, K, args.level)
    _emit(args, {"level": args.level, "verdict": v.to_json()}, _verdict_lines(v))
    return v.exit_code()


def _cmd_maxbranch(args) -> int:
    group = _load_group(args.group)
    report = maximal_branching_candidate(group, args.level)
    lines = [f"deepest level: {report['deepest_level']}",
             f"index chain: {report['index_chain']}",
             f"stabilized at: {report['stabilized_at']}",
             f"candidate order: {report['candidate_order']}"]
    for entry in report["entries"]:
        lines.append(f"  vertex {entry['vertex']}: projection order "
                     f"{entry['projection_order']}, index {entry['index']}, "
                     f"equals declared: {entry.get('equals_declared')}")
    _emit(args, report, lines)
    return 0


def _cmd_block_build(args) -> int:
    group = _load_group(args.group)
    K = _branching_or_flag(group, args.kgens)
    parts = _parse_parts(group, args.parts)
    gens, structure = build_block([diagonal_spec(K, V) for V in parts])
    lines = serialize_structure(structure).splitlines()
    lines += [f"generator: {g}" for g in gens]
    _emit(args, {"generators": [str(g) for g in gens],
                 "structure": serialize_structure(structure)}, lines)
    return 0


def _cmd_block_verify(args) -> int:
    group = _load_group(args.group)
    K = _branching_or_flag(group, args.kgens)
    parts = _parse_parts(group, args.parts)
    gens, structure = build_block([diagonal_spec(K, V) for V in parts])
    if args.gens:
        gens = _elements(group, args.gens)
    checks = verify_block(gens, structure, n=args.level, budget=args.budget_word,
                          eq_budget=_eq_budget(args))
    lines = [f"{name}: {v}" for name, v in checks.items()]
    _emit(args, {name: v.to_json() for name, v in checks.items()}, lines)
    return _combined_exit(checks.values())


def _cmd_detect(args) -> int:
    group = _load_group(args.group)
    if args.parts:
        K = _branching_or_flag(group, args.kgens)
        gens, _ = build_block([diagonal_spec(K, V)
                               for V in _parse_parts(group, args.parts)])
    elif args.gens:
        gens = _elements(group, args.gens)
    else:
        gens = group.generators()
    H = SubgroupHandle(group, gens)
    budget = DetectBudget(depth=args.depth, max_word=args.budget_word,
                          levels=args.budget_levels,
                          eq=_eq_budget(args))
    structure, v = block_detect(H, budget)
    payload = {"structure": serialize_structure(structure) if structure else None,
               "verdict": v.to_json()}
    lines = []
    if structure is not None:
        lines.extend(serialize_structure(structure).splitlines())
    lines.extend(_verdict_lines(v))
    _emit(args, payload, lines)
    return v.exit_code()


def _cmd_ggs(args) -> int:
    exponents = tuple(int(x) for x in args.e.split(","))
    group, torsion = ggs(args.p, exponents)
    if args.torsion:
        if torsion is None:
            v = unknown(note="torsion criterion needs a prime alphabet")
        elif torsion:
            v = proven(criterion="exponent sum divisible by the alphabet size")
        else:
            v = refuted(criterion="exponent sum not divisible by the alphabet size")
        _emit(args, {"p": args.p, "e": list(exponents),
                     "torsion": torsion, "verdict": v.to_json()},
              [f"torsion: {'unknown' if torsion is None else str(bool(torsion)).lower()}"])
        return v.exit_code()
    _emit(args, {"p": args.p, "e": list(exponents), "torsion": torsion,
                 "definition": print_group(group)},
          print_group(group).splitlines())
    return 0


# -- wiring -------------------------------------------------------------------

def _add_common(p: _Parser, group: bool = True) -> None:
    if group:
        p.add_argument("--group", required=True,
                       help="preset (grigorchuk, ggs:<d>:<e,...>) or definition file")
    p.add_argument("--report", choices=("json", "text"), default="text")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker cap (runs sequentially; accepted for compatibility)")
    p.add_argument("--budget-depth", type=int, default=64,
                   help="depth cutoff for equality searches")
    p.add_argument("--budget-states", type=int, default=100_000,
                   help="state cutoff for equality searches")
    p.add_argument("--budget-word", type=int, default=12,
                   help="generator-word length cutoff")
    p.add_argument("--budget-levels", type=int, default=5,
                   help="quotient levels for image comparisons")


def build_parser() -> _Parser:
    top = _Parser(prog="bl", description=__doc__.splitlines()[0])
    sub = top.add_subparsers(dest="command", required=True)

    def cmd(name, fn, **kw):
        p = sub.add_parser(name, **kw)
        _add_common(p, group=(name != "ggs"))
        p.set_defaults(fn=fn)
        return p

    p = cmd("act", _cmd_act, help="act on a word")
    p.add_argument("--elem", required=True)
    p.add_argument("--word", required=True)

    p = cmd("section", _cmd_section, help="section of an element at a vertex")
    p.add_argument("--elem", required=True)
    p.add_argument("--vertex", required=True)

    p = cmd("eq", _cmd_eq, help="decide equality of two elements")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)

    p = cmd("quotient", _cmd_quotient, help="order of a level quotient")
    p.add_argument("--level", "-n", type=int, required=True)

    p = cmd("orbits", _cmd_orbits, help="orbit count per level")
    p.add_argument("--level", "-n", type=int, required=True)

    p = cmd("treeprim", _cmd_treeprim, help="tree-primitivity census")
    p.add_argument("--level", "-n", type=int, required=True)

    p = cmd("prop42", _cmd_prop42, help="primitivity and separation conditions")
    p.add_argument("--level", "-n", type=int, required=True)

    p = cmd("prop43", _cmd_prop43, help="sufficient tree-primitivity test")
    p.add_argument("--level", "-n", type=int, required=True)
    p.add_argument("--x0", type=int)
    p.add_argument("--y0", type=int)

    p = cmd("branch-check", _cmd_branch_check, help="regular-branch containments")
    p.add_argument("--level", "-n", type=int, required=True)
    p.add_argument("--kgens", help="comma-separated branching generator words")

    p = cmd("maxbranch", _cmd_maxbranch, help="maximal branching candidate")
    p.add_argument("--level", "-n", type=int, required=True)

    p = cmd("block-build", _cmd_block_build, help="build a block subgroup")
    p.add_argument("--parts", required=True,
                   help="supports, e.g. '000,001|1' (| between parts)")
    p.add_argument("--kgens")

    p = cmd("block-verify", _cmd_block_verify, help="verify a block structure")
    p.add_argument("--parts", required=True)
    p.add_argument("--kgens")
    p.add_argument("--gens", help="generator words replacing the built ones")
    p.add_argument("--level", "-n", type=int, default=4)

    p = cmd("detect", _cmd_detect, help="detect a block structure")
    p.add_argument("--gens", help="comma-separated subgroup generator words")
    p.add_argument("--parts", help="build the subgroup from these supports first")
    p.add_argument("--kgens")
    p.add_argument("--depth", type=int, default=6)

    p = cmd("ggs", _cmd_ggs, help="build a GGS group / torsion criterion")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--e", required=True, help="comma-separated exponents")
    p.add_argument("--torsion", action="store_true")

    return top


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (GroupDefinitionError, ValueError) as err:
        print(f"bl: error: {err}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
