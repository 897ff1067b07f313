"""Command-line front-end: parse a system spec file, run one pipeline,
and emit a deterministic machine-readable (or plain text) report."""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import cpalgebra as cp
from . import ktheory, numeric, space, towers
from .errors import NeedsRefinement, ZdsysError

SCHEMA_VERSION = 1


def _load_spec(path):
    with open(path) as f:
        return space.SystemSpec.from_dict(json.load(f))


def _jsonable(x):
    if isinstance(x, tuple):
        return [_jsonable(v) for v in x]
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


def _render_text(obj, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)):
                lines.append("%s%s:" % (pad, k))
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append("%s%s: %s" % (pad, k, v))
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)):
                lines.append("%s-" % pad)
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append("%s- %s" % (pad, v))
    else:
        lines.append("%s%s" % (pad, obj))
    return "\n".join(lines)


def _emit(report, args):
    report = dict(report)
    report["schema_version"] = SCHEMA_VERSION
    if args.format == "json":
        text = json.dumps(_jsonable(report), sort_keys=True, indent=2)
    else:
        text = _render_text(_jsonable(report))
    if args.out:
        with open(args.out, "w") as f:
            f.write(text + "\n")
    else:
        print(text)


def _default_partition(spec, depth):
    return space.generating_partition(spec, depth)


def cmd_tower(args):
    spec = _load_spec(args.spec)
    if args.base:
        base = space.from_dict(spec, json.loads(args.base))
    else:
        base = towers._canonical_bases(spec, max(1, args.depth))[0]
    comp = space.complement(base)
    P = [base] + ([comp] if not space.is_empty(comp) else [])
    S = towers.build_from_bases([base], P, args.max_steps)
    report = towers.validate_system(S, P)
    _emit(
        {
            "system": towers.system_to_dict(S),
            "validation": report.to_dict(),
        },
        args,
    )
    return 0 if report.ok else 1


def cmd_fiberwise(args):
    spec = _load_spec(args.spec)
    rep = towers.check_fiberwise(spec, args.depth, args.max_steps)
    body = {
        "verdict": rep.verdict,
        "depth": rep.depth,
        "z_witnesses": [_jsonable(w) for w in rep.z_witnesses],
        "failure": None
        if rep.failure_witness is None
        else {
            "witness": None
            if rep.failure_witness[0] is None
            else space.to_dict(rep.failure_witness[0]),
            "reason": rep.failure_witness[1],
        },
    }
    _emit(body, args)
    return 0 if rep.verdict else 1


def cmd_approximant(args):
    spec = _load_spec(args.spec)
    levels = []
    prev = None
    for n in range(1, args.depth + 1):
        P = space.generating_partition(spec, n)
        if prev is not None:
            P1_prev, _ = towers.tower_partitions(prev)
            P = space.common_refinement(P, P1_prev)
        S, S2 = towers.adapted_system_pair(spec, P, args.N, args.max_steps)
        desc = cp.approximant(S, S2)
        entry = {"level": n, "descriptor": desc.to_dict()}
        if prev is not None:
            mult = []
            for towers_s in S.towers:
                lead = towers_s[0]
                row = []
                for X_t in prev.bases:
                    row.append(
                        sum(
                            1
                            for j in range(lead.J)
                            if space.is_subset(apply_lvl(lead, j), X_t)
                        )
                    )
                mult.append(row)
            entry["multiplicity"] = mult
        levels.append(entry)
        prev = S
    _emit({"levels": levels}, args)
    return 0


def apply_lvl(tower, j):
    return space.apply_h(tower.Y, j)


def cmd_ktheory(args):
    spec = _load_spec(args.spec)
    levels = []
    for n in range(1, args.depth + 1):
        level = ktheory.K0Level(space.generating_partition(spec, n))
        try:
            levels.append(ktheory.level_report(level, n))
        except NeedsRefinement:
            levels.append({"level": n, "needs_refinement": True})
    _emit({"levels": levels}, args)
    return 0


def cmd_berg(args):
    spec = _load_spec(args.spec)
    epsilon = args.epsilon
    if epsilon is None:
        epsilon = math.pi / args.N + 0.01
    P = _default_partition(spec, args.depth)
    rep = numeric.berg_verify(spec, P, args.N, epsilon, args.max_steps)
    _emit(rep.to_dict(), args)
    return 0 if rep.passed else 1


def cmd_identities(args):
    spec = _load_spec(args.spec)
    P = _default_partition(spec, args.depth)
    S, S2 = towers.adapted_system_pair(spec, P, args.N, args.max_steps)
    rep = cp.identity_suite(S, S2)
    _emit(rep.to_dict(), args)
    return 0 if rep.ok else 1


COMMANDS = {
    "tower": cmd_tower,
    "fiberwise": cmd_fiberwise,
    "approximant": cmd_approximant,
    "ktheory": cmd_ktheory,
    "berg": cmd_berg,
    "identities": cmd_identities,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zdsys",
        description="Tower systems and approximants on zero-dimensional "
        "dynamical systems",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--spec", required=True, help="system spec JSON file")
    parser.add_argument("--base", help="clopen base set as JSON (tower only)")
    parser.add_argument("--depth", type=int, default=1)
    parser.add_argument("--N", type=int, default=4)
    parser.add_argument("--epsilon", type=float, default=None)
    parser.add_argument("--max-steps", type=int, default=None, dest="max_steps")
    parser.add_argument("--format", choices=["json", "text"], default="json")
    parser.add_argument("--out", default=None)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ZdsysError, ValueError, OSError, json.JSONDecodeError) as e:
        body = {
            "error": type(e).__name__,
            "message": str(e),
            "schema_version": SCHEMA_VERSION,
        }
        print(json.dumps(_jsonable(body), sort_keys=True, indent=2),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
