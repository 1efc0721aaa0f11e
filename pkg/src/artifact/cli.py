"""Command-line entry point: one subcommand per module operation, machine-readable reports.

Exit status: 0 when every check passes, 1 on a failed check, 2 on a usage or
argument error, 3 on a capability or budget error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import allosteric, covers_pou, groups, lsp, ltc, simplicial
from .coarse import BUDGET_ENV, Cover
from .dynamics import NearOrbitWitness, action_from_json, check_orbit_asdim_witness, torus_translation_action
from .errors import ArgumentError, BudgetExceeded, CapabilityError
from .report import Report, dumps, parse_frac, to_jsonable

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_CAPABILITY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _tuples(v):
    return tuple(_tuples(c) for c in v) if isinstance(v, list) else v


def parse_elements(spec: groups.GroupSpec, text: str) -> set:
    """``ball:r`` (word ball), ``box:r`` (structured ball) or a JSON list of elements."""
    if text.startswith("ball:"):
        r = int(text[5:])
        return groups.ball(spec, r).ball_set(r)
    if text.startswith("box:"):
        return groups.structured_ball(spec, int(text[4:]))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ArgumentError(f"cannot parse element list {text!r}: {exc}") from None
    return {spec.validate(_tuples(g)) for g in data}


def _points(text: str | None, n: int) -> set:
    if text is None or text == "all":
        return set(range(n))
    return {int(x) for x in json.loads(text)}


def _load(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ArgumentError(f"cannot read {path}: {exc}") from None


def _torus(spec: groups.GroupSpec, text: str):
    return torus_translation_action(spec, [int(q) for q in text.split(",")])


# --- subcommands: each returns (Report, csv text or None) ----------------------------------


def cmd_growth(args):
    spec = groups.parse_group(args.group)
    table = groups.ball(spec, args.radius)
    lo, hi = (int(x) for x in args.window.split(":")) if args.window else (max(2, args.radius // 2), args.radius)
    rep = Report("def:growth", meta={"group": spec.to_json(), "radius": args.radius})
    rep.add("table", True, value={str(n): g for n, g in enumerate(table.growth)})
    if hi - lo >= 1 and lo >= 2 and hi <= args.radius:
        deg = groups.growth_degree_estimate(table, range(lo, hi + 1))
        rep.add("degree", True, value=round(deg, 6), note=f"approximate, window {lo}..{hi}")
    return rep, table.to_csv()


def cmd_lsp_cert(args):
    spec = groups.parse_group(args.group)
    cert = lsp.lsp_certificate(spec, args.d, args.r)
    rep = Report("def:LSP", meta={"certificate": cert.to_dict()})
    rep.add("inequality", cert.lhs < cert.rhs, value={"lhs": cert.lhs, "rhs": cert.rhs})
    return rep, None


def cmd_lsp_oracle(args):
    spec = groups.parse_group(args.group)
    B = groups.ball(spec, args.R).ball_set(args.R)
    BL = groups.ball(spec, args.R + args.r).ball_set(args.R + args.r)
    value = lsp.lsp_bad_max(spec, BL, B, args.d)
    rep = Report("rmk:LSP-reformulate", meta={"R": args.R, "r": args.r, "d": args.d})
    try:
        m = lsp.lsp_certificate(spec, args.d, args.r).m
    except CapabilityError:
        m = None
    rep.add("bad_max", m is None or value <= m, value=value, note=None if m is None else f"certificate m = {m}")
    return rep, None


def cmd_orbit_asdim(args):
    if args.greedy:
        spec = groups.parse_group(args.group)
        a = _torus(spec, args.torus)
        cert = lsp.lsp_certificate(spec, 0, args.r)
        return lsp.lsp_cover_demo(a, groups.ball(spec, args.r).ball_set(args.r), cert), None
    if not (args.action and args.cover and args.L and args.B):
        raise ArgumentError("witness mode needs --action, --cover, --L and --B")
    a = action_from_json(_load(args.action))
    cover = Cover.from_json(a.n, _load(args.cover))
    return check_orbit_asdim_witness(a, _points(args.K, a.n), parse_elements(a.spec, args.L),
                                     parse_elements(a.spec, args.B), cover, args.d), None


def cmd_pou(args):
    spec = groups.parse_group(args.group)
    a = _torus(spec, args.torus)
    n = a.n
    if args.arcs < 1 or n % args.arcs or (args.arcs > 1 and args.arcs % 2):
        raise ArgumentError("--arcs must be 1 or an even divisor of the point count")
    if spec.kind != "lattice" or spec.params[0] != 1:
        raise ArgumentError("pou demo runs on Z acting on a cycle")
    size = n // args.arcs
    sets = [set(range(i * size, (i + 1) * size)) for i in range(args.arcs)]
    cover = Cover.from_sets(n, sets, colors=[i % 2 for i in range(args.arcs)])
    bound = {(i,) for i in range(-(size - 1), size)}
    L = parse_elements(spec, args.L)
    pou = covers_pou.build_orbit_pou(a, range(n), L, parse_frac(args.eps),
                                     covers_pou.OrbitAsdimWitness(cover, bound))
    rep = covers_pou.verify_orbit_pou(a, pou)
    return rep, pou.to_csv()


def cmd_simplicial(args):
    return simplicial.run_property_suite(args.seed, args.samples), None


def _ltc_params(a, args, theta):
    B = parse_elements(a.spec, args.B) if args.B else None
    return ltc.LtcParams(parse_elements(a.spec, args.L), _points(args.K, a.n), theta, args.d, args.N, B)


def cmd_ltc_verify(args):
    a = action_from_json(_load(args.action))
    data = _load(args.witness)
    w = NearOrbitWitness.from_json(a.n, data)
    theta = data.get("theta") or [[x] for x in range(a.n)]
    params = _ltc_params(a, args, theta)
    rep = ltc.verify_ltc_witness(a, params, w)
    if args.extras:
        extra = ltc.verify_ltc_extras(a, params, w)
        for c in extra.checks:
            rep.checks.append(c)
        rep.meta["refinement"] = extra.meta["refinement"]
    return rep, None


def cmd_blr_verify(args):
    a = action_from_json(_load(args.action))
    data = _load(args.witness)
    cover = Cover.from_json(a.n, data)
    subgroups = {name: ltc.Subgroup.from_json(a.spec, s) for name, s in data["subgroups"].items()}
    labels = {name: {x: a.spec.validate(_tuples(g)) for x, g in lab.items()} for name, lab in data["labels"].items()}
    w = ltc.BlrWitness(cover, subgroups, labels)
    B = parse_elements(a.spec, args.B) if args.B else None
    return ltc.verify_blr_witness(a, parse_elements(a.spec, args.L), _points(args.K, a.n), w, args.d, B), None


def cmd_allosteric(args):
    base = [int(b) for b in args.base.split(",")]
    tower = allosteric.auto_tower(base, args.rank, parse_frac(args.delta), args.levels)
    z = [int(c) for c in args.z.split(",")] if args.z else None
    return allosteric.tower_report(tower, z, args.radius), None


def cmd_bounds(args):
    inp = ltc.BoundsInput(
        asdim=args.asdim, dimX_plus=args.dimx_plus if args.dimx_plus is not None else args.dimx,
        dimX=args.dimx, dimLTC=args.dimltc, dstab=args.dstab, rank=args.rank, eqasdim=args.eqasdim,
        sup_dimLTC_H=args.sup_dimltc_h, lsp0=args.lsp0, lsp_d=args.lspd, hirsch=args.hirsch)
    out = ltc.bounds_calculator(inp)
    rep = Report("thm:dimnuc-main", meta={"inputs": {k: v for k, v in inp.__dict__.items() if v is not None}})
    for name, v in out["values"].items():
        rep.add(name, True, value=v)
    for name, ok in out["flags"].items():
        rep.add(name, ok)
    return rep, None


# --- parser and rendering ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="artifact", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized suites (recorded in every report)")
    p.add_argument("--budget", type=int, help=f"search budget (overrides {BUDGET_ENV})")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("growth", help="ball sizes and a growth-degree estimate")
    s.add_argument("--group", required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--window", help="lo:hi radii for the degree fit")
    s.set_defaults(fn=cmd_growth)

    s = sub.add_parser("lsp-cert", help="packing certificate by ball counting")
    s.add_argument("--group", required=True)
    s.add_argument("--d", type=int, default=0)
    s.add_argument("--r", type=int, default=1)
    s.set_defaults(fn=cmd_lsp_cert)

    s = sub.add_parser("lsp-oracle", help="exact bad-max on BL = ball(R+r), B = ball(R)")
    s.add_argument("--group", required=True)
    s.add_argument("--R", type=int, required=True)
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--d", type=int, default=0)
    s.set_defaults(fn=cmd_lsp_oracle)

    s = sub.add_parser("orbit-asdim", help="check an orbit asdim witness or run the greedy cover")
    s.add_argument("--greedy", action="store_true")
    s.add_argument("--group", default="z")
    s.add_argument("--torus", default="100", help="comma-separated cycle lengths for --greedy")
    s.add_argument("--r", type=int, default=1)
    s.add_argument("--action")
    s.add_argument("--cover")
    s.add_argument("--L")
    s.add_argument("--B")
    s.add_argument("--K", help="JSON list of points (default: all)")
    s.add_argument("--d", type=int, default=0)
    s.set_defaults(fn=cmd_orbit_asdim)

    s = sub.add_parser("pou", help="build and verify an orbit partition of unity on a cycle")
    s.add_argument("--group", default="z")
    s.add_argument("--torus", default="60")
    s.add_argument("--eps", default="1")
    s.add_argument("--arcs", type=int, default=1)
    s.add_argument("--L", default="ball:1")
    s.set_defaults(fn=cmd_pou)

    s = sub.add_parser("simplicial", help="randomized exact checks of the simplicial lemmas")
    s.add_argument("--samples", type=int, default=1000)
    s.set_defaults(fn=cmd_simplicial)

    for name, fn, help_ in (("ltc-verify", cmd_ltc_verify, "verify a near orbit selection witness"),
                            ("blr-verify", cmd_blr_verify, "verify a labeling witness")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--action", required=True)
        s.add_argument("--witness", required=True)
        s.add_argument("--L", required=True)
        s.add_argument("--K")
        s.add_argument("--B")
        s.add_argument("--d", type=int, default=0)
        if name == "ltc-verify":
            s.add_argument("--N", type=int, default=1)
            s.add_argument("--extras", action="store_true")
        s.set_defaults(fn=fn)

    s = sub.add_parser("allosteric", help="build a wreath tower and certify every level")
    s.add_argument("--base", default="2", help="comma-separated moduli of the base group")
    s.add_argument("--rank", type=int, default=1)
    s.add_argument("--delta", default="1/2")
    s.add_argument("--levels", type=int, default=3)
    s.add_argument("--z", help="comma-separated base element for the fixed-point count")
    s.add_argument("--radius", type=int, default=2)
    s.set_defaults(fn=cmd_allosteric)

    s = sub.add_parser("bounds", help="evaluate the dimension bounds")
    for flag in ("asdim", "dimx", "dimx-plus", "dimltc", "dstab", "rank", "eqasdim", "sup-dimltc-h",
                 "lsp0", "lspd", "hirsch"):
        s.add_argument(f"--{flag}", type=int)
    s.set_defaults(fn=cmd_bounds)
    return p


def render(rep: Report, fmt: str, command: str, seed: int, csv_text: str | None) -> str:
    if fmt == "json":
        return dumps({"command": command, "seed": seed, "report": rep}) + "\n"
    if fmt == "csv":
        head = f"# command={command} tag={rep.tag} seed={seed} pass={str(rep.passed).lower()}\n"
        if csv_text is not None:
            return head + csv_text
        rows = ["check,pass,value"]
        for c in rep.checks:
            v = json.dumps(to_jsonable(c.value), separators=(",", ":"), sort_keys=True) if c.value is not None else ""
            rows.append(f"{c.name},{str(c.passed).lower()},\"{v}\"" if "," in v else f"{c.name},{str(c.passed).lower()},{v}")
        return head + "\n".join(rows) + "\n"
    lines = [f"{command} [{rep.tag}] seed={seed}: {'PASS' if rep.passed else 'FAIL'}"]
    for c in rep.checks:
        v = "" if c.value is None else " " + json.dumps(to_jsonable(c.value), separators=(",", ":"), sort_keys=True)
        lines.append(f"  {'ok  ' if c.passed else 'FAIL'} {c.name}{v}")
    return "\n".join(lines) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    saved = os.environ.get(BUDGET_ENV)
    if args.budget is not None:
        os.environ[BUDGET_ENV] = str(args.budget)
    try:
        rep, csv_text = args.fn(args)
    except (CapabilityError, BudgetExceeded) as exc:
        print(f"artifact: capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except (ArgumentError, ValueError, KeyError) as exc:
        print(f"artifact: argument error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    finally:
        if saved is None:
            os.environ.pop(BUDGET_ENV, None)
        else:
            os.environ[BUDGET_ENV] = saved
    text = render(rep, args.format, args.command, args.seed, csv_text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
