"""Command-line interface.

Exit codes: 0 success, 2 precondition violation (bad expression, bad params,
unsupported shape), 3 inconclusive-by-cap (a bounded search gave up).
"""

import argparse
import json
import sys

from .counting import (
    fm_count_abelian,
    fm_count_k3,
    nikulin_check,
    parse_ghodge,
)
from .discriminant import discriminant_form, discriminant_group
from .errors import InconclusiveError, PreconditionError
from .fqf import fqf_automorphisms
from .isometry import binary_genus_scan
from .lattice import basic_invariants, parse_lattice_expr
from .scenarios import canonical_json, load_manifest, run_batch, run_scenario


def _emit(args, payload, human):
    if args.json:
        print(canonical_json(payload))
    else:
        print(human)


def _cmd_lattice(args):
    lat = parse_lattice_expr(args.expr)
    inv = basic_invariants(lat)
    payload = {"lattice": lat.to_json_dict(), "invariants": inv.to_json_dict()}
    lines = [
        f"{args.expr}: rank {inv.rank}, det {inv.det}, signature "
        f"({inv.signature[0]},{inv.signature[1]}), "
        f"{'even' if inv.even else 'odd'}"
    ]
    if args.disc:
        dg = discriminant_group(lat)
        form = discriminant_form(lat, bilinear_only=not inv.even)
        payload["discriminant_group"] = dg.to_json_dict()
        payload["discriminant_form"] = form.to_json_dict()
        orders = " x ".join(f"Z/{d}" for d in dg.orders) or "trivial"
        lines.append(f"discriminant group: {orders} (order {dg.group_order})")
        lines.append("q on generators: " + (", ".join(str(x) for x in form.q_gen) or "-"))
    if args.aut:
        group = fqf_automorphisms(discriminant_form(lat))
        payload["discriminant_automorphisms"] = {
            "order": group.order, "complete": group.complete,
        }
        lines.append(f"|O(A_L)| = {group.order}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_nikulin(args):
    lat = parse_lattice_expr(args.expr)
    report = nikulin_check(lat)
    payload = report.to_json_dict()
    lines = [f"{args.expr}: Nikulin criterion {'holds' if report.holds else 'FAILS'}"]
    for cond in report.condition_a:
        lines.append(
            f"  (a) p={cond.p}: rank {cond.rank} >= l_p + 2 = {cond.l_p + 2}: "
            f"{'ok' if cond.holds else 'FAILS'}"
        )
    if not report.condition_a:
        lines.append("  (a) vacuous: no odd primes divide det")
    if report.b_applicable:
        lines.append(f"  (b) rank = l_2 = {report.l_2}: u(2)/v(2) component "
                     f"{'found' if report.b_holds else 'MISSING'}")
    else:
        lines.append(f"  (b) vacuous: rank > l_2 = {report.l_2}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _cmd_genus_scan(args):
    report = binary_genus_scan(args.det, args.bound, args.transform_bound)
    lines = [f"det {args.det}: {len(report.classes)} classes "
             f"(bounds {args.bound}/{args.transform_bound})"]
    for i, cls in enumerate(report.classes):
        lines.append(
            f"  class {i}: rep {list(list(r) for r in cls.representative)}, "
            f"{len(cls.members)} members, signature {cls.signature}, "
            f"disc orders {list(cls.disc_orders)}"
        )
    if report.possibly_equal:
        lines.append(f"  possibly equal (increase bound): {report.possibly_equal}")
    _emit(args, report.to_json_dict(), "\n".join(lines))
    return 0


def _cmd_count(args):
    ns = parse_lattice_expr(args.ns)
    t = parse_lattice_expr(args.t)
    ghodge = parse_ghodge(args.ghodge)
    fn = fm_count_k3 if args.kind == "k3" else fm_count_abelian
    report = fn(ns, t, ghodge)
    human = (
        f"{args.kind} count for NS = {args.ns}: total {report.total} "
        f"({report.interpretation}; shortcut {report.shortcut})"
    )
    _emit(args, report.to_json_dict(), human)
    return 0


def _cmd_scenario(args):
    params = {}
    for item in args.param or ():
        if "=" not in item:
            raise PreconditionError(f"--param expects k=v, got {item!r}")
        key, value = item.split("=", 1)
        try:
            params[key] = int(value)
        except ValueError:
            params[key] = value
    report = run_scenario(args.id, params)
    human = (
        f"{args.id}: partner count {report.conclusion['partner_count_bound']}, "
        f"{report.conclusion['partner_set']}"
    )
    _emit(args, report.to_json_dict(), human)
    return 0


def _cmd_batch(args):
    entries = load_manifest(args.manifest)
    results = run_batch(entries)
    if args.json:
        print(canonical_json(results))
    else:
        for res in results:
            if res["ok"]:
                conclusion = res["report"]["conclusion"]
                print(f"[{res['index']}] {res['id']}: "
                      f"{conclusion['partner_count_bound']} "
                      f"{conclusion['partner_set']}")
            else:
                print(f"[{res['index']}] {res.get('id')}: ERROR {res['error']}")
    return 0 if all(res["ok"] for res in results) else 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fmlat",
        description="Exact lattice computations for Fourier-Mukai partner counts",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", help="invariants of a lattice expression")
    p.add_argument("expr")
    p.add_argument("--disc", action="store_true",
                   help="include the discriminant group and form")
    p.add_argument("--aut", action="store_true",
                   help="include |O(A_L)| (enumeration, capped)")
    p.set_defaults(fn=_cmd_lattice)

    p = sub.add_parser("nikulin", help="run the one-class-genus criterion")
    p.add_argument("expr")
    p.set_defaults(fn=_cmd_nikulin)

    p = sub.add_parser("genus-scan", help="cluster even binary forms by determinant")
    p.add_argument("--det", type=int, required=True)
    p.add_argument("--bound", type=int, default=5, help="coefficient bound")
    p.add_argument("--transform-bound", type=int, default=10)
    p.set_defaults(fn=_cmd_genus_scan)

    p = sub.add_parser("count", help="Fourier-Mukai partner count from lattice data")
    p.add_argument("kind", choices=("k3", "abelian"))
    p.add_argument("--ns", required=True, help="Neron-Severi lattice expression")
    p.add_argument("--t", required=True, help="transcendental lattice expression")
    p.add_argument("--ghodge", default="plus_minus",
                   help="trivial | plus_minus | cyclic:m")
    p.set_defaults(fn=_cmd_count)

    p = sub.add_parser("scenario", help="run a named end-to-end scenario")
    p.add_argument("id")
    p.add_argument("--param", action="append", metavar="K=V")
    p.set_defaults(fn=_cmd_scenario)

    p = sub.add_parser("batch", help="run a JSON manifest of scenarios")
    p.add_argument("manifest")
    p.set_defaults(fn=_cmd_batch)

    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", help="machine output")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InconclusiveError as exc:
        print(f"inconclusive: {exc}", file=sys.stderr)
        return 3
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: malformed manifest: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
