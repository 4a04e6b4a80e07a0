"""Command-line front end: census, verify, orbits, group, witness.

JSON is the source of truth; csv and md are projections of the same
payload.  Reports embed the full configuration and the chosen field
parameters, so any failure is reproducible from the report alone.

Exit codes: 0 all pass, 1 any verification failure, 2 usage error,
3 every requested cell was skipped for resources.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .checks import CHECK_IDS, DEFAULT_CAP_GROUP, DEFAULT_CAP_POINTS, census_payload, run_check
from .errors import ParameterError, ResourceLimitError
from .field import epsilon_f, make_fields, tau_f
from .lagrangian import lagrangian_count, witnesses
from .orbits import partition
from .lagrangian import enumerate_lagrangians
from .symplectic import (
    TAG_SP_0,
    TAG_SP_E,
    TAG_SP_F,
    enumerate_symplectic,
    generators,
    group_order,
    make_space,
)
from .cayley import cayley

SCHEMA_VERSION = "fsiegel-report/1"
DEFAULT_QS = (3, 5, 7)
DEFAULT_NS = (1, 2)


class UsageError(Exception):
    pass


def _parse_int_list(text: str, what: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise UsageError(f"bad {what} list: {text!r}")
    if not vals:
        raise UsageError(f"empty {what} list")
    return vals


def _validate_qs(qs: list[int]) -> list[int]:
    for q in qs:
        try:
            make_fields(q)
        except ParameterError as exc:
            raise UsageError(str(exc))
    return qs


def _field_echo(qs: list[int]) -> dict:
    out = {}
    for q in sorted(set(qs)):
        fp = make_fields(q)
        out[str(q)] = {"eps": fp.eps, "epsilon_f": epsilon_f(q), "tau_f": tau_f(q)}
    return out


def _cayley_echo(qs: list[int], ns: list[int]) -> dict:
    out = {}
    for q in sorted(set(qs)):
        for n in sorted(set(ns)):
            out[f"{q},{n}"] = cayley(q, n).report()
    return out


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def _flatten(payload: dict) -> list[dict]:
    rows = []
    for rec in payload.get("checks", payload.get("cells", [])):
        rows.append(
            {
                "check": rec.get("check", payload.get("command", "")),
                "q": rec.get("q", ""),
                "n": rec.get("n", ""),
                "status": rec.get("status", ""),
                "wall_ms": rec.get("wall_ms", ""),
            }
        )
    return rows


def _emit(payload: dict, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    elif fmt == "csv":
        rows = _flatten(payload)
        lines = ["check,q,n,status,wall_ms"]
        lines += [f"{r['check']},{r['q']},{r['n']},{r['status']},{r['wall_ms']}" for r in rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "md":
        rows = _flatten(payload)
        lines = ["| check | q | n | status | wall_ms |", "|---|---|---|---|---|"]
        lines += [f"| {r['check']} | {r['q']} | {r['n']} | {r['status']} | {r['wall_ms']} |" for r in rows]
        text = "\n".join(lines) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def strip_volatile(payload):
    """Report payload with wall-time fields removed, for byte comparisons."""
    if isinstance(payload, dict):
        return {k: strip_volatile(v) for k, v in payload.items() if k != "wall_ms"}
    if isinstance(payload, list):
        return [strip_volatile(v) for v in payload]
    return payload


def _exit_code(records: list[dict]) -> int:
    statuses = [r["status"] for r in records]
    if any(s == "fail" for s in statuses):
        return 1
    if statuses and all(s == "skipped-resource" for s in statuses):
        return 3
    return 0


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_census(args, caps) -> tuple[dict, int]:
    qs = _validate_qs(_parse_int_list(args.q, "--q"))
    ns = _parse_int_list(args.n, "--n")
    cells = []
    for q in qs:
        for n in ns:
            start = time.perf_counter()
            rec = {"check": "census", "q": q, "n": n}
            expected = lagrangian_count(q, n)
            if expected > caps["points"]:
                rec["status"] = "skipped-resource"
                rec["data"] = {"reason": f"{expected} points exceed cap {caps['points']}"}
            else:
                data = census_payload(q, n, caps["points"])
                rec["status"] = "pass" if data["total_matches_formula"] else "fail"
                rec["data"] = data
            rec["wall_ms"] = int((time.perf_counter() - start) * 1000)
            cells.append(rec)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "census",
        "config": {"q": qs, "n": ns, "caps": caps, "format": args.format},
        "field_params": _field_echo(qs),
        "checks": cells,
    }
    return payload, _exit_code(cells)


def _cmd_verify(args, caps) -> tuple[dict, int]:
    qs = _validate_qs(_parse_int_list(args.q, "--q"))
    ns = _parse_int_list(args.n, "--n")
    if args.checks == "all":
        selected = list(CHECK_IDS)
    else:
        selected = [c.strip() for c in args.checks.split(",") if c.strip()]
        unknown = [c for c in selected if c not in CHECK_IDS]
        if unknown:
            raise UsageError(f"unknown check ids: {', '.join(unknown)}")
    cells = [(q, n, c) for q in qs for n in ns for c in selected]

    def run(cell):
        q, n, c = cell
        return run_check(c, q, n, caps["group"], caps["points"])

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            records = list(pool.map(run, cells))
    else:
        records = [run(cell) for cell in cells]
    records.sort(key=lambda r: (r["q"], r["n"], r["check"]))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "config": {
            "q": qs,
            "n": ns,
            "checks": selected,
            "caps": caps,
            "jobs": args.jobs,
            "format": args.format,
        },
        "field_params": _field_echo(qs),
        "cayley_params": _cayley_echo(qs, ns),
        "checks": records,
        "counts": {
            "pass": sum(1 for r in records if r["status"] == "pass"),
            "fail": sum(1 for r in records if r["status"] == "fail"),
            "skipped-resource": sum(1 for r in records if r["status"] == "skipped-resource"),
        },
    }
    return payload, _exit_code(records)


def _cmd_orbits(args, caps) -> tuple[dict, int]:
    qs = _validate_qs(_parse_int_list(args.q, "--q"))
    ns = _parse_int_list(args.n, "--n")
    if args.group not in (TAG_SP_F, TAG_SP_0):
        raise UsageError(f"--group must be {TAG_SP_F} or {TAG_SP_0}")
    invariant = "h_rank" if args.group == TAG_SP_F else "o_type"
    cells = []
    for q in qs:
        for n in ns:
            start = time.perf_counter()
            rec = {"check": f"orbits-{args.group}", "q": q, "n": n}
            try:
                sp = make_space(q, n)
                pts = enumerate_lagrangians(q, n, caps["points"])
                part = partition(pts, generators(sp, args.group), invariant=invariant)
                rec["status"] = "pass" if not part.conflicts else "fail"
                rec["data"] = {
                    "orbits": [
                        {
                            "size": orb.size,
                            "representative": orb.representative.encode(),
                            "h_rank": lab.h_rank,
                            "o_type": lab.o_type,
                        }
                        for orb, lab in zip(part.orbits, part.labels)
                    ],
                    "conflicts": len(part.conflicts),
                }
            except ResourceLimitError as exc:
                rec["status"] = "skipped-resource"
                rec["data"] = {"reason": str(exc)}
            rec["wall_ms"] = int((time.perf_counter() - start) * 1000)
            cells.append(rec)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "orbits",
        "config": {"q": qs, "n": ns, "group": args.group, "caps": caps, "format": args.format},
        "field_params": _field_echo(qs),
        "checks": cells,
    }
    return payload, _exit_code(cells)


def _cmd_group(args, caps) -> tuple[dict, int]:
    qs = _validate_qs(_parse_int_list(args.q, "--q"))
    ns = _parse_int_list(args.n, "--n")
    if args.group not in (TAG_SP_E, TAG_SP_F, TAG_SP_0):
        raise UsageError("--group must be sp, spf, or sp0")
    cap = args.cap if args.cap is not None else caps["group"]
    cells = []
    for q in qs:
        for n in ns:
            start = time.perf_counter()
            rec = {"check": f"group-{args.group}", "q": q, "n": n}
            sp = make_space(q, n)
            gens = generators(sp, args.group)
            data = {
                "order": group_order(args.group, q, n),
                "generator_count": len(gens),
            }
            status = "pass"
            if args.enumerate:
                try:
                    enum = enumerate_symplectic(sp, args.group, cap)
                    data["closure_size"] = len(enum)
                    status = "pass" if len(enum) == data["order"] else "fail"
                except ResourceLimitError as exc:
                    data["reason"] = str(exc)
                    status = "skipped-resource"
            rec["status"] = status
            rec["data"] = data
            rec["wall_ms"] = int((time.perf_counter() - start) * 1000)
            cells.append(rec)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "group",
        "config": {
            "q": qs,
            "n": ns,
            "group": args.group,
            "enumerate": bool(args.enumerate),
            "caps": {"group": cap, "points": caps["points"]},
            "format": args.format,
        },
        "field_params": _field_echo(qs),
        "checks": cells,
    }
    return payload, _exit_code(cells)


def _cmd_witness(args, caps) -> tuple[dict, int]:
    qs = _validate_qs(_parse_int_list(args.q, "--q"))
    ns = _parse_int_list(args.n, "--n")
    cells = []
    for q in qs:
        for n in ns:
            start = time.perf_counter()
            recs = witnesses(q, n)
            entries = [
                {
                    "name": r.name,
                    "status": r.status,
                    "matrix": r.lagrangian.encode() if r.lagrangian is not None else None,
                    "expected_o_type": r.expected_o_type,
                    "in_image": r.in_image,
                    "params": r.params,
                    "detail": r.detail,
                }
                for r in recs
            ]
            status = "fail" if any(r.status == "failed" for r in recs) else "pass"
            cells.append(
                {
                    "check": "witness",
                    "q": q,
                    "n": n,
                    "status": status,
                    "data": {"witnesses": entries},
                    "wall_ms": int((time.perf_counter() - start) * 1000),
                }
            )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": "witness",
        "config": {"q": qs, "n": ns, "caps": caps, "format": args.format},
        "field_params": _field_echo(qs),
        "checks": cells,
    }
    return payload, _exit_code(cells)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsiegel",
        description="Exact census and verification of Lagrangian orbit geometry "
        "over quadratic extensions of small prime fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, default_q=True):
        p.add_argument("--q", default="3,5,7", help="comma list of odd primes")
        p.add_argument("--n", default="1,2", help="comma list of ranks")
        p.add_argument("--format", default="json", choices=("json", "csv", "md"))
        p.add_argument("--cap-group", type=int, default=None, help="group enumeration cap")
        p.add_argument("--cap-points", type=int, default=None, help="point set cap")
        p.add_argument("--out", default=None, help="write the report to a file")

    p_census = sub.add_parser("census", help="stratum counts and image splits")
    common(p_census)

    p_verify = sub.add_parser("verify", help="run the verification checks")
    common(p_verify)
    p_verify.add_argument(
        "--checks", default="all", help="comma list of check ids, or 'all': " + ",".join(CHECK_IDS)
    )
    p_verify.add_argument("--jobs", type=int, default=1, help="worker pool width for grid cells")

    p_orbits = sub.add_parser("orbits", help="orbit partition of the Lagrangian set")
    common(p_orbits)
    p_orbits.add_argument("--group", default=TAG_SP_F, help="spf or sp0")

    p_group = sub.add_parser("group", help="group orders and optional enumeration")
    common(p_group)
    p_group.add_argument("--group", default=TAG_SP_F, help="sp, spf, or sp0")
    p_group.add_argument("--enumerate", action="store_true", help="BFS-enumerate the group")
    p_group.add_argument("--cap", type=int, default=None, help="enumeration cap override")

    p_wit = sub.add_parser("witness", help="construct and re-verify explicit representatives")
    common(p_wit)
    return parser


def _caps_from(args) -> dict:
    group_cap = args.cap_group
    if group_cap is None:
        group_cap = int(os.environ.get("FSIEGEL_CAP_GROUP", DEFAULT_CAP_GROUP))
    points_cap = args.cap_points
    if points_cap is None:
        points_cap = int(os.environ.get("FSIEGEL_CAP_POINTS", DEFAULT_CAP_POINTS))
    return {"group": group_cap, "points": points_cap}


_HANDLERS = {
    "census": _cmd_census,
    "verify": _cmd_verify,
    "orbits": _cmd_orbits,
    "group": _cmd_group,
    "witness": _cmd_witness,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        payload, code = _HANDLERS[args.command](args, _caps_from(args))
        _emit(payload, args.format, args.out)
        return code
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
