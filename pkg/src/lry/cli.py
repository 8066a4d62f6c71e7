"""Command-line front end.

Commands: ``simulate`` a profile file, ``verify`` the invariant sweep,
``example-2gap`` for the built-in coin-flip profile, ``geodelta`` for the
constrained-grid gap demonstration, and ``oracle`` for the brute-force
cross-checks.  Reports embed the seed and a digest of the canonical input so
any run can be reproduced from its output alone.  Identical inputs and seed
produce byte-identical output.

Exit status: 0 on success, 1 when violations or mismatches were found, 2 on
bad input.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import random
import sys
from fractions import Fraction

from . import grid as grid_mod
from . import model, protocol, strategy

MAX_SEED = 2**64 - 1


def _canonical_json(doc: object) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _digest(doc: object) -> str:
    return hashlib.sha256(_canonical_json(doc).encode("utf-8")).hexdigest()


def _emit_json(stream, doc: dict) -> None:
    stream.write(json.dumps(doc, sort_keys=True, indent=2))
    stream.write("\n")


def _emit_csv(stream, preamble: dict, fieldnames: list[str], rows: list[dict]) -> None:
    for key in sorted(preamble):
        stream.write(f"# {key}: {preamble[key]}\n")
    writer = csv.DictWriter(stream, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


class InputError(Exception):
    pass


def _load_profile(path: str) -> model.SplitProfile:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise InputError(f"cannot read --input {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"--input {path} is not valid JSON: {exc}") from exc
    try:
        return model.profile_from_dict(doc)
    except model.FormatError as exc:
        raise InputError(f"--input {path}: {exc}") from exc


def _simulate_report(command: str, profile: model.SplitProfile, seed: int) -> dict:
    profile_doc = model.profile_to_dict(profile)
    report = {
        "command": command,
        "seed": seed,
        "inputDigest": _digest(profile_doc),
        "profile": profile_doc,
    }
    violations = model.validate_profile(profile)
    if violations:
        report["profileViolations"] = [
            {
                "side": v.side.value if v.side is not None else None,
                "k": v.k,
                "message": v.message,
            }
            for v in violations
        ]
        return report
    prefs = protocol.optimal_preferences(profile)
    run = protocol.resolve_protocol(profile, prefs, seed)
    fairness = protocol.fairness_report(profile, run)
    report["run"] = protocol.run_to_dict(run)
    report["fairness"] = protocol.fairness_to_dict(fairness)
    return report


def _simulate_rows(profile: model.SplitProfile, seed: int) -> list[dict]:
    prefs = protocol.optimal_preferences(profile)
    run = protocol.resolve_protocol(profile, prefs, seed)
    return protocol.candidate_rows(profile, run)


_SIM_FIELDS = [
    "k",
    "option",
    "winsA",
    "winsB",
    "deltaGeoA",
    "deltaGeoKA",
    "deltaGeoB",
    "deltaGeoKB",
]


def _cmd_simulate(args, stream) -> int:
    profile = _load_profile(args.input)
    report = _simulate_report("simulate", profile, args.seed)
    if "profileViolations" in report:
        _emit_json(stream, report)
        return 1
    if args.format == "json":
        _emit_json(stream, report)
    else:
        preamble = {"seed": args.seed, "inputDigest": report["inputDigest"]}
        _emit_csv(stream, preamble, _SIM_FIELDS, _simulate_rows(profile, args.seed))
    return 0


def _cmd_example_2gap(args, stream) -> int:
    profile = model.two_gap_profile()
    report = _simulate_report("example-2gap", profile, args.seed)
    if args.format == "json":
        _emit_json(stream, report)
    else:
        preamble = {"seed": args.seed, "inputDigest": report["inputDigest"]}
        _emit_csv(stream, preamble, _SIM_FIELDS, _simulate_rows(profile, args.seed))
    return 0


def _cmd_verify(args, stream) -> int:
    if args.count < 1:
        raise InputError(f"--count must be positive, got {args.count}")
    if args.n_max < 2:
        raise InputError(f"--n-max must be at least 2, got {args.n_max}")
    sweep = protocol.property_sweep(args.count, args.n_max, args.seed)
    params = {"count": args.count, "n_max": args.n_max}
    report = {
        "command": "verify",
        "seed": args.seed,
        "inputDigest": _digest(params),
        "count": args.count,
        "nMax": args.n_max,
    }
    report.update(protocol.sweep_to_dict(sweep))
    if args.format == "json":
        _emit_json(stream, report)
    else:
        preamble = {
            "seed": args.seed,
            "inputDigest": report["inputDigest"],
            "instances": sweep.instances,
            "checks": sweep.checks,
        }
        rows = [
            {
                "property": v.prop,
                "detail": v.detail,
                "profile": _canonical_json(v.profile) if v.profile else "",
            }
            for v in sweep.violations
        ]
        _emit_csv(stream, preamble, ["property", "detail", "profile"], rows)
    return 0 if sweep.ok else 1


def _cmd_geodelta(args, stream) -> int:
    if args.delta < 1:
        raise InputError(f"--delta must be at least 1, got {args.delta}")
    report = grid_mod.geodelta_report(args.delta, args.seed)
    doc = grid_mod.geodelta_report_to_dict(report)
    doc["command"] = "geodelta"
    doc["seed"] = args.seed
    doc["inputDigest"] = _digest({"delta": args.delta})
    if args.format == "json":
        _emit_json(stream, doc)
    else:
        preamble = {
            "seed": args.seed,
            "inputDigest": doc["inputDigest"],
            "geoA": doc["geoA"],
        }
        rows = [
            {
                "k": c.assignment.k,
                "option": c.assignment.option.value,
                "winsA": c.wins_a,
                "winsB": c.wins_b,
                "gapA": model.ratio_str(report.target_a - c.wins_a),
            }
            for c in report.run.candidates
        ]
        _emit_csv(stream, preamble, ["k", "option", "winsA", "winsB", "gapA"], rows)
    return 0


def _strategy_oracle_mismatches(granularity: int) -> tuple[int, list[dict]]:
    """Exhaustively compare the closed forms with the allocation search for
    every side of up to 4 districts and every non-half-integer support on
    the 1/granularity grid."""
    checked = 0
    mismatches = []
    for size in range(1, strategy.MAX_ORACLE_DISTRICTS + 1):
        for units in range(0, size * granularity + 1):
            if (2 * units) % granularity == 0:
                continue  # excluded by the half-integer convention
            support = Fraction(units, granularity)
            other = size - support
            checked += 1
            expect = strategy.optimal_wins(support, size)
            got = strategy.bruteforce_districting_wins(support, size, granularity)
            if expect != got:
                mismatches.append(
                    {
                        "kind": "districting",
                        "detail": f"size={size} support={model.ratio_str(support)}"
                        f" formula={expect} bruteforce={got}",
                    }
                )
            expect = strategy.opponent_wins(support, other)
            got = strategy.bruteforce_opponent_wins(support, other, granularity)
            if expect != got:
                mismatches.append(
                    {
                        "kind": "opponent",
                        "detail": f"size={size} support={model.ratio_str(support)}"
                        f" formula={expect} bruteforce={got}",
                    }
                )
    return checked, mismatches


def random_small_grid(rng: random.Random) -> grid_mod.GridState:
    """A random grid of at most 16 cells with d of 2 or 4 dividing it."""
    m, d = rng.choice([(2, 2), (2, 4), (4, 2), (4, 4)])
    choices = [Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)]
    cells = tuple(
        tuple(rng.choice(choices) for _ in range(m)) for _ in range(m)
    )
    return grid_mod.GridState(m=m, d=d, cells=cells)


def _grid_oracle_mismatches(count: int, seed: int, cap: int) -> tuple[int, list[dict]]:
    """Random small grids: every enumerated plan must validate, the reported
    maximum must be witnessed, and the analytic group counting must match
    exhaustive search on the shrunk analogue."""
    mismatches = []
    instances = 0
    for index in range(count):
        rng = random.Random(protocol.mix_seed(seed, index))
        grid = random_small_grid(rng)
        region = grid.all_cells()
        if len(region) > cap:
            continue
        instances += 1
        best = -1
        witnessed = False
        plans = 0
        for plan in grid_mod.enumerate_region_plans(grid, region):
            plans += 1
            bad = grid_mod.validate_plan(grid, plan)
            if bad:
                mismatches.append(
                    {
                        "kind": "invalid_plan",
                        "detail": f"instance {index}: {bad[0].message}",
                    }
                )
                continue
            wins = grid_mod.count_wins(grid, plan, model.Party.A)
            if wins > best:
                best = wins
        reported = grid_mod.max_wins_bruteforce(grid, region, model.Party.A, cap=cap)
        witnessed = best == reported
        if plans == 0:
            mismatches.append(
                {"kind": "no_plans", "detail": f"instance {index}: nothing enumerated"}
            )
        elif not witnessed:
            mismatches.append(
                {
                    "kind": "unwitnessed_max",
                    "detail": f"instance {index}: reported {reported}, best plan {best}",
                }
            )
    analogue_grid, analogue_splits, analogue_groups = grid_mod.make_shrunk_analogue()
    wholly_left, wholly_right = grid_mod.side_group_counts(
        analogue_groups, analogue_splits
    )
    universe = analogue_grid.all_cells()
    for k in range(analogue_splits.split_count + 1):
        for side_cells, expected in (
            (analogue_splits.left_cells(k), wholly_left[k]),
            (analogue_splits.right_cells(k, universe), wholly_right[k]),
        ):
            if not side_cells or len(side_cells) > cap:
                continue
            got = grid_mod.max_wins_bruteforce(
                analogue_grid, side_cells, model.Party.A, cap=cap
            )
            if got != expected:
                mismatches.append(
                    {
                        "kind": "analogue",
                        "detail": f"k={k} |side|={len(side_cells)}"
                        f" analytic={expected} bruteforce={got}",
                    }
                )
    return instances, mismatches


def _cmd_oracle(args, stream) -> int:
    if args.count < 1:
        raise InputError(f"--count must be positive, got {args.count}")
    strategy_checked, strategy_bad = _strategy_oracle_mismatches(
        strategy.DEFAULT_GRANULARITY
    )
    grid_checked, grid_bad = _grid_oracle_mismatches(
        args.count, args.seed, args.oracle_cap
    )
    params = {"count": args.count, "oracle_cap": args.oracle_cap}
    report = {
        "command": "oracle",
        "seed": args.seed,
        "inputDigest": _digest(params),
        "strategy": {"configs": strategy_checked, "mismatches": strategy_bad},
        "grid": {
            "instances": grid_checked,
            "analogueChecked": True,
            "mismatches": grid_bad,
        },
    }
    ok = not strategy_bad and not grid_bad
    if args.format == "json":
        _emit_json(stream, report)
    else:
        preamble = {
            "seed": args.seed,
            "inputDigest": report["inputDigest"],
            "strategyConfigs": strategy_checked,
            "gridInstances": grid_checked,
        }
        rows = strategy_bad + grid_bad
        _emit_csv(stream, preamble, ["kind", "detail"], rows)
    return 0 if ok else 1


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed",
        type=int,
        default=0,
        help="64-bit seed for any randomness (default: %(default)s)",
    )
    parser.add_argument(
        "--format",
        choices=["json", "csv"],
        default="json",
        help="report format (default: %(default)s)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lry",
        description="Split-and-choose districting protocol with exact arithmetic",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the protocol on a profile JSON file")
    p.add_argument("--input", required=True, help="path to a profile JSON file")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser(
        "example-2gap",
        help="run the built-in profile whose worst coin-flip candidate sits"
        " two districts below the geometric target",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_example_2gap)

    p = sub.add_parser("verify", help="property-sweep every invariant")
    p.add_argument(
        "--count", type=int, default=10000, help="profiles to check (default: %(default)s)"
    )
    p.add_argument(
        "--n-max",
        type=int,
        default=20,
        dest="n_max",
        help="largest district count (default: %(default)s)",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "geodelta", help="constrained-grid run that misses the geometric target"
    )
    p.add_argument(
        "--delta", type=int, default=1, help="band count (default: %(default)s)"
    )
    _add_common(p)
    p.set_defaults(func=_cmd_geodelta)

    p = sub.add_parser("oracle", help="brute-force cross-checks of the closed forms")
    p.add_argument(
        "--count",
        type=int,
        default=100,
        help="random grids to check (default: %(default)s)",
    )
    p.add_argument(
        "--oracle-cap",
        type=int,
        default=grid_mod.DEFAULT_BRUTEFORCE_CAP,
        dest="oracle_cap",
        help="largest region, in cells, the exhaustive search accepts"
        " (default: %(default)s)",
    )
    _add_common(p)
    p.set_defaults(func=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None, stdout: io.TextIOBase | None = None) -> int:
    stream = stdout if stdout is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints its own message; keep its code
        return int(exc.code or 0)
    if not 0 <= args.seed <= MAX_SEED:
        print(f"error: --seed must be in 0..2^64-1, got {args.seed}", file=sys.stderr)
        return 2
    try:
        return args.func(args, stream)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
