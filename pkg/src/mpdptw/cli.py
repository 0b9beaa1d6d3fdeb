"""Command line entry point: ``mpdptw solve|explain|verify``.

Exit codes: 0 success, 1 input error, 2 runtime error, 3 instance too large
for the oracle, 4 GA front differs from the oracle front.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Sequence

from .evaluation import (
    ObjectiveVector,
    TourSyntaxError,
    check_solution,
    format_tours,
    objectives,
    parse_tours,
    schedule_csv,
    simulate_route,
)
from .ga import DegenerateInstanceError, GAConfig, evolve
from .instance import InstanceError, UnknownNodeError
from .oracle import DEFAULT_MAX_PAIRS, OracleGuardError, enumerate_front
from .pareto import ParetoArchive, objectives_equal
from .validation import check_instance, load_config_file

EXIT_OK, EXIT_INPUT, EXIT_RUNTIME, EXIT_GUARD, EXIT_MISMATCH = 0, 1, 2, 3, 4

log = logging.getLogger("mpdptw")


class InputError(Exception):
    pass


def _fleet_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--capacity", type=float, help="vehicle capacity Q")
    p.add_argument("--cost-per-distance", type=float, help="travel cost C per distance unit")
    p.add_argument("--speed", type=float, help="distance units per time unit")


def _ga_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="RNG seed (falls back to $PDPTW_SEED, then 0)")
    p.add_argument("--pop-size", type=int, dest="population_size")
    p.add_argument("--generations", type=int)
    p.add_argument("--crossover-rate", type=float)
    p.add_argument("--mutation-rate", type=float)
    p.add_argument("--pairing-sample", type=int)
    p.add_argument("--config", type=Path, help="JSON file of GA settings or a previous run's metadata")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mpdptw",
        description="Multi-objective GA for the multi-vehicle pickup and delivery problem with time windows.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run the GA and print the non-dominated front")
    solve.add_argument("instance", type=Path)
    _ga_args(solve)
    _fleet_args(solve)
    solve.add_argument("--format", choices=("table", "csv", "json"), default="table")
    solve.add_argument(
        "--output", type=Path, help="write the front CSV here plus a .meta.json run record"
    )

    explain = sub.add_parser("explain", help="simulate given tours and report schedules")
    explain.add_argument("instance", type=Path)
    explain.add_argument("tours", help='depot-delimited tours, e.g. "0 8 2 0 | 0 7 9 0"')
    _fleet_args(explain)
    explain.add_argument("--format", choices=("table", "csv", "json"), default="table")

    verify = sub.add_parser("verify", help="compare the GA front with the exhaustive front")
    verify.add_argument("instance", type=Path)
    _ga_args(verify)
    _fleet_args(verify)
    verify.add_argument("--max-pairs", type=int, default=DEFAULT_MAX_PAIRS)
    return parser


# -- helpers ---------------------------------------------------------------


def _load(args: argparse.Namespace, extra_fleet: dict | None = None):
    if not args.instance.is_file():
        raise InputError(f"no such file: {args.instance}")
    fleet = dict(extra_fleet or {})
    for key in ("capacity", "cost_per_distance", "speed"):
        if getattr(args, key) is not None:
            fleet[key] = getattr(args, key)
    return check_instance(args.instance, **fleet)


def _resolve_config(args: argparse.Namespace) -> tuple[GAConfig, dict]:
    """GA config from defaults < config file < flags; plus fleet overrides from the file."""
    settings: dict = {}
    fleet: dict = {}
    if args.config is not None:
        if not args.config.is_file():
            raise InputError(f"no such file: {args.config}")
        data = load_config_file(args.config)
        if "config" in data:  # a run record written by --output
            fleet = dict(data.get("fleet") or {})
            data = data["config"]
        settings.update(data)
    for key in ("population_size", "generations", "crossover_rate", "mutation_rate", "pairing_sample"):
        value = getattr(args, key)
        if value is not None:
            settings[key] = value
    if args.crossover_rate is not None or args.mutation_rate is not None:
        settings["copy_rate"] = None
    if args.seed is not None:
        settings["rng_seed"] = args.seed
    elif "rng_seed" not in settings and os.environ.get("PDPTW_SEED"):
        try:
            settings["rng_seed"] = int(os.environ["PDPTW_SEED"])
        except ValueError:
            raise InputError(f"PDPTW_SEED must be an integer, got {os.environ['PDPTW_SEED']!r}") from None
    try:
        return GAConfig.from_dict(settings), fleet
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid GA configuration: {exc}") from None


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def front_table(archive: ParetoArchive) -> str:
    rows = [(str(v.f1), _fmt(v.f2), _fmt(v.f3), format_tours(s)) for v, s in archive.sorted_entries()]
    return _table(("f1", "f2", "f3", "Tour by vehicle"), rows)


def _table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(h), *(len(r[k]) for r in rows)) if rows else len(h) for k, h in enumerate(header)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()  # noqa: E731
    out = [line(header), line(["-" * w for w in widths])]
    out.extend(line(r) for r in rows)
    return "\n".join(out)


def _fleet_record(inst) -> dict:
    return {
        "capacity": inst.fleet.capacity,
        "cost_per_distance": inst.fleet.cost_per_distance,
        "speed": inst.fleet.speed,
        "max_vehicles": inst.max_vehicles,
    }


# -- commands --------------------------------------------------------------


def cmd_solve(args: argparse.Namespace) -> int:
    cfg, file_fleet = _resolve_config(args)
    inst = _load(args, file_fleet)
    start = time.perf_counter()
    archive = evolve(inst, cfg)
    duration = time.perf_counter() - start
    record = {
        "instance": inst.name,
        "config": cfg.to_dict(),
        "fleet": _fleet_record(inst),
        "generations": cfg.generations,
        "duration_s": duration,
        "front": archive.to_records(),
    }
    if args.format == "csv":
        sys.stdout.write(archive.to_csv())
    elif args.format == "json":
        print(json.dumps(record, indent=2))
    else:
        print(f"{inst.name}: {len(archive)} non-dominated solutions (seed {cfg.rng_seed}, {duration:.2f}s)")
        print(front_table(archive))
    if args.output is not None:
        args.output.parent.mkdir(parents=True, exist_ok=True)
        args.output.write_text(archive.to_csv(), encoding="utf-8")
        meta = {k: v for k, v in record.items() if k != "front"}
        meta["front_csv"] = args.output.name
        args.output.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_explain(args: argparse.Namespace) -> int:
    inst = _load(args)
    try:
        sol = parse_tours(args.tours)
    except TourSyntaxError as exc:
        raise InputError(str(exc)) from None
    reports = [simulate_route(inst, r) for r in sol.routes]
    vec = objectives(inst, sol)
    verdict = check_solution(inst, sol)

    if args.format == "csv":
        sys.stdout.write(schedule_csv(reports))
        return EXIT_OK
    if args.format == "json":
        doc = {
            "tours": format_tours(sol),
            "objectives": vec._asdict(),
            "feasible": verdict.ok,
            "violations": [
                {"kind": v.kind, "message": v.message, "node": v.node, "route": v.route}
                for v in verdict.violations
            ],
            "routes": [
                {
                    "route": list(rep.route),
                    "distance": rep.distance,
                    "tardiness": rep.tardiness,
                    "peak_load": rep.peak_load,
                    "return_arrival": rep.return_arrival,
                    "stops": [s.__dict__ for s in rep.stops],
                }
                for rep in reports
            ],
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK

    header = ("node", "arrival", "wait", "departure", "load", "tardiness")
    for k, rep in enumerate(reports, start=1):
        print(f"Vehicle {k}: {format_tours([rep.route])}")
        rows = [("0", _fmt(0.0), _fmt(0.0), _fmt(0.0), _fmt(0.0), _fmt(0.0))]
        rows += [
            (str(s.node), _fmt(s.arrival), _fmt(s.wait), _fmt(s.departure), _fmt(s.load), _fmt(s.tardiness))
            for s in rep.stops
        ]
        rows.append(("0", _fmt(rep.return_arrival), _fmt(0.0), _fmt(rep.return_arrival), _fmt(0.0), _fmt(rep.return_tardiness)))
        print(_table(header, rows))
        print(f"distance {_fmt(rep.distance)}  tardiness {_fmt(rep.tardiness)}  peak load {rep.peak_load:g}")
        print()
    print(f"Objectives: f1={vec.f1} f2={_fmt(vec.f2)} f3={_fmt(vec.f3)}")
    if verdict.ok:
        print("Verdict: feasible")
    else:
        print("Verdict: infeasible")
        for v in verdict.violations:
            print(f"  - {v.kind}: {v.message}")
    return EXIT_OK


def compare_fronts(found: Sequence[ObjectiveVector], exact: Sequence[ObjectiveVector]) -> tuple[int, int]:
    """(oracle points matched by the GA, GA points absent from the oracle front)."""
    hit = sum(any(objectives_equal(e, f) for f in found) for e in exact)
    extra = sum(not any(objectives_equal(f, e) for e in exact) for f in found)
    return hit, extra


def cmd_verify(args: argparse.Namespace) -> int:
    cfg, file_fleet = _resolve_config(args)
    inst = _load(args, file_fleet)
    # guard first so oversize instances fail fast
    if inst.n_pairs > args.max_pairs:
        raise OracleGuardError(f"instance exceeds oracle guard ({inst.n_pairs} pairs > {args.max_pairs})")
    oracle = enumerate_front(inst, args.max_pairs)
    archive = evolve(inst, cfg)
    exact = oracle.front.objective_vectors()
    found = archive.objective_vectors()
    hit, extra = compare_fronts(found, exact)
    share = 100.0 * hit / len(exact) if exact else 100.0
    print(
        f"oracle: {oracle.enumerated_count} enumerated, {oracle.feasible_count} feasible, "
        f"front size {len(exact)}; GA front size {len(found)}"
    )
    if hit == len(exact) and extra == 0:
        print(f"MATCH: {share:.0f}% of oracle front attained")
        return EXIT_OK
    print(f"MISMATCH: {share:.0f}% of oracle front attained ({hit}/{len(exact)}), {extra} GA points off the front")
    return EXIT_MISMATCH


COMMANDS = {"solve": cmd_solve, "explain": cmd_explain, "verify": cmd_verify}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except (InputError, InstanceError, UnknownNodeError, DegenerateInstanceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OracleGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except Exception as exc:  # noqa: BLE001
        log.debug("runtime failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
