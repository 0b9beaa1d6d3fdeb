"""Route simulation, feasibility checking and the three-objective evaluation.

Time windows are hard at the open (a vehicle arriving early waits) and soft at
the close: finishing service after ``l`` accrues tardiness instead of making a
route infeasible. The depot deadline applies to the return arrival.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .instance import DEPOT, Instance, UnknownNodeError

TOL = 1e-9


class ObjectiveVector(NamedTuple):
    """(vehicle count, total tardiness, total travel cost); all minimized."""

    f1: int
    f2: float
    f3: float


@dataclass(frozen=True)
class Solution:
    """Routes as node-id sequences; depot endpoints are implicit.

    Empty routes are dropped on construction.
    """

    routes: tuple[tuple[int, ...], ...]

    def __init__(self, routes: Iterable[Iterable[int]] = ()):
        cleaned = tuple(t for t in (tuple(r) for r in routes) if t)
        object.__setattr__(self, "routes", cleaned)

    def __len__(self) -> int:
        return len(self.routes)

    def __iter__(self):
        return iter(self.routes)

    @property
    def node_sequence(self) -> tuple[int, ...]:
        return tuple(i for r in self.routes for i in r)

    def canonical(self) -> "Solution":
        """Same routes in a fixed order (sorted), for hashing and comparison."""
        return Solution(sorted(self.routes))

    def to_text(self) -> str:
        return format_tours(self)

    def __str__(self) -> str:
        return format_tours(self)


class TourSyntaxError(ValueError):
    """Malformed depot-delimited tour text."""


def format_tours(sol: Solution | Sequence[Sequence[int]]) -> str:
    """Render routes as ``0 8 2 0 | 0 7 3 0``; an empty solution renders as ``0 0``."""
    routes = sol.routes if isinstance(sol, Solution) else [tuple(r) for r in sol if r]
    if not routes:
        return "0 0"
    return " | ".join(" ".join(str(i) for i in (DEPOT, *r, DEPOT)) for r in routes)


def parse_tours(text: str) -> Solution:
    """Parse depot-delimited tours.

    Vehicles are separated by ``|`` or simply by consecutive depot visits, so
    both ``0 8 2 0 | 0 7 9 0`` and ``0 8 2 0 0 7 9 0`` give two routes.
    """
    chunks = [c.split() for c in text.split("|")]
    routes: list[list[int]] = []
    for chunk in chunks:
        if not chunk:
            raise TourSyntaxError(f"empty vehicle segment in {text!r}")
        try:
            ids = [int(tok) for tok in chunk]
        except ValueError:
            raise TourSyntaxError(f"tour tokens must be integers: {text!r}") from None
        if ids[0] != DEPOT or ids[-1] != DEPOT or len(ids) < 2:
            raise TourSyntaxError(f"each tour must start and end at depot 0: {' '.join(chunk)!r}")
        if len(chunks) > 1 and DEPOT in ids[1:-1]:
            raise TourSyntaxError(f"depot inside a '|'-separated tour: {' '.join(chunk)!r}")
        current: list[int] = []
        for i in ids[1:]:
            if i == DEPOT:
                routes.append(current)
                current = []
            elif i < 0:
                raise TourSyntaxError(f"negative node id {i}")
            else:
                current.append(i)
    return Solution(routes)


# -- schedule simulation ---------------------------------------------------


@dataclass(frozen=True)
class Stop:
    node: int
    arrival: float
    wait: float
    departure: float
    load: float
    tardiness: float


@dataclass(frozen=True)
class ScheduleReport:
    """Chronological trace of one vehicle from the depot and back.

    ``load`` in each stop is the on-board quantity after service, clipped to
    ``[0, capacity]``; the unclipped values that left that range are listed in
    ``capacity_violations`` as ``(node, load)``.
    """

    route: tuple[int, ...]
    stops: tuple[Stop, ...]
    return_arrival: float
    return_tardiness: float
    distance: float
    peak_load: float
    capacity_violations: tuple[tuple[int, float], ...]

    @property
    def tardiness(self) -> float:
        return sum(s.tardiness for s in self.stops) + self.return_tardiness

    @property
    def departures(self) -> tuple[float, ...]:
        return tuple(s.departure for s in self.stops)


def _check_ids(inst: Instance, route: Iterable[int]) -> None:
    for i in route:
        if i == DEPOT or i not in inst:
            raise UnknownNodeError(i)


def simulate_route(inst: Instance, route: Sequence[int]) -> ScheduleReport:
    route = tuple(route)
    _check_ids(inst, route)
    dist = inst.distance_matrix
    speed = inst.fleet.speed
    capacity = inst.fleet.capacity

    stops = []
    violations = []
    prev, clock, load, peak, distance = DEPOT, 0.0, 0.0, 0.0, 0.0
    for j in route:
        node = inst.node(j)
        leg = dist[prev][j]
        distance += leg
        arrival = clock + leg / speed
        wait = max(0.0, node.e - arrival)
        clock = max(arrival, node.e) + node.s
        load += node.q
        peak = max(peak, load)
        if load < -TOL or load > capacity + TOL:
            violations.append((j, load))
        stops.append(
            Stop(
                node=j,
                arrival=arrival,
                wait=wait,
                departure=clock,
                load=min(max(load, 0.0), capacity),
                tardiness=max(0.0, clock - node.l),
            )
        )
        prev = j

    if route:
        leg = dist[prev][DEPOT]
        distance += leg
        back = clock + leg / speed
    else:
        back = 0.0
    return ScheduleReport(
        route=route,
        stops=tuple(stops),
        return_arrival=back,
        return_tardiness=max(0.0, back - inst.depot.l),
        distance=distance,
        peak_load=peak,
        capacity_violations=tuple(violations),
    )


def route_cost(inst: Instance, route: Sequence[int]) -> tuple[float, float]:
    """(tardiness, distance) of one route; same arithmetic as simulate_route."""
    dist = inst.distance_matrix
    speed = inst.fleet.speed
    by_id = inst._by_id
    prev, clock, distance, tardiness = DEPOT, 0.0, 0.0, 0.0
    for j in route:
        node = by_id[j]
        leg = dist[prev][j]
        distance += leg
        arrival = clock + leg / speed
        clock = max(arrival, node.e) + node.s
        tardiness += max(0.0, clock - node.l)
        prev = j
    if route:
        leg = dist[prev][DEPOT]
        distance += leg
        tardiness += max(0.0, clock + leg / speed - inst.depot.l)
    return tardiness, distance


def objectives(inst: Instance, sol: Solution | Iterable[Sequence[int]]) -> ObjectiveVector:
    if not isinstance(sol, Solution):
        sol = Solution(sol)
    for r in sol.routes:
        _check_ids(inst, r)
    f2 = 0.0
    f3 = 0.0
    for r in sol.routes:
        tardiness, distance = route_cost(inst, r)
        f2 += tardiness
        f3 += distance
    return ObjectiveVector(len(sol.routes), f2, inst.fleet.cost_per_distance * f3)


# -- feasibility -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str  # unknown, duplicate, missing, precedence, capacity, route_count, missing_arc
    message: str
    node: int | None = None
    route: int | None = None


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def of_kind(self, *kinds: str) -> list[Violation]:
        return [v for v in self.violations if v.kind in kinds]

    def __str__(self) -> str:
        if self.ok:
            return "feasible"
        return "; ".join(v.message for v in self.violations)


def check_solution(inst: Instance, sol: Solution | Iterable[Sequence[int]]) -> Verdict:
    """Report every violated hard constraint; never raises."""
    if not isinstance(sol, Solution):
        sol = Solution(sol)
    out: list[Violation] = []
    where: dict[int, tuple[int, int]] = {}

    for k, route in enumerate(sol.routes):
        for pos, i in enumerate(route):
            if i == DEPOT or i not in inst:
                out.append(Violation("unknown", f"route {k} visits unknown node {i}", i, k))
                continue
            if i in where:
                out.append(Violation("duplicate", f"node {i} visited more than once", i, k))
                continue
            where[i] = (k, pos)
    for i in inst.node_ids:
        if i not in where:
            out.append(Violation("missing", f"node {i} is not visited", i))

    for supplier, customer in inst.pairs:
        if supplier not in where or customer not in where:
            continue
        (rs, ps), (rc, pc) = where[supplier], where[customer]
        if rs != rc:
            out.append(
                Violation(
                    "precedence",
                    f"{customer} on route {rc} but its supplier {supplier} on route {rs}",
                    customer,
                    rc,
                )
            )
        elif pc < ps:
            out.append(
                Violation("precedence", f"{customer} before its supplier {supplier}", customer, rc)
            )

    capacity = inst.fleet.capacity
    dist = inst.distance_matrix
    for k, route in enumerate(sol.routes):
        known = [i for i in route if i != DEPOT and i in inst]
        load = 0.0
        for i in known:
            load += inst.node(i).q
            if load > capacity + TOL:
                msg = f"load {load:g} exceeds capacity {capacity:g} at node {i} on route {k}"
                out.append(Violation("capacity", msg, i, k))
            elif load < -TOL:
                msg = f"load {load:g} below zero at node {i} on route {k}"
                out.append(Violation("capacity", msg, i, k))
        legs = zip((DEPOT, *known), (*known, DEPOT))
        for a, b in legs:
            if math.isinf(dist[a][b]):
                out.append(Violation("missing_arc", f"route {k} uses missing arc {a}-{b}", b, k))

    if len(sol.routes) > inst.max_vehicles:
        out.append(
            Violation(
                "route_count",
                f"{len(sol.routes)} routes exceed max_vehicles {inst.max_vehicles}",
            )
        )
    return Verdict(tuple(out))


# -- export ----------------------------------------------------------------

SCHEDULE_COLUMNS = ("vehicle", "node", "arrival", "wait", "departure", "load", "tardiness")


def schedule_rows(reports: Sequence[ScheduleReport]) -> list[tuple]:
    """Rows for SCHEDULE_COLUMNS, with depot start and return rows per vehicle."""
    rows: list[tuple] = []
    for k, rep in enumerate(reports, start=1):
        rows.append((k, DEPOT, 0.0, 0.0, 0.0, 0.0, 0.0))
        rows.extend((k, s.node, s.arrival, s.wait, s.departure, s.load, s.tardiness) for s in rep.stops)
        rows.append((k, DEPOT, rep.return_arrival, 0.0, rep.return_arrival, 0.0, rep.return_tardiness))
    return rows


def schedule_csv(reports: Sequence[ScheduleReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SCHEDULE_COLUMNS)
    writer.writerows(schedule_rows(reports))
    return buf.getvalue()
