"""Exhaustive Pareto front for small instances, used as ground truth for the GA.

Requests are grouped into vehicles by set partition (a request's two nodes
always ride together), then each group is expanded into every visit order
that puts suppliers before their customers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .evaluation import Solution, check_solution, objectives
from .instance import Instance
from .pareto import ParetoArchive

DEFAULT_MAX_PAIRS = 4


class OracleGuardError(ValueError):
    """The instance is too large to enumerate."""


@dataclass
class OracleResult:
    front: ParetoArchive
    enumerated_count: int
    feasible_count: int


def set_partitions(items: Sequence, max_blocks: int | None = None) -> Iterator[list[list]]:
    """Every partition of ``items`` into unordered, non-empty blocks."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest, max_blocks):
        for k in range(len(part)):
            yield part[:k] + [[first, *part[k]]] + part[k + 1 :]
        if max_blocks is None or len(part) < max_blocks:
            yield [[first], *part]


def precedence_orders(pairs: Sequence[tuple[int, int]]) -> Iterator[tuple[int, ...]]:
    """Every ordering of the pairs' nodes with each supplier before its customer."""
    n = 2 * len(pairs)
    order: list[int] = []
    opened = [False] * len(pairs)
    closed = [False] * len(pairs)

    def extend() -> Iterator[tuple[int, ...]]:
        if len(order) == n:
            yield tuple(order)
            return
        for k, (w, v) in enumerate(pairs):
            if not opened[k]:
                opened[k] = True
                order.append(w)
                yield from extend()
                order.pop()
                opened[k] = False
            elif not closed[k]:
                closed[k] = True
                order.append(v)
                yield from extend()
                order.pop()
                closed[k] = False

    yield from extend()


def enumerate_solutions(inst: Instance) -> Iterator[Solution]:
    """All precedence-respecting routings using at most ``max_vehicles`` routes."""
    limit = inst.max_vehicles
    if inst.n_nodes == 0:
        yield Solution()
        return
    if limit == 0:
        return
    for groups in set_partitions(inst.pairs, limit):
        per_group = [list(precedence_orders(g)) for g in groups]
        for routes in itertools.product(*per_group):
            yield Solution(routes).canonical()


def _check_guard(inst: Instance, max_pairs: int) -> None:
    if inst.n_pairs > max_pairs:
        raise OracleGuardError(
            f"instance exceeds oracle guard ({inst.n_pairs} pairs > {max_pairs})"
        )


def enumerate_feasible(inst: Instance, max_pairs: int = DEFAULT_MAX_PAIRS) -> list[Solution]:
    _check_guard(inst, max_pairs)
    return [s for s in enumerate_solutions(inst) if check_solution(inst, s).ok]


def enumerate_front(inst: Instance, max_pairs: int = DEFAULT_MAX_PAIRS) -> OracleResult:
    _check_guard(inst, max_pairs)
    front = ParetoArchive()
    enumerated = feasible = 0
    for sol in enumerate_solutions(inst):
        enumerated += 1
        if not check_solution(inst, sol).ok:
            continue
        feasible += 1
        front.insert(objectives(inst, sol), sol)
    return OracleResult(front, enumerated, feasible)
