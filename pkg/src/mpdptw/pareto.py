"""Pareto dominance on objective vectors and a non-dominated archive.

All objectives are minimized. The vehicle count compares exactly; tardiness
and cost compare with an absolute tolerance of ``TOL``.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Iterator, Sequence

import numpy as np

from .evaluation import TOL, ObjectiveVector, Solution, check_solution, format_tours
from .instance import Instance


class InfeasibleEntryError(ValueError):
    """An archive insertion was attempted with an infeasible solution."""


def dominates(a: Sequence[float], b: Sequence[float], tol: float = TOL) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    strictly = False
    for x, y in zip(a, b):
        if x > y + tol:
            return False
        if x < y - tol:
            strictly = True
    return strictly


def objectives_equal(a: Sequence[float], b: Sequence[float], tol: float = TOL) -> bool:
    return all(abs(x - y) <= tol for x, y in zip(a, b))


def nondominance_case(a: Sequence[float], b: Sequence[float]) -> int | None:
    """Which of the six sign patterns makes ``a`` and ``b`` mutually non-dominated.

    Each objective is classified as ``a > b`` or ``a <= b``. The patterns are
    every mix except all-``<=`` (a dominates b) and all-``>`` (b dominates a),
    numbered in this order::

        1: (>, <=, <=)   2: (<=, >, <=)   3: (<=, <=, >)
        4: (>, >, <=)    5: (>, <=, >)    6: (<=, >, >)

    Returns the case number, or None when no pattern matches. The
    classification is exact, so it agrees with :func:`dominates` only on
    componentwise-distinct vectors.
    """
    signs = tuple(x > y for x, y in zip(a, b))
    return _CASES.get(signs)


_CASES = {
    (True, False, False): 1,
    (False, True, False): 2,
    (False, False, True): 3,
    (True, True, False): 4,
    (True, False, True): 5,
    (False, True, True): 6,
}


def non_dominated_filter(points: Sequence[Sequence[float]], tol: float = TOL) -> list[int]:
    """Indices of the points that no other point dominates (duplicates all kept)."""
    return [
        i
        for i, p in enumerate(points)
        if not any(dominates(q, p, tol) for j, q in enumerate(points) if j != i)
    ]


def dominance_matrix(points: Sequence[Sequence[float]], tol: float = TOL) -> np.ndarray:
    """Boolean ``M`` with ``M[i, j]`` true iff point i dominates point j."""
    arr = np.asarray(points, dtype=float).reshape(len(points), -1)
    a = arr[:, None, :]
    b = arr[None, :, :]
    no_worse = np.all(a <= b + tol, axis=2)
    better = np.any(a < b - tol, axis=2)
    return no_worse & better


def pareto_ranks(points: Sequence[Sequence[float]], tol: float = TOL) -> np.ndarray:
    """Non-dominated sorting rank of each point (0 = first front)."""
    n = len(points)
    ranks = np.full(n, -1, dtype=int)
    if n == 0:
        return ranks
    dom = dominance_matrix(points, tol)
    counts = dom.sum(axis=0)
    front = np.flatnonzero(counts == 0)
    rank = 0
    while front.size:
        ranks[front] = rank
        counts = counts - dom[front].sum(axis=0)
        counts[ranks >= 0] = -1
        front = np.flatnonzero(counts == 0)
        rank += 1
    return ranks


class ParetoArchive:
    """Mutually non-dominated (ObjectiveVector, Solution) entries.

    An entry whose objective vector equals an archived one (within tolerance)
    is rejected, so the first representative of each vector is kept. When
    built with an ``instance``, every inserted solution is checked for
    feasibility first.
    """

    def __init__(self, instance: Instance | None = None, tol: float = TOL):
        self.instance = instance
        self.tol = tol
        self._entries: list[tuple[ObjectiveVector, Solution]] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple[ObjectiveVector, Solution]]:
        return iter(self._entries)

    @property
    def entries(self) -> list[tuple[ObjectiveVector, Solution]]:
        return list(self._entries)

    def objective_vectors(self) -> list[ObjectiveVector]:
        return sorted(v for v, _ in self._entries)

    def sorted_entries(self) -> list[tuple[ObjectiveVector, Solution]]:
        return sorted(self._entries, key=lambda e: e[0])

    def covers(self, vec: Sequence[float]) -> bool:
        """True if some member dominates or equals ``vec``."""
        return any(
            dominates(v, vec, self.tol) or objectives_equal(v, vec, self.tol)
            for v, _ in self._entries
        )

    def insert(self, vec: Sequence[float], solution: Solution) -> bool:
        if self.instance is not None:
            verdict = check_solution(self.instance, solution)
            if not verdict.ok:
                raise InfeasibleEntryError(f"cannot archive infeasible solution: {verdict}")
        vec = ObjectiveVector(*vec)
        if self.covers(vec):
            return False
        self._entries = [e for e in self._entries if not dominates(vec, e[0], self.tol)]
        self._entries.append((vec, solution))
        return True

    def update(self, entries: Iterable[tuple[Sequence[float], Solution]]) -> int:
        """Insert several entries in order; returns how many were accepted."""
        return sum(self.insert(v, s) for v, s in entries)

    def copy(self) -> "ParetoArchive":
        other = ParetoArchive(self.instance, self.tol)
        other._entries = list(self._entries)
        return other

    # -- export ------------------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("f1", "f2", "f3", "routes"))
        for vec, sol in self.sorted_entries():
            writer.writerow((vec.f1, repr(float(vec.f2)), repr(float(vec.f3)), format_tours(sol)))
        return buf.getvalue()

    def to_records(self) -> list[dict]:
        return [
            {
                "f1": vec.f1,
                "f2": vec.f2,
                "f3": vec.f3,
                "routes": [list(r) for r in sol.routes],
                "tours": format_tours(sol),
            }
            for vec, sol in self.sorted_entries()
        ]

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_records(), **kwargs)


def archive_insert(
    archive: ParetoArchive, entry: tuple[Sequence[float], Solution]
) -> tuple[ParetoArchive, bool]:
    """Insert into ``archive`` in place and return it with the accepted flag."""
    accepted = archive.insert(*entry)
    return archive, accepted


def same_front(
    a: Iterable[Sequence[float]], b: Iterable[Sequence[float]], tol: float = TOL
) -> bool:
    """True if two objective-vector sets match one-to-one within ``tol``."""
    left = sorted(tuple(v) for v in a)
    right = sorted(tuple(v) for v in b)
    if len(left) != len(right):
        return False
    unmatched = list(right)
    for v in left:
        for k, w in enumerate(unmatched):
            if objectives_equal(v, w, tol):
                del unmatched[k]
                break
        else:
            return False
    return True
