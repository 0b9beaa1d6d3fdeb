"""Genetic algorithm over two populations: visit permutations and vehicle splits.

A node chromosome is a permutation of every non-depot node. A split
chromosome holds ``floor(N'/2)`` non-negative counts summing to ``N'``;
vehicle ``k`` serves the next ``counts[k]`` nodes of the permutation. A decoded
routing is repaired for precedence and capacity, then evaluated.

Operators take explicit cut points / positions so they can be driven
deterministically; when omitted they are drawn from ``rng``.
"""

from __future__ import annotations

import logging
import random
from dataclasses import asdict, dataclass, fields
from typing import Callable, Sequence

from .evaluation import TOL, ObjectiveVector, Solution, check_solution, objectives
from .instance import Instance
from .pareto import ParetoArchive, pareto_ranks

logger = logging.getLogger(__name__)

NodeChromosome = tuple[int, ...]
SplitChromosome = tuple[int, ...]


class DegenerateInstanceError(ValueError):
    """The instance has no requests to route."""


class CapacityRepairError(ValueError):
    """A single request exceeds vehicle capacity, so no repair exists."""


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 50
    generations: int = 200
    crossover_rate: float = 0.6
    mutation_rate: float = 0.3
    copy_rate: float | None = None
    rng_seed: int = 0
    pairing_sample: int = 4

    def __post_init__(self) -> None:
        if self.copy_rate is None:
            object.__setattr__(
                self, "copy_rate", round(1.0 - self.crossover_rate - self.mutation_rate, 12)
            )
        for name in ("crossover_rate", "mutation_rate", "copy_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {rate}")
        total = self.crossover_rate + self.mutation_rate + self.copy_rate
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"crossover, mutation and copy rates must sum to 1, got {total}")
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        if self.generations < 0:
            raise ValueError(f"generations must be >= 0, got {self.generations}")
        if self.pairing_sample < 1:
            raise ValueError(f"pairing_sample must be >= 1, got {self.pairing_sample}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "GAConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown GA config keys: {sorted(unknown)}")
        return cls(**data)


# -- encoding --------------------------------------------------------------


def decode(perm: Sequence[int], counts: Sequence[int]) -> Solution:
    if sum(counts) != len(perm):
        raise ValueError(f"split sums to {sum(counts)} but permutation has {len(perm)} nodes")
    if any(c < 0 for c in counts):
        raise ValueError(f"split has a negative count: {list(counts)}")
    routes = []
    start = 0
    for c in counts:
        routes.append(tuple(perm[start : start + c]))
        start += c
    return Solution(routes)


def encode(sol: Solution, n_slots: int) -> tuple[NodeChromosome, SplitChromosome]:
    """Inverse of :func:`decode`: concatenated routes plus zero-padded lengths."""
    counts = [len(r) for r in sol.routes]
    if len(counts) > n_slots:
        raise ValueError(f"{len(counts)} routes do not fit {n_slots} vehicle slots")
    return sol.node_sequence, tuple(counts + [0] * (n_slots - len(counts)))


def n_slots(inst: Instance) -> int:
    return max(1, inst.n_nodes // 2)


def random_split(total: int, slots: int, max_active: int, rng: random.Random) -> SplitChromosome:
    """Spread ``total`` nodes over a uniform 1..max_active vehicles, leading slots first."""
    active = rng.randint(1, max(1, min(max_active, slots, total)))
    cuts = sorted(rng.sample(range(1, total), active - 1)) if active > 1 else []
    bounds = [0, *cuts, total]
    counts = [bounds[k + 1] - bounds[k] for k in range(active)]
    return tuple(counts + [0] * (slots - active))


def init_populations(
    inst: Instance, cfg: GAConfig, rng: random.Random
) -> tuple[list[NodeChromosome], list[SplitChromosome]]:
    if inst.n_nodes == 0:
        raise DegenerateInstanceError("instance has no pickup/delivery nodes")
    ids = list(inst.node_ids)
    slots = n_slots(inst)
    perms = []
    for _ in range(cfg.population_size):
        rng.shuffle(ids)
        perms.append(tuple(ids))
    splits = [
        random_split(inst.n_nodes, slots, inst.max_vehicles, rng)
        for _ in range(cfg.population_size)
    ]
    return perms, splits


# -- variation operators ---------------------------------------------------


def _draw_cut(n: int, cut: int | None, rng: random.Random | None) -> int:
    if cut is None:
        if n < 2:
            raise ValueError("crossover needs chromosomes of length >= 2")
        cut = (rng or random).randint(1, n - 1)
    if not 1 <= cut < n:
        raise ValueError(f"cut {cut} out of range [1, {n - 1}]")
    return cut


def one_point_crossover(
    a: Sequence[int],
    b: Sequence[int],
    cut: int | None = None,
    rng: random.Random | None = None,
) -> tuple[NodeChromosome, NodeChromosome]:
    """Keep each parent's prefix up to ``cut``; fill with the rest in the other parent's order."""
    if len(a) != len(b):
        raise ValueError("parents differ in length")
    cut = _draw_cut(len(a), cut, rng)

    def child(head: Sequence[int], donor: Sequence[int]) -> NodeChromosome:
        taken = set(head[:cut])
        return tuple(head[:cut]) + tuple(x for x in donor if x not in taken)

    return child(a, b), child(b, a)


def repair_split(counts: Sequence[int], total: int) -> SplitChromosome:
    """Restore ``sum(counts) == total`` by adjusting the rightmost positive entries."""
    out = list(counts)
    diff = sum(out) - total
    k = len(out) - 1
    while diff > 0:
        # excess: drain from the right
        while out[k] == 0:
            k -= 1
        take = min(out[k], diff)
        out[k] -= take
        diff -= take
    if diff < 0:
        positive = [k for k, c in enumerate(out) if c > 0]
        out[positive[-1] if positive else 0] -= diff
    return tuple(out)


def split_crossover(
    a: Sequence[int],
    b: Sequence[int],
    cut: int | None = None,
    rng: random.Random | None = None,
) -> tuple[SplitChromosome, SplitChromosome]:
    if len(a) != len(b):
        raise ValueError("parents differ in length")
    if sum(a) != sum(b):
        raise ValueError("parents distribute different node totals")
    cut = _draw_cut(len(a), cut, rng)
    total = sum(a)
    return (
        repair_split(tuple(a[:cut]) + tuple(b[cut:]), total),
        repair_split(tuple(b[:cut]) + tuple(a[cut:]), total),
    )


def swap_mutation(
    c: Sequence[int],
    i: int | None = None,
    j: int | None = None,
    rng: random.Random | None = None,
) -> tuple[int, ...]:
    n = len(c)
    if i is None or j is None:
        if n < 2:
            raise ValueError("swap needs a chromosome of length >= 2")
        i, j = (rng or random).sample(range(n), 2)
    if i == j:
        raise ValueError("swap positions must differ")
    if not (0 <= i < n and 0 <= j < n):
        raise ValueError(f"swap positions ({i}, {j}) out of range for length {n}")
    out = list(c)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


# -- correction ------------------------------------------------------------


def correct_precedence(inst: Instance, sol: Solution) -> Solution:
    """Put every customer on its supplier's route, after the supplier.

    A customer on another route is appended to the supplier's route; one
    sitting before its supplier is reinserted right after it. Suppliers never
    move, and moving a customer never reorders any other pair, so one pass
    over the suppliers suffices.
    """
    routes = [list(r) for r in sol.routes]
    where = {i: k for k, r in enumerate(routes) for i in r}
    for w in sol.node_sequence:
        node = inst.node(w)
        if node.q <= 0:
            continue
        v = node.succ
        rw, rv = where[w], where[v]
        if rw != rv:
            routes[rv].remove(v)
            routes[rw].append(v)
            where[v] = rw
        else:
            route = routes[rw]
            if route.index(v) < route.index(w):
                route.remove(v)
                route.insert(route.index(w) + 1, v)
    return Solution(routes)


def _first_overflow(inst: Instance, route: Sequence[int]) -> int | None:
    capacity = inst.fleet.capacity
    load = 0.0
    for pos, i in enumerate(route):
        load += inst.node(i).q
        if load > capacity + TOL:
            return pos
    return None


def _peak(inst: Instance, route: Sequence[int]) -> float:
    load = peak = 0.0
    for i in route:
        load += inst.node(i).q
        peak = max(peak, load)
    return peak


def correct_capacity(inst: Instance, sol: Solution) -> Solution:
    """Relocate requests until no route's load exceeds capacity.

    The pickup at a route's first overflow moves, with its delivery, to the
    end of the first other route whose peak load leaves room for it; failing
    that, to a new vehicle if one is available; failing that, to the end of
    its own route (load is zero there once precedence holds).
    """
    capacity = inst.fleet.capacity
    routes = [list(r) for r in sol.routes]
    guard = 4 * (inst.n_nodes + 1) ** 2
    for _ in range(guard):
        for r, route in enumerate(routes):
            pos = _first_overflow(inst, route)
            if pos is not None:
                break
        else:
            return Solution(routes)
        w = routes[r][pos]
        node = inst.node(w)
        if node.q > capacity + TOL:
            raise CapacityRepairError(
                f"request {w}->{node.succ} of size {node.q:g} exceeds capacity {capacity:g}"
            )
        if node.q <= 0:
            raise ValueError(f"overflow at customer {w}: correct precedence first")
        v = node.succ
        routes[r].remove(w)
        routes[r].remove(v)
        for k, other in enumerate(routes):
            if k != r and other and _peak(inst, other) + node.q <= capacity + TOL:
                other.extend((w, v))
                break
        else:
            if sum(1 for x in routes if x) < inst.max_vehicles:
                routes.append([w, v])
            else:
                routes[r].extend((w, v))
    raise CapacityRepairError("capacity repair did not converge")


def correct(inst: Instance, sol: Solution) -> Solution:
    """Precedence then capacity correction."""
    return correct_capacity(inst, correct_precedence(inst, sol))


# -- evolution -------------------------------------------------------------


@dataclass(frozen=True)
class Individual:
    perm: NodeChromosome
    split: SplitChromosome
    solution: Solution
    vector: ObjectiveVector


class _Evaluator:
    """Decode, correct, check and score (perm, split) pairs with memoization."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.slots = n_slots(inst)
        self._by_genes: dict[tuple, Individual | None] = {}
        self._by_solution: dict[Solution, Individual | None] = {}

    def __call__(self, perm: NodeChromosome, split: SplitChromosome) -> tuple[Individual | None, bool]:
        """Returns (individual or None if infeasible, whether the routing is new)."""
        key = (perm, split)
        if key in self._by_genes:
            return self._by_genes[key], False
        try:
            sol = correct(self.inst, decode(perm, split)).canonical()
        except CapacityRepairError:
            self._by_genes[key] = None
            return None, False
        fresh = sol not in self._by_solution
        if fresh:
            ind = None
            if check_solution(self.inst, sol).ok:
                p, s = encode(sol, self.slots)
                ind = Individual(p, s, sol, objectives(self.inst, sol))
            self._by_solution[sol] = ind
        ind = self._by_solution[sol]
        self._by_genes[key] = ind
        return ind, fresh


def _rank_key(ind: Individual, rank: int) -> tuple:
    return (rank, ind.vector.f1, ind.vector.f2, ind.vector.f3)


def _select(pool: list[Individual], n: int) -> tuple[list[Individual], list[tuple]]:
    """Best ``n`` distinct routings by (Pareto rank, f1, f2, f3)."""
    unique: dict[Solution, Individual] = {}
    for ind in pool:
        unique.setdefault(ind.solution, ind)
    members = list(unique.values())
    ranks = pareto_ranks([ind.vector for ind in members])
    order = sorted(range(len(members)), key=lambda k: (_rank_key(members[k], int(ranks[k])), k))
    chosen = order[:n]
    return [members[k] for k in chosen], [_rank_key(members[k], int(ranks[k])) for k in chosen]


def _tournament(keys: list[tuple], rng: random.Random) -> int:
    a, b = rng.randrange(len(keys)), rng.randrange(len(keys))
    return a if keys[a] <= keys[b] else b


def _vary(
    genes: list[tuple[int, ...]],
    keys: list[tuple],
    size: int,
    cfg: GAConfig,
    rng: random.Random,
    cross: Callable,
) -> list[tuple[int, ...]]:
    """Fill an intermediate population by crossover, mutation or copy."""
    out: list[tuple[int, ...]] = []
    length = len(genes[0])
    while len(out) < size:
        r = rng.random()
        if r < cfg.crossover_rate and length >= 2:
            a = genes[_tournament(keys, rng)]
            b = genes[_tournament(keys, rng)]
            out.extend(cross(a, b, rng=rng))
        elif r < cfg.crossover_rate + cfg.mutation_rate and length >= 2:
            out.append(swap_mutation(genes[_tournament(keys, rng)], rng=rng))
        else:
            out.append(genes[_tournament(keys, rng)])
    return out[:size]


Callback = Callable[[int, ParetoArchive, list[Individual]], None]


def evolve(inst: Instance, cfg: GAConfig | None = None, callback: Callback | None = None) -> ParetoArchive:
    """Run the generational loop and return the archive of non-dominated routings.

    ``callback(generation, archive, parents)`` is invoked after the initial
    population (generation 0) and after every generation.
    """
    cfg = cfg or GAConfig()
    if inst.n_nodes == 0:
        raise DegenerateInstanceError("instance has no pickup/delivery nodes")
    rng = random.Random(cfg.rng_seed)
    evaluate = _Evaluator(inst)
    archive = ParetoArchive(instance=inst)
    n = cfg.population_size

    def assess(perms: list[NodeChromosome], splits: list[SplitChromosome]) -> list[Individual]:
        if cfg.pairing_sample >= len(splits):
            pairing = [list(range(len(splits)))] * len(perms)
        else:
            pairing = [
                [rng.randrange(len(splits)) for _ in range(cfg.pairing_sample)] for _ in perms
            ]
        born = []
        for perm, picks in zip(perms, pairing):
            for s in picks:
                ind, fresh = evaluate(perm, splits[s])
                if ind is None:
                    continue
                born.append(ind)
                if fresh:
                    archive.insert(ind.vector, ind.solution)
        return born

    perms, splits = init_populations(inst, cfg, rng)
    parents, keys = _select(assess(perms, splits), n)
    if callback:
        callback(0, archive, parents)

    for gen in range(1, cfg.generations + 1):
        if parents:
            perms = _vary([p.perm for p in parents], keys, 2 * n, cfg, rng, one_point_crossover)
            splits = _vary([p.split for p in parents], keys, 2 * n, cfg, rng, split_crossover)
        else:
            # nothing feasible survived: restart from fresh random chromosomes
            perms, splits = init_populations(inst, GAConfig(population_size=2 * n), rng)
        parents, keys = _select(parents + assess(perms, splits), n)
        if callback:
            callback(gen, archive, parents)
        if gen % 50 == 0:
            logger.debug("generation %d: archive size %d", gen, len(archive))
    return archive
