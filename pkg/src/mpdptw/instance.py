"""Problem data for the multi-vehicle pickup-and-delivery problem with time windows.

An instance is one depot (id 0) plus an even number of paired nodes. Each
supplier (``q > 0``) names its customer through ``succ``; each customer
(``q < 0``) names its supplier through ``pred``. Instances are immutable.

The on-disk format is a JSON document::

    {
      "name": "...",
      "fleet": {"capacity": 40, "cost_per_distance": 1, "speed": 1,
                "max_vehicles": 5},
      "nodes": [{"id": 0, "x": 0, "y": 0, "q": 0, "e": 0, "l": 200, "s": 0,
                 "succ": 0, "pred": 0}, ...],
      "missing_arcs": [[3, 7], ...]
    }

``0`` in ``succ``/``pred`` means "none". ``max_vehicles`` and
``missing_arcs`` are optional; arcs listed in ``missing_arcs`` have infinite
length in both directions.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping

DEPOT = 0

_NODE_KEYS = ("id", "x", "y", "q", "e", "l", "s", "succ", "pred")


class InstanceError(ValueError):
    """Base class for instance parsing and validation failures."""


class InstanceSyntaxError(InstanceError):
    """The document is not well-formed."""


class InstanceValidationError(InstanceError):
    """The document parsed but violates an instance invariant."""


class UnknownNodeError(LookupError):
    """A node id does not belong to the instance."""

    def __init__(self, node: Any):
        super().__init__(f"unknown node id {node!r}")
        self.node = node

    def __str__(self) -> str:
        return self.args[0]


@dataclass(frozen=True)
class Node:
    id: int
    x: float
    y: float
    q: float = 0
    e: float = 0.0
    l: float = math.inf  # noqa: E741
    s: float = 0.0
    succ: int | None = None
    pred: int | None = None

    @property
    def is_supplier(self) -> bool:
        return self.q > 0

    @property
    def is_customer(self) -> bool:
        return self.q < 0


@dataclass(frozen=True)
class Fleet:
    capacity: float = 40
    cost_per_distance: float = 1.0
    speed: float = 1.0
    # None means floor(N'/2), resolved by Instance.max_vehicles
    max_vehicles: int | None = None

    def __post_init__(self) -> None:
        if not self.capacity > 0:
            raise InstanceValidationError(f"fleet capacity must be > 0, got {self.capacity}")
        if not self.cost_per_distance > 0:
            raise InstanceValidationError(
                f"fleet cost_per_distance must be > 0, got {self.cost_per_distance}"
            )
        if not self.speed > 0:
            raise InstanceValidationError(f"fleet speed must be > 0, got {self.speed}")
        if self.max_vehicles is not None and self.max_vehicles < 0:
            raise InstanceValidationError(
                f"fleet max_vehicles must be >= 0, got {self.max_vehicles}"
            )


@dataclass(frozen=True)
class Instance:
    """A validated m-PDPTW instance.

    ``nodes`` holds the non-depot nodes only; use :meth:`node` to look up any
    id including the depot.
    """

    name: str
    depot: Node
    nodes: tuple[Node, ...]
    fleet: Fleet = field(default_factory=Fleet)
    missing_arcs: frozenset[frozenset[int]] = frozenset()

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(
            self, "missing_arcs", frozenset(frozenset(a) for a in self.missing_arcs)
        )
        _validate(self)

    # -- lookups -----------------------------------------------------------

    @cached_property
    def _by_id(self) -> dict[int, Node]:
        table = {DEPOT: self.depot}
        table.update((n.id, n) for n in self.nodes)
        return table

    def node(self, node_id: int) -> Node:
        try:
            return self._by_id[node_id]
        except (KeyError, TypeError):
            raise UnknownNodeError(node_id) from None

    def __contains__(self, node_id: object) -> bool:
        try:
            return node_id in self._by_id
        except TypeError:
            return False

    @property
    def node_ids(self) -> tuple[int, ...]:
        """Non-depot ids in file order."""
        return tuple(n.id for n in self.nodes)

    @property
    def n_nodes(self) -> int:
        """N', the number of non-depot nodes."""
        return len(self.nodes)

    @property
    def suppliers(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.q > 0)

    @property
    def customers(self) -> tuple[int, ...]:
        return tuple(n.id for n in self.nodes if n.q < 0)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """(supplier, customer) pairs in supplier file order."""
        return tuple((n.id, n.succ) for n in self.nodes if n.q > 0)

    @property
    def n_pairs(self) -> int:
        return len(self.nodes) // 2

    @property
    def max_vehicles(self) -> int:
        if self.fleet.max_vehicles is not None:
            return self.fleet.max_vehicles
        return self.n_nodes // 2

    # -- geometry ----------------------------------------------------------

    @cached_property
    def distance_matrix(self) -> list[list[float]]:
        """Dense distance table indexed by node id (unused ids hold NaN)."""
        size = max(self._by_id) + 1
        table = [[math.nan] * size for _ in range(size)]
        members = list(self._by_id.values())
        for a in members:
            row = table[a.id]
            for b in members:
                if a.id != b.id and frozenset((a.id, b.id)) in self.missing_arcs:
                    row[b.id] = math.inf
                else:
                    row[b.id] = math.hypot(a.x - b.x, a.y - b.y)
        return table

    def distance(self, i: int, j: int) -> float:
        a, b = self.node(i), self.node(j)
        return self.distance_matrix[a.id][b.id]

    def travel_time(self, i: int, j: int) -> float:
        return self.distance(i, j) / self.fleet.speed

    # -- derived instances -------------------------------------------------

    def with_fleet(self, **changes: Any) -> "Instance":
        """Copy of this instance with some fleet parameters replaced."""
        params = {
            "capacity": self.fleet.capacity,
            "cost_per_distance": self.fleet.cost_per_distance,
            "speed": self.fleet.speed,
            "max_vehicles": self.fleet.max_vehicles,
        }
        params.update({k: v for k, v in changes.items() if v is not None})
        return Instance(self.name, self.depot, self.nodes, Fleet(**params), self.missing_arcs)

    def subset(self, node_ids: Iterable[int], name: str | None = None) -> "Instance":
        """Sub-instance keeping only ``node_ids`` (ids are preserved).

        The selection must be closed under pairing.
        """
        keep = set(node_ids)
        keep.discard(DEPOT)
        for i in keep:
            self.node(i)
        nodes = tuple(n for n in self.nodes if n.id in keep)
        arcs = frozenset(a for a in self.missing_arcs if a <= keep | {DEPOT})
        fleet = self.fleet
        if fleet.max_vehicles is not None and fleet.max_vehicles > len(nodes) // 2:
            fleet = Fleet(fleet.capacity, fleet.cost_per_distance, fleet.speed, None)
        return Instance(name or f"{self.name}-subset", self.depot, nodes, fleet, arcs)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        fleet: dict[str, Any] = {
            "capacity": self.fleet.capacity,
            "cost_per_distance": self.fleet.cost_per_distance,
            "speed": self.fleet.speed,
        }
        if self.fleet.max_vehicles is not None:
            fleet["max_vehicles"] = self.fleet.max_vehicles
        doc: dict[str, Any] = {
            "name": self.name,
            "fleet": fleet,
            "nodes": [_node_to_dict(n) for n in (self.depot, *self.nodes)],
        }
        if self.missing_arcs:
            doc["missing_arcs"] = sorted(sorted(a) for a in self.missing_arcs)
        return doc


def _node_to_dict(n: Node) -> dict[str, Any]:
    return {
        "id": n.id,
        "x": n.x,
        "y": n.y,
        "q": n.q,
        "e": n.e,
        "l": n.l,
        "s": n.s,
        "succ": n.succ or 0,
        "pred": n.pred or 0,
    }


def _validate(inst: Instance) -> None:
    depot = inst.depot
    if depot.id != DEPOT:
        raise InstanceValidationError(f"depot must have id 0, got {depot.id}")
    if depot.q != 0 or depot.succ is not None or depot.pred is not None:
        raise InstanceValidationError("depot must have q = 0 and no pairing")

    seen: dict[int, Node] = {DEPOT: depot}
    for n in inst.nodes:
        if n.id in seen:
            if n.id == DEPOT:
                raise InstanceValidationError("more than one depot (id 0)")
            raise InstanceValidationError(f"duplicate node id {n.id}")
        if n.id < 0:
            raise InstanceValidationError(f"node id must be non-negative, got {n.id}")
        seen[n.id] = n

    for n in (depot, *inst.nodes):
        if n.e > n.l:
            raise InstanceValidationError(f"node {n.id} window open {n.e} > close {n.l}")
        if n.s < 0:
            raise InstanceValidationError(f"node {n.id} service time {n.s} < 0")

    for n in inst.nodes:
        if n.q > 0:
            if n.pred is not None:
                raise InstanceValidationError(f"supplier {n.id} must not have a predecessor")
            if n.succ is None:
                raise InstanceValidationError(f"supplier {n.id} has no successor")
            partner = seen.get(n.succ)
            if partner is None or partner.id == DEPOT:
                raise InstanceValidationError(
                    f"node {n.id} successor {n.succ} is not a node of the instance"
                )
            if partner.pred != n.id:
                raise InstanceValidationError(
                    f"pairing not mutual: node {n.id} successor {n.succ} "
                    f"lacks matching predecessor"
                )
            if partner.q != -n.q:
                raise InstanceValidationError(
                    f"node {n.id} demand {n.q} does not balance customer "
                    f"{partner.id} demand {partner.q}"
                )
        elif n.q < 0:
            if n.succ is not None:
                raise InstanceValidationError(f"customer {n.id} must not have a successor")
            if n.pred is None:
                raise InstanceValidationError(f"customer {n.id} has no predecessor")
            partner = seen.get(n.pred)
            if partner is None or partner.id == DEPOT:
                raise InstanceValidationError(
                    f"node {n.id} predecessor {n.pred} is not a node of the instance"
                )
            if partner.succ != n.id:
                raise InstanceValidationError(
                    f"pairing not mutual: node {n.id} predecessor {n.pred} "
                    f"lacks matching successor"
                )
        else:
            raise InstanceValidationError(f"non-depot node {n.id} has zero demand")

    for arc in inst.missing_arcs:
        if len(arc) != 2 or not all(i in seen for i in arc):
            raise InstanceValidationError(f"missing arc {sorted(arc)} must join two known nodes")

    if inst.fleet.max_vehicles is not None and inst.fleet.max_vehicles > inst.n_nodes // 2:
        raise InstanceValidationError(
            f"max_vehicles {inst.fleet.max_vehicles} exceeds N'/2 = {inst.n_nodes // 2}"
        )


# -- parsing ---------------------------------------------------------------


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InstanceSyntaxError(f"{where} must be a number, got {value!r}")
    return value


def _integer(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise InstanceSyntaxError(f"{where} must be an integer, got {value!r}")
    return value


def _parse_node(raw: Any, index: int) -> Node:
    if not isinstance(raw, Mapping):
        raise InstanceSyntaxError(f"nodes[{index}] must be an object")
    missing = [k for k in _NODE_KEYS if k not in raw]
    if missing:
        raise InstanceSyntaxError(f"nodes[{index}] lacks keys {missing}")
    node_id = _integer(raw["id"], f"nodes[{index}].id")
    where = f"node {node_id}"
    succ = _integer(raw["succ"], f"{where}.succ")
    pred = _integer(raw["pred"], f"{where}.pred")
    return Node(
        id=node_id,
        x=_number(raw["x"], f"{where}.x"),
        y=_number(raw["y"], f"{where}.y"),
        q=_number(raw["q"], f"{where}.q"),
        e=_number(raw["e"], f"{where}.e"),
        l=_number(raw["l"], f"{where}.l"),
        s=_number(raw["s"], f"{where}.s"),
        succ=succ or None,
        pred=pred or None,
    )


def instance_from_dict(doc: Mapping[str, Any]) -> Instance:
    if not isinstance(doc, Mapping):
        raise InstanceSyntaxError("instance document must be a JSON object")
    for key in ("name", "fleet", "nodes"):
        if key not in doc:
            raise InstanceSyntaxError(f"instance document lacks key {key!r}")
    name = doc["name"]
    if not isinstance(name, str):
        raise InstanceSyntaxError("name must be a string")

    raw_fleet = doc["fleet"]
    if not isinstance(raw_fleet, Mapping):
        raise InstanceSyntaxError("fleet must be an object")
    for key in ("capacity", "cost_per_distance", "speed"):
        if key not in raw_fleet:
            raise InstanceSyntaxError(f"fleet lacks key {key!r}")
    max_vehicles = raw_fleet.get("max_vehicles")
    fleet = Fleet(
        capacity=_number(raw_fleet["capacity"], "fleet.capacity"),
        cost_per_distance=_number(raw_fleet["cost_per_distance"], "fleet.cost_per_distance"),
        speed=_number(raw_fleet["speed"], "fleet.speed"),
        max_vehicles=None if max_vehicles is None else _integer(max_vehicles, "fleet.max_vehicles"),
    )

    raw_nodes = doc["nodes"]
    if not isinstance(raw_nodes, list):
        raise InstanceSyntaxError("nodes must be an array")
    nodes = [_parse_node(raw, i) for i, raw in enumerate(raw_nodes)]
    depots = [n for n in nodes if n.id == DEPOT]
    if not depots:
        raise InstanceValidationError("instance has no depot (id 0)")
    if len(depots) > 1:
        raise InstanceValidationError("more than one depot (id 0)")

    arcs = []
    for k, arc in enumerate(doc.get("missing_arcs", [])):
        if not isinstance(arc, list) or len(arc) != 2:
            raise InstanceSyntaxError(f"missing_arcs[{k}] must be a pair of ids")
        arcs.append(frozenset(_integer(i, f"missing_arcs[{k}]") for i in arc))

    return Instance(
        name=name,
        depot=depots[0],
        nodes=tuple(n for n in nodes if n.id != DEPOT),
        fleet=fleet,
        missing_arcs=frozenset(arcs),
    )


def parse_instance(document: str) -> Instance:
    """Parse an instance from JSON text."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise InstanceSyntaxError(f"malformed JSON: {exc}") from exc
    return instance_from_dict(doc)


def serialize_instance(inst: Instance) -> str:
    return json.dumps(inst.to_dict(), indent=2)


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def paper_instance() -> Instance:
    """The bundled 10-node instance (five supplier/customer pairs)."""
    text = resources.files("mpdptw.fixtures").joinpath("paper_table1.json").read_text("utf-8")
    return parse_instance(text)


def random_instance(
    n_pairs: int,
    rng: random.Random | int | None = None,
    *,
    coord_range: float = 100.0,
    min_window: float = 50.0,
    max_window: float = 100.0,
    horizon: float = 100.0,
    max_service: float = 10.0,
    demand_range: tuple[int, int] = (5, 20),
    capacity: float = 40,
    name: str | None = None,
) -> Instance:
    """Draw a random instance with ``n_pairs`` supplier/customer pairs.

    Window openings are uniform on ``[0, horizon]`` and widths uniform on
    ``[min_window, max_window]``. Suppliers get ids ``1..n_pairs`` and their
    customers ``n_pairs+1..2*n_pairs``.
    """
    if not isinstance(rng, random.Random):
        rng = random.Random(rng)
    depot = Node(DEPOT, coord_range / 2, coord_range / 2, 0, 0.0, 10 * (horizon + max_window), 0.0)
    nodes = []
    for k in range(1, n_pairs + 1):
        demand = rng.randint(*demand_range)
        for node_id, q, succ, pred in (
            (k, demand, n_pairs + k, None),
            (n_pairs + k, -demand, None, k),
        ):
            e = rng.uniform(0.0, horizon)
            nodes.append(
                Node(
                    id=node_id,
                    x=rng.uniform(0.0, coord_range),
                    y=rng.uniform(0.0, coord_range),
                    q=q,
                    e=e,
                    l=e + rng.uniform(min_window, max_window),
                    s=rng.uniform(0.0, max_service),
                    succ=succ,
                    pred=pred,
                )
            )
    nodes.sort(key=lambda n: n.id)
    return Instance(name or f"random-{n_pairs}", depot, tuple(nodes), Fleet(capacity=capacity))
