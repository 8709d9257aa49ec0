"""A deterministic text crafting world with a ground-truth tech tree.

Actions are ``(operation, item)`` pairs. Each action costs one step; an
episode ends when the step counter reaches the horizon.
"""
from __future__ import annotations

import enum
import graphlib
import json
import logging
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import IO, Mapping

from .depgraph import (
    OPS,
    PICKAXE_TIERS,
    DependencyGraph,
    Op,
    determine_experienced_requirements,
)

log = logging.getLogger(__name__)

OperationKind = Op


class VariantKind(str, enum.Enum):
    VANILLA = "vanilla"
    MODIFIED_TRUE_DEPENDENCY = "modified_true_dependency"
    MODIFIED_TRUE_OPERATION = "modified_true_operation"


class WorldSpecError(ValueError):
    pass


class HorizonExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class Requirement:
    item: str
    quantity: int
    consumed: bool = True


@dataclass(frozen=True)
class ItemRecord:
    name: str
    true_operation: Op
    requirements: tuple[Requirement, ...] = ()
    yield_: int = 1
    tool_class: bool = False

    def requirement_set(self) -> dict[str, int]:
        return {r.item: r.quantity for r in self.requirements}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "true_operation": self.true_operation.value,
            "requirements": [
                {"item": r.item, "quantity": r.quantity, "consumed": r.consumed}
                for r in self.requirements
            ],
            "yield": self.yield_,
            "tool_class": self.tool_class,
        }

    @classmethod
    def from_json(cls, rec: Mapping) -> "ItemRecord":
        try:
            name = rec["name"]
            reqs = tuple(
                Requirement(r["item"], int(r["quantity"]), bool(r.get("consumed", True)))
                for r in rec.get("requirements", ())
            )
            return cls(
                name=name,
                true_operation=Op(rec["true_operation"]),
                requirements=reqs,
                yield_=int(rec.get("yield", 1)),
                tool_class=bool(rec.get("tool_class", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise WorldSpecError(f"bad item record {rec!r}: {exc}") from exc


@dataclass(frozen=True)
class WorldSpec:
    items: dict[str, ItemRecord]
    goals: dict[str, list[str]]
    horizon: int = 2000
    name: str = "world"

    @property
    def goal_items(self) -> list[str]:
        return [g for group in self.goals.values() for g in group]

    @property
    def goal_groups(self) -> dict[str, str]:
        return {g: grp for grp, members in self.goals.items() for g in members}

    @property
    def tool_items(self) -> frozenset[str]:
        return frozenset(n for n, r in self.items.items() if r.tool_class)

    def truth_graph(self) -> DependencyGraph:
        g = DependencyGraph(self.items)
        for name, rec in self.items.items():
            g.set_requirements(name, rec.requirement_set())
        return g

    def validate(self) -> None:
        if self.horizon < 1:
            raise WorldSpecError("horizon must be positive")
        order = graphlib.TopologicalSorter()
        for name, rec in self.items.items():
            for r in rec.requirements:
                if r.item not in self.items:
                    raise WorldSpecError(f"{name!r} requires undeclared item {r.item!r}")
                if r.quantity < 1:
                    raise WorldSpecError(f"{name!r} has non-positive quantity for {r.item!r}")
            if rec.yield_ < 1:
                raise WorldSpecError(f"{name!r} has non-positive yield")
            order.add(name, *(r.item for r in rec.requirements))
        try:
            order.prepare()
        except graphlib.CycleError as exc:
            raise WorldSpecError(f"dependency cycle through {exc.args[1]!r}") from exc
        for g in self.goal_items:
            if g not in self.items:
                raise WorldSpecError(f"goal {g!r} is not a declared item")

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "horizon": self.horizon,
            "goals": self.goals,
            "items": [r.to_json() for r in self.items.values()],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "WorldSpec":
        if not isinstance(doc, Mapping) or "items" not in doc:
            raise WorldSpecError("world document needs an 'items' list")
        items = {}
        for rec in doc["items"]:
            r = ItemRecord.from_json(rec)
            if r.name in items:
                raise WorldSpecError(f"duplicate item {r.name!r}")
            items[r.name] = r
        goals = doc.get("goals") or {}
        if isinstance(goals, list):
            goals = {"all": list(goals)}
        spec = cls(
            items=items,
            goals={k: list(v) for k, v in goals.items()},
            horizon=int(doc.get("horizon", 2000)),
            name=str(doc.get("name", "world")),
        )
        spec.validate()
        return spec


def default_spec_path() -> Path:
    return Path(str(resources.files("craftplan") / "data" / "mc_textworld.json"))


def load_spec(spec_path: str | Path | None = None) -> WorldSpec:
    path = Path(spec_path) if spec_path else default_spec_path()
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise WorldSpecError(f"{path}: {exc}") from exc
    return WorldSpec.from_json(doc)


def load_world(spec_path: str | Path | None = None, seed: int = 0) -> "World":
    return World(load_spec(spec_path), seed=seed)


def apply_variant(spec: WorldSpec, variant: VariantKind | str) -> WorldSpec:
    """Return a copy of ``spec`` with one of the knowledge-conflict rule changes."""
    variant = VariantKind(variant)
    if variant is VariantKind.VANILLA:
        return spec
    items = dict(spec.items)
    if variant is VariantKind.MODIFIED_TRUE_DEPENDENCY:
        for name, rec in spec.items.items():
            # the nugget recipe itself stays on ingots, else the tree turns cyclic
            if name == "gold_nugget":
                continue
            if any(r.item == "gold_ingot" for r in rec.requirements):
                reqs = tuple(
                    replace(r, item="gold_nugget") if r.item == "gold_ingot" else r
                    for r in rec.requirements
                )
                items[name] = replace(rec, requirements=reqs)
    else:
        for name, rec in spec.items.items():
            if name.endswith("_hoe") or name.endswith("_axe"):
                items[name] = replace(rec, true_operation=Op.SMELT)
            elif name.endswith("_shovel"):
                # mined like a bare block: no tool, one unit per action
                items[name] = replace(rec, true_operation=Op.MINE, requirements=(), yield_=1)
    out = WorldSpec(items=items, goals=spec.goals, horizon=spec.horizon,
                    name=f"{spec.name}+{variant.value}")
    out.validate()
    return out


@dataclass(frozen=True)
class ActionResult:
    success: bool
    obtained: tuple[str, int] | None
    pre_inventory: dict[str, int]
    post_inventory: dict[str, int]
    tools_used: tuple[str, ...] = ()


@dataclass(frozen=True)
class SubgoalResult:
    success: bool
    steps_used: int
    experienced: tuple[str, dict[str, int]] | None = None
    exhausted: bool = False
    consumed: frozenset[str] = frozenset()


def _tier(name: str) -> int:
    return PICKAXE_TIERS.index(name) if name in PICKAXE_TIERS else -1


@dataclass
class World:
    spec: WorldSpec
    seed: int = 0
    trace: IO[str] | None = None
    inventory: Counter = field(default_factory=Counter)
    step: int = 0

    def __post_init__(self):
        self.rng = random.Random(self.seed)

    @property
    def horizon(self) -> int:
        return self.spec.horizon

    @property
    def exhausted(self) -> bool:
        return self.step >= self.spec.horizon

    def reset(self, seed: int | None = None) -> "World":
        if seed is not None:
            self.seed = seed
        self.rng = random.Random(self.seed)
        self.inventory = Counter()
        self.step = 0
        return self

    def _holds(self, req: Requirement) -> bool:
        if req.item in PICKAXE_TIERS:
            need = _tier(req.item)
            return any(self.inventory[p] > 0 for p in PICKAXE_TIERS[need:])
        return self.inventory[req.item] >= req.quantity

    def _failure_reason(self, op: Op, rec: ItemRecord | None) -> str | None:
        if rec is None:
            return "unknown item"
        if op is not rec.true_operation:
            return f"wrong operation (expected {rec.true_operation})"
        for r in rec.requirements:
            if not self._holds(r):
                return f"missing {r.item} x{r.quantity}"
        return None

    def step_action(self, op: Op | str, item: str) -> ActionResult:
        if self.exhausted:
            raise HorizonExhausted(f"step {self.step} >= horizon {self.spec.horizon}")
        op = Op(op)
        self.step += 1
        pre = dict(+self.inventory)
        rec = self.spec.items.get(item)
        reason = self._failure_reason(op, rec)
        if reason is not None:
            log.debug("step %d: %s %s failed: %s", self.step, op, item, reason)
            result = ActionResult(False, None, pre, pre)
        else:
            for r in rec.requirements:
                if r.consumed:
                    self.inventory[r.item] -= r.quantity
            gained = 1 if op is Op.MINE else rec.yield_
            self.inventory[item] += gained
            self.inventory = +self.inventory
            used = tuple(sorted(r.item for r in rec.requirements if not r.consumed))
            result = ActionResult(True, (item, gained), pre, dict(self.inventory), used)
        if self.trace is not None:
            delta = {
                k: result.post_inventory.get(k, 0) - pre.get(k, 0)
                for k in sorted(set(pre) | set(result.post_inventory))
                if result.post_inventory.get(k, 0) != pre.get(k, 0)
            }
            self.trace.write(json.dumps({
                "step": self.step, "op": op.value, "item": item,
                "success": result.success, "inventory_delta": delta,
            }) + "\n")
        return result

    def execute_subgoal(self, op: Op | str, quantity: int, item: str,
                        retries: int = 1) -> SubgoalResult:
        """Repeat ``(op, item)`` until ``quantity`` units are obtained.

        Fails after ``retries`` consecutive failed actions, or when the horizon
        runs out. The experienced requirement set of the first success is
        attached to the result.
        """
        if quantity < 1:
            raise ValueError("quantity must be >= 1")
        op = Op(op)
        obtained = steps = fails = 0
        experienced = None
        consumed: set[str] = set()
        while obtained < quantity:
            if self.exhausted:
                return SubgoalResult(False, steps, experienced, True, frozenset(consumed))
            res = self.step_action(op, item)
            steps += 1
            if not res.success:
                fails += 1
                if fails >= retries:
                    return SubgoalResult(False, steps, experienced, False, frozenset(consumed))
                continue
            fails = 0
            consumed.update(k for k, n in res.pre_inventory.items()
                            if n > res.post_inventory.get(k, 0))
            if experienced is None:
                experienced = (item, determine_experienced_requirements(
                    op, res.pre_inventory, res.post_inventory, item,
                    tools_used=res.tools_used))
            obtained += res.obtained[1]
        return SubgoalResult(True, steps, experienced, False, frozenset(consumed))


__all__ = [
    "OPS", "ActionResult", "HorizonExhausted", "ItemRecord", "OperationKind",
    "Requirement", "SubgoalResult", "VariantKind", "World", "WorldSpec",
    "WorldSpecError", "apply_variant", "default_spec_path", "load_spec", "load_world",
]
