"""Per (item, operation) success and failure memory.

The memory decides which operation to try for an item, asks the knowledge
provider when it has no reliable answer, and tells the agent when an item has
failed often enough that its requirement set should be revised.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .depgraph import OPS, AggregatedRequirements, Op
from .knowledge.base import KnowledgeProvider
from .knowledge.similarity import SimilarityProvider

log = logging.getLogger(__name__)


class OpClassification(str, enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNKNOWN = "unknown"


@dataclass
class OperationMemory:
    """Counts of ``(n_succ, n_fail)`` per item and operation.

    With ``success_only`` set, failures are dropped on the floor, so no
    operation is ever classified invalid.
    """

    success_only: bool = False
    _table: dict[tuple[str, Op], list[int]] = field(default_factory=dict)

    def counts(self, item: str, op: Op | str) -> tuple[int, int]:
        cell = self._table.get((item, op if isinstance(op, Op) else Op(op)))
        return (cell[0], cell[1]) if cell else (0, 0)

    def cells(self):
        """Every recorded ``((item, op), (n_succ, n_fail))``."""
        return ((key, (c[0], c[1])) for key, c in self._table.items())

    def record(self, item: str, op: Op | str, success: bool) -> None:
        if not success and self.success_only:
            return
        cell = self._table.setdefault((item, Op(op)), [0, 0])
        cell[0 if success else 1] += 1

    def reset_item(self, item: str) -> None:
        for op in OPS:
            self._table.pop((item, op), None)

    def items(self) -> set[str]:
        return {item for item, _ in self._table}

    def to_json(self) -> list[dict]:
        return [
            {"item": item, "op": op.value, "succ": s, "fail": f}
            for (item, op), (s, f) in sorted(self._table.items())
        ]

    @classmethod
    def from_json(cls, rows: Iterable[Mapping], success_only: bool = False) -> "OperationMemory":
        mem = cls(success_only=success_only)
        for row in rows:
            s, f = int(row["succ"]), int(row["fail"])
            if s < 0 or f < 0:
                raise ValueError(f"negative count in {row!r}")
            mem._table[(row["item"], Op(row["op"]))] = [s, f]
        return mem


def record(memory: OperationMemory, item: str, op: Op | str, success: bool) -> OperationMemory:
    memory.record(item, op, success)
    return memory


def reset_item(memory: OperationMemory, item: str) -> OperationMemory:
    memory.reset_item(item)
    return memory


def classify(memory: OperationMemory, item: str, op: Op | str, margin: int = 2) -> OpClassification:
    s, f = memory.counts(item, op)
    if s - f <= -margin:
        return OpClassification.INVALID
    if s > 0:
        return OpClassification.VALID
    return OpClassification.UNKNOWN


def plan_operation(
    item: str,
    memory: OperationMemory,
    provider: KnowledgeProvider,
    similarity: SimilarityProvider,
    k: int = 3,
    margin: int = 2,
) -> Op:
    """Pick the operation for obtaining ``item``.

    A valid operation is reused as is. Otherwise the provider chooses among the
    operations not yet shown invalid, seeing which operations worked for the
    ``k`` most similar items.
    """
    status = {op: classify(memory, item, op, margin) for op in OPS}
    for op in OPS:
        if status[op] is OpClassification.VALID:
            return op
    valid_pairs = {
        (u, op) for (u, op), (s, f) in memory.cells()
        if u != item and s > 0 and s - f > -margin
    }
    near = set(similarity.top_k(item, {u for u, _ in valid_pairs}, k))
    pairs = sorted((u, op.value) for u, op in valid_pairs if u in near)
    cands = [op.value for op in OPS if status[op] is not OpClassification.INVALID]
    if not cands:
        log.info("every operation for %s is invalid; offering all", item)
        cands = [op.value for op in OPS]
    return Op(provider.select_operation(item, pairs, cands))


@dataclass(frozen=True)
class Subgoal:
    op: Op
    quantity: int
    item: str


def make_plan(
    agg: AggregatedRequirements,
    memory: OperationMemory,
    provider: KnowledgeProvider,
    similarity: SimilarityProvider,
    k: int = 3,
    margin: int = 2,
) -> list[Subgoal]:
    if not len(agg):
        raise ValueError("cannot plan for an empty requirement list")
    return [
        Subgoal(plan_operation(item, memory, provider, similarity, k, margin), qty, item)
        for qty, item in agg
    ]


def total_failure_score(memory: OperationMemory, item: str) -> int:
    return sum(f - s for s, f in (memory.counts(item, op) for op in OPS))


def should_revise(memory: OperationMemory, item: str, d0: int = 6) -> bool:
    if d0 < 1:
        raise ValueError("d0 must be >= 1")
    return total_failure_score(memory, item) >= d0
