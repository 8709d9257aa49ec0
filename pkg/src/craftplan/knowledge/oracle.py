"""A seeded, noisy stand-in for an LLM that knows the vanilla tech tree.

Error rates default to the marginals measured for a small open model:
about a quarter of predicted requirement sets have exactly the right items,
and about one prediction in twelve mentions an item that does not exist.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Mapping, Sequence

from ..depgraph import DependencyGraph
from ..textworld import WorldSpec
from .similarity import LexicalSimilarity

ADJECTIVES = (
    "ancient", "enchanted", "polished", "refined", "reinforced", "raw",
    "charged", "compressed", "hardened", "mossy", "cracked", "glowing",
)


@dataclass(frozen=True)
class NoiseProfile:
    p_hallucinate_item: float = 0.08
    p_omit: float = 0.1
    p_extra: float = 0.25
    quantity_mean: float = -0.55
    quantity_std: float = 2.74
    p_quantity_noise: float = 0.6
    p_wrong_op: float = 0.3
    p_extra_similar: float = 0.6
    p_substitute: float = 0.22

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name.startswith("p_") and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} is not a probability")
        if self.quantity_std < 0:
            raise ValueError("quantity_std must be non-negative")
        if self.p_omit + self.p_substitute > 1.0:
            raise ValueError("p_omit + p_substitute must not exceed 1")

    @classmethod
    def zero(cls) -> "NoiseProfile":
        return cls(p_hallucinate_item=0.0, p_omit=0.0, p_extra=0.0, quantity_mean=0.0,
                   quantity_std=0.0, p_quantity_noise=0.0, p_wrong_op=0.0, p_extra_similar=0.0,
                   p_substitute=0.0)

    @classmethod
    def from_dict(cls, d: Mapping | None) -> "NoiseProfile":
        if d is None:
            return cls()
        if d == "zero":
            return cls.zero()
        return cls(**dict(d))


def _tech_rank(graph: DependencyGraph) -> dict[str, tuple[int, str]]:
    depth: dict[str, int] = {}

    def visit(v: str) -> int:
        if v not in depth:
            reqs = graph.requirements(v)
            depth[v] = 1 + max((visit(u) for u in reqs), default=-1)
        return depth[v]

    return {v: (visit(v), v) for v in graph}


def _ancestors(graph: DependencyGraph, item: str) -> set[str]:
    seen: set[str] = set()
    todo = list(graph.requirements(item))
    while todo:
        u = todo.pop()
        if u not in seen:
            seen.add(u)
            todo.extend(graph.requirements(u))
    return seen


def _item_rng(seed: int, *key: object) -> random.Random:
    # str seeds go through sha512, so streams are stable across processes
    return random.Random(":".join(map(str, (seed, *key))))


class OracleProvider:
    """Deterministic noisy provider over a ground-truth world spec.

    Requirement predictions are memoized per item, so asking twice returns the
    same (possibly wrong) answer.
    """

    def __init__(self, truth: WorldSpec, profile: NoiseProfile | None = None,
                 seed: int = 0, similarity: LexicalSimilarity | None = None):
        self.truth = truth
        self.profile = profile or NoiseProfile()
        self.seed = seed
        self.similarity = similarity or LexicalSimilarity()
        self._graph: DependencyGraph = truth.truth_graph()
        self._names = sorted(truth.items)
        self._rank = _tech_rank(self._graph)
        self._ancestors = {v: _ancestors(self._graph, v) for v in self._names}
        self._memo: dict[str, dict[str, int]] = {}
        self._revisions: Counter = Counter()
        self._op_rng = _item_rng(seed, "select_operation")
        self.calls: Counter = Counter()

    def _noisy_quantity(self, q: int, rng: random.Random) -> int:
        p = self.profile
        if rng.random() >= p.p_quantity_noise:
            return q
        err = round(rng.gauss(p.quantity_mean, p.quantity_std))
        return max(1, q + err)

    def _hallucinated_name(self, rng: random.Random) -> str:
        while True:
            name = f"{rng.choice(ADJECTIVES)}_{rng.choice(self._names)}"
            if name not in self.truth.items:
                return name

    def _draw(self, item: str, rng: random.Random) -> dict[str, int]:
        p = self.profile
        if item in self.truth.items:
            base = self.truth.items[item].requirement_set()
            # extras come from earlier in the tech tree, so noise never adds a cycle
            blocked = {n for n in self._names if self._rank[n] >= self._rank[item]}
        else:
            # unknown names borrow the recipe of something that sounds alike
            near = self.similarity.top_k(item, self._names, 5)
            base = self.truth.items[rng.choice(near)].requirement_set()
            blocked = {item}
        pred = {}
        for u, q in sorted(base.items()):
            r = rng.random()
            if r < p.p_omit:
                continue
            if r < p.p_omit + p.p_substitute:
                # a sibling form of the same material, e.g. nuggets for ingots
                alts = [n for n in self._names if n not in blocked and n not in base and n not in pred]
                same = [n for n in alts if n.split("_")[0] == u.split("_")[0]
                        and n not in self._ancestors[u]]
                alts = self.similarity.top_k(u, same or alts, 3)
                if alts:
                    u = rng.choice(alts)
            pred[u] = self._noisy_quantity(q, rng)
        if rng.random() < p.p_extra:
            pool = [n for n in self._names if n not in blocked and n not in pred]
            if rng.random() < p.p_extra_similar:
                # a near-named cousin of a real ingredient, or of the item itself
                anchor = rng.choice(sorted(base)) if base else item
                pool = self.similarity.top_k(anchor, pool, 3)
            if pool:
                pred[rng.choice(pool)] = rng.randint(1, 3)
        if rng.random() < p.p_hallucinate_item:
            pred[self._hallucinated_name(rng)] = rng.randint(1, 3)
        pred.pop(item, None)
        return pred

    def predict_requirements(self, item: str, exemplars: Sequence = ()) -> dict[str, int]:
        self.calls["predict_requirements"] += 1
        if item not in self._memo:
            self._memo[item] = self._draw(item, _item_rng(self.seed, "predict", item))
        return dict(self._memo[item])

    def revise_requirements(self, item: str, failed_transition: Mapping | None = None,
                            exemplars: Sequence = ()) -> dict[str, int]:
        self.calls["revise_requirements"] += 1
        self._revisions[item] += 1
        rng = _item_rng(self.seed, "revise", item, self._revisions[item])
        return self._draw(item, rng)

    def select_operation(self, item: str, exemplar_pairs: Sequence = (),
                         candidate_ops: Sequence[str] = ("mine", "craft", "smelt")) -> str:
        self.calls["select_operation"] += 1
        cands = sorted(str(op) for op in candidate_ops)
        if not cands:
            raise ValueError("candidate_ops must be non-empty")
        rec = self.truth.items.get(item)
        if rec is None or rec.true_operation.value not in cands:
            return self._op_rng.choice(cands)
        true_op = rec.true_operation.value
        if self._op_rng.random() >= self.profile.p_wrong_op:
            return true_op
        others = [c for c in cands if c != true_op]
        return self._op_rng.choice(others) if others else true_op


def calibration_items(spec: WorldSpec, n: int = 75) -> list[str]:
    """Goal items first, then other declared items in file order, ``n`` in total."""
    goals = spec.goal_items
    rest = [name for name in spec.items if name not in set(goals)]
    return (goals + rest)[:n]


def measure_error_rates(spec: WorldSpec, profile: NoiseProfile, seeds: Sequence[int],
                        items: Sequence[str] | None = None) -> dict[str, float]:
    """Empirical error marginals of the oracle over ``items`` x ``seeds``."""
    items = list(items) if items is not None else calibration_items(spec)
    sim = LexicalSimilarity()
    n = correct = exact = halluc = extra = omitted = 0
    abs_err = signed = 0.0
    n_q = 0
    for seed in seeds:
        oracle = OracleProvider(spec, profile, seed=seed, similarity=sim)
        for item in items:
            truth = spec.items[item].requirement_set()
            pred = oracle.predict_requirements(item)
            n += 1
            correct += set(pred) == set(truth)
            exact += pred == truth
            halluc += any(u not in spec.items for u in pred)
            extra += bool(set(pred) - set(truth))
            omitted += bool(set(truth) - set(pred))
            for u in set(pred) & set(truth):
                d = pred[u] - truth[u]
                abs_err += abs(d)
                signed += d
                n_q += 1
    return {
        "correct_items": correct / n,
        "exact": exact / n,
        "hallucinated": halluc / n,
        "unnecessary": extra / n,
        "omitted": omitted / n,
        "mean_abs_quantity_error": abs_err / n_q if n_q else 0.0,
        "mean_signed_quantity_error": signed / n_q if n_q else 0.0,
    }
