"""Learning and evaluation runs for the exploring agent and its baselines.

One learning run is one seed: initialize the agent's graph, then explore for
``episodes`` episodes of ``horizon`` steps each, logging graph accuracy after
every environment step.
"""
from __future__ import annotations

import csv
import enum
import io
import json
import logging
import random
import statistics
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .adl import AdlParams, Experience, initialize_graph, load_seed_plans, revision_by_analogy
from .depgraph import DependencyGraph, aggregate_requirements, ega
from .explore import select_goal_deckard, select_goal_dex, select_goal_random
from .ffom import OperationMemory, make_plan, should_revise
from .knowledge import LexicalSimilarity, NoiseProfile, OracleProvider, ProviderError
from .textworld import VariantKind, World, WorldSpec, apply_variant, load_spec

log = logging.getLogger(__name__)


class AgentVariant(str, enum.Enum):
    REPOA = "REPOA"
    ADAM = "ADAM"
    DECKARD = "DECKARD"
    RAND = "RAND"
    REPOA_MINUS_FFOM = "REPOA_minus_FFOM"
    REPOA_MINUS_ANALOGY = "REPOA_minus_Analogy"
    REPOA_MINUS_REVISION = "REPOA_minus_Revision"
    REPOA_ORACLE_GRAPH = "REPOA_oracle_graph"


@dataclass(frozen=True)
class Features:
    prediction: str  # llm | resources | truth
    selector: str  # dex | deckard | random
    memory: str  # full | success_only | none
    revision: str  # analogy | llm | none
    trigger: str = "ffom"  # ffom | streak
    learns: bool = True  # apply experience updates after initialization


FEATURES: dict[AgentVariant, Features] = {
    AgentVariant.REPOA: Features("llm", "dex", "full", "analogy"),
    AgentVariant.ADAM: Features("resources", "random", "success_only", "none"),
    AgentVariant.DECKARD: Features("llm", "deckard", "success_only", "none"),
    AgentVariant.RAND: Features("llm", "random", "none", "none", learns=False),
    AgentVariant.REPOA_MINUS_FFOM: Features("llm", "dex", "none", "analogy", "streak"),
    AgentVariant.REPOA_MINUS_ANALOGY: Features("llm", "dex", "full", "llm"),
    AgentVariant.REPOA_MINUS_REVISION: Features("llm", "dex", "full", "none"),
    AgentVariant.REPOA_ORACLE_GRAPH: Features("truth", "dex", "full", "analogy"),
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    agent: AgentVariant = AgentVariant.REPOA
    environment: VariantKind = VariantKind.VANILLA
    spec_path: str | None = None
    seeds: list[int] = field(default_factory=lambda: [0])
    episodes: int = 1
    horizon: int = 2000
    margin: int = 2
    d0: int = 6
    c0: int = 3
    alpha_s: int = 2
    alpha_i: int = 8
    k: int = 3
    retries: int = 1
    provider: dict = field(default_factory=lambda: {"kind": "oracle", "noise": None})
    eval_learning: bool = False

    def __post_init__(self):
        try:
            self.agent = AgentVariant(self.agent)
            self.environment = VariantKind(self.environment)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        for name in ("episodes", "horizon", "d0", "c0", "alpha_s", "alpha_i", "k", "retries", "margin"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        self.seeds = [int(s) for s in self.seeds]

    @property
    def adl(self) -> AdlParams:
        return AdlParams(c0=self.c0, alpha_s=self.alpha_s, alpha_i=self.alpha_i, k=self.k)

    def to_json(self) -> dict:
        d = asdict(self)
        d["agent"] = self.agent.value
        d["environment"] = self.environment.value
        return d

    @classmethod
    def from_json(cls, d: Mapping) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        return cls(**dict(d))

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentConfig":
        try:
            return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc


def make_provider(config: ExperimentConfig, vanilla: WorldSpec, seed: int, similarity=None):
    """Knowledge provider for one seed.

    The oracle always knows the vanilla rules, so in a modified world its
    knowledge conflicts with what the agent observes.
    """
    cfg = dict(config.provider or {})
    kind = cfg.pop("kind", "oracle")
    if kind == "oracle":
        return OracleProvider(vanilla, NoiseProfile.from_dict(cfg.get("noise")), seed=seed,
                              similarity=similarity)
    if kind == "http":
        from .knowledge.http import EndpointConfig, HttpProvider

        return HttpProvider(EndpointConfig.from_env(cfg.get("endpoint")))
    raise ConfigError(f"unknown provider kind {kind!r}")


@dataclass
class Worlds:
    vanilla: WorldSpec
    env: WorldSpec

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> "Worlds":
        vanilla = replace(load_spec(config.spec_path), horizon=config.horizon)
        return cls(vanilla, apply_variant(vanilla, config.environment))

    @property
    def goals(self) -> list[str]:
        return self.env.goal_items


@dataclass
class AgentState:
    graph: DependencyGraph
    experience: Experience
    counts: dict[str, int]
    memory: OperationMemory
    rng: random.Random
    provider: object
    similarity: LexicalSimilarity
    features: Features
    tools: frozenset[str]
    streak: Counter = field(default_factory=Counter)

    @property
    def experienced(self) -> set[str]:
        return self.experience.experienced

    @property
    def resources(self) -> set[str]:
        return self.experience.resources

    def checkpoint(self) -> dict:
        return {
            "graph": self.graph.to_records(),
            "experienced": sorted(self.experienced),
            "resources": sorted(self.resources),
            "counts": dict(sorted(self.counts.items())),
            "memory": self.memory.to_json(),
        }


def _resource_constant(state: AgentState, alpha: int) -> None:
    for v in sorted(state.graph.nodes - state.experienced):
        state.graph.set_requirements(v, {r: alpha for r in state.resources if r != v})


def init_agent(config: ExperimentConfig, worlds: Worlds, seed: int,
               similarity: LexicalSimilarity | None = None) -> AgentState:
    feats = FEATURES[config.agent]
    similarity = similarity or LexicalSimilarity()
    provider = make_provider(config, worlds.vanilla, seed, similarity)
    world = World(worlds.env, seed=seed)
    plans = load_seed_plans()
    init = initialize_graph(worlds.goals, plans, world,
                            provider if feats.prediction == "llm" else None, similarity, config.k)
    graph, exp = init.graph, init.experience
    if feats.prediction == "truth":
        graph = worlds.env.truth_graph()
    state = AgentState(
        graph=graph,
        experience=exp,
        counts={v: 1 for v in graph.nodes},
        memory=OperationMemory(success_only=feats.memory == "success_only"),
        rng=random.Random(f"{seed}:agent"),
        provider=provider,
        similarity=similarity,
        features=feats,
        tools=worlds.vanilla.tool_items,
    )
    if feats.prediction == "resources":
        _resource_constant(state, config.alpha_i)
    return state


def select_goal(state: AgentState, config: ExperimentConfig) -> str | None:
    sel = state.features.selector
    if sel == "dex":
        return select_goal_dex(state.graph, state.experienced, state.counts, state.rng)
    if sel == "deckard":
        goal = select_goal_deckard(state.graph, state.experienced, state.counts, config.c0, state.rng)
    else:
        goal = select_goal_random(state.graph, state.experienced, state.rng)
    if goal is not None:
        state.counts[goal] = state.counts.get(goal, 1) + 1
    return goal


def _revise(state: AgentState, config: ExperimentConfig, item: str, world: World,
            failed: str) -> None:
    kind = state.features.revision
    if kind == "analogy":
        revision_by_analogy(state.graph, state.experienced, item, state.counts, state.resources,
                            state.similarity, config.adl)
    elif kind == "llm":
        near = state.similarity.top_k(item, state.experienced - {item}, config.k)
        transition = {
            "original_prediction": state.graph.requirements(item),
            "inventory": dict(world.inventory),
            "failed_subgoal": failed,
        }
        reqs = state.provider.revise_requirements(
            item, transition, [(u, state.graph.requirements(u)) for u in near])
        state.graph.set_requirements(item, reqs)
        state.counts[item] = state.counts.get(item, 1) + 1
        state.experienced.discard(item)


@dataclass
class EpisodeResult:
    ega: list[float]
    events: list[dict]
    fault: str | None = None


class _Tracker:
    """Records graph changes as events and graph accuracy per step."""

    def __init__(self, state, truth, goals, seed, episode, world):
        self.state, self.truth, self.goals = state, truth, goals
        self.seed, self.episode, self.world = seed, episode, world
        self.events: list[dict] = []
        self.curve = [ega(state.graph, truth, goals)]
        self._snap = state.graph.copy()

    def emit(self, kind: str, **data) -> None:
        self.events.append({"seed": self.seed, "episode": self.episode,
                            "step": self.world.step, "kind": kind, **data})

    def sync(self, steps: int) -> None:
        """Log graph edits since the last sync, then extend the accuracy curve by ``steps``."""
        g = self.state.graph
        changed = {}
        if g != self._snap:
            changed = {v: g.requirements(v) for v in sorted(g.nodes)
                       if v not in self._snap or g.requirements(v) != self._snap.requirements(v)}
        if changed:
            self.emit("graph", changes=changed)
            self._snap = g.copy()
            value = ega(g, self.truth, self.goals)
        else:
            value = self.curve[-1]
        if steps:
            self.curve.extend([self.curve[-1]] * (steps - 1) + [value])
        else:
            self.curve[-1] = value


def run_learning_episode(state: AgentState, world: World, config: ExperimentConfig,
                         truth: DependencyGraph, goals: Sequence[str], episode: int = 0,
                         fixed_goal: str | None = None) -> EpisodeResult:
    """Explore one episode, mutating ``state``.

    With ``fixed_goal`` the agent pursues only that item and stops once it
    holds it; otherwise it picks intrinsic goals until the horizon runs out.
    """
    world.reset()
    feats = state.features
    tr = _Tracker(state, truth, goals, world.seed, episode, world)
    learning = (fixed_goal is None or config.eval_learning) and feats.learns
    goal_fails = 0

    def pick():
        if fixed_goal is not None:
            return fixed_goal
        g = select_goal(state, config)
        tr.emit("select_goal", goal=g, strategy=feats.selector)
        return g

    goal = pick()
    try:
        while goal is not None and not world.exhausted:
            if fixed_goal is not None and world.inventory[fixed_goal] > 0:
                break
            agg = aggregate_requirements(state.graph, goal, world.inventory, state.tools)
            plan = make_plan(agg, state.memory, state.provider, state.similarity,
                             config.k, config.margin)
            completed = True
            for sg in plan:
                res = world.execute_subgoal(sg.op, sg.quantity, sg.item, config.retries)
                if feats.memory != "none":
                    state.memory.record(sg.item, sg.op, res.success)
                if learning and res.experienced is not None:
                    item, reqs = res.experienced
                    if state.experience.observe(state.graph, item, reqs, res.consumed):
                        tr.emit("experience", item=item)
                        if feats.prediction == "resources":
                            _resource_constant(state, config.alpha_i)
                if res.success:
                    state.streak[sg.item] = 0
                    tr.sync(res.steps_used)
                    continue
                completed = False
                state.streak[sg.item] += 1
                goal_fails += 1
                if res.exhausted:
                    tr.sync(res.steps_used)
                    break
                if feats.trigger == "streak":
                    trigger = state.streak[sg.item] >= config.d0
                else:
                    trigger = should_revise(state.memory, sg.item, config.d0)
                if learning and trigger and feats.revision != "none":
                    _revise(state, config, sg.item, world, f"{sg.op.value} {sg.item}")
                    state.memory.reset_item(sg.item)
                    state.streak[sg.item] = 0
                    tr.emit("revision", item=sg.item, mode=feats.revision)
                    tr.sync(res.steps_used)
                    goal_fails = 0
                    goal = pick()
                elif feats.revision == "none" and (trigger or goal_fails >= config.d0):
                    state.memory.reset_item(sg.item)
                    state.streak[sg.item] = 0
                    tr.emit("reset", item=sg.item)
                    tr.sync(res.steps_used)
                    goal_fails = 0
                    goal = pick()
                else:
                    tr.sync(res.steps_used)
                break
            if completed:
                goal_fails = 0
                if fixed_goal is None:
                    goal = pick()
    except ProviderError as exc:
        log.error("provider fault at step %d: %s", world.step, exc)
        tr.emit("fault", error=str(exc))
        return EpisodeResult(tr.curve, tr.events, str(exc))
    return EpisodeResult(tr.curve, tr.events)


def _pad(curve: list[float], horizon: int) -> list[float]:
    return (curve + [curve[-1]] * (horizon + 1 - len(curve)))[: horizon + 1]


@dataclass
class ExperimentLog:
    config: ExperimentConfig
    metrics: list[tuple[int, int, int, float]] = field(default_factory=list)
    events: list[dict] = field(default_factory=list)
    checkpoints: dict[int, dict] = field(default_factory=dict)
    faults: list[str] = field(default_factory=list)

    def final_ega(self) -> dict[int, float]:
        out = {}
        for seed, _, _, value in self.metrics:
            out[seed] = value
        return out

    def curves(self) -> dict[int, list[float]]:
        out: dict[int, list[float]] = defaultdict(list)
        for seed, _, _, value in self.metrics:
            out[seed].append(value)
        return dict(out)

    def metrics_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", "episode", "env_step", "ega"])
        for seed, ep, step, value in self.metrics:
            w.writerow([seed, ep, step, f"{value:.6f}"])
        return buf.getvalue()

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(json.dumps(self.config.to_json(), indent=2, sort_keys=True))
        (out / "metrics.csv").write_text(self.metrics_csv())
        with open(out / "events.jsonl", "w", encoding="utf-8") as fh:
            for ev in self.events:
                fh.write(json.dumps(ev, sort_keys=True) + "\n")
        for seed, ck in self.checkpoints.items():
            (out / f"graph_seed{seed}.json").write_text(json.dumps(ck, indent=1, sort_keys=True))
        return out


def run_learning(config: ExperimentConfig, out_dir: str | Path | None = None) -> ExperimentLog:
    worlds = Worlds.from_config(config)
    truth = worlds.env.truth_graph()
    similarity = LexicalSimilarity()
    result = ExperimentLog(config)
    for seed in config.seeds:
        try:
            state = init_agent(config, worlds, seed, similarity)
        except ProviderError as exc:
            log.error("seed %d: initialization failed: %s", seed, exc)
            result.faults.append(f"seed {seed}: {exc}")
            continue
        result.events.append({"seed": seed, "episode": -1, "step": 0, "kind": "init",
                              "graph": state.graph.to_records(),
                              "experienced": sorted(state.experienced)})
        world = World(worlds.env, seed=seed)
        for ep in range(config.episodes):
            res = run_learning_episode(state, world, config, truth, worlds.goals, ep)
            result.events.extend(res.events)
            for step, value in enumerate(_pad(res.ega, config.horizon)):
                result.metrics.append((seed, ep, step, value))
            if res.fault:
                result.faults.append(f"seed {seed} episode {ep}: {res.fault}")
                break
        result.checkpoints[seed] = state.checkpoint()
    if out_dir is not None:
        result.write(out_dir)
    return result


def replay_ega(events: Iterable[Mapping], truth: DependencyGraph, goals: Sequence[str],
               seed: int) -> list[tuple[int, float]]:
    """Rebuild ``(step, ega)`` after each graph change of one seed from its events."""
    graph = None
    out = []
    for ev in events:
        if ev["seed"] != seed:
            continue
        if ev["kind"] == "init":
            graph = DependencyGraph.from_records(ev["graph"])
            out.append((0, ega(graph, truth, goals)))
        elif ev["kind"] == "graph":
            for item, reqs in ev["changes"].items():
                graph.set_requirements(item, reqs)
            out.append((ev["step"], ega(graph, truth, goals)))
    return out


@dataclass(frozen=True)
class EvalRecord:
    seed: int
    goal: str
    group: str
    success: bool
    steps_used: int


def load_checkpoint(path: str | Path) -> dict:
    ck = json.loads(Path(path).read_text(encoding="utf-8"))
    for key in ("graph", "experienced"):
        if key not in ck:
            raise ConfigError(f"{path}: checkpoint lacks {key!r}")
    return ck


def evaluate_sr(config: ExperimentConfig, graph_source: str | Path | Mapping = "oracle",
                goals: Sequence[str] | None = None) -> list[EvalRecord]:
    """Success of reaching each benchmark goal from an empty inventory.

    ``graph_source`` is ``"oracle"`` for the true graph, a checkpoint path, or
    a loaded checkpoint. The graph is frozen unless ``config.eval_learning``.
    """
    worlds = Worlds.from_config(config)
    goals = list(goals) if goals is not None else worlds.goals
    groups = worlds.env.goal_groups
    for g in goals:
        if g not in worlds.env.items:
            raise ConfigError(f"unknown goal {g!r}")
    if isinstance(graph_source, (str, Path)) and str(graph_source) != "oracle":
        graph_source = load_checkpoint(graph_source)
    truth = worlds.env.truth_graph()
    similarity = LexicalSimilarity()
    feats = FEATURES[config.agent]
    out = []
    for seed in config.seeds:
        provider = make_provider(config, worlds.vanilla, seed, similarity)
        for goal in goals:
            if graph_source == "oracle":
                graph, exp = truth.copy(), Experience(set(truth.nodes), set())
                counts = {v: 1 for v in graph.nodes}
            else:
                graph = DependencyGraph.from_records(graph_source["graph"])
                exp = Experience(set(graph_source["experienced"]),
                                 set(graph_source.get("resources", ())))
                counts = dict(graph_source.get("counts", {}))
            graph.add_node(goal)
            state = AgentState(graph, exp, counts,
                               OperationMemory(success_only=feats.memory == "success_only"),
                               random.Random(f"{seed}:eval:{goal}"), provider, similarity,
                               feats, worlds.vanilla.tool_items)
            world = World(worlds.env, seed=seed)
            run_learning_episode(state, world, config, truth, worlds.goals, fixed_goal=goal)
            ok = world.inventory[goal] > 0
            out.append(EvalRecord(seed, goal, groups.get(goal, ""), ok, world.step))
    return out


def write_eval(records: Sequence[EvalRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["seed", "goal", "group", "success", "steps_used"])
        for r in records:
            w.writerow([r.seed, r.goal, r.group, int(r.success), r.steps_used])


def _read_csv(path: Path) -> list[dict]:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc}") from exc
    return rows


def emit_report(log_paths: Sequence[str | Path], out_dir: str | Path) -> list[Path]:
    """Summarize run directories into mean/std accuracy curves and per-group success tables."""
    dirs = [Path(p) for p in log_paths]
    if not dirs:
        raise FileNotFoundError("no run directories given")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    curve_rows, sr_rows = [], []
    for d in dirs:
        if not d.is_dir():
            raise FileNotFoundError(f"{d} is not a run directory")
        label = d.name
        cfg = d / "config.json"
        if cfg.exists():
            label = json.loads(cfg.read_text()).get("agent", label)
        metrics, evals = d / "metrics.csv", d / "eval.csv"
        if not metrics.exists() and not evals.exists():
            raise FileNotFoundError(f"{d} has neither metrics.csv nor eval.csv")
        if metrics.exists():
            rows = _read_csv(metrics)
            if rows and set(rows[0]) != {"seed", "episode", "env_step", "ega"}:
                raise ValueError(f"{metrics}: unexpected columns {sorted(rows[0])}")
            by_step: dict[tuple[int, int], list[float]] = defaultdict(list)
            for r in rows:
                by_step[(int(r["episode"]), int(r["env_step"]))].append(float(r["ega"]))
            for (ep, step), vals in sorted(by_step.items()):
                sd = statistics.pstdev(vals) if len(vals) > 1 else 0.0
                curve_rows.append([d.name, label, ep, step, len(vals),
                                   f"{statistics.fmean(vals):.6f}", f"{sd:.6f}"])
        if evals.exists():
            by_group: dict[str, list[int]] = defaultdict(list)
            for r in _read_csv(evals):
                by_group[r["group"]].append(int(r["success"]))
            for grp, vals in sorted(by_group.items()):
                sr_rows.append([d.name, label, grp, len(vals), f"{sum(vals) / len(vals):.4f}"])
    if curve_rows:
        p = out / "ega_curves.csv"
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["run", "agent", "episode", "env_step", "n", "mean", "std"])
            w.writerows(curve_rows)
        written.append(p)
    if sr_rows:
        p = out / "sr_by_group.csv"
        with open(p, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["run", "agent", "group", "n", "sr"])
            w.writerows(sr_rows)
        written.append(p)
    return written


def plot_curves(curves_csv: str | Path, out_png: str | Path) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series: dict[str, list[tuple[int, float, float]]] = defaultdict(list)
    for r in _read_csv(Path(curves_csv)):
        if r["episode"] == "0":
            series[r["agent"]].append((int(r["env_step"]), float(r["mean"]), float(r["std"])))
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, pts in sorted(series.items()):
        xs = [p[0] for p in pts]
        mu = [p[1] for p in pts]
        ax.plot(xs, mu, label=name)
        ax.fill_between(xs, [m - p[2] for m, p in zip(mu, pts)],
                        [m + p[2] for m, p in zip(mu, pts)], alpha=0.2)
    ax.set_xlabel("environment step")
    ax.set_ylabel("EGA")
    ax.set_ylim(0, 1.02)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)
    return Path(out_png)
