"""Chat-completion client that asks a hosted model for crafting knowledge."""
from __future__ import annotations

import json
import logging
import os
import re
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import httpx

from .base import ProviderError, validate_requirements

log = logging.getLogger(__name__)

ENV_ENDPOINT = "CRAFTPLAN_LLM_ENDPOINT"
ENV_MODEL = "CRAFTPLAN_LLM_MODEL"
ENV_API_KEY = "CRAFTPLAN_LLM_API_KEY"


def load_template(name: str) -> str:
    return (resources.files("craftplan.knowledge") / "prompts" / f"{name}.txt").read_text(
        encoding="utf-8"
    )


@dataclass
class EndpointConfig:
    url: str = "http://localhost:8000/v1/chat/completions"
    model: str = "default"
    api_key: str | None = None
    timeout: float = 60.0
    retries: int = 3
    temperature: float = 0.0

    @classmethod
    def from_env(cls, base: Mapping | None = None) -> "EndpointConfig":
        """Build from a config mapping; environment variables take precedence."""
        cfg = cls(**dict(base or {}))
        cfg.url = os.environ.get(ENV_ENDPOINT, cfg.url)
        cfg.model = os.environ.get(ENV_MODEL, cfg.model)
        cfg.api_key = os.environ.get(ENV_API_KEY, cfg.api_key)
        return cfg


def _fmt_reqs(reqs: Mapping[str, int]) -> str:
    return json.dumps(dict(sorted(reqs.items())))


def render_predict_prompt(item: str, exemplars: Sequence[tuple[str, Mapping[str, int]]]) -> str:
    example = load_template("predict_requirements_example")
    blocks = "".join(
        example.format(experienced_item=u, experienced_requirement_set=_fmt_reqs(r)) + "\n"
        for u, r in exemplars
    )
    return load_template("predict_requirements").format(examples=blocks, item_name=item)


def render_operation_prompt(item: str, exemplar_pairs: Sequence[tuple[str, str]],
                            candidate_ops: Sequence[str]) -> str:
    example = load_template("select_operation_example")
    blocks = "".join(
        example.format(similar_item=u, successful_subgoal=json.dumps(f"{op} {u}")) + "\n"
        for u, op in exemplar_pairs
    )
    options = "\n".join(json.dumps(f"{op} {item}") for op in candidate_ops)
    return load_template("select_operation").format(
        examples=blocks, subgoal_options=options, subgoal_item=item
    )


def render_revision_prompt(item: str, failed_transition: Mapping,
                           exemplars: Sequence[tuple[str, Mapping[str, int]]]) -> str:
    example = load_template("revise_requirements_example")
    blocks = "".join(
        example.format(experienced_item=u, experienced_requirement_set=_fmt_reqs(r)) + "\n"
        for u, r in exemplars
    )
    return load_template("revise_requirements").format(
        examples=blocks,
        item_name=item,
        original_prediction=_fmt_reqs(failed_transition.get("original_prediction", {})),
        inventory=_fmt_reqs(failed_transition.get("inventory", {})),
        failed_subgoal=json.dumps(failed_transition.get("failed_subgoal", "")),
    )


_JSON_OBJ = re.compile(r"\{.*\}", re.S)


def extract_json(text: str):
    """Parse the first JSON value in a model reply, tolerating prose around it."""
    text = text.strip()
    fenced = re.search(r"```(?:json)?\s*(.*?)```", text, re.S)
    if fenced:
        text = fenced.group(1).strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        pass
    m = _JSON_OBJ.search(text)
    if m:
        try:
            return json.loads(m.group(0))
        except json.JSONDecodeError:
            pass
    raise ValueError(f"no JSON in reply: {text[:80]!r}")


class HttpProvider:
    """Knowledge provider backed by a chat-completion endpoint."""

    def __init__(self, config: EndpointConfig | None = None, client: httpx.Client | None = None):
        self.config = config or EndpointConfig.from_env()
        self._client = client or httpx.Client(timeout=self.config.timeout)

    def complete(self, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        body = {
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }
        try:
            resp = self._client.post(self.config.url, json=body, headers=headers)
            resp.raise_for_status()
            return resp.json()["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise ProviderError(f"request to {self.config.url} failed: {exc}") from exc

    def _ask(self, prompt: str, parse):
        last = None
        for attempt in range(max(1, self.config.retries)):
            reply = self.complete(prompt)
            try:
                return parse(extract_json(reply))
            except ValueError as exc:
                last = exc
                log.warning("unparseable reply (attempt %d): %s", attempt + 1, exc)
        raise ProviderError(f"no valid answer after {self.config.retries} attempts: {last}")

    def predict_requirements(self, item, exemplars=()):
        prompt = render_predict_prompt(item, exemplars)
        # schema violations are not retried: the model answered, just wrongly
        return validate_requirements(item, self._ask(prompt, _as_mapping))

    def revise_requirements(self, item, failed_transition=None, exemplars=()):
        prompt = render_revision_prompt(item, failed_transition or {}, exemplars)
        return validate_requirements(item, self._ask(prompt, _as_mapping))

    def select_operation(self, item, exemplar_pairs=(), candidate_ops=("mine", "craft", "smelt")):
        cands = [str(op) for op in candidate_ops]
        prompt = render_operation_prompt(item, exemplar_pairs, cands)

        def parse(value):
            if isinstance(value, Mapping):
                value = " ".join(str(v) for v in value.values())
            words = str(value).lower().split()
            for w in words:
                if w in cands:
                    return w
            raise ValueError(f"no candidate operation in {value!r}")

        return self._ask(prompt, parse)


def _as_mapping(value):
    if not isinstance(value, Mapping):
        raise ValueError(f"expected a JSON object, got {type(value).__name__}")
    return value
