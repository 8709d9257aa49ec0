from __future__ import annotations

from typing import Mapping, Protocol, Sequence


class ProviderError(RuntimeError):
    """A knowledge provider could not produce a valid answer."""


class KnowledgeProvider(Protocol):
    def predict_requirements(
        self, item: str, exemplars: Sequence[tuple[str, Mapping[str, int]]]
    ) -> dict[str, int]: ...

    def select_operation(
        self, item: str, exemplar_pairs: Sequence[tuple[str, str]], candidate_ops: Sequence[str]
    ) -> str: ...

    def revise_requirements(
        self, item: str, failed_transition: Mapping, exemplars: Sequence[tuple[str, Mapping[str, int]]]
    ) -> dict[str, int]: ...


def validate_requirements(item: str, reqs: object) -> dict[str, int]:
    """Coerce a provider answer into a requirement set or raise ``ProviderError``."""
    if not isinstance(reqs, Mapping):
        raise ProviderError(f"requirements for {item!r} must be an object, got {type(reqs).__name__}")
    out = {}
    for name, qty in reqs.items():
        if not isinstance(name, str) or not name.strip():
            raise ProviderError(f"bad item name {name!r} in requirements for {item!r}")
        if isinstance(qty, bool) or not isinstance(qty, (int, float)) or qty != int(qty):
            raise ProviderError(f"quantity {qty!r} for {name!r} is not an integer")
        if qty < 1:
            raise ProviderError(f"quantity {qty!r} for {name!r} must be positive")
        key = name.strip().lower().replace(" ", "_")
        if key == item:
            continue
        out[key] = int(qty)
    return out
