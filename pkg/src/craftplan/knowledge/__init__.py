"""Sources of (possibly wrong) crafting knowledge: a noisy oracle and an HTTP LLM client."""
from .base import KnowledgeProvider, ProviderError, validate_requirements
from .oracle import NoiseProfile, OracleProvider, calibration_items, measure_error_rates
from .similarity import LexicalSimilarity, SimilarityProvider, lexical_similarity

__all__ = [
    "KnowledgeProvider", "LexicalSimilarity", "NoiseProfile", "OracleProvider",
    "ProviderError", "SimilarityProvider", "calibration_items", "lexical_similarity",
    "measure_error_rates", "validate_requirements",
]
