"""Python bindings for the matcha recommender core."""

import json as _json

from ._matcha import (  # noqa: F401
    Catalog,
    ConfigError,
    Engine,
    MatchaError,
    NotFound,
    PreconditionError,
    metrics,
    parse_judge_score,
    pop_baseline,
)
from . import _matcha


def recommend(engine, query, k=5, seed=0):
    """Run one request through the pipeline and return a dict."""
    return _json.loads(engine.recommend_json(query, k, seed))


def screen(engine, query, seed=0):
    """Input screening verdict for one prompt."""
    return _json.loads(engine.screen_json(query, seed))


def evaluate(corpus, config, k_values=(5, 10), seed=0, system="matcha"):
    """Offline evaluation; one report dict per cutoff."""
    return _json.loads(_matcha.evaluate_json(str(corpus), str(config), list(k_values), seed, system))


__all__ = [
    "Catalog",
    "ConfigError",
    "Engine",
    "MatchaError",
    "NotFound",
    "PreconditionError",
    "evaluate",
    "metrics",
    "parse_judge_score",
    "pop_baseline",
    "recommend",
    "screen",
]
