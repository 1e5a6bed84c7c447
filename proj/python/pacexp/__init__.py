"""PAC explanations for black-box classifiers."""

import json
import os

from . import _core
from ._core import (
    RNG_ALGORITHM,
    Formula,
    Model,
    ModelError,
    ParseError,
    ReplayError,
    load_model,
    model_from_json,
    parse_formula,
    test_suite_size,
    version,
)

__version__ = _core.version()

__all__ = [
    "RNG_ALGORITHM",
    "Formula",
    "Model",
    "ModelError",
    "ParseError",
    "ReplayError",
    "explain",
    "load_model",
    "model_from_json",
    "parse_formula",
    "replay",
    "synthesize",
    "test_suite_size",
    "version",
]


def explain(config, base_dir=None):
    """Run the loop on a config dict (same schema as a report's "config");
    returns the run report as a dict. Relative paths resolve against base_dir."""
    base = os.fspath(base_dir) if base_dir is not None else ""
    return json.loads(_core.explain_json(json.dumps(config), base))


def replay(report, seed=None):
    """Re-run the config recorded in a report dict."""
    return json.loads(_core.replay_json(json.dumps(report), seed))


def synthesize(points, labels, grammar, arity):
    """Occam-first formula text consistent with the labeled points, or None."""
    g = grammar if isinstance(grammar, str) else json.dumps(grammar)
    return _core.synthesize([list(map(float, p)) for p in points], [bool(v) for v in labels], g, arity)
