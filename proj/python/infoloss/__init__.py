"""Python front end to the infoloss C++ core.

Models are plain dicts such as ``{"kind": "scale", "alpha": 1.5, "sigma": 1.0}``.
Labels exposed to Python are 1-based.
"""

import json

from . import _core
from ._core import (
    CURVE_CSV_HEADER,
    DEFAULT_SEED,
    ConfigError,
    Partition,
    ValidationError,
    asymmetric_dyadic,
    bayes_error,
    conditional_entropy,
    constant_partition,
    entropy,
    extremal_pmf,
    f1,
    f_min_mi,
    gessaman,
    i_loss_bruteforce,
    i_loss_lower_bound,
    mutual_information,
    plugin_mi,
    prior_error,
    product_partition,
    quadrant_partition,
    theorem2_check,
    tsp,
    tsp_leaf_count,
    uniform_grid,
)


def sample(model, n, seed=DEFAULT_SEED):
    """Draw ``n`` labelled points; returns ``(points, labels)``."""
    return _core._sample(json.dumps(model), n, seed)


def bayes_risk_mc(model, n=100_000, seed=DEFAULT_SEED):
    """Monte Carlo Bayes risk as ``(value, standard_error)``."""
    return _core._bayes_risk_mc(json.dumps(model), n, seed)


def mi_mc(model, n=100_000, seed=DEFAULT_SEED):
    """Monte Carlo I(X;Y) in nats as ``(value, standard_error)``."""
    return _core._mi_mc(json.dumps(model), n, seed)


def describe(partition, max_cells=4096):
    return json.loads(partition._describe(max_cells))


def loss_curves(config):
    """Run every scheme of a run configuration; one list of point dicts per scheme."""
    return json.loads(_core._run_curves(json.dumps(config)))


def curve_csv(points):
    return _core._curve_csv(json.dumps(points))


def verify(suite, seed=DEFAULT_SEED, trials=200):
    return json.loads(_core._verify(suite, seed, trials))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
