"""First-passage-time densities of Gaussian processes."""

import json

from ._fptlab import (
    Boundary,
    FptlabError,
    FptSamples,
    __version__,
    closed_form_soglia,
    compare_densities,
    estimate_density,
    markov_violation,
    preset_names,
    simulate_first_passage,
    solve_volterra,
    wiener_linear_fpt,
)
from . import _fptlab


def preset(name):
    """Built-in experiment config as a dict."""
    return json.loads(_fptlab.preset(name))


def validate(config):
    """List of constraint violations; empty when the config can run."""
    return _fptlab.validate(json.dumps(config))


def run(config, output):
    """Run an experiment config (dict) and return the written file paths."""
    return _fptlab.run(json.dumps(config), str(output))
