"""Stochastic gradient descent and Landweber iteration for linear inverse problems."""

import json as _json

from . import _core
from ._core import (
    Checkpoint,
    InverseInstance,
    MomentOracle,
    SgdsatError,
    admissible_c0,
    assumption3_violation_witness,
    decomposition_terms,
    landweber_default_eta,
    landweber_run,
    make_instance,
    make_problem,
    precondition_instance,
    resolve_c0,
    sgd_run,
)

__all__ = [
    "Checkpoint",
    "InverseInstance",
    "MomentOracle",
    "SgdsatError",
    "admissible_c0",
    "assumption3_violation_witness",
    "decomposition_terms",
    "landweber_default_eta",
    "landweber_run",
    "make_instance",
    "make_problem",
    "precondition_instance",
    "resolve_c0",
    "run_audits",
    "run_comparison",
    "sgd_run",
]


def run_audits(suite="all", **options):
    """Run a bound-audit suite and return the report as a dict."""
    return _json.loads(_core.run_audits_json(suite, _json.dumps(options)))


def run_comparison(config, override_admissibility=False):
    """Run every cell of an experiment config (a dict) and return the summaries."""
    return _json.loads(_core.run_comparison_json(_json.dumps(config), override_admissibility))
