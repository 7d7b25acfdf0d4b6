"""Clique-based projected gradient descent (CPGD / ACPGD) for clique-wise coupled constraints."""

import json as _json

from ._core import (
    ConvexSet,
    Error,
    InputError,
    NumericError,
    OracleError,
    Problem,
    ResourceError,
    UnsupportedError,
    maximal_cliques,
    project_weighted,
    simulate,
    solve,
    solve_equality_qp,
)
from ._core import run_experiment as _run_experiment


def problem_from_dict(spec):
    """Build a Problem from the same structure the CLI reads from JSON."""
    return Problem.from_json(_json.dumps(spec))


def run_experiment(config, out_dir=None):
    """Run an experiment grid given as a dict; write CSVs when out_dir is set."""
    return _run_experiment(_json.dumps(config), out_dir)


__all__ = [
    "ConvexSet",
    "Error",
    "InputError",
    "NumericError",
    "OracleError",
    "Problem",
    "ResourceError",
    "UnsupportedError",
    "maximal_cliques",
    "problem_from_dict",
    "project_weighted",
    "run_experiment",
    "simulate",
    "solve",
    "solve_equality_qp",
]
