"""Python access to the placebeb solver core.

Instances, solutions and reports travel as JSON; the helpers here accept
either JSON text or already-decoded dicts and return dicts.
"""

import json

from . import _core
from ._core import PlacebebError, erlang_c, expected_wait, segment_blocks

__all__ = [
    "PlacebebError",
    "erlang_c",
    "expected_wait",
    "segment_blocks",
    "random_instance",
    "solve",
    "evaluate",
    "check_feasibility",
    "cluster",
    "run_cli",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def random_instance(seed, **kwargs):
    return json.loads(_core.random_instance(seed, **kwargs))


def solve(instance, method="bnb", config=None):
    return json.loads(_core.solve(_text(instance), method, _text(config or {})))


def evaluate(instance, solution):
    return _core.evaluate(_text(instance), _text(solution))


def check_feasibility(instance, solution):
    return _core.check_feasibility(_text(instance), _text(solution))


def cluster(instance, k_demand, k_station, seed=0):
    return json.loads(_core.cluster(_text(instance), k_demand, k_station, seed))


def run_cli(*args):
    """Runs the command-line front end in-process; returns (code, stdout, stderr)."""
    return _core.run_cli([str(a) for a in args])
