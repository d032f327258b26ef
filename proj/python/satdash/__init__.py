# SPDX-License-Identifier: Apache-2.0
"""Python bindings for the satdash simulator."""

import json as _json

from ._satdash import (
    Scenario,
    fdash_decide,
    jain_index,
    run_simulation,
    select_representation,
    summary_json,
)


def run_matrix(scenario, cells=None, workers=1):
    """Run every (transport, cc) cell and return the parsed summary."""
    return _json.loads(summary_json(scenario, cells, workers))


__all__ = [
    "Scenario",
    "fdash_decide",
    "jain_index",
    "run_matrix",
    "run_simulation",
    "select_representation",
]
