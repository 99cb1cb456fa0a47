"""Bundled golden fixtures.

``plato_*`` files reproduce the published endpoint hierarchy and p-values
of the PLATO trial (ticagrelor vs clopidogrel in acute coronary syndrome,
NEJM 2009): a 10-level plan whose first level is a co-primary pair, results
in which the stroke endpoint (order 6, p = 0.22) breaks the sequence, and
the claims the publication nevertheless presented.  ``null10.json`` is a
10-endpoint global-null simulation config and ``chain10_plan.json`` a
matching single-analysis-per-level hierarchy.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

FIXTURE_NAMES = (
    "plato_plan.json",
    "plato_results.csv",
    "plato_claims.txt",
    "null10.json",
    "chain10_plan.json",
)


def fixture_path(name: str) -> Path:
    """Filesystem path of a bundled fixture (for handing to the CLI)."""
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {FIXTURE_NAMES}")
    return Path(str(resources.files(__package__).joinpath(name)))


def read_fixture(name: str) -> str:
    if name not in FIXTURE_NAMES:
        raise KeyError(f"unknown fixture {name!r}; available: {FIXTURE_NAMES}")
    return resources.files(__package__).joinpath(name).read_text(encoding="utf-8")
