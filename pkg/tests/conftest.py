"""Shared fixtures, dataset builders, and the acceptance report hook."""

from __future__ import annotations

import numpy as np
import pytest

from somson.som import Item

# one line per acceptance criterion, printed after the run so the result
# survives pytest's output capture
ACCEPTANCE_RESULTS: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)

# Two well-separated Gaussian clusters in 4-D: 8 + 7 items whose center
# distance is five times the per-dimension spread.
CLUSTER_DATASET_SEED = 20240917
CLUSTER_SPREAD = 0.5
CLUSTER_SEPARATION = 5.0 * CLUSTER_SPREAD


def two_cluster_items(
    seed: int = CLUSTER_DATASET_SEED,
    n_first: int = 8,
    n_second: int = 7,
    spread: float = CLUSTER_SPREAD,
) -> tuple[list[Item], list[str], list[str]]:
    """Build the cluster dataset; returns (items, first_ids, second_ids)."""
    rng = np.random.default_rng(seed)
    center_a = rng.uniform(2.0, 8.0, size=4)
    direction = rng.normal(size=4)
    direction /= np.linalg.norm(direction)
    center_b = center_a + 5.0 * spread * direction

    items: list[Item] = []
    first_ids: list[str] = []
    second_ids: list[str] = []
    for k in range(n_first):
        vec = center_a + rng.normal(scale=spread, size=4)
        item = Item(id=f"a{k}", label="red", features=vec)
        items.append(item)
        first_ids.append(item.id)
    for k in range(n_second):
        vec = center_b + rng.normal(scale=spread, size=4)
        item = Item(id=f"b{k}", label="green", features=vec)
        items.append(item)
        second_ids.append(item.id)
    return items, first_ids, second_ids


@pytest.fixture()
def cluster_items() -> tuple[list[Item], list[str], list[str]]:
    return two_cluster_items()
