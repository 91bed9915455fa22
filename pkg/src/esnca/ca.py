"""Stochastic cellular-automata simulation of binary grid dynamics.

Transition probabilities grow linearly with the number of state-1 queen
neighbors, optionally boosted per region.  State 1 can be absorbing
("frozen") as in diffusive presence/absence processes, or transient.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import BinarySeries, GridSpec, queen_neighbor_counts


@dataclass
class CaRules:
    """Local transition rules for a stochastic binary CA.

    per_neighbor_prob is the probability increment contributed by each
    state-1 neighbor; it must not exceed 1/8 so a saturated neighborhood
    with no boost stays a valid probability.  region_multipliers maps
    region ids (see region_ids) to a multiplicative boost b, giving
    p = per_neighbor_prob * count * (1 + b), clamped to [0, 1].
    """

    per_neighbor_prob: float
    region_multipliers: dict[int, float] = field(default_factory=dict)
    frozen: bool = True
    initial_field: np.ndarray | None = None
    region_ids: np.ndarray | None = None

    def __post_init__(self):
        if not (0.0 <= self.per_neighbor_prob <= 1.0 / 8.0):
            raise ValueError(
                f"per_neighbor_prob must be in [0, 1/8], got {self.per_neighbor_prob}"
            )
        for rid, boost in self.region_multipliers.items():
            if boost < 0:
                raise ValueError(f"region {rid} has negative boost {boost}")
        if self.initial_field is not None:
            self.initial_field = np.asarray(self.initial_field)
        if self.region_ids is not None:
            self.region_ids = np.asarray(self.region_ids, dtype=np.int64)

    def boost_vector(self, n: int) -> np.ndarray:
        """Per-cell multiplicative boost implied by the region map."""
        if self.region_ids is None:
            return np.zeros(n)
        if self.region_ids.shape != (n,):
            raise ValueError(f"region_ids has shape {self.region_ids.shape}, expected ({n},)")
        boosts = np.zeros(n)
        for rid, b in self.region_multipliers.items():
            boosts[self.region_ids == rid] = b
        return boosts


def transition_prob(neighbor_count, region_boost, rules: CaRules):
    """Probability of occupying state 1 next step given the neighbor count.

    Accepts scalars or arrays; the result is clamped to [0, 1].
    """
    counts = np.asarray(neighbor_count, dtype=np.float64)
    if np.any(counts < 0) or np.any(counts > 8):
        raise ValueError("neighbor counts must lie in [0, 8]")
    p = rules.per_neighbor_prob * counts * (1.0 + np.asarray(region_boost, dtype=np.float64))
    return np.clip(p, 0.0, 1.0)


def simulate(grid: GridSpec, rules: CaRules, T: int, seed: int) -> BinarySeries:
    """Run the stochastic CA for T time points (the first is the initial field).

    Per step, one uniform draw is consumed per cell in row-major order from
    a counter-based Philox stream, so runs are reproducible across
    platforms.  With frozen rules state-1 cells are absorbing; otherwise
    they persist with the same neighbor-driven probability.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if rules.initial_field is None:
        raise ValueError("rules.initial_field is required for simulation")
    init = np.asarray(rules.initial_field)
    if init.shape != (grid.n,):
        raise ValueError(f"initial field has shape {init.shape}, expected ({grid.n},)")

    rng = np.random.Generator(np.random.Philox(seed))
    boosts = rules.boost_vector(grid.n)
    values = np.empty((grid.n, T), dtype=np.int8)
    values[:, 0] = init
    for t in range(1, T):
        prev = values[:, t - 1]
        counts = queen_neighbor_counts(prev, grid)
        p = transition_prob(counts, boosts, rules)
        u = rng.random(grid.n)
        flip_on = (prev == 0) & (u < p)
        if rules.frozen:
            stay_on = prev == 1
        else:
            stay_on = (prev == 1) & (u < p)
        values[:, t] = (flip_on | stay_on).astype(np.int8)
    return BinarySeries(grid, values)


def center_seed_field(grid: GridSpec, n_cells: int = 4) -> np.ndarray:
    """Initial field with a small block of state-1 cells at the grid center.

    n_cells = 4 gives the 2x2 center block; 1 gives a single center cell.
    """
    if n_cells not in (1, 4):
        raise ValueError("center seed supports 1 or 4 cells")
    field_values = np.zeros(grid.n, dtype=np.int8)
    r0, c0 = (grid.n_rows - 1) // 2, (grid.n_cols - 1) // 2
    if n_cells == 1:
        field_values[grid.index(r0, c0)] = 1
    else:
        for dr in (0, 1):
            for dc in (0, 1):
                field_values[grid.index(min(r0 + dr, grid.n_rows - 1), min(c0 + dc, grid.n_cols - 1))] = 1
    return field_values
