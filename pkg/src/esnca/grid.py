"""Grid geometry, binary state series, and local-rule covariates.

Cells of an ``n_rows x n_cols`` grid are indexed row-major, 0-based.
Time-indexed fields are stored column-per-time, i.e. an (n, T) array holds
Y_t in column t.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VALID_NEIGHBORHOODS = ("queen",)


@dataclass(frozen=True)
class GridSpec:
    """A regular spatial grid with row-major, 0-based cell indexing."""

    n_rows: int
    n_cols: int

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError(f"grid dimensions must be positive, got {self.n_rows}x{self.n_cols}")

    @property
    def n(self) -> int:
        return self.n_rows * self.n_cols

    def index(self, row: int, col: int) -> int:
        if not (0 <= row < self.n_rows and 0 <= col < self.n_cols):
            raise ValueError(f"cell ({row}, {col}) outside {self.n_rows}x{self.n_cols} grid")
        return row * self.n_cols + col

    def rowcol(self, idx: int) -> tuple[int, int]:
        if not (0 <= idx < self.n):
            raise ValueError(f"cell index {idx} outside grid with {self.n} cells")
        return divmod(idx, self.n_cols)


@dataclass
class BinarySeries:
    """Observed 0/1 states over time: values[:, t] is the full field at time t."""

    grid: GridSpec
    values: np.ndarray  # (n, T), entries in {0, 1}

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.values.ndim != 2:
            raise ValueError(f"values must be 2-d (n, T), got shape {self.values.shape}")
        if self.values.shape[0] != self.grid.n:
            raise ValueError(
                f"values has {self.values.shape[0]} rows but grid has {self.grid.n} cells"
            )
        if self.values.shape[1] < 1:
            raise ValueError("series must contain at least one time point")
        bad = ~np.isin(self.values, (0, 1))
        if bad.any():
            i, t = np.argwhere(bad)[0]
            raise ValueError(f"non-binary value {self.values[i, t]!r} at cell {i}, time {t}")
        self.values = self.values.astype(np.int8)

    @property
    def T(self) -> int:
        return self.values.shape[1]

    def field(self, t: int) -> np.ndarray:
        return self.values[:, t]

    def window(self, n_steps: int) -> "BinarySeries":
        """First n_steps time points as a new series."""
        if not (1 <= n_steps <= self.T):
            raise ValueError(f"window of {n_steps} steps outside series of length {self.T}")
        return BinarySeries(self.grid, self.values[:, :n_steps].copy())


@dataclass
class CovariateTensor:
    """Per-cell covariates over time: values[:, x, t] is covariate x at time t."""

    grid: GridSpec
    values: np.ndarray  # (n, n_x, T)
    names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 3:
            raise ValueError(f"values must be 3-d (n, n_x, T), got shape {self.values.shape}")
        if self.values.shape[0] != self.grid.n:
            raise ValueError(
                f"values has {self.values.shape[0]} rows but grid has {self.grid.n} cells"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("covariates contain non-finite entries")
        if not self.names:
            self.names = [f"x{j}" for j in range(self.n_x)]
        if len(self.names) != self.n_x:
            raise ValueError(f"{len(self.names)} names for {self.n_x} covariates")

    @property
    def n_x(self) -> int:
        return self.values.shape[1]

    @property
    def T(self) -> int:
        return self.values.shape[2]

    def columns(self, names: list[str]) -> np.ndarray:
        """Sub-tensor (n, len(names), T) of the named covariates, in the given order."""
        missing = [nm for nm in names if nm not in self.names]
        if missing:
            raise KeyError(f"unknown covariate(s) {missing}; have {self.names}")
        idx = [self.names.index(nm) for nm in names]
        return self.values[:, idx, :]

    def at_time(self, t: int) -> np.ndarray:
        return self.values[:, :, t]


def queen_neighbor_counts(
    field_values: np.ndarray, grid: GridSpec, neighborhood: str = "queen"
) -> np.ndarray:
    """Count state-1 cells among each cell's queen neighbors.

    Boundary cells see only in-grid neighbors (no wraparound), so counts are
    at most 8 in the interior, 5 on edges, and 3 in corners.
    """
    if neighborhood not in VALID_NEIGHBORHOODS:
        raise ValueError(f"unsupported neighborhood {neighborhood!r}; valid: {VALID_NEIGHBORHOODS}")
    field_values = np.asarray(field_values)
    if field_values.shape != (grid.n,):
        raise ValueError(f"field has shape {field_values.shape}, expected ({grid.n},)")
    f = field_values.reshape(grid.n_rows, grid.n_cols).astype(np.int64)
    padded = np.zeros((grid.n_rows + 2, grid.n_cols + 2), dtype=np.int64)
    padded[1:-1, 1:-1] = f
    counts = np.zeros_like(f)
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            if dr == 0 and dc == 0:
                continue
            counts += padded[1 + dr : 1 + dr + grid.n_rows, 1 + dc : 1 + dc + grid.n_cols]
    return counts.reshape(grid.n)


def build_covariates(
    series: BinarySeries,
    region_masks: list[np.ndarray] | None = None,
    mask_names: list[str] | None = None,
    neighborhood: str = "queen",
) -> CovariateTensor:
    """Neighbor-count plus static region-indicator covariates for a series.

    The neighbor-count covariate at time t is computed from the field at
    t - 1 so it conditions on the past; the first time point, having no
    predecessor, uses its own (initial) field.  Region masks are broadcast
    unchanged over time.
    """
    if series.T < 1:
        raise ValueError("empty series")
    region_masks = region_masks or []
    grid, T = series.grid, series.T
    n_x = 1 + len(region_masks)
    values = np.empty((grid.n, n_x, T), dtype=np.float64)
    for t in range(T):
        src = series.field(t - 1) if t >= 1 else series.field(0)
        values[:, 0, t] = queen_neighbor_counts(src, grid, neighborhood)
    for j, mask in enumerate(region_masks):
        mask = np.asarray(mask, dtype=np.float64)
        if mask.shape != (grid.n,):
            raise ValueError(f"mask {j} has shape {mask.shape}, expected ({grid.n},)")
        values[:, 1 + j, :] = mask[:, None]
    names = ["neighbor_count"]
    if mask_names is None:
        names += [f"mask{j}" for j in range(len(region_masks))]
    else:
        if len(mask_names) != len(region_masks):
            raise ValueError(f"{len(mask_names)} names for {len(region_masks)} masks")
        names += list(mask_names)
    return CovariateTensor(grid, values, names)


def forecast_covariates(
    last_field: np.ndarray,
    grid: GridSpec,
    region_masks: list[np.ndarray] | None = None,
    mask_names: list[str] | None = None,
    neighborhood: str = "queen",
) -> CovariateTensor:
    """One-step-ahead covariate block: neighbor counts of the last observed field."""
    region_masks = region_masks or []
    values = np.empty((grid.n, 1 + len(region_masks), 1), dtype=np.float64)
    values[:, 0, 0] = queen_neighbor_counts(last_field, grid, neighborhood)
    for j, mask in enumerate(region_masks):
        values[:, 1 + j, 0] = np.asarray(mask, dtype=np.float64)
    names = ["neighbor_count"]
    if mask_names is None:
        names += [f"mask{j}" for j in range(len(region_masks))]
    else:
        names += list(mask_names)
    return CovariateTensor(grid, values, names)


def left_half_mask(grid: GridSpec) -> np.ndarray:
    """Indicator of the left half of the grid (columns 0 .. n_cols//2 - 1)."""
    cols = np.arange(grid.n) % grid.n_cols
    return (cols < grid.n_cols // 2).astype(np.float64)


def quadrant_ids(grid: GridSpec) -> np.ndarray:
    """Quadrant label per cell: 1..4 for I (top-right), II (top-left),
    III (bottom-left), IV (bottom-right), split at the row/column midpoints."""
    rows, cols = np.divmod(np.arange(grid.n), grid.n_cols)
    top = rows < grid.n_rows // 2
    left = cols < grid.n_cols // 2
    ids = np.empty(grid.n, dtype=np.int64)
    ids[top & ~left] = 1
    ids[top & left] = 2
    ids[~top & left] = 3
    ids[~top & ~left] = 4
    return ids


QUADRANT_NAMES = {1: "I", 2: "II", 3: "III", 4: "IV"}
QUADRANT_IDS = {v: k for k, v in QUADRANT_NAMES.items()}
