"""Barycentric grid sweeps over the 2-simplex: divergence heatmaps and density rasters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RelaxedCategorical, log_density_batch
from .divergence import (
    CA,
    ESTIMATOR_TAGS,
    MC,
    RECAB,
    RECAB_LOWER,
    _kld_mc_equal_temperature,
    kld_categorical_approx,
    kld_monte_carlo,
    recab,
    recab_lower_bound,
)

DENSITY = "density"


@dataclass(frozen=True)
class HeatmapGrid:
    """Values over the interior barycentric grid, one array per requested quantity."""

    resolution: int
    coords: np.ndarray
    values: dict[str, np.ndarray]
    std_errors: dict[str, np.ndarray]

    def __post_init__(self):
        m = self.coords.shape[0]
        for tag, arr in list(self.values.items()) + list(self.std_errors.items()):
            if arr.shape != (m,):
                raise ValueError(f"{tag} array shape {arr.shape} does not match {m} cells")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"{tag} values must all be finite")


def simplex_grid(resolution: int) -> np.ndarray:
    """Interior lattice points (i, j, k) / R with i + j + k = R and i, j, k >= 1.

    Lexicographic order over (i, j); the count is (R - 1)(R - 2) / 2.
    """
    if resolution < 3:
        raise ValueError(f"resolution must be >= 3 for interior points, got {resolution}")
    points = [
        (i, j, resolution - i - j)
        for i in range(1, resolution - 1)
        for j in range(1, resolution - i)
    ]
    return np.array(points, dtype=float) / resolution


def _cell_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng((seed, index))


def heatmap_sweep(
    target: RelaxedCategorical,
    proposal_temperature: float,
    resolution: int,
    estimators,
    mc_samples: int = 32,
    seed: int = 0,
) -> HeatmapGrid:
    """Evaluate estimators of D(target || proposal) over the barycentric grid.

    Each cell's proposal takes the cell coordinates as probabilities at the
    given temperature. Monte-Carlo cells draw from streams derived from
    (seed, cell index), so any cell subset reproduces independently.
    """
    if target.n != 3:
        raise ValueError(f"heatmaps need 3 categories for a 2-simplex raster, got {target.n}")
    tags = list(dict.fromkeys(estimators))
    unknown = [tag for tag in tags if tag not in ESTIMATOR_TAGS]
    if unknown or not tags:
        raise ValueError(f"estimators must be a nonempty subset of {sorted(ESTIMATOR_TAGS)}, got {list(estimators)!r}")

    coords = simplex_grid(resolution)
    proposals = [
        RelaxedCategorical(np.log(cell), proposal_temperature) for cell in coords
    ]
    values: dict[str, np.ndarray] = {}
    std_errors: dict[str, np.ndarray] = {}
    equal_temps = target.temperature == float(proposal_temperature)

    for tag in tags:
        out = np.empty(len(proposals))
        if tag == MC:
            errs = np.empty(len(proposals))
            for index, proposal in enumerate(proposals):
                rng = _cell_rng(seed, index)
                if equal_temps:
                    est = _kld_mc_equal_temperature(target, proposal, mc_samples, rng)
                else:
                    est = kld_monte_carlo(target, proposal, mc_samples, rng)
                out[index] = est.value
                errs[index] = est.std_error
            std_errors[MC] = errs
        elif tag == CA:
            for index, proposal in enumerate(proposals):
                out[index] = kld_categorical_approx(target, proposal).value
        elif tag == RECAB:
            for index, proposal in enumerate(proposals):
                out[index] = recab(target, proposal).value
        else:
            for index, proposal in enumerate(proposals):
                out[index] = recab_lower_bound(target, proposal).value
        values[tag] = out

    return HeatmapGrid(resolution=resolution, coords=coords, values=values, std_errors=std_errors)


def density_grid(params: RelaxedCategorical, resolution: int) -> HeatmapGrid:
    """Density of the distribution at every interior grid cell, for rasterizing."""
    if params.n != 3:
        raise ValueError(f"density grids need 3 categories, got {params.n}")
    coords = simplex_grid(resolution)
    dens = np.exp(log_density_batch(params, coords))
    return HeatmapGrid(
        resolution=resolution,
        coords=coords,
        values={DENSITY: dens},
        std_errors={},
    )
