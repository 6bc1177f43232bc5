"""Synthetic scenes and forward degradation models.

The forward models run each correction's formula generatively, so a fit on
their output must recover the generating coefficients and an apply must
recover the clean scene.  They exist to make the correction code testable
without real imagery; the test suites lean on them heavily.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .deblooming import bloom_feature_map
from .errors import NightlightsError
from .raster import DEFAULT_NODATA, DNGrid, PixelCoord

_SCENE_KEYS = {"nrows", "ncols", "sources", "background", "seed", "noise_sigma"}


@dataclass(frozen=True)
class SceneSpec:
    """Recipe for a deterministic synthetic scene.

    sources: (coord, intensity) point emitters, intensity above background.
    noise_sigma: optional Gaussian jitter on source cells, seeded.
    """

    nrows: int
    ncols: int
    sources: tuple[tuple[PixelCoord, float], ...] = ()
    background: float = 0.0
    seed: int = 0
    noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        if self.nrows < 1 or self.ncols < 1:
            raise NightlightsError(f"scene dimensions must be positive, got {self.nrows}x{self.ncols}")
        if self.noise_sigma < 0.0:
            raise NightlightsError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        normalized = []
        for coord, intensity in self.sources:
            if not (0 <= coord.row < self.nrows and 0 <= coord.col < self.ncols):
                raise NightlightsError(
                    f"source at ({coord.row},{coord.col}) outside {self.nrows}x{self.ncols} scene"
                )
            if not intensity > self.background:
                raise NightlightsError(
                    f"source intensity {intensity} must exceed background {self.background}"
                )
            normalized.append((coord, float(intensity)))
        object.__setattr__(self, "sources", tuple(normalized))

    @classmethod
    def from_json(cls, text: str) -> "SceneSpec":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise NightlightsError(f"scene spec is not valid JSON: {exc}") from None
        return cls.from_doc(doc)

    @classmethod
    def from_doc(cls, doc) -> "SceneSpec":
        if not isinstance(doc, dict):
            raise NightlightsError("scene spec must be a JSON object")
        unknown = set(doc) - _SCENE_KEYS
        if unknown:
            raise NightlightsError(f"scene spec has unknown keys: {sorted(unknown)}")
        try:
            sources = []
            for entry in doc.get("sources", []):
                if isinstance(entry, dict):
                    coord = PixelCoord(int(entry["row"]), int(entry["col"]))
                    intensity = float(entry["intensity"])
                else:
                    row, col, intensity = entry
                    coord = PixelCoord(int(row), int(col))
                sources.append((coord, float(intensity)))
            return cls(
                nrows=int(doc["nrows"]),
                ncols=int(doc["ncols"]),
                sources=tuple(sources),
                background=float(doc.get("background", 0.0)),
                seed=int(doc.get("seed", 0)),
                noise_sigma=float(doc.get("noise_sigma", 0.0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise NightlightsError(f"scene spec malformed: {exc}") from None


def gen_scene(spec: SceneSpec, nodata: float = DEFAULT_NODATA) -> DNGrid:
    """Materialise a scene: uniform background plus point sources.

    Same spec, same grid, bit for bit; noise_sigma only perturbs source
    cells (keeping the background exactly flat) using the spec seed.
    """
    values = np.full((spec.nrows, spec.ncols), spec.background, dtype=np.float64)
    for coord, intensity in spec.sources:
        values[coord.row, coord.col] = intensity
    if spec.noise_sigma > 0.0 and spec.sources:
        rng = np.random.default_rng(spec.seed)
        for coord, _ in spec.sources:
            values[coord.row, coord.col] += spec.noise_sigma * rng.standard_normal()
    return DNGrid(values=values, nodata=nodata)


def add_noise(grid: DNGrid, sigma: float, seed: int, lit_only: bool = True) -> DNGrid:
    """Seeded Gaussian jitter on valid cells (by default only lit ones).

    Leaving the background untouched keeps pseudo-pixel detection meaningful
    on noisy scenes.
    """
    if sigma < 0.0:
        raise NightlightsError(f"noise sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    target = grid.valid & (grid.values > 0.0) if lit_only else grid.valid
    out = grid.values.copy()
    out[target] += sigma * rng.standard_normal(int(np.count_nonzero(target)))
    return grid.replace_values(out)


def forward_intercal(grid: DNGrid, a: float, b: float) -> DNGrid:
    """Run the power model forward: v -> a * (v + 1) ** b - 1.

    No clamp: with a < 1 the output dips below zero at DN 0, and the fit on
    such pairs must still recover (a, b) exactly.
    """
    if not a > 0.0:
        raise NightlightsError(f"forward_intercal requires a > 0, got {a}")
    valid = grid.valid
    if np.any(grid.values[valid] < 0.0):
        raise NightlightsError("forward_intercal: grid has negative DN cells")
    out = grid.values.copy()
    out[valid] = a * np.power(grid.values[valid] + 1.0, b) - 1.0
    return grid.replace_values(out)


def forward_saturate(radiance: DNGrid, a: float, b: float, cap: float = 63.0) -> DNGrid:
    """Produce a capped DN image from radiance: min(cap, a * ln(r) + b), floored at 0.

    Radiance 0 maps to DN 0 (the log runs to -inf and the floor takes over);
    negative radiance is an error; nodata passes through.
    """
    valid = radiance.valid
    r = radiance.values
    if np.any(r[valid] < 0.0):
        raise NightlightsError("forward_saturate: negative radiance cells")
    out = r.copy()
    lit = valid & (r > 0.0)
    out[lit] = np.minimum(np.maximum(a * np.log(r[lit]) + b, 0.0), cap)
    out[valid & (r == 0.0)] = 0.0
    return radiance.replace_values(out)


def forward_bloom(truth: DNGrid, a: float, b: float, radius: int) -> DNGrid:
    """Spill light from every emitting cell into its window.

    observed = truth + a * window_sum(truth) + b wherever some other lit cell
    sits inside the window (window_sum > 0); cells that receive nothing,
    isolated sources included, keep their truth value.  This is the exact
    inverse target of the bloom fit.
    """
    features = bloom_feature_map(truth, radius)
    receives = truth.valid & (features > 0.0)
    out = truth.values.copy()
    out[receives] = truth.values[receives] + a * features[receives] + b
    return truth.replace_values(out)
