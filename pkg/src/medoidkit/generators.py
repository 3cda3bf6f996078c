"""Synthetic data generators and seed derivation."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .metric_space import DataError

_MASK64 = (1 << 64) - 1


def mix64(x: int) -> int:
    """SplitMix64 finalizer: a bijective 64-bit scramble of ``x``."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, index: int) -> int:
    return mix64((int(base_seed) ^ int(index)) & _MASK64)


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    mean: tuple[float, ...]
    variance: float


@dataclass(frozen=True)
class Box:
    lower: tuple[float, ...]
    upper: tuple[float, ...]

    @property
    def volume(self) -> float:
        return float(np.prod(np.subtract(self.upper, self.lower)))


@dataclass(frozen=True)
class GeneratorSpec:
    """Either an isotropic Gaussian mixture or a uniform law on a union of boxes.

    Exactly one of ``components`` / ``boxes`` is non-empty. Boxes are
    weighted by volume, so the draw is uniform on their union; if every box
    is degenerate they are weighted equally, which is how exact point
    masses are expressed.
    """

    components: tuple[GaussianComponent, ...] = ()
    boxes: tuple[Box, ...] = ()
    dimension: int = field(default=0)

    def __post_init__(self):
        if bool(self.components) == bool(self.boxes):
            raise DataError("a generator needs either Gaussian components or boxes, not both")
        dims = {len(c.mean) for c in self.components} | {len(b.lower) for b in self.boxes}
        dims |= {len(b.upper) for b in self.boxes}
        if len(dims) != 1:
            raise DataError("generator parts have inconsistent dimensions")
        dim = dims.pop()
        if dim < 1:
            raise DataError("generator dimension must be at least 1")
        if self.dimension and self.dimension != dim:
            raise DataError(f"declared dimension {self.dimension} does not match parts ({dim})")
        object.__setattr__(self, "dimension", dim)
        if self.components:
            w = np.array([c.weight for c in self.components])
            if np.any(w <= 0) or not np.isclose(w.sum(), 1.0, atol=1e-9):
                raise DataError("mixture weights must be positive and sum to 1")
            if any(not c.variance > 0 for c in self.components):
                raise DataError("component variances must be positive")
            if not np.all(np.isfinite([x for c in self.components for x in c.mean])):
                raise DataError("component means must be finite")
        for b in self.boxes:
            lo, hi = np.asarray(b.lower, float), np.asarray(b.upper, float)
            if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))) or np.any(hi < lo):
                raise DataError("boxes need finite bounds with lower <= upper")

    @property
    def weights(self) -> np.ndarray:
        if self.components:
            return np.array([c.weight for c in self.components])
        vol = np.array([b.volume for b in self.boxes])
        if vol.sum() <= 0:
            return np.full(len(self.boxes), 1.0 / len(self.boxes))
        return vol / vol.sum()

    @property
    def means(self) -> np.ndarray:
        """Component means (Gaussian) or box centers (uniform)."""
        if self.components:
            return np.array([c.mean for c in self.components], dtype=float)
        return np.array([np.add(b.lower, b.upper) / 2 for b in self.boxes], dtype=float)

    @property
    def n_components(self) -> int:
        return len(self.components) or len(self.boxes)

    def to_dict(self) -> dict:
        if self.components:
            return {"kind": "gaussian_mixture", "components": [
                {"weight": c.weight, "mean": list(c.mean), "variance": c.variance}
                for c in self.components]}
        return {"kind": "uniform_box_union", "boxes": [
            {"lower": list(b.lower), "upper": list(b.upper)} for b in self.boxes]}

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        kind = d.get("kind")
        try:
            if kind == "gaussian_mixture":
                comps = tuple(GaussianComponent(float(c["weight"]), tuple(map(float, c["mean"])),
                                                float(c["variance"])) for c in d["components"])
                return cls(components=comps, dimension=int(d.get("dimension", 0)))
            if kind == "uniform_box_union":
                boxes = tuple(Box(tuple(map(float, b["lower"])), tuple(map(float, b["upper"])))
                              for b in d["boxes"])
                return cls(boxes=boxes, dimension=int(d.get("dimension", 0)))
        except (KeyError, TypeError) as exc:
            raise DataError(f"malformed generator description: {exc}") from exc
        raise DataError(f"unknown generator kind {kind!r}")


def gaussian_mixture(means: Sequence[Sequence[float]], variance: float,
                     weights: Sequence[float] | None = None) -> GeneratorSpec:
    k = len(means)
    weights = [1.0 / k] * k if weights is None else list(weights)
    return GeneratorSpec(components=tuple(
        GaussianComponent(float(w), tuple(map(float, m)), float(variance))
        for w, m in zip(weights, means)))


def uniform_boxes(bounds: Sequence[tuple[Sequence[float], Sequence[float]]]) -> GeneratorSpec:
    return GeneratorSpec(boxes=tuple(
        Box(tuple(map(float, lo)), tuple(map(float, hi))) for lo, hi in bounds))


def point_mass(location: Sequence[float]) -> GeneratorSpec:
    """Exact point mass, as a single degenerate box."""
    return uniform_boxes([(location, location)])


def sample(generator: GeneratorSpec, n: int, seed: int, return_labels: bool = False):
    """Draw ``n`` iid points; optionally also the component index of each."""
    if n < 1:
        raise DataError("sample size must be at least 1")
    rng = np.random.default_rng(int(seed) & _MASK64)
    labels = rng.choice(generator.n_components, size=n, p=generator.weights)
    if generator.components:
        sd = np.sqrt([c.variance for c in generator.components])
        noise = rng.standard_normal((n, generator.dimension))
        points = generator.means[labels] + noise * sd[labels][:, None]
    else:
        lo = np.array([b.lower for b in generator.boxes], dtype=float)
        hi = np.array([b.upper for b in generator.boxes], dtype=float)
        u = rng.random((n, generator.dimension))
        points = lo[labels] + u * (hi[labels] - lo[labels])
    if return_labels:
        return points, labels
    return points
