"""Shared domain types: materials, scenario configuration, garments, spectral cubes."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict
from enum import IntEnum

import numpy as np

WAVELENGTH_START_NM = 950
WAVELENGTH_END_NM = 1700
WAVELENGTH_STEP_NM = 5
BAND_COUNT = 151

COMPONENT_TAGS = ("button", "zipper")


class MaterialClass(IntEnum):
    """The five textile materials, with their fixed integer labels."""

    COTTON = 0
    POLYESTER = 1
    WOOL = 2
    SILK = 3
    VISCOSE = 4

    @classmethod
    def from_label(cls, label: int) -> "MaterialClass":
        return cls(label)

    @classmethod
    def from_name(cls, name: str) -> "MaterialClass":
        return cls[name.upper()]

    @property
    def label_name(self) -> str:
        return self.name.lower()


NUM_CLASSES = len(MaterialClass)


class ScenarioError(ValueError):
    """A scenario failed validation; carries one violation message per field."""

    def __init__(self, violations: list[str]):
        self.violations = violations
        super().__init__("; ".join(violations))


@dataclass(frozen=True)
class ScenarioConfig:
    """All digital-twin knobs for one what-if scenario."""

    conveyor_speed: int = 5
    arm_speed: int = 5
    camera_capture_time: int = 3
    laser_speed: int = 5
    error_percent: float = 8.0
    garment_count: int = 10
    class_priors: tuple[float, ...] = (0.2, 0.2, 0.2, 0.2, 0.2)
    repetitions: int = 10
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class_priors"] = list(self.class_priors)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f: data[f] for f in _SCENARIO_FIELDS if f in data}
        unknown = set(data) - set(_SCENARIO_FIELDS)
        if unknown:
            raise ScenarioError(
                [f"unknown key: {k}" for k in sorted(unknown)]
            )
        if "class_priors" in known:
            known["class_priors"] = tuple(known["class_priors"])
        return validate_scenario(cls(**known))

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))


_SCENARIO_FIELDS = (
    "conveyor_speed",
    "arm_speed",
    "camera_capture_time",
    "laser_speed",
    "error_percent",
    "garment_count",
    "class_priors",
    "repetitions",
    "seed",
)


def scenario_violations(cfg: ScenarioConfig) -> list[str]:
    """Collect every invariant violation of a candidate scenario."""
    v = []
    for fname, lo, hi in (
        ("conveyor_speed", 1, 5),
        ("arm_speed", 1, 5),
        ("camera_capture_time", 3, 8),
        ("laser_speed", 1, 5),
    ):
        val = getattr(cfg, fname)
        if not isinstance(val, int) or isinstance(val, bool) or not lo <= val <= hi:
            v.append(f"{fname}: got {val!r}, allowed range [{lo},{hi}]")
    if not 0 <= cfg.error_percent <= 100:
        v.append(f"error_percent: got {cfg.error_percent!r}, allowed range [0,100]")
    if not isinstance(cfg.garment_count, int) or cfg.garment_count < 0:
        v.append(f"garment_count: got {cfg.garment_count!r}, must be a non-negative integer")
    priors = cfg.class_priors
    if len(priors) != NUM_CLASSES or any(p < 0 for p in priors):
        v.append(f"class_priors: got {list(priors)!r}, must be {NUM_CLASSES} non-negative entries")
    elif abs(sum(priors) - 1.0) > 1e-9:
        v.append(f"class_priors: sum {sum(priors)!r} differs from 1 by more than 1e-9")
    if not isinstance(cfg.repetitions, int) or cfg.repetitions < 1:
        v.append(f"repetitions: got {cfg.repetitions!r}, must be a positive integer")
    if not isinstance(cfg.seed, int) or not 0 <= cfg.seed < 2**64:
        v.append(f"seed: got {cfg.seed!r}, must be an unsigned 64-bit integer")
    return v


def validate_scenario(cfg: ScenarioConfig) -> ScenarioConfig:
    """Return the config unchanged if valid, else raise with all violations."""
    violations = scenario_violations(cfg)
    if violations:
        raise ScenarioError(violations)
    return cfg


@dataclass(frozen=True)
class Garment:
    """One textile item travelling through the line."""

    id: int
    true_class: MaterialClass
    hard_components: tuple[str, ...] = ()
    cube_ref: "SpectralCube | None" = None

    def __post_init__(self):
        for tag in self.hard_components:
            if tag not in COMPONENT_TAGS:
                raise ValueError(f"unknown hard component tag {tag!r}")


@dataclass(frozen=True)
class SpectralCube:
    """A stack of 2-D intensity grids, one per wavelength band (950-1700 nm, 5 nm step)."""

    wavelengths_nm: tuple[int, ...]
    intensities: np.ndarray  # shape (BAND_COUNT, height, width), all >= 0

    def __post_init__(self):
        expected = tuple(range(WAVELENGTH_START_NM, WAVELENGTH_END_NM + 1, WAVELENGTH_STEP_NM))
        if self.wavelengths_nm != expected:
            raise ValueError("wavelength grid must be 950..1700 nm in 5 nm steps")
        if self.intensities.shape[0] != BAND_COUNT:
            raise ValueError(f"expected {BAND_COUNT} bands, got {self.intensities.shape[0]}")
        if np.any(self.intensities < 0):
            raise ValueError("intensities must be non-negative")

    @property
    def band_means(self) -> np.ndarray:
        """Spatial mean per band, shape (BAND_COUNT,)."""
        return self.intensities.mean(axis=(1, 2))


def wavelength_grid() -> np.ndarray:
    return np.arange(WAVELENGTH_START_NM, WAVELENGTH_END_NM + 1, WAVELENGTH_STEP_NM, dtype=float)


# Gaussian-bump signature centers per class; any five mutually distinguishable
# smooth curves would do, these are evenly spread across the sensed range.
_SIGNATURE_CENTERS_NM = {
    MaterialClass.COTTON: 1050.0,
    MaterialClass.POLYESTER: 1200.0,
    MaterialClass.WOOL: 1350.0,
    MaterialClass.SILK: 1500.0,
    MaterialClass.VISCOSE: 1650.0,
}
_SIGNATURE_WIDTH_NM = 60.0


def base_signature(material: MaterialClass) -> np.ndarray:
    """Fixed smooth per-class reflectance curve over the wavelength grid."""
    wl = wavelength_grid()
    center = _SIGNATURE_CENTERS_NM[material]
    return np.exp(-0.5 * ((wl - center) / _SIGNATURE_WIDTH_NM) ** 2)


def synth_spectral_cube(
    material: MaterialClass,
    noise_sigma: float,
    height: int = 8,
    width: int = 8,
    rng: np.random.Generator | None = None,
) -> SpectralCube:
    """Synthesize a cube: per-class signature plus Gaussian noise, clamped at 0."""
    if height < 1 or width < 1:
        raise ValueError("height and width must be >= 1")
    if noise_sigma < 0:
        raise ValueError("noise_sigma must be >= 0")
    sig = base_signature(material)[:, None, None]
    cube = np.broadcast_to(sig, (BAND_COUNT, height, width)).copy()
    if noise_sigma > 0:
        if rng is None:
            raise ValueError("rng required when noise_sigma > 0")
        cube += rng.normal(0.0, noise_sigma, size=cube.shape)
    np.clip(cube, 0.0, None, out=cube)
    return SpectralCube(
        wavelengths_nm=tuple(range(WAVELENGTH_START_NM, WAVELENGTH_END_NM + 1, WAVELENGTH_STEP_NM)),
        intensities=cube,
    )


def generate_garments(
    count: int,
    priors: tuple[float, ...],
    component_rate: float,
    rng: np.random.Generator,
) -> list[Garment]:
    """Sample a batch of garments with classes from `priors` and random hard components."""
    if count < 0:
        raise ValueError("count must be non-negative")
    if not 0 <= component_rate <= 1:
        raise ValueError("component_rate must be in [0,1]")
    p = np.asarray(priors, dtype=float)
    if p.shape != (NUM_CLASSES,) or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("priors must be a valid probability vector over the 5 classes")
    cdf = np.cumsum(p / p.sum())
    garments = []
    for i in range(count):
        cls = MaterialClass(min(int(np.searchsorted(cdf, rng.random(), side="right")), NUM_CLASSES - 1))
        tags = tuple(t for t in COMPONENT_TAGS if rng.random() < component_rate)
        garments.append(Garment(id=i, true_class=cls, hard_components=tags))
    return garments


@dataclass(frozen=True)
class ClassifierProfile:
    """Metadata and confusion behaviour of one (simulated) classifier."""

    name: str
    layer_count: int
    parameter_count: int
    confusion_probabilities: tuple[tuple[float, ...], ...]  # 5x5 row-stochastic

    def __post_init__(self):
        m = self.confusion_probabilities
        if len(m) != NUM_CLASSES or any(len(r) != NUM_CLASSES for r in m):
            raise ValueError("confusion_probabilities must be 5x5")
        for i, row in enumerate(m):
            if any(not 0 <= x <= 1 for x in row):
                raise ValueError(f"row {i}: entries must lie in [0,1]")
            if abs(sum(row) - 1.0) > 1e-9:
                raise ValueError(f"row {i}: sums to {sum(row)!r}, must be 1 within 1e-9")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "layer_count": self.layer_count,
            "parameter_count": self.parameter_count,
            "confusion_probabilities": [list(r) for r in self.confusion_probabilities],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ClassifierProfile":
        return cls(
            name=data["name"],
            layer_count=data["layer_count"],
            parameter_count=data["parameter_count"],
            confusion_probabilities=tuple(tuple(r) for r in data["confusion_probabilities"]),
        )
