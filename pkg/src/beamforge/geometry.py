import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from exceptions import ConfigurationError

HBAR = 1.054571817e-34
PERTURBATIVE_LIMIT = 0.2


@dataclass(frozen=True)
class BeamGeometry:
    """
    Beam and trap scales of the time-averaged tweezer.

    Lengths in metres, `omega_x` in rad/s, `mass` in kg. The ratios `eps_x`, `eps_y` and
    `rayleigh_ratio` (εz) are the expansion parameters of the Gaussian-beam series.
    """

    waist: float
    rayleigh_ratio: float
    eps_x: float
    eps_y: float
    omega_x: float
    mass: float

    def __post_init__(self):
        for name in ("waist", "rayleigh_ratio", "eps_x", "eps_y", "omega_x", "mass"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"BeamGeometry.{name} must be strictly positive.")
        for name in ("rayleigh_ratio", "eps_x", "eps_y"):
            if getattr(self, name) >= PERTURBATIVE_LIMIT:
                raise ConfigurationError(
                    f"BeamGeometry.{name}={getattr(self, name)} is outside the perturbative regime (< 0.2)."
                )

    @property
    def eps_z(self) -> float:
        return self.rayleigh_ratio

    @property
    def trap_unit(self) -> float:
        """V0 = m ωx² W² / 4 in joules."""
        return 0.25 * self.mass * self.omega_x ** 2 * self.waist ** 2

    @property
    def trap_unit_over_hbar_omega(self) -> float:
        """V0 / ħωx in the dimensionless model, 1 / (4 εx²)."""
        return 1.0 / (4.0 * self.eps_x ** 2)

    @property
    def oscillator_length(self) -> float:
        return math.sqrt(HBAR / (self.mass * self.omega_x))

    @classmethod
    def from_settings(cls, settings) -> "BeamGeometry":
        return cls(
            waist=settings.WAIST,
            rayleigh_ratio=settings.EPS_Z,
            eps_x=settings.EPS_X,
            eps_y=settings.EPS_Y,
            omega_x=settings.OMEGA_X,
            mass=settings.ATOM_MASS,
        )


@dataclass(frozen=True)
class TrapLayout:
    positions: tuple[float, ...]
    base_depths: tuple[float, ...] = field(default=())
    k_max: int = 5
    symmetric: bool = False
    name: str = "layout"

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(float(z) for z in self.positions))
        object.__setattr__(self, "base_depths", tuple(float(u) for u in self.base_depths))
        if len(set(self.positions)) != len(self.positions):
            raise ConfigurationError(f"Layout '{self.name}' has repeated beam positions.")
        if self.base_depths and len(self.base_depths) != len(self.positions):
            raise ConfigurationError(f"Layout '{self.name}' needs one base depth per beam.")
        if any(u < 0 for u in self.base_depths):
            raise ConfigurationError(f"Layout '{self.name}' has a negative base depth.")
        if self.symmetric:
            n = len(self.positions)
            for j in range(n):
                if self.positions[j] != -self.positions[n - 1 - j]:
                    raise ConfigurationError(f"Layout '{self.name}' is flagged symmetric but its positions are not.")
                if self.base_depths and self.base_depths[j] != self.base_depths[n - 1 - j]:
                    raise ConfigurationError(f"Layout '{self.name}' is flagged symmetric but its depths are not.")

    @property
    def j_max(self) -> int:
        return len(self.positions)

    @property
    def controlled_orders(self) -> tuple[int, ...]:
        """Orders set deterministically by the depths; odd orders vanish on symmetric layouts."""
        if self.symmetric:
            return tuple(k for k in range(1, self.k_max + 1) if k % 2 == 0)
        return tuple(range(1, self.k_max + 1))

    def with_base_depths(self, depths) -> "TrapLayout":
        depths = [float(u) for u in depths]
        if self.symmetric:
            n = len(depths)
            depths = [0.5 * (depths[j] + depths[n - 1 - j]) for j in range(n)]
        return TrapLayout(
            positions=self.positions,
            base_depths=tuple(depths),
            k_max=self.k_max,
            symmetric=self.symmetric,
            name=self.name,
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "positions": list(self.positions),
            "base_depths_over_V0": list(self.base_depths),
            "symmetric": self.symmetric,
            "k_max": self.k_max,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TrapLayout":
        return cls(
            positions=tuple(data["positions"]),
            base_depths=tuple(data.get("base_depths_over_V0", ())),
            k_max=int(data.get("k_max", 5)),
            symmetric=bool(data.get("symmetric", False)),
            name=str(data.get("name", "layout")),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "TrapLayout":
        path = Path(path)
        with path.open() as handle:
            data = json.load(handle)
        data.setdefault("name", path.stem)
        return cls.from_dict(data)


def load_layout(name: str, layouts_dir: str | Path) -> TrapLayout:
    """Load a shipped layout by name (`three_beam`, `five_beam`) or from an explicit path."""
    candidate = Path(name)
    if candidate.suffix != ".json":
        candidate = Path(layouts_dir) / f"{name}.json"
    if not candidate.exists():
        raise ConfigurationError(f"Layout file '{candidate}' does not exist.")
    return TrapLayout.from_file(candidate)
