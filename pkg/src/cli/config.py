import hashlib
import json
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from config.settings import Settings
from exceptions import ConfigurationError
from gatecat.requests import GateKind, GateRequest

PHYSICS_KEYS = {
    "omega_x": "OMEGA_X",
    "waist": "WAIST",
    "eps_x": "EPS_X",
    "eps_y": "EPS_Y",
    "eps_z": "EPS_Z",
}


class PhysicsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    omega_x: float | None = Field(default=None, gt=0)
    waist: float | None = Field(default=None, gt=0)
    eps_x: float | None = Field(default=None, gt=0)
    eps_y: float | None = Field(default=None, ge=0)
    eps_z: float | None = Field(default=None, ge=0)
    u_prime: float | None = Field(default=None, ge=0)


class GateSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: GateKind
    magnitude: float = Field(ge=0)
    theta: float = 0.0
    phi: float = 0.0
    lam: float | None = Field(default=None, gt=0, lt=1)
    duration_us: float | None = Field(default=None, ge=0)
    layout: str | None = None
    corrections: bool = True
    initial_alpha: tuple[float, float] | None = None

    @model_validator(mode="after")
    def check_schedule(self):
        if self.lam is not None and self.duration_us is not None:
            raise ValueError("give either lam or duration_us")
        return self

    def to_request(self, u_prime: float | None = None, magnitude: float | None = None) -> GateRequest:
        alpha = None if self.initial_alpha is None else complex(*self.initial_alpha)
        return GateRequest(
            kind=self.kind,
            magnitude=self.magnitude if magnitude is None else magnitude,
            theta=self.theta,
            phi=self.phi,
            lam=self.lam,
            duration=None if self.duration_us is None else self.duration_us * 1e-6,
            u_prime=u_prime,
            layout=self.layout,
            corrections=self.corrections,
            initial_alpha=alpha,
        )


class SweepSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    magnitudes: list[float] = Field(default_factory=list)
    lambda_grid: list[float] | None = None


class PropagatorSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    steps_per_period: int | None = Field(default=None, ge=40)
    order: Literal[2, 4] | None = None
    n_com: int | None = Field(default=None, ge=2)
    n_rel: int | None = Field(default=None, ge=2)


class SpectrumSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u_min: float = Field(default=0.0, ge=0)
    u_max: float = Field(default=1.2, ge=0)
    points: int = Field(default=25, ge=1)
    method: Literal["exact", "matrix"] = "exact"
    check_convergence: bool = True


class TomographySection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    state: Literal["vacuum", "coherent", "cat", "squeezed", "post_gate"] = "vacuum"
    alpha: tuple[float, float] = (0.0, 0.0)
    xi: tuple[float, float] = (0.0, 0.0)
    n_com: int = Field(default=24, ge=2)
    extent: float | None = Field(default=None, gt=0)
    spacing: float | None = Field(default=None, gt=0)
    gate: GateSection | None = None


class LayoutSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str | None = None
    path: str | None = None


class RunConfig(BaseModel):
    """One JSON run document; unset keys fall back to `Settings`."""

    model_config = ConfigDict(extra="forbid")

    physics: PhysicsSection = Field(default_factory=PhysicsSection)
    gate: GateSection | None = None
    sweep: SweepSection = Field(default_factory=SweepSection)
    propagator: PropagatorSection = Field(default_factory=PropagatorSection)
    spectrum: SpectrumSection = Field(default_factory=SpectrumSection)
    tomography: TomographySection = Field(default_factory=TomographySection)
    layout: LayoutSection = Field(default_factory=LayoutSection)
    output_dir: str | None = None
    strict: bool = False
    threads: int = Field(default=1, ge=1)
    dt_check: bool = False

    def settings(self, base: Settings) -> Settings:
        update = {
            key: getattr(self.physics, field) for field, key in PHYSICS_KEYS.items()
            if getattr(self.physics, field) is not None
        }
        if self.propagator.steps_per_period is not None:
            update["STEPS_PER_PERIOD"] = self.propagator.steps_per_period
        if self.propagator.order is not None:
            update["INTEGRATOR_ORDER"] = self.propagator.order
        if self.propagator.n_com is not None:
            update["N_COM"] = self.propagator.n_com
            update["N_COM_SQUEEZING"] = self.propagator.n_com
        if self.propagator.n_rel is not None:
            update["N_REL_DYN"] = self.propagator.n_rel
        return base.model_copy(update=update)

    def canonical_json(self, command: str) -> str:
        document = {"command": command, "config": self.model_dump(mode="json", exclude={"output_dir", "threads"})}
        return json.dumps(document, sort_keys=True, separators=(",", ":"))

    def config_hash(self, command: str) -> str:
        """SHA-256 of the canonical JSON; output location and worker count do not change results."""
        return hashlib.sha256(self.canonical_json(command).encode("utf-8")).hexdigest()


def load_run_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """
    Read a run document and apply flag overrides on top of it.

    :param overrides: Nested key/value pairs; `None` values leave the document untouched.
    :raises ConfigurationError: When the file is unreadable or fails validation.
    """
    document = {}
    if path is not None:
        try:
            document = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigurationError(f"Cannot read run configuration '{path}': {e}") from e
    _merge(document, overrides or {})
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid run configuration: {e}") from e


def _merge(document: dict, overrides: dict):
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict):
            if not _has_values(value):
                continue
            _merge(document.setdefault(key, {}), value)
        else:
            document[key] = value


def _has_values(overrides: dict) -> bool:
    return any(_has_values(value) if isinstance(value, dict) else value is not None for value in overrides.values())
