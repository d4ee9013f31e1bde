"""Numerical tolerances shared by the flow modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from ..errors import ValidationError


@dataclass(frozen=True)
class Tolerances:
    newton: float = 1e-10
    dedupe: float = 1e-8
    coincidence: float = 1e-6
    transversality: float = 1e-5
    critical_radius: float = 1e-4
    eigen_floor: float = 1e-6
    rtol: float = 1e-10
    atol: float = 1e-10
    event: float = 1e-10
    shoot_eps: float = 1e-6
    fiber_samples: int = 2048
    max_steps: int = 200_000
    seed_grid: int = 64
    bump_clearance: float = 0.05
    bump_max_amp: float = 1e-3

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not v > 0:
                raise ValidationError(f"tolerance {f.name} must be a positive number, got {v!r}")
        for name in ("fiber_samples", "max_steps", "seed_grid"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ValidationError(f"tolerance {name} must be an integer")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict | None) -> "Tolerances":
        d = dict(d or {})
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown tolerance keys: {sorted(extra)}")
        return cls(**d)

    def refined(self) -> "Tolerances":
        """Integrator tolerances halved and fiber sampling doubled."""
        return replace(self, rtol=self.rtol / 2, atol=self.atol / 2, fiber_samples=2 * self.fiber_samples)
