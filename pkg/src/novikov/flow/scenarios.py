"""Built-in maps used by the examples, the self-test and the tests."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ValidationError
from .config import Tolerances
from .torus import Bump, FourierMode, TorusMorseMap

# four critical points (indices 2, 1, 1, 0); the small mixed mode breaks the
# reflection symmetries that would otherwise make the picture non-generic
TORUS_4PT = TorusMorseMap(1, (FourierMode(1, 0, 0.2, 0.0), FourierMode(0, 1, 0.15, 0.0),
                              FourierMode(1, 1, 0.0, 0.01)))

# a fibration whose return map contracts the fiber toward y = 1/2
FIBRATION_ALIGNED = TorusMorseMap(1, (FourierMode(0, 1, 0.1, 0.0),))

FIBRATION_PLAIN = TorusMorseMap(1, ())

# symmetric under y -> -y, which forces a flow line between the two saddles on y = 0
SYMMETRIC_SADDLES = TorusMorseMap(1, (FourierMode(1, 0, 0.25, 0.0), FourierMode(1, 1, -0.025, 0.0),
                                      FourierMode(1, -1, -0.025, 0.0)))


def scenario_dict(m: TorusMorseMap, delta: float = 0.1, **extra) -> dict:
    d = m.to_dict()
    d["delta"] = delta
    d.update(extra)
    return d


@dataclass(frozen=True)
class Scenario:
    map: TorusMorseMap
    tol: Tolerances
    delta: float = 0.1
    bumps: tuple = ()
    y_min: float | None = None
    y_max: float | None = None
    perturbations: tuple | int = 4

    def to_dict(self) -> dict:
        d = self.map.to_dict()
        d.update(tolerances=self.tol.to_dict(), delta=self.delta, bumps=[b.to_dict() for b in self.bumps],
                 y_min=self.y_min, y_max=self.y_max)
        d["perturbations"] = (self.perturbations if isinstance(self.perturbations, int)
                              else [b.to_dict() for b in self.perturbations])
        return d


_SCENARIO_KEYS = {"winding", "fourier", "tolerances", "delta", "bumps", "y_min", "y_max", "perturbations", "comment"}


def parse_scenario(obj, tol_override: dict | None = None) -> Scenario:
    """Scenario from a decoded JSON object; ``tol_override`` wins over the file."""
    if not isinstance(obj, dict):
        raise ValidationError("scenario file must hold a JSON object")
    unknown = set(obj) - _SCENARIO_KEYS
    if unknown:
        raise ValidationError(f"unknown scenario keys: {sorted(unknown)}")
    if "winding" not in obj:
        raise ValidationError("scenario needs a winding number")
    try:
        m = TorusMorseMap.from_dict(obj)
        tol_d = dict(obj.get("tolerances") or {})
        tol_d.update(tol_override or {})
        tol = Tolerances.from_dict(tol_d)
        bumps = tuple(Bump.from_dict(b) for b in obj.get("bumps", []))
        pert = obj.get("perturbations", 4)
        if not isinstance(pert, int) or isinstance(pert, bool):
            pert = tuple(Bump.from_dict(b) for b in pert)
        elif pert < 0:
            raise ValidationError("perturbation count must be nonnegative")
        delta = float(obj.get("delta", 0.1))
        y_min = None if obj.get("y_min") is None else float(obj["y_min"])
        y_max = None if obj.get("y_max") is None else float(obj["y_max"])
    except (KeyError, TypeError) as e:
        raise ValidationError(f"malformed scenario: {e!r}") from None
    if not delta > 0:
        raise ValidationError("delta must be positive")
    return Scenario(m, tol, delta, bumps, y_min, y_max, pert)
