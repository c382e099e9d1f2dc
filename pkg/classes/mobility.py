import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Tuple

import numpy as np

from classes.errors import InvalidConfig, ValidationError

Point3 = Tuple[float, float, float]

INIT_POLICIES = ("quadrant", "argmax", "random")


class MobilityMode(str, Enum):
    VERTICAL_UPWARD = "vertical_upward"
    ORWP_GAUSSIAN = "orwp_gaussian"


def quadrant_aps(room_length: float, height: float = 2.0) -> Tuple[Point3, ...]:
    """Four APs at the quadrant centers, ordered by quadrant I, II, III, IV."""
    q = room_length / 4.0
    return ((q, q, height), (-q, q, height), (-q, -q, height), (q, -q, height))


@dataclass(frozen=True)
class Ar1Params:
    """theta[n] = c0 + c1 * theta[n-1] + w[n], w ~ N(0, sigma_w^2)."""
    c0: float
    c1: float
    sigma_w: float

    def __post_init__(self):
        if not abs(self.c1) < 1.0:
            raise ValidationError(f"c1={self.c1}", "|c1| < 1")
        if not self.sigma_w > 0:
            raise ValidationError(f"sigma_w={self.sigma_w}", "sigma_w > 0")
        if not 0.0 < self.stationary_mean < 0.5 * math.pi:
            raise ValidationError(f"stationary mean {self.stationary_mean}", "0 < c0/(1-c1) < pi/2")

    @property
    def stationary_mean(self) -> float:
        return self.c0 / (1.0 - self.c1)

    @property
    def stationary_std(self) -> float:
        return self.sigma_w / math.sqrt(1.0 - self.c1 * self.c1)


@dataclass(frozen=True)
class OrwpConfig:
    room_length: float
    speed: float
    ts: float = 0.013
    tc_theta: float = 0.130
    theta_mean: float = math.radians(29.67)
    theta_std: float = math.radians(7.78)
    ap_positions: Tuple[Point3, ...] = ()
    seed: int = 0
    ue_height: float = 0.0
    init_serving: str = "quadrant"
    handover_margin_db: float = 5.0
    time_to_trigger: int = 3

    def __post_init__(self):
        for name in ("room_length", "speed", "ts", "tc_theta", "theta_std"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidConfig(f"{name}={value} must be positive")
        if self.ts > self.tc_theta:
            raise InvalidConfig(f"ts={self.ts} exceeds tc_theta={self.tc_theta}")
        if not self.ap_positions:
            object.__setattr__(self, "ap_positions", quadrant_aps(self.room_length))
        aps = tuple(tuple(float(v) for v in ap) for ap in self.ap_positions)
        for ap in aps:
            if len(ap) != 3:
                raise InvalidConfig(f"AP {ap} is not a 3D point")
            if ap[2] <= self.ue_height:
                raise InvalidConfig(f"AP {ap} is not above the UE plane z={self.ue_height}")
        object.__setattr__(self, "ap_positions", aps)
        if self.init_serving not in INIT_POLICIES:
            raise InvalidConfig(f"init_serving='{self.init_serving}' must be one of {INIT_POLICIES}")
        if not (math.isfinite(self.handover_margin_db) and self.handover_margin_db >= 0):
            raise InvalidConfig(f"handover_margin_db={self.handover_margin_db} must be a non-negative dB value")
        if not isinstance(self.time_to_trigger, int) or self.time_to_trigger < 1:
            raise InvalidConfig(f"time_to_trigger={self.time_to_trigger} must be a positive sample count")

    def with_point(self, room_length: float, speed: float) -> "OrwpConfig":
        """
        Same settings at another sweep point. The default quadrant layout is
        rescaled to the new room; user-supplied AP positions are kept as given.
        """
        height = self.ap_positions[0][2]
        aps = self.ap_positions
        if aps == quadrant_aps(self.room_length, height):
            aps = quadrant_aps(room_length, height)
        return replace(self, room_length=room_length, speed=speed, ap_positions=aps)

    @property
    def margin_ratio(self) -> float:
        return 10.0 ** (self.handover_margin_db / 10.0)

    @property
    def step_length(self) -> float:
        return self.speed * self.tc_theta


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled ORWP path. Column arrays share one index; waypoints include P0."""
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    omega: np.ndarray
    theta: np.ndarray
    serving_ap: np.ndarray
    waypoints: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))

    def __len__(self):
        return int(self.t.size)

    @property
    def n_handovers(self) -> int:
        return int(np.count_nonzero(np.diff(self.serving_ap)))

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if self.t.size else 0.0

    def rows(self) -> List[tuple]:
        return [
            (float(t), float(x), float(y), float(o), float(th), int(s))
            for t, x, y, o, th, s in zip(self.t, self.x, self.y, self.omega, self.theta, self.serving_ap)
        ]
