"""
Link-level value types: AP/UE geometry, incidence coefficients, the cos(psi)
distribution descriptor, channel constants and the LOS gain distribution.
"""
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Tuple

from classes.errors import DegenerateGeometry, ValidationError
from classes.orientation import OrientationModel

Point3 = Tuple[float, float, float]


class CosPsiKind(str, Enum):
    EXACT_CASE1 = "exact_case1"
    EXACT_CASE2 = "exact_case2"
    APPROX_TRUNC_LAPLACE = "approx_trunc_laplace"


@dataclass(frozen=True)
class LinkGeometry:
    """AP position, UE position and the user's facing angle omega (radians)."""
    ap: Point3
    ue: Point3
    omega: float

    def __post_init__(self):
        ap = tuple(float(v) for v in self.ap)
        ue = tuple(float(v) for v in self.ue)
        if len(ap) != 3 or len(ue) != 3:
            raise ValidationError("ap and ue must be 3D points", "len(point) == 3")
        object.__setattr__(self, "ap", ap)
        object.__setattr__(self, "ue", ue)
        if self.d == 0.0:
            raise DegenerateGeometry(f"AP and UE coincide at {ap}")
        if self.h <= 0.0:
            raise DegenerateGeometry(f"AP height {ap[2]} is not above UE height {ue[2]}")

    @property
    def h(self) -> float:
        return self.ap[2] - self.ue[2]

    @property
    def d(self) -> float:
        return math.dist(self.ap, self.ue)

    def with_ue(self, x: float, y: float) -> "LinkGeometry":
        return LinkGeometry(self.ap, (x, y, self.ue[2]), self.omega)

    def with_omega(self, omega: float) -> "LinkGeometry":
        return LinkGeometry(self.ap, self.ue, omega)


@dataclass(frozen=True)
class IncidenceCoeffs:
    """Weights in cos(psi) = a*sin(theta) + b*cos(theta)."""
    a: float
    b: float

    def __post_init__(self):
        if not -1.0 < self.a < 1.0:
            raise ValidationError(f"a={self.a}", "-1 < a < 1")
        if not 0.0 < self.b <= 1.0:
            raise ValidationError(f"b={self.b}", "0 < b <= 1")
        if math.hypot(self.a, self.b) > 1.0 + 1e-12:
            raise ValidationError(f"sqrt(a^2+b^2)={math.hypot(self.a, self.b)}", "a^2 + b^2 <= 1")

    @property
    def r(self) -> float:
        return math.hypot(self.a, self.b)

    @property
    def phase(self) -> float:
        """cos(psi) = r * sin(theta + phase)."""
        return math.atan2(self.b, self.a)

    @property
    def theta_peak(self) -> float:
        """theta* = atan(a/b); negative when a < 0."""
        return math.atan(self.a / self.b)


@dataclass(frozen=True)
class CosPsiDistribution:
    coeffs: IncidenceCoeffs
    theta_model: OrientationModel
    kind: CosPsiKind
    support: Tuple[float, float]
    tau_star: Optional[float]
    ss_f: float
    mu_hat: Optional[float] = None
    b_hat: Optional[float] = None

    @property
    def is_exact(self) -> bool:
        return self.kind is not CosPsiKind.APPROX_TRUNC_LAPLACE


@dataclass(frozen=True)
class ChannelParams:
    """Optical front-end constants. Angles in radians, SI units elsewhere."""
    area: float = 1e-4
    half_angle: float = math.pi / 3
    fov: float = math.pi / 2
    responsivity: float = 1.0
    p_opt: float = 1.0
    noise_psd: float = 1e-21
    bandwidth: float = 1e7

    def __post_init__(self):
        for name in ("area", "responsivity", "p_opt", "noise_psd", "bandwidth"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(f"{name}={value} must be positive", f"{name} > 0")
        if not 0.0 < self.half_angle < 0.5 * math.pi:
            raise ValidationError(f"half_angle={self.half_angle}", "0 < half_angle < pi/2")
        if not 0.0 < self.fov <= 0.5 * math.pi:
            raise ValidationError(f"fov={self.fov}", "0 < fov <= pi/2")

    @cached_property
    def cos_fov(self) -> float:
        # cos(pi/2) is 6e-17 in floating point; the FOV edge sits at zero
        return 0.0 if self.fov >= 0.5 * math.pi else math.cos(self.fov)


@dataclass(frozen=True)
class GainDistribution:
    """
    LOS gain law for one geometry. The Dirac mass at H = 0 (FOV clipping) is
    carried as a scalar and never evaluated as a density. When `collapsed` is
    set the continuous part is a point mass at h_max.
    """
    h_n: float
    h_min: float
    h_max: float
    mu_H: Optional[float]
    b_H: Optional[float]
    dirac_mass: float
    cos_psi: CosPsiDistribution
    cos_fov: float
    normalizer_discrepancy: Optional[float] = None
    collapsed: bool = False

    def __post_init__(self):
        if not -1e-12 <= self.dirac_mass <= 1.0 + 1e-12:
            raise ValidationError(f"dirac_mass={self.dirac_mass}", "0 <= dirac_mass <= 1")
        if self.h_min > self.h_max:
            raise ValidationError(f"h_min={self.h_min} > h_max={self.h_max}", "h_min <= h_max")
