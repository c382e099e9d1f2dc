"""
Orientation value types: Euler angles, unit normals, device mode, and the
polar/azimuth angle distribution models.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from classes.errors import (
    EmptySeries,
    NonMonotonicTimestamps,
    ValidationError,
)

HALF_PI = 0.5 * math.pi
TWO_PI = 2.0 * math.pi


class DeviceMode(str, Enum):
    PORTRAIT = "portrait"
    LANDSCAPE = "landscape"


class Family(str, Enum):
    LAPLACE = "laplace"
    GAUSSIAN = "gaussian"


@dataclass(frozen=True)
class EulerAngles:
    """Yaw/pitch/roll (alpha, beta, gamma) in radians, W3C device-orientation ranges."""
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < TWO_PI:
            raise ValidationError(f"alpha={self.alpha} out of range", "0 <= alpha < 2*pi")
        if not -math.pi <= self.beta < math.pi:
            raise ValidationError(f"beta={self.beta} out of range", "-pi <= beta < pi")
        if not -HALF_PI <= self.gamma < HALF_PI:
            raise ValidationError(f"gamma={self.gamma} out of range", "-pi/2 <= gamma < pi/2")

    @classmethod
    def from_degrees(cls, alpha_deg: float, beta_deg: float, gamma_deg: float) -> "EulerAngles":
        return cls(math.radians(alpha_deg), math.radians(beta_deg), math.radians(gamma_deg))


@dataclass(frozen=True)
class UnitVector3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"norm {norm!r} is not 1", "|n| = 1")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True)
class OrientationModel:
    """
    Truncated Laplace or Gaussian law of the polar angle theta.

    `scale` is b_theta for Laplace and sigma_G for Gaussian. With exact=True the
    density is renormalized over [lower, upper]; with exact=False the untruncated
    density/CDF is used inside the bounds (the simplified closed form, which is
    0.5 at mu_theta and leaks 1 - normalizer of mass).
    """
    family: Family
    mu_theta: float
    scale: float
    lower: float = 0.0
    upper: float = HALF_PI
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"scale={self.scale} must be positive", "scale > 0")
        if not self.lower < self.upper:
            raise ValidationError(f"bounds [{self.lower}, {self.upper}] are empty", "lower < upper")
        if self.lower < 0.0:
            raise ValidationError(f"lower={self.lower} is negative", "lower >= 0")
        if self.upper > HALF_PI + 1e-12:
            raise ValidationError(f"upper={self.upper} exceeds pi/2", "upper <= pi/2")

    @classmethod
    def from_degrees(
        cls,
        family: Family,
        mean_deg: float,
        sigma_deg: float,
        sigma_kind: str = "std",
        exact: bool = True,
    ) -> "OrientationModel":
        """
        Build a model from Table-style degree values.

        Args:
            sigma_kind: "std" (sigma is a standard deviation in degrees),
                "variance" (sigma is a variance in degrees^2) or "scale"
                (sigma is already the family's scale parameter in degrees).
        """
        family = Family(family)
        if sigma_kind == "variance":
            if sigma_deg <= 0:
                raise ValidationError(f"variance={sigma_deg} must be positive", "sigma > 0")
            std = math.radians(math.sqrt(sigma_deg))
        elif sigma_kind in ("std", "scale"):
            std = math.radians(sigma_deg)
        else:
            raise ValidationError(f"unknown sigma_kind '{sigma_kind}'", "sigma_kind in {std, variance, scale}")

        if family is Family.LAPLACE and sigma_kind != "scale":
            scale = math.sqrt(std * std / 2.0)
        else:
            scale = std
        return cls(family, math.radians(mean_deg), scale, exact=exact)

    @classmethod
    def sitting(cls) -> "OrientationModel":
        return cls.from_degrees(Family.LAPLACE, 41.39, 7.68)

    @classmethod
    def walking(cls) -> "OrientationModel":
        return cls.from_degrees(Family.GAUSSIAN, 29.67, 7.78)

    @cached_property
    def base(self):
        if self.family is Family.LAPLACE:
            return stats.laplace(loc=self.mu_theta, scale=self.scale)
        return stats.norm(loc=self.mu_theta, scale=self.scale)

    @cached_property
    def cdf_lower(self) -> float:
        return float(self.base.cdf(self.lower))

    @cached_property
    def normalizer(self) -> float:
        """Mass of the untruncated law inside [lower, upper], G(upper) - G(lower)."""
        return float(self.base.cdf(self.upper)) - self.cdf_lower

    @property
    def sigma(self) -> float:
        """Standard deviation of the untruncated family."""
        if self.family is Family.LAPLACE:
            return self.scale * math.sqrt(2.0)
        return self.scale

    def with_scale(self, scale: float) -> "OrientationModel":
        return OrientationModel(self.family, self.mu_theta, scale, self.lower, self.upper, self.exact)

    def pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        inside = (theta >= self.lower) & (theta <= self.upper)
        dens = self.base.pdf(theta)
        if self.exact:
            dens = dens / self.normalizer
        out = np.where(inside, dens, 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.exact:
            raw = (self.base.cdf(theta) - self.cdf_lower) / self.normalizer
        else:
            raw = self.base.cdf(theta)
        out = np.where(theta < self.lower, 0.0, np.where(theta >= self.upper, 1.0, np.clip(raw, 0.0, 1.0)))
        return float(out) if out.ndim == 0 else out

    def ppf(self, u):
        """Inverse of the exact truncated CDF."""
        u = np.asarray(u, dtype=float)
        out = np.clip(self.base.ppf(self.cdf_lower + u * self.normalizer), self.lower, self.upper)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class UniformAzimuthModel:
    """Azimuth omega ~ U[-pi, pi)."""
    lower: float = -math.pi
    upper: float = math.pi

    def pdf(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.where((omega >= self.lower) & (omega < self.upper), 1.0 / (self.upper - self.lower), 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, omega):
        omega = np.asarray(omega, dtype=float)
        out = np.clip((omega - self.lower) / (self.upper - self.lower), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, n: int, seed=None) -> np.ndarray:
        return np.random.default_rng(seed).uniform(self.lower, self.upper, size=n)


@dataclass(frozen=True, eq=False)
class SampleSeries:
    values: np.ndarray
    timestamps: Optional[np.ndarray] = None
    name: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float).ravel()
        if values.size == 0:
            raise EmptySeries(f"series '{self.name}' is empty")
        object.__setattr__(self, "values", values)
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype=float).ravel()
            if ts.size != values.size:
                raise ValidationError(
                    f"{ts.size} timestamps for {values.size} values", "len(timestamps) == len(values)"
                )
            steps = np.diff(ts)
            if np.any(steps <= 0):
                bad = int(np.argmax(steps <= 0)) + 1
                raise NonMonotonicTimestamps(f"timestamp {ts[bad]!r} at index {bad} does not increase")
            object.__setattr__(self, "timestamps", ts)

    @classmethod
    def of(cls, values: Sequence[float], name: str = "") -> "SampleSeries":
        return cls(np.asarray(values, dtype=float), name=name)

    def __len__(self):
        return int(self.values.size)


@dataclass(frozen=True)
class FitReport:
    model: OrientationModel
    ksd: float
    skewness: float
    kurtosis: float
    n: int = field(default=0)

    def __post_init__(self):
        if not 0.0 <= self.ksd <= 1.0:
            raise ValidationError(f"ksd={self.ksd} outside [0, 1]", "0 <= ksd <= 1")
