"""
LOS channel gain and SNR statistics for a randomly oriented receiver.

The AP faces straight down, so cos(phi) = h/d and the gain factors as
H = h_n * cos(psi) with h_n = H_0 / d^(m+2), H_0 = (m+1) A h^m / (2 pi).
Orientations that push psi past the FOV produce a Dirac mass at H = 0.
"""
import math
from typing import Optional, Tuple

import numpy as np
from scipy import integrate
from statsmodels.tsa.stattools import acf

from classes.errors import DegenerateScale, OutOfSupport, ValidationError
from classes.link import ChannelParams, GainDistribution, LinkGeometry
from classes.mobility import Ar1Params
from classes.orientation import Family, OrientationModel
from utils import incidence, mobility


def lambertian_order(half_angle: float) -> float:
    if not 0.0 < half_angle < 0.5 * math.pi:
        raise ValidationError(f"half_angle={half_angle}", "0 < half_angle < pi/2")
    m = -math.log(2.0) / math.log(math.cos(half_angle))
    # cos(60 deg) is not exactly 0.5 in binary; snap near-integer orders
    if abs(m - round(m)) < 1e-12:
        m = float(round(m))
    return m


def normalizing_gain(g: LinkGeometry, p: ChannelParams) -> float:
    """h_n = H_0 / d^(m+2)."""
    m = lambertian_order(p.half_angle)
    h0 = (m + 1.0) * p.area * g.h ** m / (2.0 * math.pi)
    return h0 / g.d ** (m + 2.0)


def los_gain(g: LinkGeometry, p: ChannelParams, theta: float) -> float:
    m = lambertian_order(p.half_angle)
    d = g.d
    cos_phi = g.h / d
    c = incidence.cos_psi(g, theta)
    if c < p.cos_fov or c < 0.0:
        return 0.0
    return (m + 1.0) * p.area / (2.0 * math.pi * d * d) * cos_phi ** m * c


def los_gain_array(
    ap,
    ue_xy: np.ndarray,
    ue_z: float,
    omega,
    theta,
    p: ChannelParams,
) -> np.ndarray:
    """Vectorized los_gain for many UE states against one AP."""
    m = lambertian_order(p.half_angle)
    xa, ya, za = ap
    dx = xa - ue_xy[..., 0]
    dy = ya - ue_xy[..., 1]
    h = za - ue_z
    d = np.sqrt(dx * dx + dy * dy + h * h)
    a = -(dx / d) * np.cos(omega) - (dy / d) * np.sin(omega)
    c = a * np.sin(theta) + (h / d) * np.cos(theta)
    gain = (m + 1.0) * p.area / (2.0 * math.pi * d * d) * (h / d) ** m * c
    return np.where((c >= p.cos_fov) & (c >= 0.0), gain, 0.0)


def gain_distribution(
    g: LinkGeometry,
    p: ChannelParams,
    model: OrientationModel,
    approximate: bool = True,
) -> GainDistribution:
    """
    Gain law for one geometry. The approximate form requires a Laplace theta
    model; approximate=False uses the exact cos(psi) law for either family.
    """
    coeffs = incidence.coefficients(g)
    dist = incidence.cos_psi_distribution(coeffs, model, approximate=approximate)
    h_n = normalizing_gain(g, p)
    tau_min, tau_max = dist.support
    cos_fov = p.cos_fov

    mu_H: Optional[float] = None
    b_H: Optional[float] = None
    discrepancy: Optional[float] = None
    if model.family is Family.LAPLACE:
        mu_hat, b_hat, _ = incidence.approx_params(coeffs, model)
        mu_H, b_H = h_n * mu_hat, h_n * b_hat

    collapsed = not dist.is_exact and dist.b_hat <= 1e-12
    if collapsed:
        # everything sits at cos(psi) = mu_hat, i.e. at h_max
        dirac = 1.0 if dist.mu_hat < cos_fov else 0.0
        point = 0.0 if dirac else h_n * dist.mu_hat
        return GainDistribution(
            h_n=h_n, h_min=point, h_max=point, mu_H=mu_H, b_H=b_H, dirac_mass=dirac,
            cos_psi=dist, cos_fov=cos_fov, collapsed=True,
        )

    dirac = float(incidence.cdf(dist, cos_fov)) if tau_min < cos_fov else 0.0
    h_min = h_n * cos_fov if tau_min < cos_fov else h_n * tau_min
    h_max = h_n * tau_max
    if cos_fov >= tau_max:
        h_min = h_max = 0.0

    if not dist.is_exact:
        delta_h = h_n * dist.b_hat * (
            2.0 - math.exp((dist.mu_hat - tau_max) / dist.b_hat) - math.exp((-1.0 - dist.mu_hat) / dist.b_hat)
        )
        one_sided = b_H * (2.0 - math.exp(-(h_max - mu_H) / b_H))
        discrepancy = abs(one_sided - delta_h) / delta_h

    return GainDistribution(
        h_n=h_n,
        h_min=h_min,
        h_max=h_max,
        mu_H=mu_H,
        b_H=b_H,
        dirac_mass=dirac,
        cos_psi=dist,
        cos_fov=cos_fov,
        normalizer_discrepancy=discrepancy,
    )


def _check_gain(dist: GainDistribution, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    top = dist.h_max * (1.0 + 1e-12)
    if np.any((h < 0.0) | (h > top)):
        raise OutOfSupport(f"gain {h} outside [0, {dist.h_max}]")
    return h


def gain_pdf(dist: GainDistribution, h):
    """Continuous part of the gain density; the Dirac mass is dist.dirac_mass."""
    h = _check_gain(dist, h)
    if dist.collapsed:
        raise DegenerateScale("gain law is a point mass at h_max", point_mass=dist.h_max)
    tau = np.minimum(h / dist.h_n, dist.cos_psi.support[1])
    dens = incidence.density(dist.cos_psi, tau) / dist.h_n
    out = np.where(h > dist.h_min, dens, 0.0)
    return float(out) if out.ndim == 0 else out


def gain_cdf(dist: GainDistribution, h):
    h = _check_gain(dist, h)
    if dist.collapsed:
        out = np.where(h >= dist.h_max, 1.0, dist.dirac_mass)
        return float(out) if out.ndim == 0 else out
    f = dist.cos_psi
    below_fov = float(incidence.cdf(f, dist.cos_fov))
    cont = incidence.cdf(f, h / dist.h_n) - below_fov
    out = np.where(h >= dist.h_min, dist.dirac_mass + np.maximum(cont, 0.0), dist.dirac_mass)
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def gain_total_mass(dist: GainDistribution) -> float:
    """Dirac mass plus the integral of the continuous gain density."""
    if dist.collapsed:
        return 1.0
    f = dist.cos_psi
    lo = max(f.support[0], dist.cos_fov)
    if f.is_exact:
        cont = incidence.exact_mass(f, lo, f.support[1])
    else:
        points = [f.mu_hat] if lo < f.mu_hat < f.support[1] else None
        cont = integrate.quad(
            lambda t: incidence.density(f, t), lo, f.support[1], points=points, limit=400, epsabs=1e-13
        )[0]
    return dist.dirac_mass + cont


def sample_gain(g: LinkGeometry, p: ChannelParams, model: OrientationModel, n: int, seed=None) -> np.ndarray:
    theta = model.ppf(np.random.default_rng(seed).random(n))
    return los_gain_array(g.ap, np.array(g.ue[:2]), g.ue[2], g.omega, theta, p)


# ---------------------------------------------------------------------------
# SNR
# ---------------------------------------------------------------------------

def snr_scale(p: ChannelParams) -> float:
    """S_0 = (R P)^2 / (N_0 B)."""
    return (p.responsivity * p.p_opt) ** 2 / (p.noise_psd * p.bandwidth)


def snr_of_gain(h, p: ChannelParams):
    return snr_scale(p) * np.asarray(h, dtype=float) ** 2


def snr_support(dist: GainDistribution, p: ChannelParams) -> Tuple[float, float]:
    s0 = snr_scale(p)
    return s0 * dist.h_min ** 2, s0 * dist.h_max ** 2


def _check_snr(dist: GainDistribution, p: ChannelParams, s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    _, s_max = snr_support(dist, p)
    if np.any((s <= 0.0) | (s > s_max * (1.0 + 1e-12))):
        raise OutOfSupport(f"snr {s} outside (0, {s_max}]")
    return s


def snr_pdf(dist: GainDistribution, p: ChannelParams, s):
    s = _check_snr(dist, p, s)
    s0 = snr_scale(p)
    h = np.minimum(np.sqrt(s / s0), dist.h_max)
    out = gain_pdf(dist, h) / (2.0 * s0 * h)
    return float(out) if np.ndim(out) == 0 else out


def snr_cdf(dist: GainDistribution, p: ChannelParams, s):
    s = np.asarray(s, dtype=float)
    if np.any(s < 0.0):
        raise OutOfSupport(f"snr {s} is negative")
    h = np.minimum(np.sqrt(s / snr_scale(p)), dist.h_max)
    return gain_cdf(dist, h)


# ---------------------------------------------------------------------------
# Gain as a random process
# ---------------------------------------------------------------------------

def gain_time_series(g: LinkGeometry, p: ChannelParams, ar1: Ar1Params, n: int, seed=None) -> np.ndarray:
    """LOS gain along an AR(1) polar-angle process at a fixed position and facing angle."""
    theta = mobility.theta_series(ar1, n, np.random.default_rng(seed))
    return los_gain_array(g.ap, np.array(g.ue[:2]), g.ue[2], g.omega, theta, p)


def coherence_lag(series: np.ndarray, threshold: float = 0.05, max_lag: Optional[int] = None) -> Optional[int]:
    """First lag at which the normalized autocorrelation drops to `threshold`."""
    series = np.asarray(series, dtype=float)
    if np.ptp(series) == 0:
        return None
    nlags = max_lag if max_lag is not None else min(series.size - 1, 2000)
    r = acf(series, nlags=nlags, fft=True)
    hits = np.nonzero(r <= threshold)[0]
    return int(hits[0]) if hits.size else None


def coherence_time(series: np.ndarray, ts: float, threshold: float = 0.05) -> Optional[float]:
    lag = coherence_lag(series, threshold)
    return None if lag is None else lag * ts
