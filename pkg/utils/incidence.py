"""
Statistics of cos(psi), the incidence-angle cosine, for a fixed link geometry.

With r = sqrt(a^2 + b^2) and phase = atan2(b, a), cos(psi) = r sin(theta + phase)
peaks at theta* = pi/2 - phase = atan(a/b). Every tau < r has two preimages

    rising branch   theta_r = asin(tau/r) - phase        (theta <= theta*)
    falling branch  theta_f = pi - asin(tau/r) - phase   (theta >= theta*)

and the exact density sums f_theta over the branches that fall inside the
theta-model bounds, each with Jacobian 1/sqrt(r^2 - tau^2). For a < 0 the peak
is below 0 so only the falling branch exists (single-branch case); for a >= 0
both can contribute (two-branch case).
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import integrate

from classes.errors import (
    ConditionUnmet,
    DegenerateScale,
    OutOfSupport,
    UnsupportedFamily,
    ValidationError,
)
from classes.link import CosPsiDistribution, CosPsiKind, IncidenceCoeffs, LinkGeometry
from classes.orientation import Family, OrientationModel

CW_EPSILON = 1e-3
_SCALE_FLOOR = 1e-12
_REL_TOL = 1e-12


def coefficients(g: LinkGeometry) -> IncidenceCoeffs:
    xa, ya, _ = g.ap
    xu, yu, _ = g.ue
    d = g.d
    a = -((xa - xu) / d) * math.cos(g.omega) - ((ya - yu) / d) * math.sin(g.omega)
    return IncidenceCoeffs(a=a, b=g.h / d)


def cos_psi(g: LinkGeometry, theta):
    c = coefficients(g)
    return _g(c, theta)


def _g(c: IncidenceCoeffs, theta):
    value = c.a * np.sin(theta) + c.b * np.cos(theta)
    return float(value) if np.ndim(value) == 0 else value


# ---------------------------------------------------------------------------
# Distribution construction
# ---------------------------------------------------------------------------

def _exact_support(c: IncidenceCoeffs, m: OrientationModel) -> Tuple[float, float]:
    g_lo, g_hi = _g(c, m.lower), _g(c, m.upper)
    top = c.r if m.lower < c.theta_peak < m.upper else max(g_lo, g_hi)
    return min(g_lo, g_hi), top


def _strictly_inside(value: float, support: Tuple[float, float]) -> bool:
    lo, hi = support
    tol = _REL_TOL * max(1.0, abs(lo), abs(hi))
    return lo + tol < value < hi - tol


def cos_psi_distribution(c: IncidenceCoeffs, m: OrientationModel, approximate: bool = False) -> CosPsiDistribution:
    """Build the exact (by sign of a) or truncated-Laplace-approximate law of cos(psi)."""
    if approximate:
        mu_hat, b_hat, tau_max = approx_params(c, m)
        support = (-1.0, tau_max)
        peak = mu_hat if _strictly_inside(mu_hat, support) else None
        return CosPsiDistribution(
            coeffs=c,
            theta_model=m,
            kind=CosPsiKind.APPROX_TRUNC_LAPLACE,
            support=support,
            tau_star=peak,
            ss_f=tau_max,
            mu_hat=mu_hat,
            b_hat=b_hat,
        )

    support = _exact_support(c, m)
    kind = CosPsiKind.EXACT_CASE1 if c.a < 0 else CosPsiKind.EXACT_CASE2
    peak = None
    if m.lower <= m.mu_theta <= m.upper:
        candidate = _g(c, m.mu_theta)
        if _strictly_inside(candidate, support):
            peak = candidate
    return CosPsiDistribution(
        coeffs=c,
        theta_model=m,
        kind=kind,
        support=support,
        tau_star=peak,
        ss_f=support[1],
    )


def tau_star(d: CosPsiDistribution) -> Optional[float]:
    return d.tau_star


# ---------------------------------------------------------------------------
# Exact law
# ---------------------------------------------------------------------------

def _branches(d: CosPsiDistribution, tau):
    """Preimages and in-bounds masks of both branches, vectorized over tau."""
    c, m = d.coeffs, d.theta_model
    r, phase = c.r, c.phase
    peak = min(max(c.theta_peak, m.lower), m.upper)
    u = np.arcsin(np.clip(np.asarray(tau, dtype=float) / r, -1.0, 1.0))
    theta_r = u - phase
    theta_f = math.pi - u - phase
    in_r = (theta_r >= m.lower) & (theta_r <= peak)
    in_f = (theta_f >= peak) & (theta_f <= m.upper)
    return theta_r, theta_f, in_r, in_f, peak


def branch_densities(d: CosPsiDistribution, tau) -> Tuple[np.ndarray, np.ndarray]:
    """Per-branch contributions (rising, falling) to the exact density."""
    tau = np.asarray(tau, dtype=float)
    theta_r, theta_f, in_r, in_f, _ = _branches(d, tau)
    lo, hi = d.support
    inside = (tau >= lo) & (tau <= hi)
    r = d.coeffs.r
    s = np.sqrt(np.maximum(r * r - tau * tau, 0.0))
    # the r endpoint is an integrable singularity; keep the value finite
    s = np.maximum(s, 1e-300)
    m = d.theta_model
    rise = np.where(inside & in_r, m.pdf(theta_r) / s, 0.0)
    fall = np.where(inside & in_f, m.pdf(theta_f) / s, 0.0)
    return rise, fall


def exact_density(d: CosPsiDistribution, tau):
    """Exact density with no support check (0 outside)."""
    rise, fall = branch_densities(d, tau)
    out = rise + fall
    return float(out) if out.ndim == 0 else out


def exact_pdf(d: CosPsiDistribution, tau):
    if not d.is_exact:
        raise ValidationError(f"{d.kind.value} is not an exact law", "kind in {ExactCase1, ExactCase2}")
    lo, hi = d.support
    t = np.asarray(tau, dtype=float)
    if np.any((t <= lo) | (t >= hi)):
        raise OutOfSupport(f"tau={tau} outside the open support ({lo}, {hi})")
    return exact_density(d, tau)


def exact_cdf(d: CosPsiDistribution, tau):
    """P(cos psi <= tau); defined for every real tau."""
    m = d.theta_model
    theta_r, theta_f, _, _, peak = _branches(d, tau)
    below = m.cdf(np.clip(theta_r, m.lower, peak))
    above = 1.0 - m.cdf(np.clip(theta_f, peak, m.upper))
    out = np.clip(below + above, 0.0, 1.0)
    out = np.where(np.asarray(tau) >= d.support[1], 1.0, out)
    out = np.where(np.asarray(tau) < d.support[0], 0.0, out)
    return float(out) if np.ndim(out) == 0 else out


def _theta_mass(d: CosPsiDistribution, t1: float, t2: float) -> float:
    """Integral of the exact density over [t1, t2] via tau = r sin(u)."""
    c, m = d.coeffs, d.theta_model
    r, phase = c.r, c.phase
    peak = min(max(c.theta_peak, m.lower), m.upper)
    u1 = math.asin(max(-1.0, min(1.0, t1 / r)))
    u2 = math.asin(max(-1.0, min(1.0, t2 / r)))
    if u2 <= u1:
        return 0.0

    def integrand(u):
        total = 0.0
        th = u - phase
        if m.lower <= th <= peak:
            total += m.pdf(th)
        th = math.pi - u - phase
        if peak <= th <= m.upper:
            total += m.pdf(th)
        return total

    # kinks where a branch enters/leaves the bounds or crosses mu_theta
    breaks = [
        m.lower + phase,
        peak + phase,
        math.pi - peak - phase,
        math.pi - m.upper - phase,
        m.mu_theta + phase,
        math.pi - m.mu_theta - phase,
    ]
    points = sorted(p for p in breaks if u1 < p < u2)
    value, _ = integrate.quad(integrand, u1, u2, points=points or None, limit=400, epsabs=1e-13, epsrel=1e-12)
    return value


def exact_mass(d: CosPsiDistribution, t1: Optional[float] = None, t2: Optional[float] = None) -> float:
    lo, hi = d.support
    return _theta_mass(d, lo if t1 is None else max(t1, lo), hi if t2 is None else min(t2, hi))


def sample_cos_psi(c: IncidenceCoeffs, m: OrientationModel, n: int, seed=None) -> np.ndarray:
    rng = np.random.default_rng(seed)
    theta = m.ppf(rng.random(n))
    return _g(c, theta)


# ---------------------------------------------------------------------------
# Truncated-Laplace approximation
# ---------------------------------------------------------------------------

def approx_params(c: IncidenceCoeffs, m: OrientationModel) -> Tuple[float, float, float]:
    """First-order (delta-method) Laplace law: returns (mu_hat, b_hat, tau_max)."""
    if m.family is not Family.LAPLACE:
        raise UnsupportedFamily(f"approximation is defined for Laplace theta, got {m.family.value}")
    mu = m.mu_theta
    mu_hat = c.a * math.sin(mu) + c.b * math.cos(mu)
    b_hat = m.scale * abs(c.a * math.cos(mu) - c.b * math.sin(mu))
    tau_max = c.b if c.a < 0 else c.r
    return mu_hat, b_hat, tau_max


def near_cw(c: IncidenceCoeffs, m: OrientationModel, eps: float = CW_EPSILON) -> bool:
    return approx_params(c, m)[1] < eps


def _approx_checked(c: IncidenceCoeffs, m: OrientationModel, tau):
    mu_hat, b_hat, tau_max = approx_params(c, m)
    if b_hat <= _SCALE_FLOOR:
        raise DegenerateScale(f"b_hat={b_hat}: cos(psi) collapses to a point mass at {mu_hat}", point_mass=mu_hat)
    t = np.asarray(tau, dtype=float)
    if np.any((t < -1.0) | (t > tau_max)):
        raise OutOfSupport(f"tau={tau} outside [-1, {tau_max}]")
    return t, mu_hat, b_hat, tau_max


def _delta(mu_hat: float, b_hat: float, tau_max: float) -> float:
    return b_hat * (2.0 - math.exp((mu_hat - tau_max) / b_hat) - math.exp((-1.0 - mu_hat) / b_hat))


def approx_density(c: IncidenceCoeffs, m: OrientationModel, tau):
    """Approximate density with no support check (0 outside [-1, tau_max])."""
    mu_hat, b_hat, tau_max = approx_params(c, m)
    if b_hat <= _SCALE_FLOOR:
        raise DegenerateScale(f"b_hat={b_hat}: cos(psi) collapses to a point mass at {mu_hat}", point_mass=mu_hat)
    t = np.asarray(tau, dtype=float)
    dens = np.exp(-np.abs(t - mu_hat) / b_hat) / _delta(mu_hat, b_hat, tau_max)
    out = np.where((t >= -1.0) & (t <= tau_max), dens, 0.0)
    return float(out) if out.ndim == 0 else out


def approx_pdf(c: IncidenceCoeffs, m: OrientationModel, tau):
    _approx_checked(c, m, tau)
    return approx_density(c, m, tau)


def _approx_cdf_unchecked(t: np.ndarray, mu_hat: float, b_hat: float, tau_max: float) -> np.ndarray:
    delta = _delta(mu_hat, b_hat, tau_max)
    tail = math.exp((-1.0 - mu_hat) / b_hat)
    left = b_hat * (np.exp(np.minimum(t - mu_hat, 0.0) / b_hat) - tail) / delta
    right = b_hat * (2.0 - tail - np.exp(-np.maximum(t - mu_hat, 0.0) / b_hat)) / delta
    return np.clip(np.where(t < mu_hat, left, right), 0.0, 1.0)


def approx_cdf(c: IncidenceCoeffs, m: OrientationModel, tau):
    t, mu_hat, b_hat, tau_max = _approx_checked(c, m, tau)
    out = _approx_cdf_unchecked(t, mu_hat, b_hat, tau_max)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Distribution-level dispatch (used by the channel module and tabulation)
# ---------------------------------------------------------------------------

def density(d: CosPsiDistribution, tau):
    """Continuous density of either kind, 0 outside the support."""
    if d.is_exact:
        return exact_density(d, tau)
    return approx_density(d.coeffs, d.theta_model, tau)


def cdf(d: CosPsiDistribution, tau):
    """CDF of either kind, clipped to 0/1 outside the support."""
    if d.is_exact:
        return exact_cdf(d, tau)
    lo, hi = d.support
    t = np.clip(np.asarray(tau, dtype=float), lo, hi)
    if d.b_hat <= _SCALE_FLOOR:
        out = np.where(np.asarray(tau) >= d.mu_hat, 1.0, 0.0)
    else:
        out = _approx_cdf_unchecked(t, d.mu_hat, d.b_hat, hi)
    out = np.where(np.asarray(tau) < lo, 0.0, np.where(np.asarray(tau) >= hi, 1.0, out))
    return float(out) if np.ndim(out) == 0 else out


def exact_vs_approx_ksd(c: IncidenceCoeffs, m: OrientationModel, n_grid: int = 4001) -> float:
    exact = cos_psi_distribution(c, m)
    approx = cos_psi_distribution(c, m, approximate=True)
    lo, hi = exact.support
    spread = max(approx.b_hat, 1e-6)
    grid = np.unique(np.concatenate([
        np.linspace(lo, hi, n_grid),
        np.linspace(max(-1.0, approx.mu_hat - 20 * spread), min(approx.ss_f, approx.mu_hat + 20 * spread), n_grid),
    ]))
    return float(np.max(np.abs(cdf(exact, grid) - cdf(approx, grid))))


def grid_average_ksd(
    ap,
    omega: float,
    m: OrientationModel,
    half_width: float = 5.0,
    n: int = 10,
    z_u: float = 0.0,
    eps: float = CW_EPSILON,
) -> Tuple[float, int]:
    """
    Mean exact-vs-approximate KSD over an n x n grid of UE cell centers covering
    [-half_width, half_width]^2. Points inside the C_w band are skipped.
    Returns (mean KSD, number of points used).
    """
    edges = np.linspace(-half_width, half_width, n + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    values = []
    for x in centers:
        for y in centers:
            c = coefficients(LinkGeometry(ap, (x, y, z_u), omega))
            if near_cw(c, m, eps):
                continue
            values.append(exact_vs_approx_ksd(c, m))
    return float(np.mean(values)), len(values)


# ---------------------------------------------------------------------------
# C_w locus
# ---------------------------------------------------------------------------

def cw_locus(ap, z_u: float, omega: float, x_delta: float, y_delta: float, m: OrientationModel) -> Tuple[float, float, float]:
    """UE position whose mean orientation faces the AP (b_hat = 0 when x/y_delta = 0)."""
    if not 0.0 < m.mu_theta < 0.5 * math.pi:
        raise ValidationError(f"mu_theta={m.mu_theta}", "0 < mu_theta < pi/2")
    xa, ya, za = ap
    reach = (za - z_u) * math.tan(m.mu_theta)
    return (xa + reach * math.cos(omega) + x_delta, ya + reach * math.sin(omega) + y_delta, z_u)


# ---------------------------------------------------------------------------
# Monotonicity checks
# ---------------------------------------------------------------------------

def _monotone(values: np.ndarray, increasing: bool) -> bool:
    if values.size < 2:
        return True
    steps = np.diff(values)
    tol = 1e-9 * float(np.max(np.abs(values)))
    return bool(np.all(steps >= -tol)) if increasing else bool(np.all(steps <= tol))


def _open_grid(lo: float, hi: float, n: int) -> np.ndarray:
    if hi <= lo:
        return np.empty(0)
    pad = 1e-7 * (hi - lo)
    return np.linspace(lo + pad, hi - pad, n)


@dataclass(frozen=True)
class Proposition1Report:
    condition_met: bool
    bound: float
    tau_star: Optional[float]
    increasing_below_peak: bool
    decreasing_above_peak: bool
    continuous_at_peak: bool
    c1_positive: bool
    c2_negative: bool
    peak_density: Optional[float]

    @property
    def passed(self) -> bool:
        return (
            self.condition_met
            and self.increasing_below_peak
            and self.decreasing_above_peak
            and self.continuous_at_peak
            and self.c1_positive
            and self.c2_negative
        )


def _continuous_at(d: CosPsiDistribution, tau: float) -> bool:
    lo, hi = d.support
    if not lo < tau < hi:
        return True
    # the density blows up like 1/sqrt(r - tau) near r, so the offset shrinks with the edge distance
    eps = 1e-9 * min(hi - lo, tau - lo, hi - tau)
    left, right = exact_density(d, tau - eps), exact_density(d, tau + eps)
    return abs(left - right) <= 1e-5 * max(abs(left), abs(right))


def verify_proposition1(
    c: IncidenceCoeffs, m: OrientationModel, n_grid: int = 400, strict: bool = False
) -> Proposition1Report:
    """
    Single-branch case (a < 0): the density rises on (a, tau*), falls on
    (tau*, b) and tau* is the global maximum whenever
    b_theta < min(-b/a, -a/b).
    """
    if c.a >= 0:
        raise ValidationError(f"a={c.a}", "a < 0")
    if m.family is not Family.LAPLACE:
        raise UnsupportedFamily(f"monotonicity conditions assume Laplace theta, got {m.family.value}")

    bound = min(-c.b / c.a, -c.a / c.b)
    condition_met = m.scale < bound
    if strict and not condition_met:
        raise ConditionUnmet(f"b_theta={m.scale} is not below {bound}")

    d = cos_psi_distribution(c, m)
    lo, hi = d.support
    peak = d.tau_star
    r2 = c.r * c.r
    b_theta = m.scale

    if peak is None:
        below = _open_grid(lo, hi, n_grid)
        above = np.empty(0)
    else:
        below = _open_grid(lo, peak, n_grid)
        above = _open_grid(peak, hi, n_grid)

    s_below = np.sqrt(r2 - below ** 2)
    s_above = np.sqrt(r2 - above ** 2)
    c1 = r2 + below * (-below + b_theta * s_below)
    c2 = -(r2 - above * (above + b_theta * s_above))

    return Proposition1Report(
        condition_met=condition_met,
        bound=bound,
        tau_star=peak,
        increasing_below_peak=_monotone(exact_density(d, below), increasing=True),
        decreasing_above_peak=_monotone(exact_density(d, above), increasing=False),
        continuous_at_peak=peak is not None and _continuous_at(d, peak),
        c1_positive=bool(np.all(c1 > 0)),
        c2_negative=bool(np.all(c2 < 0)),
        peak_density=None if peak is None else exact_density(d, peak),
    )


@dataclass(frozen=True)
class Proposition2Report:
    tau_star: Optional[float]
    tau_d: float
    ordered: bool
    increasing_lower_tail: bool
    decreasing_after_peak: bool
    increasing_upper_tail: bool
    continuous_at_peak: bool

    @property
    def monotone_increasing(self) -> bool:
        """No interior maximum: tau* is absent or lies past tau_d."""
        return (self.tau_star is None or not self.ordered) and self.increasing_lower_tail and self.increasing_upper_tail

    @property
    def passed(self) -> bool:
        if self.tau_star is None:
            return self.increasing_lower_tail
        shape = self.decreasing_after_peak if self.ordered else True
        return self.increasing_lower_tail and shape and self.increasing_upper_tail and self.continuous_at_peak


def verify_proposition2(c: IncidenceCoeffs, m: OrientationModel, n_grid: int = 400) -> Proposition2Report:
    """
    Two-branch case (a >= 0): the density rises from min(a, b) up to tau*.
    When tau* < tau_d < r, with tau_d = r / sqrt(1 + b_theta^2), the branch
    carrying mu_theta falls on (tau*, tau_d) and everything rises again on
    (tau_d, r); when tau_d <= tau* it rises all the way to r. Without tau*
    (UE on C_w) the density rises all the way to r.
    """
    if c.a < 0:
        raise ValidationError(f"a={c.a}", "a >= 0")
    if m.family is not Family.LAPLACE:
        raise UnsupportedFamily(f"monotonicity conditions assume Laplace theta, got {m.family.value}")

    d = cos_psi_distribution(c, m)
    lo, hi = d.support
    peak = d.tau_star
    tau_d = c.r / math.sqrt(1.0 + m.scale ** 2)

    if peak is None:
        grid = _open_grid(lo, hi, n_grid)
        return Proposition2Report(
            tau_star=None,
            tau_d=tau_d,
            ordered=False,
            increasing_lower_tail=_monotone(exact_density(d, grid), increasing=True),
            decreasing_after_peak=True,
            increasing_upper_tail=True,
            continuous_at_peak=True,
        )

    ordered = peak < tau_d < c.r
    lower = _open_grid(lo, peak, n_grid)
    upper = _open_grid(tau_d if ordered else peak, hi, n_grid)
    decreasing = True
    if ordered:
        # the other branch keeps rising past tau*, so only the peak branch is checked there
        rise, fall = branch_densities(d, _open_grid(peak, tau_d, n_grid))
        decreasing = _monotone(fall if m.mu_theta >= c.theta_peak else rise, increasing=False)

    return Proposition2Report(
        tau_star=peak,
        tau_d=tau_d,
        ordered=ordered,
        increasing_lower_tail=_monotone(exact_density(d, lower), increasing=True),
        decreasing_after_peak=decreasing,
        increasing_upper_tail=_monotone(exact_density(d, upper), increasing=True),
        continuous_at_peak=_continuous_at(d, peak),
    )
