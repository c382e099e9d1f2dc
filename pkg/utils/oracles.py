"""
Oracle suite behind the validate scenario.

Every check compares a closed form against an independent computation
(Monte Carlo, quadrature or a structural identity) and yields one
OracleResult per measured statistic. run_validation prints a ✓/✗ line per
result and returns them in registry order.
"""
import math
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np
from scipy import integrate, stats
from statsmodels.tsa.stattools import acf

from classes.errors import ValidationError
from classes.link import ChannelParams, GainDistribution, IncidenceCoeffs, LinkGeometry
from classes.mobility import MobilityMode
from classes.orientation import DeviceMode, OrientationModel
from classes.run_config import RunConfig, TableArtifact
from utils import channel, incidence, mobility
from utils.orientation_stats import ksd_with_atom
from utils.rotation import facing_angle, omega_hat, polar_angles, rotated_normals, wrap_to_pi

ORACLE_COLUMNS = ("check", "statistic", "threshold", "passed")

# E[D]/L for random waypoints in a square room
RWP_MEAN_DISTANCE = 0.5214
RWP_TOLERANCE = 0.003
AR1_ACF_BAND = 0.02
N_GEOMETRY_SAMPLES = 100_000

DIRAC_UE = (-1.0, -1.0)
DIRAC_OMEGA = 0.25 * math.pi


@dataclass(frozen=True)
class OracleResult:
    check: str
    statistic: float
    threshold: float
    passed: bool

    def row(self) -> tuple:
        return (self.check, self.statistic, self.threshold, self.passed)


def _at_most(check: str, statistic: float, threshold: float) -> OracleResult:
    return OracleResult(check, float(statistic), float(threshold), bool(statistic <= threshold))


# ---------------------------------------------------------------------------
# Random geometries
# ---------------------------------------------------------------------------

def random_geometry(rng: np.random.Generator, sign: int, ap=(0.0, 0.0, 2.0), room: float = 5.0) -> LinkGeometry:
    """
    A UE somewhere in the room with a facing angle chosen so that a < 0
    (sign=-1, facing the AP), a ~ 0 (sign=0, AP to the side) or a > 0
    (sign=+1, AP behind).
    """
    while True:
        x, y = rng.uniform(-room, room, size=2)
        bearing = math.atan2(ap[1] - y, ap[0] - x)
        if math.hypot(ap[0] - x, ap[1] - y) > 0.1:
            break
    if sign < 0:
        offset = rng.uniform(-math.pi / 3, math.pi / 3)
    elif sign > 0:
        offset = math.pi + rng.uniform(-math.pi / 3, math.pi / 3)
    else:
        offset = 0.5 * math.pi + rng.uniform(-1e-3, 1e-3)
    return LinkGeometry(ap, (x, y, 0.0), float(np.mod(bearing + offset, 2.0 * math.pi)))


def spanning_geometries(n: int, rng: np.random.Generator, ap=(0.0, 0.0, 2.0)) -> List[LinkGeometry]:
    """n geometries cycling through a < 0, a ~ 0 and a > 0."""
    return [random_geometry(rng, (-1, 0, 1)[i % 3], ap) for i in range(n)]


# ---------------------------------------------------------------------------
# Individual checks
# ---------------------------------------------------------------------------

def check_lambertian(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    m = channel.lambertian_order(math.radians(60.0))
    return [_at_most("lambertian_order_60deg", abs(m - 1.0), 0.0)]


def check_geometry(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    n = N_GEOMETRY_SAMPLES
    alpha = rng.uniform(0.0, 2.0 * math.pi, n)
    beta = rng.uniform(-math.pi, math.pi, n)
    gamma = rng.uniform(-0.5 * math.pi, 0.5 * math.pi, n)
    normals = rotated_normals(alpha, beta, gamma)
    to_vertical = np.arctan2(np.hypot(normals[:, 0], normals[:, 1]), normals[:, 2])
    polar_error = float(np.max(np.abs(polar_angles(beta, gamma) - to_vertical)))

    facing_error = 0.0
    for mode in DeviceMode:
        for a in alpha[:1000]:
            gap = wrap_to_pi(facing_angle(a, mode) - omega_hat(a, mode))
            facing_error = max(facing_error, abs(abs(gap) - math.pi))
    return [
        _at_most("polar_angle_vs_normal", polar_error, 1e-12),
        _at_most("facing_minus_azimuth_is_pi", facing_error, 1e-12),
    ]


def _snr_mass(dist: GainDistribution, p: ChannelParams) -> float:
    """Dirac mass plus the SNR density integrated with s = S0 (h_n r sin u)^2."""
    if dist.collapsed:
        return 1.0
    f = dist.cos_psi
    c, m = f.coeffs, f.theta_model
    r, h_n, s0 = c.r, dist.h_n, channel.snr_scale(p)
    lo = max(f.support[0], dist.cos_fov, 0.0)
    hi = f.support[1]
    if hi <= lo:
        return dist.dirac_mass
    u1, u2 = math.asin(min(lo / r, 1.0)), math.asin(min(hi / r, 1.0))

    def integrand(u):
        h = h_n * r * math.sin(u)
        s = s0 * h * h
        if s <= 0.0:
            return 0.0
        ds_du = 2.0 * s0 * (h_n * r) ** 2 * math.sin(u) * math.cos(u)
        return float(channel.snr_pdf(dist, p, s)) * ds_du

    kinks = [c.a * math.sin(t) + c.b * math.cos(t) for t in (m.lower, m.upper, m.mu_theta)]
    if f.mu_hat is not None:
        kinks.append(f.mu_hat)
    points = sorted({math.asin(max(-1.0, min(1.0, k / r))) for k in kinks} - {u1, u2})
    points = [u for u in points if u1 < u < u2]
    value, _ = integrate.quad(integrand, u1, u2, points=points or None, limit=400, epsabs=1e-11, epsrel=1e-9)
    return dist.dirac_mass + value


def check_normalization(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    tol = cfg.tolerances
    model = cfg.sitting.to_model()
    params = cfg.channel.to_params()
    worst = {"cospsi_exact": 0.0, "cospsi_approx": 0.0, "gain": 0.0, "snr": 0.0}
    for g in spanning_geometries(tol.n_geometries, rng, cfg.geometry.ap):
        c = incidence.coefficients(g)
        exact = incidence.cos_psi_distribution(c, model)
        worst["cospsi_exact"] = max(worst["cospsi_exact"], abs(incidence.exact_mass(exact) - 1.0))
        laws = [channel.gain_distribution(g, params, model, approximate=False)]
        if not incidence.near_cw(c, model):
            approx = incidence.cos_psi_distribution(c, model, approximate=True)
            points = [approx.mu_hat] if -1.0 < approx.mu_hat < approx.ss_f else None
            mass = integrate.quad(
                lambda t: incidence.density(approx, t), -1.0, approx.ss_f, points=points, limit=400, epsabs=1e-13
            )[0]
            worst["cospsi_approx"] = max(worst["cospsi_approx"], abs(mass - 1.0))
            laws.append(channel.gain_distribution(g, params, model, approximate=True))
        for dist in laws:
            worst["gain"] = max(worst["gain"], abs(channel.gain_total_mass(dist) - 1.0))
            worst["snr"] = max(worst["snr"], abs(_snr_mass(dist, params) - 1.0))
    return [_at_most(f"normalization_{name}", value, tol.quadrature) for name, value in worst.items()]


def check_transformation(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    """Empirical CDFs of sampled cos(psi), gain and SNR against the exact laws."""
    tol = cfg.tolerances
    model = cfg.sitting.to_model()
    params = cfg.channel.to_params()
    worst = {"cospsi": 0.0, "gain": 0.0, "snr": 0.0}
    for g in spanning_geometries(tol.n_geometries, rng, cfg.geometry.ap):
        c = incidence.coefficients(g)
        d = incidence.cos_psi_distribution(c, model)
        seed = int(rng.integers(2 ** 32))
        tau = incidence.sample_cos_psi(c, model, tol.n_samples, seed=seed)
        worst["cospsi"] = max(worst["cospsi"], stats.kstest(tau, lambda t: incidence.exact_cdf(d, t)).statistic)

        dist = channel.gain_distribution(g, params, model, approximate=False)
        h = channel.sample_gain(g, params, model, tol.n_samples, seed=seed)
        worst["gain"] = max(worst["gain"], ksd_with_atom(h, lambda x: channel.gain_cdf(dist, x)))
        s = channel.snr_of_gain(h, params)
        worst["snr"] = max(worst["snr"], ksd_with_atom(s, lambda x: channel.snr_cdf(dist, params, x)))
    return [_at_most(f"transformation_{name}_ksd", value, tol.ksd) for name, value in worst.items()]


def check_grid_ksd(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    mean_ksd, _ = incidence.grid_average_ksd(cfg.geometry.ap, 0.25 * math.pi, cfg.sitting.to_model())
    return [_at_most("grid_average_exact_vs_approx_ksd", mean_ksd, cfg.tolerances.approx_grid_ksd)]


def _proposition1_geometry(rng: np.random.Generator, model: OrientationModel, ap) -> IncidenceCoeffs:
    while True:
        c = incidence.coefficients(random_geometry(rng, -1, ap))
        if c.a < 0 and model.scale < min(-c.b / c.a, -c.a / c.b):
            return c


def check_propositions(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    model = cfg.sitting.to_model()
    n = cfg.tolerances.n_proposition_geometries
    ap = cfg.geometry.ap
    failed_single = sum(
        not incidence.verify_proposition1(_proposition1_geometry(rng, model, ap), model).passed for _ in range(n)
    )
    failed_double = 0
    for _ in range(n):
        c = incidence.coefficients(random_geometry(rng, 1, ap))
        failed_double += not incidence.verify_proposition2(c, model).passed
    return [
        _at_most("single_branch_shape_failures", failed_single, 0),
        _at_most("two_branch_shape_failures", failed_double, 0),
    ]


def check_rwp(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    ratio = mobility.expected_transition_length(1.0, cfg.tolerances.n_samples, seed=int(rng.integers(2 ** 32)))
    return [_at_most("rwp_mean_distance_over_L", abs(ratio - RWP_MEAN_DISTANCE), RWP_TOLERANCE)]


def check_ar1(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    walking = cfg.walking.to_model()
    ts, tc = cfg.orwp.ts_s, cfg.orwp.tc_s
    p = mobility.ar1_from_stats(walking.mu_theta, walking.sigma, ts, tc)
    n = cfg.tolerances.n_samples
    theta = mobility.theta_series(p, n, rng)

    c1 = p.c1
    sigma = p.stationary_std
    se_mean = sigma / math.sqrt(n) * math.sqrt((1.0 + c1) / (1.0 - c1))
    se_var = sigma ** 2 * math.sqrt(2.0 / n * (1.0 + c1 * c1) / (1.0 - c1 * c1))
    z_mean = abs(float(np.mean(theta)) - p.stationary_mean) / se_mean
    z_var = abs(float(np.var(theta)) - sigma ** 2) / se_var

    lag = int(round(tc / ts))
    r = acf(theta, nlags=lag, fft=True)[lag]

    # theta as the trajectory sees it, one sample per position step
    sampled = mobility.theta_at(p, np.arange(n // 2) * tc, ts, rng)
    r_sampled = acf(sampled, nlags=1, fft=True)[1]
    return [
        _at_most("ar1_mean_z", z_mean, cfg.tolerances.moment_se),
        _at_most("ar1_variance_z", z_var, cfg.tolerances.moment_se),
        _at_most("ar1_acf_at_coherence_lag", abs(r - mobility.COHERENCE_LEVEL), AR1_ACF_BAND),
        _at_most("ar1_acf_between_position_samples", abs(r_sampled - mobility.COHERENCE_LEVEL), AR1_ACF_BAND),
    ]


def _violations(pairs: Iterable[tuple]) -> int:
    return sum(not (earlier > later) for earlier, later in pairs)


def check_handover(cfg: RunConfig, rng: np.random.Generator, show_progress: bool = False) -> List[OracleResult]:
    """Ordering properties of the sweep; each statistic counts violated orderings."""
    o = cfg.orwp
    base = o.base_config(cfg.walking.to_model(), cfg.seed)
    modes = [MobilityMode(mode) for mode in o.modes]
    results = mobility.handover_sweep(
        base, o.room_lengths, o.speeds, modes, o.n_runs, params=cfg.channel.to_params(), show_progress=show_progress
    )
    rate = {(r.room_length, r.speed, r.mode): r.rate_hz for r in results}
    lengths, speeds = sorted(o.room_lengths), sorted(o.speeds)

    in_length = _violations(
        (rate[(lengths[i], v, mode)], rate[(lengths[i + 1], v, mode)])
        for mode in modes for v in speeds for i in range(len(lengths) - 1)
    )
    in_speed = _violations(
        (rate[(L, speeds[i + 1], mode)], rate[(L, speeds[i], mode)])
        for mode in modes for L in lengths for i in range(len(speeds) - 1)
    )
    out = [
        _at_most("handover_decreasing_in_L_violations", in_length, 0),
        _at_most("handover_increasing_in_v_violations", in_speed, 0),
    ]
    if {MobilityMode.ORWP_GAUSSIAN, MobilityMode.VERTICAL_UPWARD} <= set(modes):
        gap = {
            (L, v): rate[(L, v, MobilityMode.ORWP_GAUSSIAN)] - rate[(L, v, MobilityMode.VERTICAL_UPWARD)]
            for L in lengths for v in speeds
        }
        above = sum(value <= 0.0 for value in gap.values())
        shrinking = _violations(
            (gap[(lengths[i], v)], gap[(lengths[i + 1], v)]) for v in speeds for i in range(len(lengths) - 1)
        )
        out += [
            _at_most("orwp_above_vertical_violations", above, 0),
            _at_most("mode_gap_decreasing_in_L_violations", shrinking, 0),
        ]
    return out


def check_dirac(cfg: RunConfig, rng: np.random.Generator) -> List[OracleResult]:
    tol = cfg.tolerances
    model = cfg.sitting.to_model()
    params = cfg.channel.to_params()
    g = LinkGeometry(cfg.geometry.ap, (DIRAC_UE[0], DIRAC_UE[1], cfg.geometry.ue_height), DIRAC_OMEGA)
    exact = channel.gain_distribution(g, params, model, approximate=False).dirac_mass
    approx = channel.gain_distribution(g, params, model, approximate=True).dirac_mass
    sampled = channel.sample_gain(g, params, model, tol.n_samples, seed=int(rng.integers(2 ** 32)))
    empirical = float(np.mean(sampled == 0.0))
    return [
        _at_most("dirac_exact_vs_monte_carlo", abs(exact - empirical), tol.ksd),
        _at_most("dirac_approx_vs_monte_carlo", abs(approx - empirical), tol.ksd),
        _at_most("dirac_plausibility_band", abs(exact - tol.dirac_reference), tol.dirac_band),
    ]


ORACLES: Dict[str, Callable[[RunConfig, np.random.Generator], List[OracleResult]]] = {
    "lambertian": check_lambertian,
    "geometry": check_geometry,
    "normalization": check_normalization,
    "transformation": check_transformation,
    "grid_ksd": check_grid_ksd,
    "propositions": check_propositions,
    "rwp": check_rwp,
    "ar1": check_ar1,
    "handover": check_handover,
    "dirac": check_dirac,
}


def run_validation(cfg: RunConfig, only: Optional[Iterable[str]] = None, verbose: bool = True) -> List[OracleResult]:
    """
    Run the selected oracle groups (all by default). Each group draws from its
    own stream seeded by (cfg.seed, group index), so a group's numbers do not
    depend on which other groups run.
    """
    names = list(ORACLES) if only is None else list(only)
    unknown = [name for name in names if name not in ORACLES]
    if unknown:
        raise ValidationError(f"unknown oracle group(s): {unknown}", f"group in {sorted(ORACLES)}")

    results: List[OracleResult] = []
    for index, name in enumerate(ORACLES):
        if name not in names:
            continue
        rng = np.random.default_rng([cfg.seed, index])
        for result in ORACLES[name](cfg, rng):
            if verbose:
                mark = "✓" if result.passed else "✗"
                print(f"  {mark} {result.check}: {result.statistic:.6g} (threshold {result.threshold:g})")
            results.append(result)
    return results


def validation_table(results: List[OracleResult], provenance: Dict) -> TableArtifact:
    return TableArtifact("validate", ORACLE_COLUMNS, [r.row() for r in results], provenance)
