"""
ORWP mobility and handover rate.

 Group 1: AR(1) polar angle
   Coefficients from stationary statistics, timing errors, moments and
   autocorrelation of the generated series
 Group 2: waypoints and legs
   Mean transition length, leg sampling, quadrant APs, config validation
 Group 3: serving AP and trajectories
   Argmax selection, ties, sticky all-zero rows, handover margin and
   time-to-trigger, quadrant start, theta decorrelation between position
   samples, trajectory structure, CSV
 Group 4: handover rate
   Reproducibility, speed and room-length trends, sweep layout, orderings
   over the full sweep
"""
import csv
import math

import numpy as np
import pytest
from statsmodels.tsa.stattools import acf

from classes.errors import InvalidConfig, InvalidTiming, ValidationError
from classes.link import ChannelParams
from classes.mobility import Ar1Params, MobilityMode, OrwpConfig, quadrant_aps
from classes.orientation import OrientationModel
from utils import mobility


# ── Shared fixtures ───────────────────────────────────────────────────────────

_TS, _TC = 0.013, 0.130
_MEAN, _STD = math.radians(29.67), math.radians(7.78)
_PARAMS = ChannelParams()


def _cfg(room_length=8.0, speed=1.4, seed=3, **kwargs):
    return OrwpConfig(room_length=room_length, speed=speed, seed=seed, **kwargs)


# ── Group 1: AR(1) polar angle ────────────────────────────────────────────────

def test_ar1_coefficients_from_stationary_statistics():
    p = mobility.ar1_from_stats(_MEAN, _STD, _TS, _TC)
    assert p.c1 == pytest.approx(0.05 ** 0.1)
    assert p.c1 ** 10 == pytest.approx(mobility.COHERENCE_LEVEL)
    assert p.stationary_mean == pytest.approx(_MEAN)
    assert p.stationary_std == pytest.approx(_STD)


@pytest.mark.parametrize(
    "std, ts, tc",
    [
        (_STD, 0.2, 0.1),
        (_STD, 0.0, 0.1),
        (0.0, _TS, _TC),
    ],
)
def test_ar1_timing_errors(std, ts, tc):
    with pytest.raises(InvalidTiming):
        mobility.ar1_from_stats(_MEAN, std, ts, tc)


def test_ar1_params_must_be_stationary():
    with pytest.raises(ValidationError):
        Ar1Params(c0=0.1, c1=1.0, sigma_w=0.1)
    with pytest.raises(ValidationError):
        Ar1Params(c0=0.1, c1=0.5, sigma_w=0.0)


def test_theta_series_moments():
    p = mobility.ar1_from_stats(_MEAN, _STD, _TS, _TC)
    theta = mobility.theta_series(p, 200_000, np.random.default_rng(1))
    assert float(np.mean(theta)) == pytest.approx(_MEAN, abs=0.004)
    assert float(np.std(theta)) == pytest.approx(_STD, abs=0.004)


def test_theta_series_decorrelates_at_coherence_time():
    p = mobility.ar1_from_stats(_MEAN, _STD, _TS, _TC)
    theta = mobility.theta_series(p, 200_000, np.random.default_rng(2))
    lag = round(_TC / _TS)
    assert acf(theta, nlags=lag, fft=True)[lag] == pytest.approx(0.05, abs=0.02)


def test_theta_series_stays_in_range():
    p = mobility.ar1_from_stats(0.1, 0.2, _TS, _TC)
    theta = mobility.theta_series(p, 50_000, np.random.default_rng(3))
    assert theta.min() >= 0.0 and theta.max() <= 0.5 * math.pi
    assert mobility.theta_series(p, 0, np.random.default_rng(3)).size == 0


def test_theta_at_steps_the_fine_process_between_samples():
    p = mobility.ar1_from_stats(_MEAN, _STD, _TS, _TC)
    times = np.array([0.0, _TC, 2 * _TC, 2 * _TC + 0.004, 2 * _TC + 0.03])
    theta = mobility.theta_at(p, times, _TS, np.random.default_rng(4))
    assert theta.shape == times.shape
    # same draws as a plain series of 1 + 10 + 10 + 1 + 2 steps
    fine = mobility.theta_series(p, 24, np.random.default_rng(4))
    np.testing.assert_allclose(theta, fine[[0, 10, 20, 21, 23]])
    assert mobility.theta_at(p, np.empty(0), _TS, np.random.default_rng(4)).size == 0


def test_theta_at_position_rate_is_nearly_uncorrelated():
    p = mobility.ar1_from_stats(_MEAN, _STD, _TS, _TC)
    theta = mobility.theta_at(p, np.arange(50_000) * _TC, _TS, np.random.default_rng(5))
    assert acf(theta, nlags=1, fft=True)[1] == pytest.approx(mobility.COHERENCE_LEVEL, abs=0.02)


def test_single_step_is_clamped():
    p = mobility.ar1_from_stats(_MEAN, _STD, _TS, _TC)
    rng = np.random.default_rng(0)
    assert all(0.0 <= mobility.ar1_step(p, 1.55, rng) <= 0.5 * math.pi for _ in range(1000))


# ── Group 2: waypoints and legs ───────────────────────────────────────────────

def test_mean_transition_length_in_unit_square():
    assert mobility.expected_transition_length(1.0, 200_000, seed=0) == pytest.approx(0.5214, abs=0.003)


def test_mean_transition_length_scales_with_room():
    small = mobility.expected_transition_length(1.0, 10_000, seed=4)
    large = mobility.expected_transition_length(8.0, 10_000, seed=4)
    assert large == pytest.approx(small, rel=1e-9)


def test_waypoints_stay_in_room():
    rng = np.random.default_rng(5)
    points = np.array([mobility.draw_waypoint(6.0, rng) for _ in range(2000)])
    assert np.all(np.abs(points) <= 3.0)


def test_leg_samples_and_remainder():
    positions, times, omega = mobility._leg(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 1.0, 0.13)
    assert omega == pytest.approx(math.atan2(4.0, 3.0))
    assert len(positions) == 39
    np.testing.assert_allclose(positions[-1], [3.0, 4.0])
    assert times[-1] == pytest.approx(5.0)
    np.testing.assert_allclose(np.diff(times[:-1]), 0.13)
    np.testing.assert_allclose(np.linalg.norm(positions[0]), 0.13)


def test_leg_of_whole_steps_ends_on_waypoint():
    positions, times, _ = mobility._leg(np.array([0.0, 0.0]), np.array([1.0, 0.0]), 1.0, 0.25)
    assert len(positions) == 4
    np.testing.assert_allclose(positions[-1], [1.0, 0.0])
    np.testing.assert_allclose(times, [0.25, 0.5, 0.75, 1.0])


def test_zero_length_leg_has_no_samples():
    positions, times, _ = mobility._leg(np.array([1.0, 1.0]), np.array([1.0, 1.0]), 1.0, 0.13)
    assert positions.shape == (0, 2) and times.size == 0


def test_quadrant_aps():
    assert quadrant_aps(8.0) == ((2.0, 2.0, 2.0), (-2.0, 2.0, 2.0), (-2.0, -2.0, 2.0), (2.0, -2.0, 2.0))


def test_config_defaults_and_rescaling():
    cfg = _cfg(room_length=8.0)
    assert cfg.ap_positions == quadrant_aps(8.0)
    assert cfg.step_length == pytest.approx(1.4 * 0.13)
    moved = cfg.with_point(16.0, 2.0)
    assert moved.ap_positions == quadrant_aps(16.0)
    assert moved.speed == 2.0 and moved.seed == cfg.seed
    assert cfg.init_serving == "quadrant"
    assert cfg.margin_ratio == pytest.approx(10.0 ** 0.5)


def test_custom_aps_survive_a_new_sweep_point():
    aps = ((0.0, 0.0, 2.5), (3.0, 0.0, 2.5))
    moved = _cfg(ap_positions=aps).with_point(16.0, 2.0)
    assert moved.ap_positions == aps
    assert moved.room_length == 16.0


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(speed=0.0),
        dict(room_length=-1.0),
        dict(ts=0.2, tc_theta=0.1),
        dict(ap_positions=((0.0, 0.0, 0.0),)),
        dict(init_serving="nearest"),
        dict(handover_margin_db=-1.0),
        dict(time_to_trigger=0),
        dict(time_to_trigger=1.5),
    ],
)
def test_config_errors(kwargs):
    base = dict(room_length=8.0, speed=1.4)
    base.update(kwargs)
    with pytest.raises(InvalidConfig):
        OrwpConfig(**base)


# ── Group 3: serving AP and trajectories ──────────────────────────────────────

def test_serving_ap_is_strongest_link():
    aps = quadrant_aps(8.0)
    assert mobility.serving_ap((2.5, 2.0), 0.0, 0.0, aps, _PARAMS) == 0
    assert mobility.serving_ap((-2.5, -1.0), 0.0, 0.0, aps, _PARAMS) == 2


def test_serving_ap_tie_goes_to_lowest_index():
    assert mobility.serving_ap((0.0, 2.0), 0.0, 0.0, quadrant_aps(8.0), _PARAMS) == 0


def test_serving_ap_keeps_previous_when_all_gains_vanish():
    narrow = ChannelParams(fov=math.pi / 6)
    aps = quadrant_aps(8.0)
    assert mobility.serving_ap((0.0, 0.0), 0.0, 0.0, aps, narrow, previous=2) == 2
    assert mobility.serving_ap((0.0, 0.0), 0.0, 0.0, aps, narrow) == 0


def test_serving_ap_needs_aps():
    with pytest.raises(InvalidConfig):
        mobility.serving_ap((0.0, 0.0), 0.0, 0.0, (), _PARAMS)


def test_tilt_can_select_a_farther_ap():
    rng = np.random.default_rng(12)
    n = 20_000
    aps = quadrant_aps(8.0)
    positions = rng.uniform(-4.0, 4.0, (n, 2))
    theta = OrientationModel.walking().ppf(rng.random(n))
    omega = rng.uniform(0.0, 2.0 * math.pi, n)
    gains = mobility._gain_matrix(positions, theta, omega, aps, _PARAMS, 0.0)
    centers = np.asarray(aps)[:, :2]
    nearest = np.argmin(np.linalg.norm(positions[:, None, :] - centers[None], axis=2), axis=1)
    assert np.mean(np.argmax(gains, axis=1) != nearest) > 0.0


def test_serving_sequence_is_sticky_on_zero_rows():
    gains = np.array([[0.0, 1.0], [0.0, 0.0], [2.0, 1.0], [0.0, 0.0]])
    np.testing.assert_array_equal(mobility._serving_sequence(gains, 1), [1, 1, 0, 0])


def test_margin_and_time_to_trigger_delay_the_switch():
    gains = np.array([[1.0, 0.0], [1.0, 2.0], [1.0, 4.0], [1.0, 4.0], [1.0, 4.0], [1.0, 2.0]])
    np.testing.assert_array_equal(mobility._serving_sequence(gains, 0), [0, 1, 1, 1, 1, 1])
    np.testing.assert_array_equal(mobility._serving_sequence(gains, 0, 3.0, 1), [0, 0, 1, 1, 1, 1])
    np.testing.assert_array_equal(mobility._serving_sequence(gains, 0, 3.0, 2), [0, 0, 0, 1, 1, 1])
    np.testing.assert_array_equal(mobility._serving_sequence(gains, 0, 3.0, 4), [0, 0, 0, 0, 0, 0])


def test_time_to_trigger_restarts_when_the_candidate_changes():
    gains = np.array([[1.0, 0.0, 0.0], [0.0, 2.0, 1.0], [0.0, 1.0, 2.0], [0.0, 1.0, 2.0]])
    np.testing.assert_array_equal(mobility._serving_sequence(gains, 0, 1.0, 2), [0, 0, 0, 2])


def test_trajectory_structure():
    cfg = _cfg()
    traj = mobility.generate_trajectory(cfg, 5, rng=np.random.default_rng(7))
    assert len(traj) == traj.x.size == traj.theta.size == traj.serving_ap.size
    assert traj.waypoints.shape == (6, 2)
    assert traj.t[0] == 0.0 and np.all(np.diff(traj.t) > 0.0)
    np.testing.assert_allclose([traj.x[-1], traj.y[-1]], traj.waypoints[-1])
    assert np.all(np.abs(traj.x) <= 4.0) and np.all(np.abs(traj.y) <= 4.0)
    assert np.all((traj.theta >= 0.0) & (traj.theta <= 0.5 * math.pi))
    assert traj.n_handovers == int(np.count_nonzero(np.diff(traj.serving_ap)))


def test_vertical_trajectory_hands_over_at_quadrant_borders():
    cfg = _cfg(handover_margin_db=0.0, time_to_trigger=1)
    traj = mobility.generate_trajectory(cfg, 20, mode=MobilityMode.VERTICAL_UPWARD, rng=np.random.default_rng(8))
    assert np.all(traj.theta == 0.0)
    assert traj.n_handovers == mobility.nearest_ap_changes(traj, cfg.ap_positions)


def test_walk_starts_on_the_quadrant_ap():
    cfg = _cfg(room_length=8.0)
    traj = mobility.generate_trajectory(cfg, 4, rng=np.random.default_rng(13))
    start = traj.waypoints[0]
    expected = 2 * (start[1] < 0) + ((start[0] < 0) != (start[1] < 0))
    assert traj.serving_ap[0] == expected


def test_trajectory_theta_decorrelates_between_position_samples():
    cfg = _cfg(room_length=8.0, speed=1.0)
    traj = mobility.generate_trajectory(cfg, 1500, rng=np.random.default_rng(14))
    assert len(traj) > 40_000
    assert acf(traj.theta, nlags=1, fft=True)[1] == pytest.approx(mobility.COHERENCE_LEVEL, abs=0.03)


def test_hysteresis_suppresses_handovers():
    plain = mobility.handover_rate(_cfg(handover_margin_db=0.0, time_to_trigger=1), MobilityMode.ORWP_GAUSSIAN, 500)
    damped = mobility.handover_rate(_cfg(), MobilityMode.ORWP_GAUSSIAN, 500)
    assert damped.rate_hz < plain.rate_hz
    assert damped.sim_seconds == plain.sim_seconds


def test_trajectory_is_reproducible_from_config_seed():
    first = mobility.generate_trajectory(_cfg(seed=11), 3)
    second = mobility.generate_trajectory(_cfg(seed=11), 3)
    np.testing.assert_array_equal(first.x, second.x)
    np.testing.assert_array_equal(first.serving_ap, second.serving_ap)


def test_trajectory_needs_a_leg():
    with pytest.raises(InvalidConfig):
        mobility.generate_trajectory(_cfg(), 0)


def test_trajectory_csv(tmp_path):
    traj = mobility.generate_trajectory(_cfg(), 2, rng=np.random.default_rng(9))
    path = mobility.write_trajectory_csv(traj, tmp_path / "out" / "trajectory.csv")
    with open(path, newline="", encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == mobility.TRAJECTORY_COLUMNS
    assert len(rows) == len(traj) + 1
    assert int(rows[-1][5]) == int(traj.serving_ap[-1])


# ── Group 4: handover rate ────────────────────────────────────────────────────

def test_handover_rate_is_reproducible():
    a = mobility.handover_rate(_cfg(), MobilityMode.ORWP_GAUSSIAN, 50)
    b = mobility.handover_rate(_cfg(), MobilityMode.ORWP_GAUSSIAN, 50)
    assert a == b
    assert len(a.row()) == len(mobility.SWEEP_COLUMNS)


def test_handover_rate_needs_runs():
    with pytest.raises(InvalidConfig):
        mobility.handover_rate(_cfg(), MobilityMode.ORWP_GAUSSIAN, 0)


def test_vertical_rate_grows_with_speed():
    slow = mobility.handover_rate(_cfg(speed=1.0), MobilityMode.VERTICAL_UPWARD, 300)
    fast = mobility.handover_rate(_cfg(speed=2.0), MobilityMode.VERTICAL_UPWARD, 300)
    assert fast.rate_hz > slow.rate_hz


def test_rate_falls_with_room_length():
    small = mobility.handover_rate(_cfg(room_length=4.0), MobilityMode.VERTICAL_UPWARD, 300)
    large = mobility.handover_rate(_cfg(room_length=16.0), MobilityMode.VERTICAL_UPWARD, 300)
    assert small.rate_hz > large.rate_hz


def test_orientation_adds_handovers_in_small_rooms():
    vertical = mobility.handover_rate(_cfg(room_length=4.0), MobilityMode.VERTICAL_UPWARD, 4000)
    orwp = mobility.handover_rate(_cfg(room_length=4.0), MobilityMode.ORWP_GAUSSIAN, 4000)
    assert orwp.rate_hz > vertical.rate_hz
    # common random numbers: both modes walk the same legs
    assert orwp.sim_seconds == vertical.sim_seconds


def test_sweep_layout():
    results = mobility.handover_sweep(
        _cfg(), [4.0, 8.0], [1.4], [MobilityMode.VERTICAL_UPWARD, MobilityMode.ORWP_GAUSSIAN], 20,
        show_progress=False,
    )
    assert [(r.room_length, r.mode) for r in results] == [
        (4.0, MobilityMode.VERTICAL_UPWARD),
        (4.0, MobilityMode.ORWP_GAUSSIAN),
        (8.0, MobilityMode.VERTICAL_UPWARD),
        (8.0, MobilityMode.ORWP_GAUSSIAN),
    ]
    assert all(r.n_runs == 20 for r in results)


@pytest.mark.slow
def test_full_sweep_orderings():
    lengths, speeds = [4.0, 8.0, 12.0, 16.0], [1.0, 1.4, 2.0]
    modes = [MobilityMode.VERTICAL_UPWARD, MobilityMode.ORWP_GAUSSIAN]
    results = mobility.handover_sweep(_cfg(), lengths, speeds, modes, 10_000, show_progress=False)
    rate = {(r.room_length, r.speed, r.mode): r.rate_hz for r in results}
    for mode in modes:
        for v in speeds:
            series = [rate[(L, v, mode)] for L in lengths]
            assert all(x > y for x, y in zip(series, series[1:])), (mode, v, series)
        for L in lengths:
            series = [rate[(L, v, mode)] for v in speeds]
            assert all(x < y for x, y in zip(series, series[1:])), (mode, L, series)
    for L in lengths:
        for v in speeds:
            vertical = rate[(L, v, MobilityMode.VERTICAL_UPWARD)]
            gap = rate[(L, v, MobilityMode.ORWP_GAUSSIAN)] - vertical
            # the extra ORWP rate stays a small share of the vertical rate but is not monotone in L
            assert 0.0 < gap < 0.3 * vertical, (L, v, gap)
