"""
Orientation-based random waypoint (ORWP) mobility.

A UE walks between uniformly drawn waypoints at fixed speed. Position is
sampled every T_c,theta while the polar angle theta runs as an AR(1) process
at the finer step T_s, so consecutive position samples see theta T_c/T_s
steps apart. The facing angle Omega stays fixed for the whole leg. The
serving AP changes once another AP beats it by the handover margin for
time_to_trigger consecutive samples.
"""
import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.signal import lfilter
from tqdm import tqdm

from classes.errors import InvalidConfig, InvalidTiming
from classes.link import ChannelParams, LinkGeometry
from classes.mobility import Ar1Params, MobilityMode, OrwpConfig, Trajectory
from utils import channel

# R_theta(T_c) = 0.05 R_theta(0)
COHERENCE_LEVEL = 0.05

TRAJECTORY_COLUMNS = ("t", "x", "y", "omega_rad", "theta_rad", "serving_ap")
SWEEP_COLUMNS = ("L", "v", "mode", "rate_hz", "n_handovers", "sim_seconds", "seed")


# ---------------------------------------------------------------------------
# AR(1) polar-angle process
# ---------------------------------------------------------------------------

def ar1_from_stats(mean: float, std: float, ts: float, tc: float) -> Ar1Params:
    if not std > 0:
        raise InvalidTiming(f"std={std} must be positive")
    if not 0 < ts <= tc:
        raise InvalidTiming(f"need 0 < ts <= tc, got ts={ts}, tc={tc}")
    c1 = COHERENCE_LEVEL ** (ts / tc)
    return Ar1Params(c0=(1.0 - c1) * mean, c1=c1, sigma_w=math.sqrt(1.0 - c1 * c1) * std)


def ar1_step(p: Ar1Params, prev_theta: float, rng: np.random.Generator) -> float:
    value = p.c0 + p.c1 * prev_theta + p.sigma_w * rng.standard_normal()
    return min(max(value, 0.0), 0.5 * math.pi)


def stationary_draw(p: Ar1Params, rng: np.random.Generator) -> float:
    return p.stationary_mean + p.stationary_std * rng.standard_normal()


def _ar1_run(p: Ar1Params, state: float, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    """n AR(1) steps from `state`. Returns (clamped samples, last unclamped state)."""
    if n == 0:
        return np.empty(0), state
    drive = p.c0 + p.sigma_w * rng.standard_normal(n)
    raw, _ = lfilter([1.0], [1.0, -p.c1], drive, zi=[p.c1 * state])
    return np.clip(raw, 0.0, 0.5 * math.pi), float(raw[-1])


def theta_series(p: Ar1Params, n: int, rng: np.random.Generator) -> np.ndarray:
    """n samples; the first is drawn from the stationary law, so there is no burn-in."""
    if n < 1:
        return np.empty(0)
    start = stationary_draw(p, rng)
    rest, _ = _ar1_run(p, start, n - 1, rng)
    return np.concatenate([[min(max(start, 0.0), 0.5 * math.pi)], rest])


def theta_at(p: Ar1Params, times: np.ndarray, ts: float, rng: np.random.Generator) -> np.ndarray:
    """
    theta at the given sample times, with the process advanced round(dt/ts)
    AR(1) steps (at least one) between consecutive samples.
    """
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        return np.empty(0)
    steps = np.maximum(np.rint(np.diff(times) / ts).astype(int), 1)
    start = stationary_draw(p, rng)
    fine, _ = _ar1_run(p, start, int(steps.sum()), rng)
    return np.concatenate([[min(max(start, 0.0), 0.5 * math.pi)], fine[np.cumsum(steps) - 1]])


# ---------------------------------------------------------------------------
# Waypoints
# ---------------------------------------------------------------------------

def draw_waypoint(room_length: float, rng: np.random.Generator) -> np.ndarray:
    half = 0.5 * room_length
    return rng.uniform(-half, half, size=2)


def transition_length(p0: Sequence[float], p1: Sequence[float]) -> float:
    return math.dist(p0, p1)


def expected_transition_length(room_length: float, n: int, seed=None) -> float:
    """Monte-Carlo E[D]/L over n independent waypoint pairs."""
    rng = np.random.default_rng(seed)
    half = 0.5 * room_length
    p0 = rng.uniform(-half, half, size=(n, 2))
    p1 = rng.uniform(-half, half, size=(n, 2))
    return float(np.mean(np.linalg.norm(p1 - p0, axis=1)) / room_length)


def _leg(p0: np.ndarray, p1: np.ndarray, speed: float, tc: float) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Samples of one leg after p0: full steps of length v*tc while they fit, then
    a remainder step that lands on p1. Returns (positions, time offsets, omega).
    """
    delta = p1 - p0
    dist = float(np.hypot(delta[0], delta[1]))
    if dist == 0.0:
        return np.empty((0, 2)), np.empty(0), 0.0
    omega = math.atan2(delta[1], delta[0])
    travel = dist / speed
    n_full = int(math.floor(travel / tc))
    remainder = travel - n_full * tc

    k = np.arange(1, n_full + 1, dtype=float)
    unit = delta / dist
    positions = p0 + np.outer(k * speed * tc, unit)
    times = k * tc
    if remainder > 1e-9 * tc:
        positions = np.vstack([positions, p1])
        times = np.append(times, travel)
    elif n_full:
        positions[-1] = p1
    return positions, times, omega


# ---------------------------------------------------------------------------
# Serving AP
# ---------------------------------------------------------------------------

def serving_ap(
    position: Sequence[float],
    theta: float,
    omega: float,
    aps: Sequence[Sequence[float]],
    params: ChannelParams,
    previous: Optional[int] = None,
    ue_height: float = 0.0,
) -> int:
    """
    Index of the AP with the largest LOS gain; ties go to the lowest index and
    an all-zero gain vector keeps `previous` (or 0 if there is none).
    """
    if not aps:
        raise InvalidConfig("at least one AP is required")
    best, best_gain = None, 0.0
    for i, ap in enumerate(aps):
        gain = channel.los_gain(LinkGeometry(ap, (position[0], position[1], ue_height), omega), params, theta)
        if gain > best_gain:
            best, best_gain = i, gain
    if best is None:
        return 0 if previous is None else previous
    return best


def _gain_matrix(positions, theta, omega, aps, params: ChannelParams, ue_height: float) -> np.ndarray:
    return np.stack(
        [channel.los_gain_array(ap, positions, ue_height, omega, theta, params) for ap in aps],
        axis=1,
    )


def _serving_sequence(gains: np.ndarray, initial: int, margin_ratio: float = 1.0, time_to_trigger: int = 1) -> np.ndarray:
    """
    Serving AP per sample, sample 0 pinned to `initial`. The strongest AP takes
    over once its gain exceeds margin_ratio times the serving gain on
    time_to_trigger consecutive samples. With (1, 1) this is a plain argmax
    that is sticky on ties and on all-zero rows.
    """
    best = np.argmax(gains, axis=1).tolist()
    rows = gains.tolist()
    serving = np.empty(len(rows), dtype=int)
    current, candidate, count = initial, -1, 0
    serving[0] = current
    for i in range(1, len(rows)):
        row, b = rows[i], best[i]
        if b != current and row[b] > margin_ratio * row[current]:
            count = count + 1 if b == candidate else 1
            candidate = b
            if count >= time_to_trigger:
                current, candidate, count = b, -1, 0
        else:
            candidate, count = -1, 0
        serving[i] = current
    return serving


def _nearest_ap(position: np.ndarray, aps) -> int:
    dist = [math.hypot(ap[0] - position[0], ap[1] - position[1]) for ap in aps]
    return int(np.argmin(dist))


def _initial_serving(cfg: OrwpConfig, gains0: np.ndarray, p0: np.ndarray, rng: np.random.Generator) -> int:
    if cfg.init_serving == "random":
        return int(rng.integers(len(cfg.ap_positions)))
    if cfg.init_serving == "argmax" and np.any(gains0 > 0.0):
        return int(np.argmax(gains0))
    return _nearest_ap(p0, cfg.ap_positions)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

def _ar1_for(cfg: OrwpConfig) -> Ar1Params:
    return ar1_from_stats(cfg.theta_mean, cfg.theta_std, cfg.ts, cfg.tc_theta)


def generate_trajectory(
    cfg: OrwpConfig,
    n_runs: int,
    params: Optional[ChannelParams] = None,
    mode: MobilityMode = MobilityMode.ORWP_GAUSSIAN,
    rng: Optional[np.random.Generator] = None,
) -> Trajectory:
    """Walk n_runs consecutive legs from a random P0 and record every sample."""
    if n_runs < 1:
        raise InvalidConfig(f"n_runs={n_runs} must be at least 1")
    params = params or ChannelParams()
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    mode = MobilityMode(mode)
    ar1 = _ar1_for(cfg)

    waypoints = [draw_waypoint(cfg.room_length, rng)]
    pos_chunks = [waypoints[0][None, :]]
    time_chunks = [np.zeros(1)]
    omega_chunks: List[np.ndarray] = []
    t_now = 0.0
    for _ in range(n_runs):
        nxt = draw_waypoint(cfg.room_length, rng)
        positions, offsets, omega = _leg(waypoints[-1], nxt, cfg.speed, cfg.tc_theta)
        waypoints.append(nxt)
        pos_chunks.append(positions)
        time_chunks.append(t_now + offsets)
        omega_chunks.append(np.full(offsets.size, omega))
        if offsets.size:
            t_now += offsets[-1]

    positions = np.vstack(pos_chunks)
    times = np.concatenate(time_chunks)
    first_omega = next((o[0] for o in omega_chunks if o.size), 0.0)
    omegas = np.concatenate([[first_omega], *omega_chunks])

    if mode is MobilityMode.VERTICAL_UPWARD:
        theta = np.zeros(times.size)
    else:
        theta = theta_at(ar1, times, cfg.ts, rng)

    gains = _gain_matrix(positions, theta, omegas, cfg.ap_positions, params, cfg.ue_height)
    initial = _initial_serving(cfg, gains[0], positions[0], rng)
    serving = _serving_sequence(gains, initial, cfg.margin_ratio, cfg.time_to_trigger)
    return Trajectory(
        t=times,
        x=positions[:, 0],
        y=positions[:, 1],
        omega=omegas,
        theta=theta,
        serving_ap=serving,
        waypoints=np.vstack(waypoints),
    )


@dataclass(frozen=True)
class HandoverResult:
    room_length: float
    speed: float
    mode: MobilityMode
    rate_hz: float
    n_handovers: int
    sim_seconds: float
    n_runs: int
    seed: int

    def row(self) -> tuple:
        return (self.room_length, self.speed, self.mode.value, self.rate_hz, self.n_handovers, self.sim_seconds, self.seed)


def handover_rate(
    cfg: OrwpConfig,
    mode: MobilityMode,
    n_runs: int,
    params: Optional[ChannelParams] = None,
) -> HandoverResult:
    """
    Handovers per second of movement over one walk of n_runs consecutive legs:
    serving-AP changes divided by the travel time sum(D)/v. The walk starts on
    the AP picked by cfg.init_serving and is driven by cfg.seed alone.
    """
    if n_runs < 1:
        raise InvalidConfig(f"n_runs={n_runs} must be at least 1")
    mode = MobilityMode(mode)
    traj = generate_trajectory(cfg, n_runs, params, mode, np.random.default_rng(cfg.seed))
    sim_seconds = traj.duration
    return HandoverResult(
        room_length=cfg.room_length,
        speed=cfg.speed,
        mode=mode,
        rate_hz=traj.n_handovers / sim_seconds if sim_seconds > 0 else 0.0,
        n_handovers=traj.n_handovers,
        sim_seconds=sim_seconds,
        n_runs=n_runs,
        seed=cfg.seed,
    )


def handover_sweep(
    cfg: OrwpConfig,
    room_lengths: Iterable[float],
    speeds: Iterable[float],
    modes: Iterable[MobilityMode],
    n_runs: int,
    params: Optional[ChannelParams] = None,
    show_progress: bool = True,
) -> List[HandoverResult]:
    """
    Rate at every (L, v, mode) point. All points reuse cfg.seed, so waypoints
    are common random numbers across the sweep and the comparisons between
    points are not swamped by sampling noise.
    """
    points = [(L, v, MobilityMode(mode)) for L in room_lengths for v in speeds for mode in modes]
    results = []
    for L, v, mode in tqdm(points, desc="ORWP sweep", disable=not show_progress):
        results.append(handover_rate(cfg.with_point(L, v), mode, n_runs, params))
    return results


# ---------------------------------------------------------------------------
# Oracles and export
# ---------------------------------------------------------------------------

def nearest_ap_changes(traj: Trajectory, aps) -> int:
    """Count changes of the geometrically nearest AP along a trajectory."""
    xy = np.column_stack([traj.x, traj.y])
    centers = np.asarray(aps, dtype=float)[:, :2]
    dist = np.linalg.norm(xy[:, None, :] - centers[None, :, :], axis=2)
    return int(np.count_nonzero(np.diff(np.argmin(dist, axis=1))))


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(TRAJECTORY_COLUMNS)
        writer.writerows(traj.rows())
    return path
