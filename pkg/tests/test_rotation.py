"""
Euler-rotation geometry.

 Group 1: rotated normal
   Identity and quarter-pitch poses, unit norm, agreement with an
   independent intrinsic z-x'-y'' rotation
 Group 2: polar and azimuth angles
   Closed-form values, alpha invariance, angle-to-vertical oracle,
   degenerate azimuth
 Group 3: facing angle
   Branch values in both modes, Omega - omega_hat = pi, heading cross-check
 Group 4: helpers
   Angle wrapping and the full-geometry incidence cosine
"""
import math

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from classes.errors import DegeneratePose, ValidationError
from classes.orientation import DeviceMode, EulerAngles
from utils.rotation import (
    azimuth_angle,
    facing_angle,
    heading_from_rotation,
    incidence_cosine,
    normal_from_polar,
    omega_hat,
    polar_angle,
    polar_angles,
    rotated_normal,
    rotated_normals,
    rotation_matrix,
    wrap_to_2pi,
    wrap_to_pi,
)


# ── Shared fixtures ───────────────────────────────────────────────────────────

def _random_angles(n, seed=0):
    rng = np.random.default_rng(seed)
    return (
        rng.uniform(0.0, 2.0 * math.pi, n),
        rng.uniform(-math.pi, math.pi, n),
        rng.uniform(-0.5 * math.pi, 0.5 * math.pi, n),
    )


# ── Group 1: rotated normal ───────────────────────────────────────────────────

def test_identity_pose_points_up():
    n = rotated_normal(EulerAngles(0.0, 0.0, 0.0))
    np.testing.assert_allclose(n.as_array(), [0.0, 0.0, 1.0], atol=1e-15)


def test_quarter_pitch_points_along_minus_y():
    n = rotated_normal(EulerAngles(0.0, 0.5 * math.pi, 0.0))
    np.testing.assert_allclose(n.as_array(), [0.0, -1.0, 0.0], atol=1e-15)


def test_normals_have_unit_norm():
    normals = rotated_normals(*_random_angles(10_000))
    np.testing.assert_allclose(np.linalg.norm(normals, axis=1), 1.0, atol=1e-12)


def test_matrix_matches_intrinsic_rotation_oracle():
    for alpha, beta, gamma in zip(*_random_angles(200, seed=3)):
        ours = rotation_matrix(EulerAngles(alpha, beta, gamma))
        oracle = Rotation.from_euler("ZXY", [alpha, beta, gamma]).as_matrix()
        np.testing.assert_allclose(ours, oracle, atol=1e-12)


def test_normal_is_third_column_of_matrix():
    angles = EulerAngles(1.1, -0.4, 0.3)
    np.testing.assert_allclose(rotated_normal(angles).as_array(), rotation_matrix(angles)[:, 2], atol=1e-15)


def test_euler_ranges_are_enforced():
    with pytest.raises(ValidationError):
        EulerAngles(2.0 * math.pi, 0.0, 0.0)
    with pytest.raises(ValidationError):
        EulerAngles(0.0, math.pi, 0.0)
    with pytest.raises(ValidationError):
        EulerAngles(0.0, 0.0, 0.5 * math.pi)


# ── Group 2: polar and azimuth angles ─────────────────────────────────────────

def test_flat_pose_has_zero_polar_angle():
    assert polar_angle(EulerAngles(0.0, 0.0, 0.0)) == 0.0


def test_pure_pitch_polar_angle_equals_pitch():
    beta = math.radians(41.39)
    assert polar_angle(EulerAngles(0.0, beta, 0.0)) == pytest.approx(beta, abs=1e-15)


def test_polar_angle_matches_angle_to_vertical():
    alpha, beta, gamma = _random_angles(100_000, seed=1)
    n = rotated_normals(alpha, beta, gamma)
    oracle = np.arctan2(np.hypot(n[:, 0], n[:, 1]), n[:, 2])
    np.testing.assert_allclose(polar_angles(beta, gamma), oracle, atol=1e-12, rtol=0)


def test_polar_angle_ignores_yaw():
    beta, gamma = 0.7, -0.2
    values = [polar_angle(EulerAngles(a, beta, gamma)) for a in np.linspace(0.0, 6.2, 32)]
    assert max(values) - min(values) == 0.0


def test_polar_angle_matches_closed_form():
    beta, gamma = math.radians(30.0), math.radians(40.0)
    expected = math.acos(math.cos(beta) * math.cos(gamma))
    assert polar_angle(EulerAngles(0.3, beta, gamma)) == pytest.approx(expected, abs=1e-12)


def test_azimuth_of_tilted_pose():
    assert azimuth_angle(EulerAngles(0.5 * math.pi, 0.25 * math.pi, 0.0)) == pytest.approx(0.0, abs=1e-12)


def test_azimuth_matches_atan2_of_normal():
    for alpha, beta, gamma in zip(*_random_angles(100, seed=7)):
        angles = EulerAngles(alpha, beta, gamma)
        n = rotated_normal(angles)
        assert azimuth_angle(angles) == pytest.approx(math.atan2(n.y, n.x), abs=1e-12)


def test_azimuth_of_flat_pose_is_degenerate():
    with pytest.raises(DegeneratePose):
        azimuth_angle(EulerAngles(0.0, 0.0, 0.0))


# ── Group 3: facing angle ─────────────────────────────────────────────────────

@pytest.mark.parametrize(
    "alpha, mode, expected",
    [
        (0.5 * math.pi, DeviceMode.PORTRAIT, 0.0),
        (1.5 * math.pi, DeviceMode.LANDSCAPE, -0.5 * math.pi),
    ],
)
def test_omega_hat_branches(alpha, mode, expected):
    assert omega_hat(alpha, mode) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize(
    "alpha, mode, expected",
    [
        (math.pi, DeviceMode.PORTRAIT, 1.5 * math.pi),
        (0.5 * math.pi, DeviceMode.LANDSCAPE, 1.5 * math.pi),
        (1.75 * math.pi, DeviceMode.PORTRAIT, 0.25 * math.pi),
    ],
)
def test_facing_angle_branches(alpha, mode, expected):
    assert facing_angle(alpha, mode) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("mode", list(DeviceMode))
def test_facing_is_azimuth_plus_pi(mode):
    for alpha in np.linspace(0.0, 2.0 * math.pi, 721, endpoint=False):
        gap = wrap_to_pi(facing_angle(alpha, mode) - omega_hat(alpha, mode))
        assert abs(gap) == pytest.approx(math.pi, abs=1e-12)


def test_zero_yaw_takes_first_branch():
    assert facing_angle(0.0, DeviceMode.PORTRAIT) == pytest.approx(0.5 * math.pi)
    assert facing_angle(0.0, DeviceMode.LANDSCAPE) == pytest.approx(math.pi)


@pytest.mark.parametrize("mode", list(DeviceMode))
def test_heading_agrees_with_facing_angle_when_level(mode):
    for alpha in np.linspace(0.05, 6.2, 25):
        heading = heading_from_rotation(EulerAngles(alpha, 0.0, 0.0), mode)
        gap = wrap_to_pi(heading - facing_angle(alpha, mode))
        assert gap == pytest.approx(0.0, abs=1e-12)


# ── Group 4: helpers ──────────────────────────────────────────────────────────

def test_wrap_to_pi_maps_minus_pi_to_pi():
    assert wrap_to_pi(-math.pi) == pytest.approx(math.pi)
    assert wrap_to_pi(3.0 * math.pi) == pytest.approx(math.pi)
    assert wrap_to_pi(0.25) == pytest.approx(0.25)


def test_wrap_to_2pi_range():
    values = wrap_to_2pi(np.linspace(-20.0, 20.0, 1001))
    assert np.all(values >= 0.0) and np.all(values < 2.0 * math.pi)


def test_incidence_cosine_of_normal_facing_the_ap():
    ap, ue = (0.0, 0.0, 2.0), (1.0, 0.0, 0.0)
    ray = np.subtract(ap, ue) / np.linalg.norm(np.subtract(ap, ue))
    assert incidence_cosine(ray, ap, ue) == pytest.approx(1.0)


def test_polar_normal_reproduces_coefficient_form():
    ap, ue, omega, theta = (0.0, 0.0, 2.0), (-1.0, 0.5, 0.0), 0.3, 0.6
    d = math.dist(ap, ue)
    a = -((ap[0] - ue[0]) / d) * math.cos(omega) - ((ap[1] - ue[1]) / d) * math.sin(omega)
    b = (ap[2] - ue[2]) / d
    # the normal tilts toward omega + pi, i.e. away from the facing direction
    normal = normal_from_polar(theta, omega + math.pi)
    assert incidence_cosine(normal, ap, ue) == pytest.approx(a * math.sin(theta) + b * math.cos(theta), abs=1e-12)
