"""
Euler-rotation algebra for device orientation.

Angles follow the W3C device-orientation order: intrinsic z -> x' -> y''
(yaw alpha, pitch beta, roll gamma), equal to R_alpha R_beta R_gamma applied
to the device frame. Everything is radians.
"""
import math
from typing import Sequence, Union

import numpy as np

from classes.errors import DegeneratePose
from classes.orientation import DeviceMode, EulerAngles, UnitVector3

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

ArrayLike = Union[float, np.ndarray]


def wrap_to_2pi(x: ArrayLike) -> ArrayLike:
    """Map any real angle to [0, 2*pi)."""
    w = np.mod(x, TWO_PI)
    w = np.where(w >= TWO_PI, 0.0, w)
    return float(w) if np.ndim(w) == 0 else w


def wrap_to_pi(x: ArrayLike) -> ArrayLike:
    """Map any real angle to (-pi, pi]; -pi goes to +pi."""
    w = np.asarray(x, dtype=float) - TWO_PI * np.floor((np.asarray(x, dtype=float) + math.pi) / TWO_PI)
    w = np.where(w <= -math.pi, w + TWO_PI, w)
    return float(w) if np.ndim(w) == 0 else w


def rotation_matrix(angles: EulerAngles) -> np.ndarray:
    ca, sa = math.cos(angles.alpha), math.sin(angles.alpha)
    cb, sb = math.cos(angles.beta), math.sin(angles.beta)
    cg, sg = math.cos(angles.gamma), math.sin(angles.gamma)
    r_alpha = np.array([[ca, -sa, 0.0], [sa, ca, 0.0], [0.0, 0.0, 1.0]])
    r_beta = np.array([[1.0, 0.0, 0.0], [0.0, cb, -sb], [0.0, sb, cb]])
    r_gamma = np.array([[cg, 0.0, sg], [0.0, 1.0, 0.0], [-sg, 0.0, cg]])
    return r_alpha @ r_beta @ r_gamma


def rotated_normals(alpha: ArrayLike, beta: ArrayLike, gamma: ArrayLike) -> np.ndarray:
    """Rotated device normal for arrays of angles; shape (..., 3)."""
    ca, sa = np.cos(alpha), np.sin(alpha)
    cb, sb = np.cos(beta), np.sin(beta)
    cg, sg = np.cos(gamma), np.sin(gamma)
    return np.stack(
        [cg * sa * sb + ca * sg, sa * sg - ca * cg * sb, cb * cg],
        axis=-1,
    )


def rotated_normal(angles: EulerAngles) -> UnitVector3:
    n = rotated_normals(angles.alpha, angles.beta, angles.gamma)
    return UnitVector3(float(n[0]), float(n[1]), float(n[2]))


def polar_angles(beta: ArrayLike, gamma: ArrayLike) -> ArrayLike:
    """
    theta = arccos(cos(beta) cos(gamma)), evaluated through atan2 so that small
    tilts keep full precision. Independent of alpha.
    """
    horizontal = np.hypot(np.cos(gamma) * np.sin(beta), np.sin(gamma))
    theta = np.arctan2(horizontal, np.cos(beta) * np.cos(gamma))
    return float(theta) if np.ndim(theta) == 0 else theta


def polar_angle(angles: EulerAngles) -> float:
    return polar_angles(angles.beta, angles.gamma)


def azimuth_angle(angles: EulerAngles) -> float:
    n = rotated_normal(angles)
    if math.hypot(n.x, n.y) < 1e-12:
        raise DegeneratePose(f"normal is vertical for {angles}; azimuth undefined")
    return wrap_to_pi(math.atan2(n.y, n.x))


def omega_hat(alpha: float, mode: DeviceMode) -> float:
    """Azimuth of the normal when roll (or pitch) is zero; result in (-pi, pi]."""
    alpha = wrap_to_2pi(alpha)
    if DeviceMode(mode) is DeviceMode.PORTRAIT:
        value = alpha - HALF_PI if alpha <= 1.5 * math.pi else alpha - 2.5 * math.pi
    else:
        value = alpha if alpha <= math.pi else alpha - TWO_PI
    return wrap_to_pi(value)


def facing_angle(alpha: float, mode: DeviceMode) -> float:
    """Direction the user faces, in [0, 2*pi). alpha = 0 takes the first branch."""
    alpha = wrap_to_2pi(alpha)
    if DeviceMode(mode) is DeviceMode.PORTRAIT:
        value = alpha + HALF_PI if alpha <= 1.5 * math.pi else alpha - 1.5 * math.pi
    else:
        value = alpha + math.pi if alpha <= math.pi else alpha - math.pi
    return wrap_to_2pi(value)


def heading_from_rotation(angles: EulerAngles, mode: DeviceMode) -> float:
    """
    Floor-plane direction of the device's top edge: +y axis in portrait, -x axis
    in landscape. Agrees with facing_angle when beta = gamma = 0.
    """
    axis = np.array([0.0, 1.0, 0.0]) if DeviceMode(mode) is DeviceMode.PORTRAIT else np.array([-1.0, 0.0, 0.0])
    v = rotation_matrix(angles) @ axis
    if math.hypot(v[0], v[1]) < 1e-12:
        raise DegeneratePose(f"device axis is vertical for {angles}; heading undefined")
    return wrap_to_2pi(math.atan2(v[1], v[0]))


def normal_from_polar(theta: ArrayLike, omega: ArrayLike) -> np.ndarray:
    """Unit normal with polar angle theta and azimuth omega."""
    st = np.sin(theta)
    return np.stack([st * np.cos(omega), st * np.sin(omega), np.cos(theta) * np.ones_like(st)], axis=-1)


def incidence_cosine(normal: Union[UnitVector3, np.ndarray], ap: Sequence[float], ue: Sequence[float]) -> ArrayLike:
    """cos(psi) between the UE normal(s) and the UE->AP direction."""
    if isinstance(normal, UnitVector3):
        normal = normal.as_array()
    ray = np.asarray(ap, dtype=float) - np.asarray(ue, dtype=float)
    ray = ray / np.linalg.norm(ray)
    value = np.asarray(normal) @ ray
    return float(value) if np.ndim(value) == 0 else value
