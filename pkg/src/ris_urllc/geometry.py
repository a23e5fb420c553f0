"""Coordinate conversions and projection of the beam cone onto the floor.

The RIS-centred frame has its origin at the surface centre with the z axis
pointing down toward the floor plane z = h.  The set of directions whose
array-factor gain exceeds a target level forms an elliptic cone around the
pointing direction; intersecting that cone with the floor yields the
elliptical footprint used by the power-control search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

TWO_PI = 2.0 * math.pi


class GeometryError(ValueError):
    """Invalid geometric input."""


class HorizonGrazingError(GeometryError):
    """Beam cone grazes or crosses the horizon, so the floor footprint is unbounded."""

    def __init__(self, theta_hat: float, delta_theta: float):
        self.theta_hat = theta_hat
        self.delta_theta = delta_theta
        super().__init__(
            f"cone with elevation {theta_hat:.6f} rad and width {delta_theta:.6f} rad "
            f"reaches the horizon (theta_hat + delta_theta/2 >= pi/2)"
        )


class Cartesian3(NamedTuple):
    """Point in the RIS-centred frame, metres, z toward the floor."""

    x: float
    y: float
    z: float

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


class Spherical(NamedTuple):
    """Spherical coordinates: radius, elevation from the z axis, azimuth in [0, 2pi)."""

    r: float
    theta: float
    phi: float


class Conic2D(NamedTuple):
    """Coefficients of A x^2 + B x y + C y^2 + D x + E y + F = 0 on the floor plane."""

    A: float
    B: float
    C: float
    D: float
    E: float
    F: float

    def evaluate(self, x, y):
        return (self.A * x * x + self.B * x * y + self.C * y * y
                + self.D * x + self.E * y + self.F)


@dataclass(frozen=True)
class Ellipse2D:
    """Ellipse on the floor plane z = floor_z.

    ``orientation`` is the angle of the major axis from the x axis, in
    [0, pi).  Semi-axes satisfy semi_major >= semi_minor > 0.
    """

    center_x: float
    center_y: float
    semi_major: float
    semi_minor: float
    orientation: float
    floor_z: float

    def __post_init__(self):
        if not (self.semi_major >= self.semi_minor > 0.0):
            raise GeometryError(
                f"degenerate ellipse: a'={self.semi_major}, b'={self.semi_minor}"
            )

    def boundary(self, t):
        """Boundary points at parameter angle(s) ``t``; returns (x, y) arrays."""
        ca, sa = math.cos(self.orientation), math.sin(self.orientation)
        px = self.semi_major * np.cos(t)
        py = self.semi_minor * np.sin(t)
        return self.center_x + ca * px - sa * py, self.center_y + sa * px + ca * py

    def contains(self, x, y):
        ca, sa = math.cos(self.orientation), math.sin(self.orientation)
        dx = np.asarray(x) - self.center_x
        dy = np.asarray(y) - self.center_y
        u = (ca * dx + sa * dy) / self.semi_major
        v = (-sa * dx + ca * dy) / self.semi_minor
        return u * u + v * v <= 1.0


def wrap_azimuth(phi: float) -> float:
    """Wrap an angle to [0, 2pi)."""
    phi = math.fmod(phi, TWO_PI)
    return phi + TWO_PI if phi < 0.0 else phi


def cart_to_spherical(p: Cartesian3) -> Spherical:
    """Convert a Cartesian point to (r, theta, phi) with theta from the z axis.

    Raises
    ------
    GeometryError
        If the point coincides with the origin.
    """
    r = p.norm() if isinstance(p, Cartesian3) else float(np.linalg.norm(p))
    if r == 0.0 or not math.isfinite(r):
        raise GeometryError("cannot convert zero-norm or non-finite point")
    x, y, z = p
    theta = math.acos(min(1.0, max(-1.0, z / r)))
    phi = wrap_azimuth(math.atan2(y, x))
    return Spherical(r, theta, phi)


def rotation_matrix(theta_hat: float, phi_hat: float) -> np.ndarray:
    """Rotation taking frame coordinates into the beam-aligned frame.

    Row 3 is the pointing direction; row 2 spans the horizontal plane
    perpendicular to it; row 1 completes the right-handed orthonormal frame
    (it equals the cross product of rows 2 and 3, which fixes entry (1,3) to
    sin(theta_hat)).
    """
    ct, st = math.cos(theta_hat), math.sin(theta_hat)
    cp, sp = math.cos(phi_hat), math.sin(phi_hat)
    return np.array([
        [-ct * cp, -ct * sp, st],
        [sp, -cp, 0.0],
        [st * cp, st * sp, ct],
    ])


def cone_semi_axes(delta_theta: float, delta_phi: float) -> tuple[float, float]:
    """Cone cross-section semi-axes at unit distance along the axis."""
    if delta_theta <= 0.0 or delta_phi <= 0.0:
        raise GeometryError("beamwidths must be positive")
    return math.tan(0.5 * delta_theta), math.tan(0.5 * delta_phi)


def conic_coefficients(theta_hat: float, phi_hat: float,
                       delta_theta: float, delta_phi: float,
                       h: float) -> Conic2D:
    """Coefficients of the cone / floor-plane intersection.

    Composes the quadratic form R^T diag(a^-2, b^-2, -1) R numerically and
    substitutes z = h, rather than transcribing the printed closed-form
    coefficients (whose linear and constant terms do not satisfy the cone
    equation).
    """
    a, b = cone_semi_axes(delta_theta, delta_phi)
    rot = rotation_matrix(theta_hat, phi_hat)
    quad = rot.T @ np.diag([a ** -2, b ** -2, -1.0]) @ rot
    return Conic2D(
        A=quad[0, 0],
        B=2.0 * quad[0, 1],
        C=quad[1, 1],
        D=2.0 * h * quad[0, 2],
        E=2.0 * h * quad[1, 2],
        F=h * h * quad[2, 2],
    )


def ellipse_from_conic(conic: Conic2D, phi_hat: float, h: float) -> Ellipse2D:
    """Extract centre, semi-axes and orientation from an elliptic conic.

    Ties between the semi-axes are broken by assigning the pointing azimuth
    as the orientation.
    """
    disc = conic.B * conic.B - 4.0 * conic.A * conic.C
    if disc >= 0.0:
        raise GeometryError(f"conic is not an ellipse (B^2 - 4AC = {disc:.3e} >= 0)")
    quad = np.array([[conic.A, conic.B / 2.0], [conic.B / 2.0, conic.C]])
    lin = np.array([conic.D, conic.E])
    center = np.linalg.solve(2.0 * quad, -lin)
    f_center = conic.F + 0.5 * float(lin @ center)
    eigvals, eigvecs = np.linalg.eigh(quad)
    radii_sq = -f_center / eigvals
    if np.any(radii_sq <= 0.0):
        raise GeometryError("conic has no real elliptic locus")
    semi = np.sqrt(radii_sq)
    major, minor = (0, 1) if semi[0] >= semi[1] else (1, 0)
    if abs(semi[0] - semi[1]) <= 1e-12 * semi[major]:
        orientation = phi_hat % math.pi
    else:
        vx, vy = eigvecs[0, major], eigvecs[1, major]
        orientation = math.atan2(vy, vx) % math.pi
    return Ellipse2D(float(center[0]), float(center[1]),
                     float(semi[major]), float(semi[minor]),
                     float(orientation), float(h))


def project_beam(theta_hat: float, phi_hat: float,
                 delta_theta: float, delta_phi: float,
                 h: float) -> Ellipse2D:
    """Project the beam cone onto the floor plane z = h.

    Parameters
    ----------
    theta_hat, phi_hat : float
        Pointing direction (elevation from z axis, azimuth), radians.
    delta_theta, delta_phi : float
        Full cone opening angles in the elevation plane and the plane
        perpendicular to it, radians.
    h : float
        Floor distance below the RIS, metres.

    Raises
    ------
    HorizonGrazingError
        If the cone reaches the horizon; the footprint would be unbounded
        and the worst-case path-loss bound meaningless.
    """
    if theta_hat + 0.5 * delta_theta >= 0.5 * math.pi:
        raise HorizonGrazingError(theta_hat, delta_theta)
    conic = conic_coefficients(theta_hat, phi_hat, delta_theta, delta_phi, h)
    try:
        return ellipse_from_conic(conic, phi_hat, h)
    except GeometryError as exc:
        raise HorizonGrazingError(theta_hat, delta_theta) from exc


def farthest_floor_point(ellipse: Ellipse2D, phi_hat: float) -> Cartesian3:
    """Boundary point of the footprint along the outward pointing azimuth.

    Under the footprint approximation this point maximises the distance from
    the RIS over the footprint, hence minimises the path gain.
    """
    return Cartesian3(
        ellipse.center_x + ellipse.semi_major * math.cos(phi_hat),
        ellipse.center_y + ellipse.semi_major * math.sin(phi_hat),
        ellipse.floor_z,
    )
