"""RIS element layout, phase-profile synthesis and array-factor evaluation.

The surface is a square grid of N phase-shifting elements.  The array
factor toward a direction is the coherent sum of the per-element phasors,
normalised so that perfect pointing gives gain 1.  A closed Dirichlet-kernel
form exists once the per-element phases are linear in the grid indices; the
explicit steering-vector sum is kept as an independent evaluation path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .geometry import Spherical, Cartesian3


class BeamTooWideError(ValueError):
    """Requested gain level is unreachable for this aperture."""


class NearFieldWarning(UserWarning):
    """Operating range is inside the Fraunhofer distance of the aperture."""


@dataclass(frozen=True)
class RisGeometry:
    """Square RIS: element count, spacing and carrier wavelength (metres)."""

    n_elements: int
    spacing: float
    wavelength: float

    def __post_init__(self):
        side = math.isqrt(self.n_elements)
        if side * side != self.n_elements or self.n_elements < 1:
            raise ValueError(f"n_elements must be a positive perfect square, got {self.n_elements}")
        if not (0.0 < self.spacing < self.wavelength):
            raise ValueError(
                f"element spacing must satisfy 0 < d < lambda, got d={self.spacing}, "
                f"lambda={self.wavelength}"
            )

    @property
    def side(self) -> int:
        return math.isqrt(self.n_elements)

    @property
    def fraunhofer_distance(self) -> float:
        """Far-field boundary 2*(d*sqrt(N))^2 / lambda of the full aperture."""
        aperture = self.spacing * math.sqrt(self.n_elements)
        return 2.0 * aperture * aperture / self.wavelength

    def warn_if_near_field(self, range_m: float) -> None:
        if range_m < self.fraunhofer_distance:
            warnings.warn(
                f"range {range_m:.2f} m is inside the Fraunhofer distance "
                f"{self.fraunhofer_distance:.2f} m; far-field model degrades",
                NearFieldWarning,
                stacklevel=2,
            )


class PhaseProfile(NamedTuple):
    """Per-step phases: element (l, k) applies phi = l*phi_x + k*phi_y (radians)."""

    phi_x: float
    phi_y: float

    def per_element(self, geom: RisGeometry) -> np.ndarray:
        """Unit phasors e^{j phi_n} for all N elements in element order."""
        side = geom.side
        n = np.arange(geom.n_elements)
        ell = n % side
        kay = n // side
        return np.exp(1j * (ell * self.phi_x + kay * self.phi_y))


class Beamwidths(NamedTuple):
    """ULA width, elevation-plane width and azimuth-plane width (radians)."""

    delta_Theta: float
    delta_theta: float
    delta_phi: float


def element_position(n: int, geom: RisGeometry) -> Cartesian3:
    """Position of element ``n`` (1-based) on the RIS plane, grid centred at the origin."""
    if not 1 <= n <= geom.n_elements:
        raise IndexError(f"element index {n} out of range 1..{geom.n_elements}")
    side = geom.side
    offset = (side - 1) / 2.0
    return Cartesian3(
        geom.spacing * ((n - 1) % side - offset),
        geom.spacing * ((n - 1) // side - offset),
        0.0,
    )


def steering_vector(z: Spherical, geom: RisGeometry) -> np.ndarray:
    """Unit-modulus per-element response toward direction ``z``.

    Element n carries exp(j 2pi/lambda (r_n1 sin(theta)cos(phi) +
    r_n2 sin(theta)sin(phi))).
    """
    side = geom.side
    n = np.arange(geom.n_elements)
    offset = (side - 1) / 2.0
    rx = geom.spacing * (n % side - offset)
    ry = geom.spacing * (n // side - offset)
    su = math.sin(z.theta) * math.cos(z.phi)
    sv = math.sin(z.theta) * math.sin(z.phi)
    k = 2.0 * math.pi / geom.wavelength
    return np.exp(1j * k * (rx * su + ry * sv))


def phase_profile(pointing: tuple[float, float], bs: Spherical,
                  geom: RisGeometry) -> PhaseProfile:
    """Phase steps that cancel the BS direction and point at (theta_hat, phi_hat).

    The per-step factor is 2 pi d / lambda: with that factor the steering-sum
    array factor collapses to the closed Dirichlet form and the BS terms
    cancel exactly (the direct-vs-closed equivalence test enforces this).
    """
    theta_hat, phi_hat = pointing
    c = -2.0 * math.pi * geom.spacing / geom.wavelength
    s_hat_u = math.sin(theta_hat) * math.cos(phi_hat)
    s_hat_v = math.sin(theta_hat) * math.sin(phi_hat)
    s_b_u = math.sin(bs.theta) * math.cos(bs.phi)
    s_b_v = math.sin(bs.theta) * math.sin(bs.phi)
    return PhaseProfile(c * (s_hat_u + s_b_u), c * (s_hat_v + s_b_v))


def af_gain_direct(profile: PhaseProfile, ue: Spherical, bs: Spherical,
                   geom: RisGeometry) -> float:
    """AF gain |(1/N) a_b^T diag(phi) a_u|^2 by explicit element sum."""
    a_u = steering_vector(ue, geom)
    a_b = steering_vector(bs, geom)
    phasors = profile.per_element(geom)
    af = np.sum(a_b * phasors * a_u) / geom.n_elements
    return float(np.abs(af) ** 2)


def _dirichlet_ratio(f: np.ndarray, side: int) -> np.ndarray:
    """sin(side*f) / (side*sin(f)) with removable singularities at f = m*pi."""
    f = np.asarray(f, dtype=float)
    s = np.sin(f)
    small = np.abs(s) < 1e-9
    safe = np.where(small, 1.0, s)
    ratio = np.sin(side * f) / (side * safe)
    # near f = m*pi both sines vanish; the limit of the ratio is cos(side*f)/cos(f)
    limit = np.cos(side * f) / np.cos(np.where(small, f, 0.0))
    return np.where(small, limit, ratio)


def af_gain_from_direction_sines(su, sv, s_hat_u: float, s_hat_v: float,
                                 geom: RisGeometry):
    """Closed-form AF gain from direction sines (vectorised).

    ``su``/``sv`` are sin(theta)cos(phi) and sin(theta)sin(phi) of the
    observation direction; ``s_hat_*`` the same for the pointing.
    """
    c = math.pi * geom.spacing / geom.wavelength
    fx = c * (np.asarray(su) - s_hat_u)
    fy = c * (np.asarray(sv) - s_hat_v)
    side = geom.side
    gain = (_dirichlet_ratio(fx, side) * _dirichlet_ratio(fy, side)) ** 2
    return gain


def af_gain_closed(pointing: tuple[float, float], ue: Spherical,
                   geom: RisGeometry) -> float:
    """Closed-form AF gain toward ``ue`` when pointing at (theta_hat, phi_hat).

    The unit-modulus phase prefactor of the closed form is dropped; only the
    gain feeds the SNR.
    """
    theta_hat, phi_hat = pointing
    su = math.sin(ue.theta) * math.cos(ue.phi)
    sv = math.sin(ue.theta) * math.sin(ue.phi)
    s_hat_u = math.sin(theta_hat) * math.cos(phi_hat)
    s_hat_v = math.sin(theta_hat) * math.sin(phi_hat)
    return float(af_gain_from_direction_sines(su, sv, s_hat_u, s_hat_v, geom))


def sinc_inverse(a0: float) -> float:
    """The unique x in [0, pi) with sin(x)/x = a0, by bisection to 1e-12."""
    if not 0.0 < a0 <= 1.0:
        raise ValueError(f"sinc level must be in (0, 1], got {a0}")
    if a0 == 1.0:
        return 0.0
    lo, hi = 1e-12, math.pi - 1e-12
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if math.sin(mid) / mid > a0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ula_beamwidth(level: float, geom: RisGeometry) -> float:
    """Full width of the ULA main lobe at a given sinc amplitude level.

    Solves sinc(x) = level and maps through arcsin(2 lambda x / (pi d sqrt(N))).
    """
    x = sinc_inverse(level)
    arg = 2.0 * geom.wavelength * x / (math.pi * geom.spacing * math.sqrt(geom.n_elements))
    if arg > 1.0:
        raise BeamTooWideError(
            f"level {level} needs arcsin argument {arg:.4f} > 1; "
            f"unreachable for this aperture"
        )
    return math.asin(arg)


def beamwidths(a0: float, theta_hat: float, geom: RisGeometry) -> Beamwidths:
    """Cone opening angles whose floor footprint holds AF gain >= a0.

    ``a0`` is the power-gain target.  The sinc level carries a +1/N margin
    over sqrt(a0): the discrete pattern rides on a sidelobe pedestal of
    average height 1/N, and the margin keeps the footprint conservative
    (points inside retain gain >= a0).  The elevation-plane width is widened
    by 1/cos(theta_hat); the transverse width equals the ULA width.
    """
    if not 0.0 < a0 <= 1.0:
        raise ValueError(f"gain target must be in (0, 1], got {a0}")
    if not 0.0 <= theta_hat < 0.5 * math.pi:
        raise ValueError(f"pointing elevation must be in [0, pi/2), got {theta_hat}")
    level = min(1.0, math.sqrt(a0 + 1.0 / geom.n_elements))
    delta_big = ula_beamwidth(level, geom)
    return Beamwidths(delta_big, delta_big / math.cos(theta_hat), delta_big)
