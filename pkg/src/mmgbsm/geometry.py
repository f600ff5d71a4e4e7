"""Deterministic array geometry.

Element positions of the uniform linear arrays, exact and second-order
(parabolic) transmitter-cluster distances, planar/parabolic phase
differences and the array-variant Doppler shifts of the line-of-sight
path.  Everything here is a pure function of its arguments; antenna
indices are 1-based to keep the ``(M - 2p + 1)`` element-offset algebra
readable.

Sign conventions: the planar phase difference enters with a plus sign and
the parabolic correction with a minus sign; the total per-path phase
change is their sum and multiplies the channel gain as ``exp(j * phase)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0
"""Propagation speed used for wavelength and delay conversions, m/s."""

TWO_PI = 2.0 * np.pi


def wrap_angle(theta):
    """Wrap an angle (radians) into (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(theta), TWO_PI)


@dataclass(frozen=True)
class ArraySpec:
    """Uniform linear array: element count, spacing (m), axis tilt (rad)."""

    num_elements: int
    spacing: float
    tilt: float

    def __post_init__(self):
        if self.num_elements < 1:
            raise ValueError(f"num_elements must be >= 1, got {self.num_elements}")
        if self.spacing <= 0:
            raise ValueError(f"spacing must be > 0, got {self.spacing}")
        object.__setattr__(self, "tilt", float(wrap_angle(self.tilt)))

    @property
    def aperture(self) -> float:
        """End-to-end array length in meters."""
        return (self.num_elements - 1) * self.spacing

    def offsets(self) -> np.ndarray:
        """Signed element offsets along the array axis for indices 1..M."""
        return element_offset(self, np.arange(1, self.num_elements + 1))


@dataclass(frozen=True)
class Placement:
    """Polar position of a scatterer cluster (or the MS) seen from both arrays.

    ``range_m`` is the distance from the BS array center; the azimuths are
    measured from the BS / MS array centers and stored wrapped to (-pi, pi].
    """

    range_m: float
    azimuth_tx: float
    azimuth_rx: float

    def __post_init__(self):
        if self.range_m <= 0:
            raise ValueError(f"range must be > 0, got {self.range_m}")
        object.__setattr__(self, "azimuth_tx", float(wrap_angle(self.azimuth_tx)))
        object.__setattr__(self, "azimuth_rx", float(wrap_angle(self.azimuth_rx)))


@dataclass(frozen=True)
class Motion:
    """MS velocity: speed (m/s) and heading w.r.t. the x-axis (rad)."""

    speed: float
    heading: float = 0.0

    def __post_init__(self):
        if self.speed < 0:
            raise ValueError(f"speed must be >= 0, got {self.speed}")
        object.__setattr__(self, "heading", float(wrap_angle(self.heading)))

    def max_doppler(self, wavelength: float) -> float:
        """Maximum Doppler shift ``speed / wavelength`` in Hz."""
        return self.speed / wavelength


def element_offset(array: ArraySpec, index):
    """Signed offset of element ``index`` (1-based) from the array center.

    Equals ``(M - 2*index + 1) * spacing / 2``: positive for the first
    element, antisymmetric under ``index -> M + 1 - index``.
    """
    idx = np.asarray(index)
    if np.any(idx < 1) or np.any(idx > array.num_elements):
        raise ValueError(
            f"antenna index must be in 1..{array.num_elements}, got {index}"
        )
    out = (array.num_elements - 2.0 * idx + 1.0) * (array.spacing / 2.0)
    return out if out.ndim else float(out)


def distance_exact(cluster_range: float, cluster_azimuth_tx, array: ArraySpec, p):
    """Cluster-to-element distance by the law of cosines."""
    d = element_offset(array, p)
    cos_term = np.cos(np.asarray(cluster_azimuth_tx) - array.tilt)
    sq = cluster_range**2 + d**2 - 2.0 * d * cluster_range * cos_term
    return np.sqrt(sq)


def distance_parabolic(cluster_range: float, cluster_azimuth_tx, array: ArraySpec, p):
    """Second-order approximation to :func:`distance_exact`.

    ``R - d*cos(phi - tilt) + d^2 * sin^2(phi - tilt) / (2R)``.  Total by
    construction; see :func:`parabolic_error_bound` for the quality of the
    approximation at a given range.
    """
    d = element_offset(array, p)
    rel = np.asarray(cluster_azimuth_tx) - array.tilt
    return (
        cluster_range
        - d * np.cos(rel)
        + d**2 * np.sin(rel) ** 2 / (2.0 * cluster_range)
    )


def parabolic_error_bound(cluster_range: float, array: ArraySpec, p):
    """Third-order remainder bound ``|d|^3 / (2 R^2)`` on the parabolic distance."""
    d = np.abs(element_offset(array, p))
    return d**3 / (2.0 * cluster_range**2)


def phase_planar(aod, aoa, tx: ArraySpec, rx: ArraySpec, p, q, wavelength: float):
    """Planar-wavefront phase difference for TX element p / RX element q.

    ``kappa * [d_t cos(aod - beta_t) + d_r cos(aoa - beta_r)]`` with
    ``kappa = 2 pi / wavelength``.
    """
    if wavelength <= 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    kappa = TWO_PI / wavelength
    d_t = element_offset(tx, p)
    d_r = element_offset(rx, q)
    return kappa * (
        d_t * np.cos(np.asarray(aod) - tx.tilt) + d_r * np.cos(np.asarray(aoa) - rx.tilt)
    )


def phase_parabolic(aod, cluster_range: float, tx: ArraySpec, p, wavelength: float):
    """Parabolic-wavefront phase correction on the TX side.

    ``-kappa * d_t^2 * sin^2(aod - beta_t) / (2 R)``; vanishes in the
    far field.  For the line-of-sight path the caller passes the LOS
    angle and the BS-MS distance instead of the cluster coordinates.
    """
    if wavelength <= 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    kappa = TWO_PI / wavelength
    d_t = element_offset(tx, p)
    return -kappa * d_t**2 * np.sin(np.asarray(aod) - tx.tilt) ** 2 / (2.0 * cluster_range)


def doppler_nlos(aoa, motion: Motion, wavelength: float):
    """Doppler shift of a scattered ray: ``f_max * cos(aoa - heading)``.

    Shared by every antenna pair: the MS array is small, so scattered
    rays see an element-independent arrival angle.
    """
    if wavelength <= 0:
        raise ValueError(f"wavelength must be > 0, got {wavelength}")
    return motion.max_doppler(wavelength) * np.cos(np.asarray(aoa) - motion.heading)


def los_aoa_drift(los_aod, tx: ArraySpec, p, d_tr: float):
    """Per-element LOS arrival angle at the MS.

    ``pi + aod + sin(aod - beta_t) * d_t / d_tr`` -- the arrival angle
    drifts linearly in the element offset and becomes element-invariant
    as ``d_tr`` grows.  Returned unwrapped so the far-field limit reads
    ``pi + aod`` literally.
    """
    if d_tr <= 0:
        raise ValueError(f"d_tr must be > 0, got {d_tr}")
    d_t = element_offset(tx, p)
    aod = np.asarray(los_aod)
    return np.pi + aod + np.sin(aod - tx.tilt) * d_t / d_tr


def doppler_los(los_aod, tx: ArraySpec, p, d_tr: float, motion: Motion, wavelength: float):
    """Array-variant LOS Doppler: ``f_max * cos(los_aoa_drift - heading)``.

    Varies with the BS element p through the drifting arrival angle,
    never with the MS element.
    """
    angle = los_aoa_drift(los_aod, tx, p, d_tr)
    return motion.max_doppler(wavelength) * np.cos(angle - motion.heading)
