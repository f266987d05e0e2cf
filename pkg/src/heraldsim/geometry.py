"""Emitter-pair geometry and the propagation phases seen by the detectors.

A detection direction is parametrized by the longitude ``theta``
measured from the emitter axis inside the reference plane and the
latitude ``chi`` out of that plane:

    e(theta, chi) = cos(theta) cos(chi) * axis
                    + sin(theta) cos(chi) * n1 + sin(chi) * n2,

with (axis, n1, n2) a right-handed orthonormal frame.  The solid-angle
measure in these coordinates is ``cos(chi) dtheta dchi``.  A photon
reaching direction ``e`` from emitter B instead of emitter A is
retarded by ``k * (R_B - R_A) . e``; for the unperturbed pair this is
``k * d * cos(theta) * cos(chi)``.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .optics import Polarizer

__all__ = [
    "AtomPairLayout",
    "DetectorPatch",
    "FiberChannel",
    "TrapModel",
    "detection_direction",
    "farfield_phase",
    "fiber_phase",
    "delta21",
    "wrap_phase",
    "perturbed_phase",
]


def _unit_axis(axis):
    vec = np.asarray(axis, dtype=float)
    if vec.shape != (3,):
        raise InvalidInputError("axis must be a 3-vector")
    norm = np.linalg.norm(vec)
    if not np.isfinite(norm) or norm == 0.0:
        raise InvalidInputError("axis must be a nonzero finite 3-vector")
    return tuple(vec / norm)


@dataclass(frozen=True)
class AtomPairLayout:
    """Two trapped emitters a fixed distance apart.

    Attributes
    ----------
    separation : float
        Distance d between the emitters in meters, > 0.
    wavelength : float
        Emission wavelength in meters, > 0.
    axis : tuple
        Unit vector from emitter A to emitter B (normalized on
        construction); defaults to the lab x axis.
    """

    separation: float
    wavelength: float
    axis: tuple = (1.0, 0.0, 0.0)

    def __post_init__(self):
        if not (self.separation > 0.0 and np.isfinite(self.separation)):
            raise InvalidInputError("separation must be positive and finite")
        if not (self.wavelength > 0.0 and np.isfinite(self.wavelength)):
            raise InvalidInputError("wavelength must be positive and finite")
        object.__setattr__(self, "axis", _unit_axis(self.axis))

    @property
    def wavenumber(self):
        """2 pi / wavelength in rad/m."""
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class DetectorPatch:
    """Finite detector surface on the far-field sphere plus its analyzer.

    ``span_theta`` and ``span_chi`` are the full angular widths of the
    patch around its center; zero widths describe an ideal point
    detector.  The patch must stay inside theta in [0, pi] and chi in
    (-pi/2, pi/2) when integrated over.
    """

    theta_center: float
    span_theta: float
    span_chi: float
    polarizer: Polarizer
    chi_center: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.theta_center < np.pi:
            raise InvalidInputError("theta_center must lie strictly inside (0, pi)")
        if self.span_theta < 0.0 or self.span_chi < 0.0:
            raise InvalidInputError("patch spans must be nonnegative")
        if not -np.pi / 2 < self.chi_center < np.pi / 2:
            raise InvalidInputError("chi_center must lie strictly inside (-pi/2, pi/2)")


@dataclass(frozen=True)
class FiberChannel:
    """Collection into fibers of optical path lengths w_a and w_b (meters)."""

    path_a: float
    path_b: float

    def __post_init__(self):
        if self.path_a < 0.0 or self.path_b < 0.0:
            raise InvalidInputError("fiber path lengths must be nonnegative")


@dataclass(frozen=True)
class TrapModel:
    """Isotropic Gaussian position spread of each emitter in its trap.

    ``confinement`` is the per-axis rms displacement in meters; 0 means
    pinned emitters.
    """

    confinement: float

    def __post_init__(self):
        if self.confinement < 0.0 or not np.isfinite(self.confinement):
            raise InvalidInputError("confinement must be nonnegative and finite")


def _frame(axis):
    """Right-handed orthonormal frame (axis, n1, n2); deterministic choice."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    ref = np.array([0.0, 1.0, 0.0]) if abs(a[0]) >= 0.9 else np.array([1.0, 0.0, 0.0])
    n1 = ref - np.dot(ref, a) * a
    n1 /= np.linalg.norm(n1)
    n2 = np.cross(a, n1)
    return a, n1, n2


def detection_direction(axis, theta, chi=0.0):
    """Unit direction(s) at longitude ``theta`` and latitude ``chi``.

    ``theta`` and ``chi`` broadcast; the result has their common shape
    plus a trailing axis of length 3.
    """
    a, n1, n2 = _frame(axis)
    theta = np.asarray(theta, dtype=float)
    chi = np.asarray(chi, dtype=float)
    cos_chi = np.cos(chi)
    return (
        np.multiply.outer(np.cos(theta) * cos_chi, a)
        + np.multiply.outer(np.sin(theta) * cos_chi, n1)
        + np.multiply.outer(np.broadcast_to(np.sin(chi), np.broadcast_shapes(theta.shape, chi.shape)).copy(), n2)
    )


def farfield_phase(layout, theta, chi=0.0):
    """Propagation phase k d cos(theta) cos(chi) of one far-field direction.

    Monotonically decreasing in theta on (0, pi) and even in chi; at
    theta = pi/2 the phase vanishes for every chi while its theta
    sensitivity peaks at k*d per radian, which is why detectors sit
    near the equator with a wide latitude opening.
    """
    return layout.wavenumber * layout.separation * np.cos(theta) * np.cos(chi)


def fiber_phase(layout, channel):
    """Propagation phase k (w_b - w_a) of a fiber-coupled channel."""
    return layout.wavenumber * (channel.path_b - channel.path_a)


def wrap_phase(phase):
    """Reduce a phase to the interval (-pi, pi]."""
    reduced = np.mod(phase, 2.0 * np.pi)
    if np.isscalar(reduced) or reduced.ndim == 0:
        return float(reduced - 2.0 * np.pi) if reduced > np.pi else float(reduced)
    reduced = np.where(reduced > np.pi, reduced - 2.0 * np.pi, reduced)
    return reduced


def delta21(phase1, phase2):
    """Relative detection phase (channel 2 minus channel 1), in (-pi, pi].

    The reduction is for reporting; integration code keeps raw phase
    differences, which is equivalent because only exp(-1j * delta)
    enters any observable.
    """
    return wrap_phase(np.asarray(phase2) - np.asarray(phase1))


def perturbed_phase(layout, theta, chi, displacement_a, displacement_b):
    """Propagation phase with the emitters displaced inside their traps.

    Computes ``k * (d * axis + u_b - u_a) . e(theta, chi)`` for lab-frame
    displacement 3-vectors ``u_a`` and ``u_b`` in meters.  Displacements
    are expected small against the separation; above d/10 the far-field
    linearization is doubtful and a warning is emitted.
    """
    u_a = np.asarray(displacement_a, dtype=float)
    u_b = np.asarray(displacement_b, dtype=float)
    if u_a.shape != (3,) or u_b.shape != (3,):
        raise InvalidInputError("displacements must be 3-vectors")
    largest = max(np.linalg.norm(u_a), np.linalg.norm(u_b))
    if largest > layout.separation / 10.0:
        warnings.warn(
            f"displacement {largest:.3g} m exceeds a tenth of the separation; "
            "far-field phase linearization may be inaccurate",
            stacklevel=2,
        )
    offset = layout.separation * np.asarray(layout.axis) + u_b - u_a
    direction = detection_direction(layout.axis, theta, chi)
    return layout.wavenumber * float(np.dot(offset, direction))
