"""Primitive optical building blocks: mirrors, propagation, quadratures.

Conventions used throughout the package:

* Mirror amplitude coefficients are real and nonnegative, rho = sqrt(R),
  tau = sqrt(T).  The scattering sign flip sits on one side of each
  mirror: a mirror with orientation o reflects with amplitude +o*rho on
  its front face and -o*rho on its back face, and transmits with +tau
  from either side.  Any self-consistent sign choice gives the same
  observable magnitudes; this one keeps the coupled-cavity design
  algebra real.
* A sideband field at carrier offset Omega (rad/s, signed: positive is
  the upper sideband) picks up exp(i*(tuning + Omega*length/c)) per
  single pass of a segment.  The tuning is the microscopic carrier
  detuning in radians; macroscopic length enters only through Omega/c.
* Quadrature (two-photon) objects act on the (amplitude, phase) pair.
  Rotations are ordinary 2x2 rotation matrices; a cavity detuning of
  phi rotates the quadrature pair by phi per pass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

C = 299_792_458.0  # m/s, exact
HBAR = 1.054_571_817e-34  # J s


@dataclass(frozen=True)
class MirrorSpec:
    """One mirror described by power coefficients R + T + loss = 1."""

    R: float
    T: float
    loss: float = 0.0

    def __post_init__(self):
        for name in ("R", "T", "loss"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"MirrorSpec.{name} = {v} outside [0, 1]")
        if abs(self.R + self.T + self.loss - 1.0) > 1e-12:
            raise ValueError(
                f"MirrorSpec power balance violated: R + T + loss = "
                f"{self.R + self.T + self.loss!r}"
            )

    @property
    def rho(self) -> float:
        return float(np.sqrt(self.R))

    @property
    def tau(self) -> float:
        return float(np.sqrt(self.T))

    @classmethod
    def from_reflectivity(cls, R: float, loss: float = 0.0) -> "MirrorSpec":
        return cls(R=R, T=1.0 - R - loss, loss=loss)

    @classmethod
    def from_transmission(cls, T: float, loss: float = 0.0) -> "MirrorSpec":
        return cls(R=1.0 - T - loss, T=T, loss=loss)


def _normalize_angle(a: float) -> float:
    """Map an angle to (-pi, pi]."""
    a = float((a + np.pi) % (2.0 * np.pi) - np.pi)
    return np.pi if a == -np.pi else a


@dataclass(frozen=True)
class PropagationSegment:
    """Free-space segment: macroscopic length plus microscopic tuning."""

    length: float
    tuning: float = 0.0

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError(f"segment length must be positive, got {self.length}")
        object.__setattr__(self, "tuning", _normalize_angle(self.tuning))


@dataclass(frozen=True)
class SidebandFrequency:
    """Signed sideband offset from the carrier, carried in rad/s."""

    omega: float

    def __post_init__(self):
        if not np.isfinite(self.omega):
            raise ValueError("sideband frequency must be finite")

    @property
    def f(self) -> float:
        return self.omega / (2.0 * np.pi)

    @classmethod
    def from_hz(cls, f: float) -> "SidebandFrequency":
        return cls(omega=2.0 * np.pi * f)


@dataclass
class QuadratureTransfer:
    """Per-frequency 2x2 noise transfer plus 2-vector signal transfer.

    matrix has shape (..., 2, 2) and maps input (amplitude, phase)
    quadratures at the dark port to output quadratures; signal_column
    has shape (..., 2) and is the response to unit differential phase
    modulation.  For lossless optics |det matrix| = 1.
    """

    matrix: np.ndarray
    signal_column: np.ndarray = field(default=None)

    def det_magnitude(self) -> np.ndarray:
        m = self.matrix
        det = m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]
        return np.abs(det)


def mirror_scattering(m: MirrorSpec) -> tuple[float, float]:
    """Amplitude coefficients (rho, tau) of a mirror.

    The orientation sign is applied by the network code, not here; for a
    lossless mirror rho**2 + tau**2 = 1.
    """
    return m.rho, m.tau


def propagation_phase(seg: PropagationSegment, omega) -> complex | np.ndarray:
    """Single-pass phase factor exp(i*(tuning + Omega L / c)) of a sideband."""
    om = omega.omega if isinstance(omega, SidebandFrequency) else omega
    return np.exp(1j * (seg.tuning + np.asarray(om) * seg.length / C))


def quadrature_rotation(angle: float) -> np.ndarray:
    """Rotation of the (amplitude, phase) quadrature pair by angle."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])
