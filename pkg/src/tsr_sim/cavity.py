"""Coupled-cavity frequency responses and the coupling-transmission design
equations.

A CavityChain is an ordered line of mirrors, listed from the input side
(the mirror light enters first, e.g. TSRM) inward to the effective
Michelson mirror.  Mirror orientations alternate so that the innermost
mirror always carries orientation -1; with all tunings zero this makes
the innermost cavity carrier-resonant and the resonance doublet of a
three-mirror chain symmetric about the carrier.

The doublet "response" observable defaults to the power circulating in
the outermost gap (between the first two mirrors), which peaks exactly
at the designed split frequencies.  Transmitted power through the
innermost mirror is available as an alternative; its maxima are pulled
toward the carrier by a fraction of the line width when the end mirrors
are lossy, so the buildup is the more faithful splitting probe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import NoRootInBracket, PeaksNotFound, SingularSystem
from .optics import C, MirrorSpec, PropagationSegment

__all__ = [
    "CavityChain",
    "DoubletResult",
    "reflection_rho23",
    "chain_transfer",
    "doublet_response",
    "find_doublet_peaks",
    "solve_coupling_transmission",
    "coupling_transmission_equal_lengths",
    "coupling_transmission_ideal",
    "network_oracle",
    "OracleSolution",
]


@dataclass(frozen=True)
class CavityChain:
    """Ordered mirrors with the free-space segments between them."""

    mirrors: tuple[MirrorSpec, ...]
    segments: tuple[PropagationSegment, ...]

    def __post_init__(self):
        object.__setattr__(self, "mirrors", tuple(self.mirrors))
        object.__setattr__(self, "segments", tuple(self.segments))
        if len(self.segments) != len(self.mirrors) - 1:
            raise ValueError(
                f"chain needs len(mirrors)-1 segments, got {len(self.mirrors)} "
                f"mirrors and {len(self.segments)} segments"
            )
        if len(self.mirrors) < 2:
            raise ValueError("chain needs at least two mirrors")

    @property
    def orientations(self) -> tuple[int, ...]:
        n = len(self.mirrors)
        return tuple((-1) ** (n - i) for i in range(n))


@dataclass(frozen=True)
class DoubletResult:
    """Located resonance doublet: peak positions, heights and FWHMs."""

    f_minus: float
    f_plus: float
    peak_magnitudes: tuple[float, float]
    bandwidths: tuple[float, float]

    @property
    def splitting(self) -> float:
        return self.f_plus - self.f_minus


def reflection_rho23(omega, length: float, srm: MirrorSpec, end: MirrorSpec,
                     tuning: float = 0.0):
    """Complex reflection of the two-mirror sub-cavity (SRM + Michelson)
    seen from the coupling side.

    With x = Omega*L/c + tuning the reflection reads

        rho23(x) = (rho_c - (R+T)_srm * rho_end * e^{2ix})
                   / (1 - rho_c * rho_end * e^{2ix})

    whose phase at the split frequency supplies the design condition for
    the coupling transmission.  Vectorized over omega (rad/s).
    """
    if length <= 0:
        raise ValueError("cavity length must be positive")
    x = np.asarray(omega) * length / C + tuning
    z = np.exp(2j * x)
    rho_c = srm.rho
    rt = srm.R + srm.T  # 1 - loss
    return (rho_c - rt * end.rho * z) / (1.0 - rho_c * end.rho * z)


def _transfer_stack(chain: CavityChain, omega):
    """Total 2x2 left-to-right field transfer matrix, vectorized over omega."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    M = np.broadcast_to(np.eye(2, dtype=complex), om.shape + (2, 2)).copy()
    orients = chain.orientations
    for i, mir in enumerate(chain.mirrors):
        rho, tau = mir.rho, mir.tau
        if tau == 0.0:
            raise SingularSystem(
                "transfer composition undefined through a perfectly "
                "reflective mirror; use network_oracle"
            )
        o = orients[i]
        rl, rr = o * rho, -o * rho
        Mi = np.array(
            [[(tau * tau - rl * rr) / tau, rr / tau], [-rl / tau, 1.0 / tau]],
            dtype=complex,
        )
        M = Mi @ M
        if i < len(chain.segments):
            seg = chain.segments[i]
            phi = om * seg.length / C + seg.tuning
            P = np.zeros(om.shape + (2, 2), dtype=complex)
            P[..., 0, 0] = np.exp(1j * phi)
            P[..., 1, 1] = np.exp(-1j * phi)
            M = P @ M
    return M


def chain_transfer(chain: CavityChain, omega):
    """Overall reflection and transmission amplitudes of the chain.

    Input from the left (first mirror).  Returns (r, t), each shaped
    like omega.
    """
    scalar = np.isscalar(omega)
    M = _transfer_stack(chain, omega)
    r = -M[..., 1, 0] / M[..., 1, 1]
    t = M[..., 0, 0] + M[..., 0, 1] * r
    if scalar:
        return complex(r[0]), complex(t[0])
    return r, t


def doublet_response(chain: CavityChain, freqs_hz, observable: str = "buildup"):
    """Frequency response of a coupled-cavity chain on a grid of sideband
    frequencies (Hz, may be signed).

    observable = "buildup" returns the circulating power in the outermost
    gap; "transmission" returns the transmitted power through the
    innermost mirror.
    """
    if len(chain.mirrors) < 3:
        raise ValueError("doublet response needs a chain of at least three mirrors")
    if observable not in ("buildup", "transmission"):
        raise ValueError(f"unknown observable {observable!r}")
    om = 2.0 * np.pi * np.asarray(freqs_hz, dtype=float)
    if observable == "transmission":
        _, t = chain_transfer(chain, om)
        return np.abs(t) ** 2

    front = chain.mirrors[0]
    rest = CavityChain(chain.mirrors[1:], chain.segments[1:])
    r_rest, _ = chain_transfer(rest, om)
    seg = chain.segments[0]
    ph2 = np.exp(2j * (om * seg.length / C + seg.tuning))
    # inner-face reflection of the front mirror is -o0*rho0
    o0 = chain.orientations[0]
    u = front.tau / (1.0 - (-o0) * front.rho * r_rest * ph2)
    v = r_rest * ph2 * u
    return np.abs(u) ** 2 + np.abs(v) ** 2


def _parabolic_vertex(x, y, i):
    """Vertex of the parabola through three samples around index i.

    Handles non-uniform abscissae (log grids).  Returns (x*, y*).
    """
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    d01, d21 = x0 - x1, x2 - x1
    num = d01 * d01 * (y1 - y2) - d21 * d21 * (y1 - y0)
    den = d01 * (y1 - y2) - d21 * (y1 - y0)
    if den == 0.0:
        return x1, y1
    dx = 0.5 * num / den
    # quadratic value at the vertex via Lagrange form
    a = (y0 - y1) / (d01 * (x0 - x2)) - (y2 - y1) / (d21 * (x0 - x2))
    b = ((y2 - y1) * d01 / d21 - (y0 - y1) * d21 / d01) / (x0 - x2)
    return x1 + dx, y1 + b * dx + a * dx * dx


def _half_crossing(x, y, i_peak, half, direction):
    """Interpolated abscissa where y falls to `half`, walking from a peak."""
    i = i_peak
    while 0 < i < len(y) - 1:
        j = i + direction
        if y[j] <= half:
            # linear interpolation between i and j
            frac = (y[i] - half) / (y[i] - y[j])
            return x[i] + frac * (x[j] - x[i])
        if y[j] > y[i] and j != i_peak:  # climbing the next peak: unresolved
            return np.nan
        i = j
        if i == 0 or i == len(y) - 1:
            break
    return np.nan


def find_doublet_peaks(freqs_hz, response) -> DoubletResult:
    """Locate the two doublet maxima of a sampled response curve.

    Grid scan for strict local maxima, keeps the two largest, then
    refines each with a 3-point parabola on the log of the response.
    FWHM bandwidths come from interpolated half-power crossings; a side
    that runs into a neighbouring peak before dropping to half power
    reports nan.  Raises PeaksNotFound when fewer than two interior
    maxima exist.
    """
    f = np.asarray(freqs_hz, dtype=float)
    y = np.asarray(response, dtype=float)
    if f.shape != y.shape or f.ndim != 1:
        raise ValueError("frequency grid and response must be equal-length 1-D")
    idx = [
        i
        for i in range(1, len(y) - 1)
        if y[i] > y[i - 1] and y[i] > y[i + 1]
    ]
    if len(idx) < 2:
        raise PeaksNotFound(f"found {len(idx)} local maxima, need 2")
    idx = sorted(sorted(idx, key=lambda i: -y[i])[:2])

    logy = np.log(np.maximum(y, np.finfo(float).tiny))
    peaks = []
    for i in idx:
        fpk, logm = _parabolic_vertex(f, logy, i)
        half = y[i] / 2.0
        lo = _half_crossing(f, y, i, half, -1)
        hi = _half_crossing(f, y, i, half, +1)
        peaks.append((fpk, float(np.exp(logm)), hi - lo))
    (f1, m1, b1), (f2, m2, b2) = peaks
    return DoubletResult(
        f_minus=f1, f_plus=f2, peak_magnitudes=(m1, m2), bandwidths=(b1, b2)
    )


def _check_splitting_bracket(omega_sp: float, lmax: float):
    # above a quarter FSR the doublet aliases toward the adjacent
    # longitudinal mode and the placement is no longer unique
    if not 0.0 < omega_sp < np.pi * C / (4.0 * lmax):
        raise ValueError(
            f"split frequency {omega_sp / (2 * np.pi):.6g} Hz outside "
            f"(0, quarter free spectral range {C / (8.0 * lmax):.6g} Hz) "
            f"for length {lmax:.6g} m"
        )


def solve_coupling_transmission(omega_sp: float, l1: float, l2: float,
                                end: MirrorSpec) -> float:
    """Coupling-mirror power transmission T_c that places the doublet
    peaks at +-omega_sp, for general resonator lengths.

    Solves the phase-intersection condition

        -arg[rho23(omega_sp * l2 / c)] / 2 = (l1 / l2) * omega_sp * l2 / c

    by bracketed root finding in T_c on (0, 1), relative tolerance 1e-12.
    Below the quarter free spectral range the condition always brackets a
    sign change (the phase ranges from 0 to pi/2 - x as T_c goes 0 to 1),
    so the residual no-root guard is purely defensive.
    """
    _check_splitting_bracket(omega_sp, max(l1, l2))
    x = omega_sp * l2 / C
    target = (l1 / l2) * x
    rho_e = end.rho

    def g(tc):
        rho_c = np.sqrt(1.0 - tc)
        z = np.exp(2j * x)
        r23 = (rho_c - rho_e * z) / (1.0 - rho_c * rho_e * z)
        return -0.5 * np.angle(r23) - target

    eps = 1e-15
    ga, gb = g(eps), g(1.0 - eps)
    if np.sign(ga) == np.sign(gb):
        raise NoRootInBracket(
            f"no coupling transmission in (0, 1) yields a "
            f"{omega_sp / (2 * np.pi):.6g} Hz splitting for lengths "
            f"l1={l1:.6g} m, l2={l2:.6g} m"
        )
    return brentq(g, eps, 1.0 - eps, rtol=1e-12, maxiter=200)


def coupling_transmission_equal_lengths(omega_sp: float, length: float,
                                        end: MirrorSpec) -> float:
    """Closed-form coupling transmission for equal resonator lengths:

        T_c = 1 - 4 cos^2(2 omega_sp L / c) rho_end^2 / (1 + rho_end^2)^2

    Tiny negative round-off is clamped to zero.
    """
    rho2 = end.R
    tc = 1.0 - 4.0 * np.cos(2.0 * omega_sp * length / C) ** 2 * rho2 / (1.0 + rho2) ** 2
    return max(tc, 0.0)


def coupling_transmission_ideal(omega_sp: float, length: float) -> float:
    """Equal-length coupling transmission with a perfect end mirror:
    T_c = 1 - cos^2(2 omega_sp L / c)."""
    return 1.0 - np.cos(2.0 * omega_sp * length / C) ** 2


@dataclass(frozen=True)
class OracleSolution:
    """All steady-state field amplitudes of a chain at one frequency.

    forward[k] / backward[k] are the amplitudes in gap k (right- and
    left-moving, measured at the gap's left and right mirror faces).
    """

    reflection: complex
    transmission: complex
    forward: np.ndarray
    backward: np.ndarray


def network_oracle(chain: CavityChain, omega: float,
                   a_in: complex = 1.0) -> OracleSolution:
    """Dense linear-system solve of the chain's steady-state fields.

    Assembles one equation per outgoing mirror port and solves directly;
    kept deliberately independent of the composed transfer expressions so
    it can serve as a test oracle.  Raises SingularSystem for exactly
    degenerate configurations (e.g. two perfect mirrors on resonance).
    """
    n = len(chain.mirrors)
    orients = chain.orientations
    N = 2 * n
    A = np.zeros((N, N), dtype=complex)
    b = np.zeros(N, dtype=complex)
    iu = lambda k: k
    iv = lambda k: (n - 1) + k
    irefl, itrans = 2 * (n - 1), 2 * (n - 1) + 1

    for k, mir in enumerate(chain.mirrors):
        rho, tau = mir.rho, mir.tau
        o = orients[k]
        rl, rr = o * rho, -o * rho
        phL = phR = None
        if k > 0:
            seg = chain.segments[k - 1]
            phL = np.exp(1j * (omega * seg.length / C + seg.tuning))
        if k < n - 1:
            seg = chain.segments[k]
            phR = np.exp(1j * (omega * seg.length / C + seg.tuning))
        # outgoing to the left: rl * A_k + tau * B_k
        rowL = irefl if k == 0 else iv(k - 1)
        A[2 * k, rowL] = -1.0
        if k == 0:
            b[2 * k] -= rl * a_in
        else:
            A[2 * k, iu(k - 1)] = rl * phL
        if k < n - 1:
            A[2 * k, iv(k)] = tau * phR
        # outgoing to the right: tau * A_k + rr * B_k
        rowR = itrans if k == n - 1 else iu(k)
        A[2 * k + 1, rowR] = -1.0
        if k == 0:
            b[2 * k + 1] -= tau * a_in
        else:
            A[2 * k + 1, iu(k - 1)] = tau * phL
        if k < n - 1:
            A[2 * k + 1, iv(k)] = rr * phR

    try:
        x = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    return OracleSolution(
        reflection=complex(x[irefl]),
        transmission=complex(x[itrans]),
        forward=x[: n - 1].copy(),
        backward=x[n - 1 : 2 * (n - 1)].copy(),
    )
