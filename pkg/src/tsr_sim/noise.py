"""Two-photon input-output model of the dual-recycled Michelson.

The dark-port optics (recycling mirrors and the effective Michelson
mirror) form a chain whose innermost element is ponderomotive: an
amplitude-quadrature fluctuation a1 circulating against the carrier
pushes the test masses, and the resulting differential phase reappears
in the reflected phase quadrature.  In shot-noise-normalized quadrature
units the Michelson reflection is

    R_mi = rho_mi * [[1, 0], [-kappa, 1]],   kappa = 4 P w0 / (mu c^2 W^2)

with mu the reduced mass of the differential mode.  For a folded-arm
interferometer with four suspended arm optics of individual mass m the
standard reduced-mass normalization is mu = m / 4; the per-optic mass is
what lives in the configuration.  A differential phase modulation of xi
radians sources an output field c_sig * xi in the phase quadrature,
c_sig = sqrt(P / (2 hbar w0)), which fixes the noise-to-signal scale of
all spectra to radians of apparent differential phase per sqrt(Hz).

Working back from the Michelson through each recycling mirror gives the
closed-loop 2x2 noise transfer M(W) and signal column s(W); the spectral
density referred to a homodyne quadrature v is

    NSD(W) = sqrt(v^T M Sigma M^dag v) / |v . s|

with Sigma the input covariance (identity for vacuum).  Frequency sweeps
are chunked across threads when TSR_SIM_THREADS is set above 1; results
are concatenated in grid order and bit-identical to a serial run.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .cavity import (
    CavityChain,
    solve_coupling_transmission,
)
from .errors import DegenerateFrequency, NoRootInBracket
from .optics import (
    C,
    HBAR,
    MirrorSpec,
    PropagationSegment,
    QuadratureTransfer,
    _normalize_angle,
    quadrature_rotation,
)

__all__ = [
    "InterferometerParams",
    "DetunedSR",
    "TSR",
    "SqueezedInput",
    "HomodyneReadout",
    "NoiseSpectrum",
    "ComparisonResult",
    "MatchResult",
    "topology_chain",
    "io_relation",
    "input_covariance",
    "noise_spectral_density",
    "compare_topologies",
    "match_peak_sensitivity",
    "radiation_pressure_crossover",
    "strain_conversion",
]

AMPLITUDE_QUADRATURE = 0.0
PHASE_QUADRATURE = np.pi / 2.0


@dataclass(frozen=True)
class InterferometerParams:
    wavelength: float
    power_at_bs: float
    mirror_mass: float
    arm_length: float
    michelson_reflectivity: MirrorSpec

    def __post_init__(self):
        for name in ("wavelength", "power_at_bs", "mirror_mass", "arm_length"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"InterferometerParams.{name} must be positive")

    @property
    def carrier_omega(self) -> float:
        return 2.0 * np.pi * C / self.wavelength

    @property
    def reduced_mass(self) -> float:
        # differential mode of four suspended arm optics
        return self.mirror_mass / 4.0


@dataclass(frozen=True)
class DetunedSR:
    """Single recycling cavity, carrier-detuned to resonate one sideband.

    detuning is the single-pass carrier tuning in radians; +W*length/c
    resonates the lower sideband at offset W, the opposite sign the
    upper one.
    """

    detuning: float
    recycling_mirror: MirrorSpec
    length: float

    def __post_init__(self):
        if self.length <= 0:
            raise ValueError("DetunedSR.length must be positive")
        object.__setattr__(self, "detuning", _normalize_angle(self.detuning))

    @classmethod
    def at_resonance(cls, resonance_hz: float, length: float,
                     recycling_mirror: MirrorSpec,
                     sideband: str = "lower") -> "DetunedSR":
        if sideband not in ("lower", "upper"):
            raise ValueError(f"sideband must be 'lower' or 'upper', got {sideband!r}")
        phi = 2.0 * np.pi * resonance_hz * length / C
        return cls(detuning=phi if sideband == "lower" else -phi,
                   recycling_mirror=recycling_mirror, length=length)


@dataclass(frozen=True)
class TSR:
    """Twin recycling: coupled cavities, carrier-tuned by construction."""

    l1: float
    l2: float
    srm: MirrorSpec
    tsrm: MirrorSpec

    def __post_init__(self):
        if self.l1 <= 0 or self.l2 <= 0:
            raise ValueError("TSR lengths must be positive")

    @classmethod
    def designed(cls, params: "InterferometerParams", f_sp: float = 1000.0,
                 l1: float = 1200.0, l2: float = 1200.0,
                 tsrm: MirrorSpec | None = None) -> "TSR":
        """TSR whose coupling mirror is solved to split resonances at +-f_sp."""
        tc = solve_coupling_transmission(
            2.0 * np.pi * f_sp, l1, l2, params.michelson_reflectivity
        )
        return cls(
            l1=l1, l2=l2,
            srm=MirrorSpec.from_transmission(tc),
            tsrm=tsrm if tsrm is not None else MirrorSpec.from_reflectivity(0.963),
        )


Topology = DetunedSR | TSR


@dataclass(frozen=True)
class SqueezedInput:
    r: float = 0.0
    angle: float = PHASE_QUADRATURE
    enabled: bool = False

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("squeeze parameter r must be >= 0")

    @classmethod
    def vacuum(cls) -> "SqueezedInput":
        return cls()


@dataclass(frozen=True)
class HomodyneReadout:
    quadrature_angle: float = PHASE_QUADRATURE

    def __post_init__(self):
        a = self.quadrature_angle % np.pi
        object.__setattr__(self, "quadrature_angle", float(a))

    @property
    def vector(self) -> np.ndarray:
        a = self.quadrature_angle
        return np.array([np.cos(a), np.sin(a)])


@dataclass
class NoiseSpectrum:
    frequencies: np.ndarray
    nsd: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.nsd = np.asarray(self.nsd, dtype=float)
        if self.frequencies.shape != self.nsd.shape:
            raise ValueError("frequency grid and nsd must have matching shape")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        if not np.all(np.isfinite(self.nsd)) or np.any(self.nsd <= 0):
            raise ValueError("nsd values must be positive and finite")


def topology_chain(topology: Topology, params: InterferometerParams) -> CavityChain:
    """Passive mirror chain of a topology, outermost mirror first, with
    the effective Michelson mirror as the innermost element."""
    mi = params.michelson_reflectivity
    if isinstance(topology, TSR):
        return CavityChain(
            (topology.tsrm, topology.srm, mi),
            (PropagationSegment(topology.l1), PropagationSegment(topology.l2)),
        )
    return CavityChain(
        (topology.recycling_mirror, mi),
        (PropagationSegment(topology.length, topology.detuning),),
    )


def _kappa(params: InterferometerParams, om: np.ndarray) -> np.ndarray:
    return (4.0 * params.power_at_bs * params.carrier_omega
            / (params.reduced_mass * C * C * om * om))


def _signal_scale(params: InterferometerParams) -> float:
    return np.sqrt(params.power_at_bs / (2.0 * HBAR * params.carrier_omega))


def _inv2(M):
    det = M[..., 0, 0] * M[..., 1, 1] - M[..., 0, 1] * M[..., 1, 0]
    out = np.empty_like(M)
    out[..., 0, 0] = M[..., 1, 1] / det
    out[..., 1, 1] = M[..., 0, 0] / det
    out[..., 0, 1] = -M[..., 0, 1] / det
    out[..., 1, 0] = -M[..., 1, 0] / det
    return out


def _io_chunk(chain: CavityChain, om, kappa, csig):
    """Closed-loop quadrature transfer of the chain, innermost mirror
    ponderomotive.  om: (F,), returns M (F,2,2), s (F,2)."""
    F = len(om)
    eye = np.broadcast_to(np.eye(2), (F, 2, 2)).astype(complex)
    orients = chain.orientations

    mi = chain.mirrors[-1]
    G = np.broadcast_to(np.eye(2), (F, 2, 2)).copy().astype(complex)
    G[:, 1, 0] = -kappa
    G *= orients[-1] * mi.rho
    w = np.zeros((F, 2), dtype=complex)
    w[:, 1] = orients[-1] * mi.rho * csig

    for k in range(len(chain.mirrors) - 2, -1, -1):
        seg = chain.segments[k]
        phs = np.exp(1j * om * seg.length / C)
        P = phs[:, None, None] * np.broadcast_to(
            quadrature_rotation(seg.tuning), (F, 2, 2)
        )
        Gp = P @ G @ P
        wp = np.einsum("fij,fj->fi", P, w)
        mir = chain.mirrors[k]
        o = orients[k]
        rl, rr = o * mir.rho, -o * mir.rho
        D = _inv2(eye - rr * Gp)
        G = rl * eye + mir.tau * mir.tau * (Gp @ D)
        w = mir.tau * np.einsum("fij,fj->fi", D, wp)
    return G, w


def _sweep_threads() -> int:
    raw = os.environ.get("TSR_SIM_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def io_relation(topology: Topology, params: InterferometerParams, omega,
                back_action: bool = True) -> QuadratureTransfer:
    """Dark-port quadrature noise transfer M(W) and signal column s(W).

    omega: signed sideband offsets in rad/s, scalar or 1-D array, none
    exactly zero (free-mass susceptibility diverges there).  Setting
    back_action=False zeroes the ponderomotive coupling while keeping
    the signal transfer, isolating the pure shot-noise model.
    """
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(om == 0.0):
        raise DegenerateFrequency("sideband frequency grid touches 0")
    chain = topology_chain(topology, params)
    kappa = _kappa(params, om) if back_action else np.zeros_like(om)
    csig = _signal_scale(params)

    threads = _sweep_threads()
    if threads > 1 and len(om) >= 2 * threads:
        chunks = np.array_split(np.arange(len(om)), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda ix: _io_chunk(chain, om[ix], kappa[ix], csig), chunks)
            )
        M = np.concatenate([p[0] for p in parts], axis=0)
        s = np.concatenate([p[1] for p in parts], axis=0)
    else:
        M, s = _io_chunk(chain, om, kappa, csig)
    return QuadratureTransfer(matrix=M, signal_column=s)


def input_covariance(sq: SqueezedInput, omega=None) -> np.ndarray:
    """Covariance of the dark-port input field, shot-noise normalized.

    Vacuum (identity) when disabled or r = 0; otherwise the broadband
    squeezed-state covariance rot(angle) diag(e^{-2r}, e^{+2r})
    rot(angle)^T, frequency independent.
    """
    if not sq.enabled or sq.r == 0.0:
        return np.eye(2)
    Rm = quadrature_rotation(sq.angle)
    return Rm @ np.diag([np.exp(-2.0 * sq.r), np.exp(2.0 * sq.r)]) @ Rm.T


def _project_nsd(tf: QuadratureTransfer, Sigma: np.ndarray,
                 v: np.ndarray) -> np.ndarray:
    u = np.einsum("fji,j->fi", tf.matrix.conj(), v)  # M^dag v
    noise = np.einsum("fi,ij,fj->f", u.conj(), Sigma.astype(complex), u).real
    sig = np.abs(np.einsum("fi,i->f", tf.signal_column, v))
    return np.sqrt(noise) / sig


def strain_conversion(params: InterferometerParams) -> float:
    """Factor turning apparent differential phase into strain:
    h = xi * wavelength / (4 pi arm_length)."""
    return params.wavelength / (4.0 * np.pi * params.arm_length)


def noise_spectral_density(topology: Topology, params: InterferometerParams,
                           sq: SqueezedInput, readout: HomodyneReadout,
                           grid_hz, back_action: bool = True,
                           units: str = "phase") -> NoiseSpectrum:
    """Signal-referred linear noise spectral density on a frequency grid.

    Output units are radians of apparent differential phase per sqrt(Hz)
    ("phase"), or strain per sqrt(Hz) ("strain").
    """
    if units not in ("phase", "strain"):
        raise ValueError(f"unknown units {units!r}")
    f = np.asarray(grid_hz, dtype=float)
    tf = io_relation(topology, params, 2.0 * np.pi * f, back_action=back_action)
    Sigma = input_covariance(sq)
    nsd = _project_nsd(tf, Sigma, readout.vector)
    if units == "strain":
        nsd = nsd * strain_conversion(params)
    meta = {
        "topology": type(topology).__name__,
        "squeezing_r": sq.r if sq.enabled else 0.0,
        "squeezing_angle": sq.angle,
        "readout_angle": readout.quadrature_angle,
        "back_action": back_action,
        "units": {"phase": "rad/sqrt(Hz)", "strain": "1/sqrt(Hz)"}[units],
    }
    return NoiseSpectrum(frequencies=f, nsd=nsd, metadata=meta)


@dataclass(frozen=True)
class MatchResult:
    """Outcome of the peak-sensitivity match of the TSRM reflectivity."""

    tsrm: MirrorSpec
    fwhm_tsr_hz: float
    fwhm_sr_hz: float
    residual: float


def _response_fwhm(chain: CavityChain, params: InterferometerParams,
                   v: np.ndarray, f_lo: float, f_hi: float,
                   points: int = 8001) -> float:
    """FWHM of the shot-only signal power response |v.s|^2 near a peak."""
    fd = np.linspace(f_lo, f_hi, points)
    _, s = _io_chunk(chain, 2.0 * np.pi * fd, np.zeros(points),
                     _signal_scale(params))
    y = np.abs(np.einsum("fi,i->f", s, v)) ** 2
    i = int(np.argmax(y))
    half = y[i] / 2.0
    if i in (0, points - 1) or y[0] > half or y[-1] > half:
        raise NoRootInBracket(
            "resonance line too broad to measure inside the search window")
    lo = np.interp(half, y[: i + 1], fd[: i + 1])
    hi = np.interp(half, y[i:][::-1], fd[i:][::-1])
    return hi - lo


def match_peak_sensitivity(params: InterferometerParams, sr: DetunedSR,
                           tsr: TSR, bracket=(0.93, 0.998)) -> MatchResult:
    """Choose the TSRM reflectivity so TSR matches the SR peak sensitivity.

    Operationally this equalizes the resonance bandwidth: the FWHM of the
    TSR doublet line (phase-quadrature signal response) is matched to the
    FWHM of the detuned-SR resonance (amplitude quadrature) by a 1-D
    search over the TSRM power reflectivity.  Matching the minimum NSD
    instead has no solution here: the TSR phase-quadrature minimum stays
    below the SR amplitude-quadrature minimum for every reflectivity in
    (0.3, 0.998), so bandwidth equality is the feasible reading.  The
    achieved relative FWHM residual is reported.
    """
    f_res = abs(sr.detuning) * C / (2.0 * np.pi * sr.length)
    # wide window: near the low bracket end the line is several hundred
    # Hz across and its half-power points sit far from the peak
    f_lo, f_hi = 0.2 * f_res, 2.0 * f_res
    v_am = HomodyneReadout(AMPLITUDE_QUADRATURE).vector
    v_ph = HomodyneReadout(PHASE_QUADRATURE).vector

    sr_chain = topology_chain(sr, params)
    w_sr = _response_fwhm(sr_chain, params, v_am, f_lo, f_hi)

    def width_gap(R):
        cand = replace(tsr, tsrm=MirrorSpec.from_reflectivity(R))
        return (
            _response_fwhm(topology_chain(cand, params), params, v_ph, f_lo, f_hi)
            - w_sr
        )

    lo, hi = bracket
    if np.sign(width_gap(lo)) == np.sign(width_gap(hi)):
        raise NoRootInBracket(
            f"no TSRM reflectivity in {bracket} matches the SR bandwidth"
        )
    R_star = brentq(width_gap, lo, hi, rtol=1e-10)
    matched = MirrorSpec.from_reflectivity(R_star)
    w_tsr = _response_fwhm(
        topology_chain(replace(tsr, tsrm=matched), params), params,
        v_ph, f_lo, f_hi,
    )
    return MatchResult(
        tsrm=matched, fwhm_tsr_hz=w_tsr, fwhm_sr_hz=w_sr,
        residual=abs(w_tsr - w_sr) / w_sr,
    )


@dataclass
class ComparisonResult:
    tsr: NoiseSpectrum
    sr_upper: NoiseSpectrum
    sr_lower: NoiseSpectrum
    crossover_hz: float | None
    max_improvement: float
    metadata: dict = field(default_factory=dict)


def compare_topologies(params: InterferometerParams, sq: SqueezedInput,
                       grid_hz, tsr: TSR | None = None,
                       sr_mirror: MirrorSpec | None = None,
                       resonance_hz: float = 1000.0,
                       match: bool = False,
                       units: str = "phase") -> ComparisonResult:
    """TSR against detuned SR of the upper and lower sideband.

    All three spectra use identical interferometer parameters; TSR is
    read out in the phase quadrature, the SR variants in the amplitude
    quadrature.  By default both topologies carry the same recycling
    reflectivity; match=True instead runs the bandwidth-equalizing
    search of match_peak_sensitivity over the TSRM.  Reports the
    crossover frequency above which TSR beats both SR variants at every
    grid point, and the maximum improvement factor above it.
    """
    f = np.asarray(grid_hz, dtype=float)
    if tsr is None:
        tsr = TSR.designed(params, f_sp=resonance_hz)
    if sr_mirror is None:
        sr_mirror = tsr.tsrm
    sr_len = tsr.l2
    sr_lower = DetunedSR.at_resonance(resonance_hz, sr_len, sr_mirror, "lower")
    sr_upper = DetunedSR.at_resonance(resonance_hz, sr_len, sr_mirror, "upper")

    meta = {"match": match, "sr_recycling_R": sr_mirror.R, "tsrm_R": tsr.tsrm.R}
    if match:
        res = match_peak_sensitivity(params, sr_lower, tsr)
        tsr = replace(tsr, tsrm=res.tsrm)
        meta.update(
            tsrm_R=res.tsrm.R, match_residual=res.residual,
            fwhm_tsr_hz=res.fwhm_tsr_hz, fwhm_sr_hz=res.fwhm_sr_hz,
        )

    spec_tsr = noise_spectral_density(
        tsr, params, sq, HomodyneReadout(PHASE_QUADRATURE), f, units=units)
    spec_sru = noise_spectral_density(
        sr_upper, params, sq, HomodyneReadout(AMPLITUDE_QUADRATURE), f, units=units)
    spec_srl = noise_spectral_density(
        sr_lower, params, sq, HomodyneReadout(AMPLITUDE_QUADRATURE), f, units=units)

    both = np.minimum(spec_sru.nsd, spec_srl.nsd)
    losing = np.where(spec_tsr.nsd >= both)[0]
    if len(losing) == 0:
        crossover = float(f[0])
    elif losing[-1] == len(f) - 1:
        crossover = None
    else:
        crossover = float(f[losing[-1] + 1])
    if crossover is None:
        max_improvement = float((both / spec_tsr.nsd).max())
    else:
        above = f >= crossover
        max_improvement = float((both[above] / spec_tsr.nsd[above]).max())
    meta["crossover_hz"] = crossover
    meta["max_improvement"] = max_improvement
    return ComparisonResult(
        tsr=spec_tsr, sr_upper=spec_sru, sr_lower=spec_srl,
        crossover_hz=crossover, max_improvement=max_improvement, metadata=meta,
    )


def radiation_pressure_crossover(topology: Topology,
                                 params: InterferometerParams,
                                 sq: SqueezedInput,
                                 readout: HomodyneReadout,
                                 grid_hz) -> float:
    """Upper edge of the back-action-dominated band on the given grid.

    Returns the lowest grid frequency above which the full NSD stays
    within 3 dB (a factor sqrt(2)) of the shot-only NSD; the returned
    frequency is the start of the shot-noise-limited band.  Falls back
    to the grid start when back action never reaches 3 dB.
    """
    f = np.asarray(grid_hz, dtype=float)
    full = noise_spectral_density(topology, params, sq, readout, f)
    shot = noise_spectral_density(topology, params, sq, readout, f,
                                  back_action=False)
    ratio = full.nsd / shot.nsd
    above = np.where(ratio >= np.sqrt(2.0))[0]
    if len(above) == 0:
        return float(f[0])
    if above[-1] == len(f) - 1:
        raise NoRootInBracket("grid ends inside the back-action band")
    return float(f[above[-1] + 1])
