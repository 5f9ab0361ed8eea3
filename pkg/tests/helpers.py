"""Shared randomized-geometry builders and an independent dense oracle
for the closed-loop quadrature transfer.

The dense oracle assembles one 2x2-block equation per mirror port and
solves the whole network at once, with the ponderomotive reflection and
the signal source placed at the innermost mirror.  It shares no code
path with the recursive composition in tsr_sim.noise, so agreement is
meaningful evidence.
"""

import numpy as np

from tsr_sim import CavityChain, MirrorSpec, PropagationSegment
from tsr_sim.optics import C


def random_mirror(rng, lossy=False):
    loss = float(rng.uniform(1e-6, 0.05)) if lossy else 0.0
    R = float(rng.uniform(0.05, 0.995)) * (1.0 - loss)
    return MirrorSpec.from_reflectivity(R, loss=loss)


def random_chain(rng, lossy=False, max_mirrors=5, tuned=True):
    n = int(rng.integers(2, max_mirrors + 1))
    mirrors = tuple(random_mirror(rng, lossy) for _ in range(n))
    segments = tuple(
        PropagationSegment(
            float(rng.uniform(1.0, 4000.0)),
            float(rng.uniform(-np.pi, np.pi)) if tuned else 0.0,
        )
        for _ in range(n - 1)
    )
    return CavityChain(mirrors, segments)


def dense_io_oracle(chain, omega, kappa, c_sig):
    """Block linear solve of the dark-port quadrature network.

    Unknowns per gap k: u_k (rightward, leaving mirror k) and w_k
    (leftward, leaving mirror k+1), plus the output field b.  Returns
    (M, s): the 2x2 noise transfer and the signal column at one signed
    sideband frequency omega (rad/s).
    """
    n = len(chain.mirrors)
    orients = chain.orientations
    ng = n - 1
    dim = 2 * (2 * ng + 1)
    iu = lambda k: 2 * k
    iw = lambda k: 2 * (ng + k)
    ib = 4 * ng

    def prop(k):
        seg = chain.segments[k]
        ph = np.exp(1j * omega * seg.length / C)
        c, s = np.cos(seg.tuning), np.sin(seg.tuning)
        return ph * np.array([[c, -s], [s, c]])

    A = np.zeros((dim, dim), dtype=complex)
    rhs = np.zeros((dim, 3), dtype=complex)  # columns: a=e1, a=e2, xi=1
    I2 = np.eye(2)

    def put(row, col, block):
        A[row : row + 2, col : col + 2] += block

    row = 0
    m0 = chain.mirrors[0]
    o0 = orients[0]
    # b = o0 rho0 a + tau0 P0 w0
    put(row, ib, I2)
    put(row, iw(0), -m0.tau * prop(0))
    rhs[row : row + 2, :2] += o0 * m0.rho * I2
    row += 2
    # u0 = tau0 a + (-o0 rho0) P0 w0
    put(row, iu(0), I2)
    put(row, iw(0), o0 * m0.rho * prop(0))
    rhs[row : row + 2, :2] += m0.tau * I2
    row += 2

    for m in range(1, n - 1):
        mir = chain.mirrors[m]
        o = orients[m]
        put(row, iw(m - 1), I2)
        put(row, iu(m - 1), -o * mir.rho * prop(m - 1))
        put(row, iw(m), -mir.tau * prop(m))
        row += 2
        put(row, iu(m), I2)
        put(row, iu(m - 1), -mir.tau * prop(m - 1))
        put(row, iw(m), -(-o * mir.rho) * prop(m))
        row += 2

    end = chain.mirrors[-1]
    oe = orients[-1]
    K = np.array([[1.0, 0.0], [-kappa, 1.0]])
    put(row, iw(ng - 1), I2)
    put(row, iu(ng - 1), -oe * end.rho * (K @ prop(ng - 1)))
    rhs[row + 1, 2] = oe * end.rho * c_sig
    row += 2
    assert row == dim

    x = np.linalg.solve(A, rhs)
    return x[ib : ib + 2, :2], x[ib : ib + 2, 2]
