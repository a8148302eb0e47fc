"""Rotating-frame Hamiltonians, Liouvillian assembly, evolution, steady state.

The six-level receiver evolves under a Lindblad master equation. In the
rotating frame the Hamiltonian is time independent whenever the closed-loop
RF detuning ``delta = Delta_4 - (Delta_1 + Delta_2 + Delta_3)`` vanishes;
otherwise the loop branch (levels 3 and 6) carries an explicit
``exp(-i delta t)`` phase and no stationary frame exists.

Vectorization is column-major throughout (see :mod:`rydberg_receiver.numerics`):
``vec(rho)[i + 6 j] = rho[i, j]`` zero-based. Under that stacking the
generator acting on ``vec(rho)`` is::

    L = -i (I (x) H - H^T (x) I)
        + sum_(l->k)  gamma * ( conj(J) (x) J - 1/2 (I (x) J^H J + (J^H J)^T (x) I) )

with jump operators ``J = |k><l|`` for each decay channel ``l -> k``.

All angular frequencies are rad/us and times are us, so generator entries
stay O(1e-3 .. 1e2) and ``t = 10`` is a round number.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .numerics import null_space, NULL_SPACE_TOL
from .scheme import Architecture, LevelScheme

__all__ = [
    "DriveConfig",
    "DensityMatrix",
    "Liouvillian",
    "TimeDependentLiouvillian",
    "Trajectory",
    "build_hamiltonian_resonant",
    "build_hamiltonian_general",
    "build_liouvillian",
    "make_generator",
    "evolve",
    "steady_state",
    "steady_state_numerical",
    "ground_state",
    "basis_state",
    "vectorize",
    "unvectorize",
    "taylor_propagator",
    "DEFAULT_DT",
]

#: Default integrator step (us). At the bundled parameters the generator
#: norm is a few tens of rad/us, so 1e-4 sits two orders below the
#: stability bound dt <= 0.1 / ||L||.
DEFAULT_DT = 1e-4

_HERM_TOL = 1e-9
_TRACE_TOL = 1e-9
_EIG_TOL = -1e-8


@dataclass(frozen=True)
class DriveConfig:
    """All coherent drive parameters of the six-level system.

    Rabi amplitudes are nonnegative (phases are carried separately in
    ``rf_phases``); every angular frequency is rad/us.

    Attributes
    ----------
    omega_p, omega_c : float
        Probe (1-2) and coupling (2-3) Rabi amplitudes.
    rf_rabi : tuple of 4 floats
        RF Rabi amplitudes on channels 1..4 (edges 3-4, 4-5, 5-6, 3-6).
    delta_p, delta_c : float
        Probe and coupling detunings.
    rf_detunings : tuple of 4 floats
    rf_phases : tuple of 4 floats
        Phases (rad) multiplying each RF coupling as ``exp(+i phi)`` on the
        upper triangle.
    """

    omega_p: float
    omega_c: float
    rf_rabi: tuple
    delta_p: float = 0.0
    delta_c: float = 0.0
    rf_detunings: tuple = (0.0, 0.0, 0.0, 0.0)
    rf_phases: tuple = (0.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        for name in ("rf_rabi", "rf_detunings", "rf_phases"):
            vals = tuple(float(v) for v in getattr(self, name))
            if len(vals) != 4:
                raise ValueError(f"DriveConfig.{name}: expected 4 entries, got {len(vals)}")
            if not all(np.isfinite(vals)):
                raise ValueError(f"DriveConfig.{name}: non-finite entry in {vals}")
            object.__setattr__(self, name, vals)
        for name in ("omega_p", "omega_c", "delta_p", "delta_c"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.omega_p < 0 or self.omega_c < 0 or any(v < 0 for v in self.rf_rabi):
            raise ValueError(
                "DriveConfig: Rabi amplitudes must be >= 0 (carry signs in rf_phases)"
            )

    @property
    def closed_loop_delta(self):
        """delta = Delta_4 - (Delta_1 + Delta_2 + Delta_3), rad/us."""
        d1, d2, d3, d4 = self.rf_detunings
        return d4 - (d1 + d2 + d3)

    @property
    def is_resonant(self):
        """True when every detuning vanishes."""
        return (
            self.delta_p == 0.0
            and self.delta_c == 0.0
            and all(d == 0.0 for d in self.rf_detunings)
        )

    def with_rf_rabi(self, rf_rabi):
        """Copy with the RF Rabi 4-vector replaced."""
        return replace(self, rf_rabi=tuple(float(v) for v in rf_rabi))


@dataclass(frozen=True)
class DensityMatrix:
    """Validated quantum state: Hermitian, unit trace, PSD within tolerance.

    The matrix is copied and jointly Hermitized/checked on construction, so
    downstream code can rely on the invariants without revalidating.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"DensityMatrix: expected square matrix, got shape {m.shape}")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > _HERM_TOL:
            raise ValueError(f"DensityMatrix: not Hermitian (max |m - m^H| = {herm:.3e})")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > _TRACE_TOL:
            raise ValueError(f"DensityMatrix: trace {tr} deviates from 1 beyond {_TRACE_TOL:.0e}")
        m = (m + m.conj().T) / 2.0
        w = np.linalg.eigvalsh(m)
        if float(w[0]) < _EIG_TOL:
            raise ValueError(
                f"DensityMatrix: not PSD (min eigenvalue {w[0]:.3e} below {_EIG_TOL:.0e})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return self.matrix.shape[0]

    def population(self, k):
        """Occupation of level ``k`` (1-based)."""
        return float(self.matrix[k - 1, k - 1].real)

    def coherence(self, i, j):
        """Matrix element rho_{i,j} (1-based indices)."""
        return complex(self.matrix[i - 1, j - 1])


def ground_state(dim=6):
    """|1><1| on a ``dim``-level manifold."""
    m = np.zeros((dim, dim), dtype=complex)
    m[0, 0] = 1.0
    return DensityMatrix(m)


def basis_state(k, dim=6):
    """|k><k| (1-based) on a ``dim``-level manifold."""
    m = np.zeros((dim, dim), dtype=complex)
    m[k - 1, k - 1] = 1.0
    return DensityMatrix(m)


def vectorize(m):
    """Column-major flattening, ``vec(m)[i + dim*j] = m[i, j]``."""
    return np.asarray(m, dtype=complex).reshape(-1, order="F")


def unvectorize(v, dim=6):
    """Inverse of :func:`vectorize`."""
    return np.asarray(v, dtype=complex).reshape((dim, dim), order="F")


# ----------------------------------------------------------------------
# Hamiltonians

#: RF channel n (1-based) couples this zero-based (row, col) upper-triangle
#: element; channel 4 is the loop-closing branch between levels 3 and 6.
_RF_ELEMENTS = ((2, 3), (3, 4), (4, 5), (2, 5))
_LOOP_ELEMENT = (2, 5)


def build_hamiltonian_resonant(drive, scheme=None):
    """Six-level rotating-frame Hamiltonian with every detuning zero.

    Zero diagonal; couplings ``Omega/2 * exp(i phi)`` on the ladder elements
    (1,2), (2,3), (3,4), (4,5), (5,6) and the loop branch (3,6), plus
    conjugates. Entries are rad/us (hbar = 1 internally).

    Raises
    ------
    ValueError
        If any detuning in ``drive`` is nonzero; use
        :func:`build_hamiltonian_general` for that case.
    """
    if not drive.is_resonant:
        raise ValueError(
            "build_hamiltonian_resonant: drive carries nonzero detunings; "
            "use build_hamiltonian_general"
        )
    h = np.zeros((6, 6), dtype=complex)
    h[0, 1] = drive.omega_p / 2.0
    h[1, 2] = drive.omega_c / 2.0
    for n in range(4):
        i, j = _RF_ELEMENTS[n]
        h[i, j] += (drive.rf_rabi[n] / 2.0) * np.exp(1j * drive.rf_phases[n])
    return h + h.conj().T


def build_hamiltonian_general(drive, scheme=None, t=0.0):
    """Rotating-frame Hamiltonian with detunings and loop phase at time t.

    The diagonal accumulates detunings down the ladder:
    ``(0, -Dp, -(Dp+Dc), -(Dp+Dc+D1), -(Dp+Dc+D1+D2), -(Dp+Dc+D1+D2+D3))``.
    The loop branch (3,6) carries ``exp(-i delta t)`` with the closed-loop
    detuning ``delta``; both triangles get the factor 1/2, keeping the
    operator Hermitian for every t.
    """
    h = np.zeros((6, 6), dtype=complex)
    h[0, 1] = drive.omega_p / 2.0
    h[1, 2] = drive.omega_c / 2.0
    for n in range(4):
        i, j = _RF_ELEMENTS[n]
        coupling = (drive.rf_rabi[n] / 2.0) * np.exp(1j * drive.rf_phases[n])
        if (i, j) == _LOOP_ELEMENT:
            coupling = coupling * np.exp(-1j * drive.closed_loop_delta * t)
        h[i, j] += coupling
    h = h + h.conj().T
    dp, dc = drive.delta_p, drive.delta_c
    d1, d2, d3, _d4 = drive.rf_detunings
    np.fill_diagonal(
        h,
        (0.0, -dp, -(dp + dc), -(dp + dc + d1), -(dp + dc + d1 + d2), -(dp + dc + d1 + d2 + d3)),
    )
    return h


# ----------------------------------------------------------------------
# Liouvillians


def _hamiltonian_superop(x):
    """-i (I (x) X - X^T (x) I) under column-major vectorization."""
    dim = x.shape[0]
    eye = np.eye(dim)
    return -1j * (np.kron(eye, x) - np.kron(x.T, eye))


def _dissipator(scheme, dim=6):
    """Sum of decay dissipators in vectorized form."""
    eye = np.eye(dim)
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for (src, dst, rate) in scheme.decay_channels:
        if rate < 0:
            raise ValueError(
                f"build_liouvillian: decay rate for {src}->{dst} is negative ({rate}); "
                "invalid scheme"
            )
        jump = np.zeros((dim, dim), dtype=complex)
        jump[dst - 1, src - 1] = 1.0
        jj = jump.conj().T @ jump
        out += rate * (
            np.kron(jump.conj(), jump) - 0.5 * (np.kron(eye, jj) + np.kron(jj.T, eye))
        )
    return out


@dataclass(frozen=True)
class Liouvillian:
    """Time-independent generator of the vectorized master equation.

    Construction checks trace preservation: the functional extracting
    ``Tr(rho_dot)`` must annihilate every column of the matrix.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        n2 = m.shape[0]
        dim = int(round(n2**0.5))
        if m.ndim != 2 or m.shape != (n2, n2) or dim * dim != n2:
            raise ValueError(f"Liouvillian: expected (d^2, d^2) matrix, got {m.shape}")
        trace_functional = vectorize(np.eye(dim)).conj()
        defect = float(np.linalg.norm(trace_functional @ m))
        scale = max(1.0, float(np.linalg.norm(m)))
        if defect > 1e-10 * scale:
            raise ValueError(
                f"Liouvillian: trace not preserved (||Tr o L|| = {defect:.3e})"
            )
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self):
        return int(round(self.matrix.shape[0] ** 0.5))

    def norm(self):
        """Spectral norm, used for integrator stability bounds."""
        return float(np.linalg.norm(self.matrix, 2))

    def spectral_report(self):
        """(closest-to-zero |eigenvalue|, largest real part of the rest)."""
        lam = np.linalg.eigvals(self.matrix)
        k = int(np.argmin(np.abs(lam)))
        rest = np.delete(lam, k)
        return float(np.abs(lam[k])), float(np.max(rest.real)) if rest.size else 0.0


@dataclass(frozen=True)
class TimeDependentLiouvillian:
    """Generator ``A + exp(-i delta t) B + exp(+i delta t) C``.

    Produced when the closed-loop detuning is nonzero; the oscillating
    parts come from the loop branch of the Hamiltonian.
    """

    constant: np.ndarray
    loop_lower: np.ndarray   # coefficient of exp(-i delta t)
    loop_raise: np.ndarray   # coefficient of exp(+i delta t)
    delta: float

    @property
    def dim(self):
        return int(round(self.constant.shape[0] ** 0.5))

    def matrix(self, t):
        """Generator evaluated at time ``t`` (us)."""
        phase = np.exp(-1j * self.delta * t)
        return self.constant + phase * self.loop_lower + np.conj(phase) * self.loop_raise

    def norm(self):
        # Upper bound, tight enough for the stability heuristic.
        return float(
            np.linalg.norm(self.constant, 2)
            + np.linalg.norm(self.loop_lower, 2)
            + np.linalg.norm(self.loop_raise, 2)
        )


def build_liouvillian(h, scheme):
    """Assemble the constant Liouvillian for Hamiltonian ``h`` and the
    scheme's decay channels.

    Raises
    ------
    ValueError
        Non-Hermitian ``h`` or a negative decay rate.
    """
    h = np.asarray(h, dtype=complex)
    if h.shape != (6, 6) or np.max(np.abs(h - h.conj().T)) > _HERM_TOL:
        raise ValueError("build_liouvillian: h must be 6x6 Hermitian")
    return Liouvillian(_hamiltonian_superop(h) + _dissipator(scheme, dim=6))


def make_generator(drive, scheme, t_origin=0.0):
    """Generator for the given drive: constant if the loop detuning is
    zero, otherwise the explicit three-part time-dependent form."""
    delta = drive.closed_loop_delta
    if delta == 0.0:
        return build_liouvillian(build_hamiltonian_general(drive, scheme, t=t_origin), scheme)
    h_static = build_hamiltonian_general(drive, scheme, t=0.0)
    loop = np.zeros((6, 6), dtype=complex)
    i, j = _LOOP_ELEMENT
    loop[i, j] = (drive.rf_rabi[3] / 2.0) * np.exp(1j * drive.rf_phases[3])
    h_static[i, j] -= loop[i, j]
    h_static[j, i] -= np.conj(loop[i, j])
    return TimeDependentLiouvillian(
        constant=_hamiltonian_superop(h_static) + _dissipator(scheme, dim=6),
        loop_lower=_hamiltonian_superop(loop),
        loop_raise=_hamiltonian_superop(loop.conj().T),
        delta=delta,
    )


# ----------------------------------------------------------------------
# Evolution


def taylor_propagator(matrix, dt):
    """Degree-4 Taylor polynomial of ``exp(dt * matrix)``.

    On a linear autonomous system this is algebraically identical to one
    classical RK4 step, so chaining powers of this matrix reproduces the
    RK4 trajectory exactly (up to the order of floating-point rounding).
    """
    a = dt * matrix
    p = np.eye(a.shape[0], dtype=complex) + a
    term = a
    for k in (2, 3, 4):
        term = term @ a / k
        p += term
    return p


@dataclass(frozen=True)
class Trajectory:
    """Stored snapshots of an evolution run.

    Snapshots are re-Hermitized and trace-renormalized; the raw trace
    drift observed before renormalization is kept for diagnostics.
    """

    times: np.ndarray
    matrices: np.ndarray
    max_trace_drift: float = 0.0

    def __len__(self):
        return len(self.times)

    def state(self, k):
        """Snapshot ``k`` as a validated :class:`DensityMatrix`."""
        return DensityMatrix(self.matrices[k])

    @property
    def final(self):
        return self.state(len(self.times) - 1)

    def populations(self):
        """Real array of shape (n_snapshots, dim)."""
        return np.real(np.einsum("nii->ni", self.matrices))

    def coherence(self, i, j):
        """Time series of rho_{i,j} (1-based)."""
        return self.matrices[:, i - 1, j - 1]

    def write_csv(self, path, all_coherences=False):
        """Export ``t, rho11..rho66, re_rho21, im_rho21`` (and optionally
        every strictly-lower coherence) as CSV."""
        dim = self.matrices.shape[1]
        header = ["t"] + [f"rho{k}{k}" for k in range(1, dim + 1)] + ["re_rho21", "im_rho21"]
        extra = []
        if all_coherences:
            extra = [
                (i, j)
                for i in range(1, dim + 1)
                for j in range(1, i)
                if (i, j) != (2, 1)
            ]
            for (i, j) in extra:
                header += [f"re_rho{i}{j}", f"im_rho{i}{j}"]
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            pops = self.populations()
            for k, t in enumerate(self.times):
                row = [f"{t:.9g}"] + [f"{p:.12g}" for p in pops[k]]
                c21 = self.matrices[k, 1, 0]
                row += [f"{c21.real:.12g}", f"{c21.imag:.12g}"]
                for (i, j) in extra:
                    c = self.matrices[k, i - 1, j - 1]
                    row += [f"{c.real:.12g}", f"{c.imag:.12g}"]
                writer.writerow(row)


def _snapshot_boundaries(n_steps, max_snapshots):
    stride = max(1, -(-n_steps // max(1, max_snapshots - 1)))
    bounds = list(range(0, n_steps, stride)) + [n_steps]
    return bounds


def _clean(vec, dim):
    rho = unvectorize(vec, dim)
    rho = (rho + rho.conj().T) / 2.0
    tr = float(np.trace(rho).real)
    return rho / tr, abs(tr - 1.0)


def evolve(rho0, generator, t_end, dt=DEFAULT_DT, max_snapshots=1001):
    """Integrate the master equation from ``rho0`` to ``t_end``.

    Fixed-step RK4. For a constant generator the per-step update is the
    degree-4 Taylor propagator, applied between snapshots through binary
    matrix powering (identical algebra, far fewer Python-level steps). A
    time-dependent generator is integrated with genuine four-stage RK4,
    assembling the generator at the stage times.

    Each stored snapshot is re-Hermitized as ``(rho + rho^H)/2`` and
    trace-renormalized; evolution continues from the cleaned state.

    Parameters
    ----------
    rho0 : DensityMatrix
    generator : Liouvillian or TimeDependentLiouvillian
    t_end : float
        End time (us); must be an integer multiple of ``dt``.
    dt : float
        Step (us); rejected if it violates the stability bound
        ``dt <= 0.1 / ||L||``.
    max_snapshots : int
        Cap on stored states (first and last always included).

    Returns
    -------
    Trajectory
    """
    if not isinstance(rho0, DensityMatrix):
        rho0 = DensityMatrix(np.asarray(rho0))
    if t_end < 0:
        raise ValueError("evolve: t_end must be nonnegative")
    norm = generator.norm()
    if norm > 0 and dt > 0.1 / norm:
        raise ValueError(
            f"evolve: dt = {dt:g} exceeds the stability bound 0.1/||L|| = {0.1 / norm:.3g}"
        )
    n_steps = int(round(t_end / dt)) if t_end > 0 else 0
    if abs(n_steps * dt - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"evolve: t_end = {t_end} is not an integer multiple of dt = {dt}")

    dim = rho0.dim
    vec = vectorize(rho0.matrix)
    bounds = _snapshot_boundaries(n_steps, max_snapshots) if n_steps else [0]
    times = [0.0]
    mats = [rho0.matrix.copy()]
    drift = 0.0

    if isinstance(generator, TimeDependentLiouvillian):
        for bi in range(1, len(bounds)):
            for step in range(bounds[bi - 1], bounds[bi]):
                t = step * dt
                m1 = generator.matrix(t)
                m2 = generator.matrix(t + 0.5 * dt)
                m4 = generator.matrix(t + dt)
                k1 = m1 @ vec
                k2 = m2 @ (vec + (0.5 * dt) * k1)
                k3 = m2 @ (vec + (0.5 * dt) * k2)
                k4 = m4 @ (vec + dt * k3)
                vec = vec + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            rho, d = _clean(vec, dim)
            drift = max(drift, d)
            vec = vectorize(rho)
            times.append(bounds[bi] * dt)
            mats.append(rho)
    else:
        p_step = taylor_propagator(generator.matrix, dt)
        cached = {}
        for bi in range(1, len(bounds)):
            gap = bounds[bi] - bounds[bi - 1]
            if gap not in cached:
                cached[gap] = np.linalg.matrix_power(p_step, gap)
            vec = cached[gap] @ vec
            rho, d = _clean(vec, dim)
            drift = max(drift, d)
            vec = vectorize(rho)
            times.append(bounds[bi] * dt)
            mats.append(rho)

    return Trajectory(
        times=np.asarray(times), matrices=np.asarray(mats), max_trace_drift=drift
    )


def steady_state(liouvillian, tol=NULL_SPACE_TOL):
    """Stationary state from the generator's null space.

    Raises
    ------
    TypeError
        For a time-dependent generator (no stationary rotating frame
        exists when the closed-loop detuning is nonzero).
    ValueError
        If the null space is not one-dimensional; the message reports the
        dimension found. Degeneracy occurs at exactly balanced RF loops
        with no upper-manifold decay.
    """
    if isinstance(liouvillian, TimeDependentLiouvillian):
        raise TypeError(
            "steady_state: generator is time dependent (nonzero closed-loop detuning); "
            "no stationary state exists in this frame"
        )
    basis = null_space(liouvillian.matrix, tol=tol)
    if len(basis) != 1:
        raise ValueError(
            f"steady_state: degenerate steady state, null-space dimension {len(basis)}"
        )
    rho = unvectorize(basis[0], liouvillian.dim)
    rho = (rho + rho.conj().T) / 2.0
    rho = rho / float(np.trace(rho).real)
    return DensityMatrix(rho)


def steady_state_numerical(drive, scheme, method="null_space", t_end=10.0, dt=DEFAULT_DT):
    """Full-decay numerical steady state at a drive point.

    ``method="null_space"`` solves the stationary problem directly (the
    converged state); ``method="evolve"`` integrates from the ground state
    to ``t_end`` and returns the final snapshot, which is what a
    fixed-horizon experiment sees.
    """
    gen = make_generator(drive, scheme)
    if method == "null_space":
        return steady_state(gen)
    if method == "evolve":
        return evolve(ground_state(), gen, t_end=t_end, dt=dt, max_snapshots=2).final
    raise ValueError(f"steady_state_numerical: unknown method {method!r}")
