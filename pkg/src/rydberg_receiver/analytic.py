"""Closed-form steady state of the resonant six-level receiver.

Under full resonance and with probe decay (channel 2 -> 1) as the only
dissipation, the stationary density matrix has an exact closed form in the
drive amplitudes. The key invariant is the loop imbalance::

    zeta = Omega_1 * Omega_3 - Omega_2 * Omega_4

which gates the probe coherence: at zeta = 0 the two RF paths around the
loop interfere destructively and the probe response vanishes. The common
denominator is::

    Lambda = zeta^2 gamma_21^2 + 2 Omega_P^4 Sigma_Omega^2
             + 2 [ (Omega_2^2 + Omega_3^2) Omega_C^2 + zeta^2 ] Omega_P^2

with ``Sigma_Omega^2 = sum_n Omega_n^2``. Every element below is
implemented term by term as published so this module can serve as an
independent oracle for the numerical engine; discrepancies between the two
are diagnostic signal and must not be papered over here.

Formulas accept numpy arrays in the RF amplitudes and broadcast, which the
receiver chain uses to evaluate megasample waveforms in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lindblad import DensityMatrix

__all__ = [
    "AnalyticContext",
    "zeta",
    "analytic_rho21",
    "analytic_steady_state",
    "rho21_from_amplitudes",
]


def zeta(rf_rabi):
    """Loop imbalance ``Omega_1 Omega_3 - Omega_2 Omega_4``.

    Accepts any 4-sequence (or broadcastable arrays); one rounding per
    product, so exactly balanced inputs give exactly 0.0.
    """
    o1, o2, o3, o4 = rf_rabi
    return o1 * o3 - o2 * o4


def _lambda_terms(omega_p, omega_c, rf_rabi, gamma_21):
    o1, o2, o3, o4 = rf_rabi
    z = o1 * o3 - o2 * o4
    sigma_sq = o1 * o1 + o2 * o2 + o3 * o3 + o4 * o4
    op2 = omega_p * omega_p
    lam = (
        z * z * gamma_21 * gamma_21
        + 2.0 * op2 * op2 * sigma_sq
        + 2.0 * ((o2 * o2 + o3 * o3) * omega_c * omega_c + z * z) * op2
    )
    return z, sigma_sq, lam


@dataclass(frozen=True)
class AnalyticContext:
    """Inputs of the closed form plus its derived invariants.

    Attributes
    ----------
    omega_p, omega_c : float
        Probe and coupling Rabi amplitudes (rad/us).
    rf_rabi : tuple of 4 floats
        RF loop amplitudes (rad/us).
    gamma_21 : float
        Probe decay rate (rad/us), the only dissipation of the reduced
        model.
    zeta, sigma_omega_sq, lam : float
        Derived: loop imbalance, total RF power, common denominator.
    """

    omega_p: float
    omega_c: float
    rf_rabi: tuple
    gamma_21: float

    def __post_init__(self):
        object.__setattr__(self, "rf_rabi", tuple(float(v) for v in self.rf_rabi))
        if len(self.rf_rabi) != 4:
            raise ValueError(f"AnalyticContext: rf_rabi needs 4 entries, got {len(self.rf_rabi)}")
        for name in ("omega_p", "omega_c", "gamma_21"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.gamma_21 < 0:
            raise ValueError("AnalyticContext: gamma_21 must be >= 0")
        z, s, lam = _lambda_terms(self.omega_p, self.omega_c, self.rf_rabi, self.gamma_21)
        object.__setattr__(self, "zeta", z)
        object.__setattr__(self, "sigma_omega_sq", s)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_drive(cls, drive, gamma_21):
        """Context from a resonant :class:`~rydberg_receiver.lindblad.DriveConfig`."""
        return cls(
            omega_p=drive.omega_p,
            omega_c=drive.omega_c,
            rf_rabi=drive.rf_rabi,
            gamma_21=gamma_21,
        )

    def _require_valid(self):
        if not self.lam > 0.0:
            raise ValueError(
                "analytic model degenerate: Lambda = 0 (probe drive and loop "
                "imbalance cannot both vanish, and the RF loop must carry power)"
            )


def analytic_rho21(ctx):
    """Steady-state probe coherence ``rho_21 = -i Omega_P gamma_21 zeta^2 / Lambda``.

    Purely imaginary with nonpositive imaginary part for nonnegative
    inputs: the probe is absorbed, never amplified. Exactly zero whenever
    the loop is balanced (zeta = 0).
    """
    ctx._require_valid()
    z = ctx.zeta
    return -1j * ctx.omega_p * ctx.gamma_21 * z * z / ctx.lam


def rho21_from_amplitudes(omega_p, omega_c, rf_rabi, gamma_21):
    """Vectorized probe coherence; ``rf_rabi`` entries may be arrays.

    Broadcasts over time-dependent RF amplitudes. Raises on any sample
    where the denominator degenerates to zero.
    """
    z, _s, lam = _lambda_terms(omega_p, omega_c, rf_rabi, gamma_21)
    if np.any(np.asarray(lam) <= 0.0):
        raise ValueError("rho21_from_amplitudes: Lambda = 0 at some sample (degenerate regime)")
    return -1j * omega_p * gamma_21 * z * z / lam


def analytic_steady_state(ctx):
    """Full closed-form stationary density matrix.

    Populations and the nine structurally nonzero lower-triangle coherences
    are assembled term by term; the remaining coherences
    (3,2), (4,3), (5,2), (6,3), (5,4), (6,5) vanish identically. The upper
    triangle follows by conjugation. The populations share the denominator
    Lambda and their numerators sum to it, so the trace is 1 up to one
    rounding per element.

    Returns
    -------
    DensityMatrix
    """
    ctx._require_valid()
    op, oc, g = ctx.omega_p, ctx.omega_c, ctx.gamma_21
    o1, o2, o3, o4 = ctx.rf_rabi
    z, lam = ctx.zeta, ctx.lam
    op2 = op * op
    op3 = op2 * op
    op4 = op2 * op2

    rho = np.zeros((6, 6), dtype=complex)
    rho[0, 0] = (z * z * g * g + ((o2 * o2 + o3 * o3) * oc * oc + z * z) * op2) / lam
    rho[1, 1] = op2 * z * z / lam
    rho[2, 2] = op4 * (o2 * o2 + o3 * o3) / lam
    rho[3, 3] = op2 * (op2 * (o3 * o3 + o4 * o4) + oc * oc * o3 * o3) / lam
    rho[4, 4] = op4 * (o1 * o1 + o4 * o4) / lam
    rho[5, 5] = op2 * (op2 * (o1 * o1 + o2 * o2) + oc * oc * o2 * o2) / lam

    rho[1, 0] = -1j * op * z * z * g / lam
    rho[2, 0] = -op3 * oc * (o2 * o2 + o3 * o3) / lam
    rho[3, 0] = 1j * op * oc * o3 * z * g / lam
    rho[4, 0] = op3 * oc * (o1 * o2 + o3 * o4) / lam
    rho[5, 0] = -1j * op * oc * o2 * z * g / lam
    rho[3, 1] = -op2 * oc * o3 * z / lam
    rho[5, 1] = op2 * oc * o2 * z / lam
    rho[4, 2] = -op4 * (o1 * o2 + o3 * o4) / lam
    rho[5, 3] = -op2 * (op2 * (o2 * o3 + o1 * o4) + oc * oc * o2 * o3) / lam

    lower = np.tril(rho, -1)
    rho = np.diag(np.diag(rho)) + lower + lower.conj().T
    return DensityMatrix(rho)
