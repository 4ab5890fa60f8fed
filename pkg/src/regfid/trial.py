"""Two-branch trial states ``psi_n ∝ phi1^{⊗n} + phi2^{⊗n}``.

For a pair ``(phi1, phi2)`` define Kraus vectors ``(r_ij)_v = <phi_i|A_v|phi_j>``
with ``w, x, y, z = r11, r12, r21, r22``.  Then

    F(N^{⊗n}, psi_n) = c_n^4 / 4 * sum_{a,b in {w,x,y,z}} (a^dag b)^n,
    c_n = (1 + Re <phi1|phi2>^n)^{-1/2},

which needs no tensor power at all.  Powers are taken in log-polar form so
that ``n`` in the millions neither under- nor overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import comb

import numpy as np

from .channel import TENSOR_POWER_BUDGET, Channel, apply, check_state
from .errors import BudgetExceeded, DimensionMismatch, LinearlyDependentPair

#: ``1 - |<phi1|phi2>|`` below this counts as linearly dependent.
DEPENDENCE_TOL = 1e-12


@dataclass(frozen=True)
class StatePair:
    phi1: np.ndarray
    phi2: np.ndarray

    def __post_init__(self):
        phi1 = check_state(self.phi1)
        phi2 = check_state(self.phi2, phi1.shape[0])
        object.__setattr__(self, "phi1", phi1)
        object.__setattr__(self, "phi2", phi2)

    @property
    def dim(self) -> int:
        return self.phi1.shape[0]

    @property
    def overlap(self) -> complex:
        return complex(np.vdot(self.phi1, self.phi2))

    @property
    def linearly_dependent(self) -> bool:
        return 1.0 - abs(self.overlap) < DEPENDENCE_TOL


@dataclass(frozen=True)
class KrausVectors:
    w: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def r(self, i: int, j: int) -> np.ndarray:
        return ((self.w, self.x), (self.y, self.z))[i - 1][j - 1]


def _check_pair(channel: Channel, pair: StatePair) -> None:
    if pair.dim != channel.dim:
        raise DimensionMismatch(f"pair has dimension {pair.dim}, channel {channel.dim}")


def kraus_vectors(channel: Channel, pair: StatePair) -> KrausVectors:
    _check_pair(channel, pair)
    k = channel.kraus
    phis = (pair.phi1, pair.phi2)
    r = [[np.einsum("i,kij,j->k", phis[i].conj(), k, phis[j]) for j in range(2)] for i in range(2)]
    return KrausVectors(r[0][0], r[0][1], r[1][0], r[1][1])


def channel_pair_coefficients(channel: Channel, pair: StatePair, check: bool = True) -> np.ndarray:
    """``N_ijkl = <phi_i| N(|phi_j><phi_k|) |phi_l>`` as an array indexed ``[i-1, j-1, k-1, l-1]``.

    Computed by applying the channel; with ``check`` the Kraus-vector form
    ``r_lk^dag r_ij`` is evaluated as well and must agree within 1e-12.
    """
    _check_pair(channel, pair)
    phis = (pair.phi1, pair.phi2)
    coeffs = np.empty((2, 2, 2, 2), dtype=complex)
    for j in range(2):
        for k in range(2):
            out = apply(channel, np.outer(phis[j], phis[k].conj()))
            for i in range(2):
                for l in range(2):
                    coeffs[i, j, k, l] = np.vdot(phis[i], out @ phis[l])
    if check:
        kv = kraus_vectors(channel, pair)
        for i, j, k, l in np.ndindex(2, 2, 2, 2):
            alt = np.vdot(kv.r(l + 1, k + 1), kv.r(i + 1, j + 1))
            if abs(alt - coeffs[i, j, k, l]) > 1e-12:
                raise ArithmeticError(f"N_{i+1}{j+1}{k+1}{l+1}: routes disagree by {abs(alt - coeffs[i, j, k, l]):.3e}")
    return coeffs


def fix_phase(channel: Channel, pair: StatePair) -> StatePair:
    """Rephase ``phi1`` so that ``N_1212`` is real and non-negative.

    ``phi1 -> e^{i t} phi1`` multiplies ``N_1212`` by ``e^{-2 i t}``.
    """
    n1212 = channel_pair_coefficients(channel, pair, check=False)[0, 1, 0, 1]
    if abs(n1212) == 0.0:
        return pair
    theta = np.angle(n1212) / 2
    return StatePair(np.exp(1j * theta) * pair.phi1, pair.phi2)


def _log_re_power(z: complex, n: int) -> tuple[float, float]:
    """``Re z^n`` as ``(log|z|*n, cos(n arg z))``."""
    if z == 0:
        return -np.inf, 0.0
    return n * np.log(abs(z)), float(np.cos(n * np.angle(z)))


def normalization(pair: StatePair, n: int) -> float:
    """``c_n = (1 + Re <phi1|phi2>^n)^{-1/2}``."""
    log_mag, cosine = _log_re_power(pair.overlap, n)
    return float((1.0 + np.exp(log_mag) * cosine) ** -0.5)


def build_trial_state(pair: StatePair, n: int, budget: int = TENSOR_POWER_BUDGET) -> np.ndarray:
    """``psi_n = c_n/sqrt(2) (phi1^{⊗n} + phi2^{⊗n})`` in dimension ``d^n``.

    For a linearly dependent pair (``pair.linearly_dependent``) this is
    ``phi1^{⊗n}``.
    """
    if pair.dim**n > budget:
        raise BudgetExceeded(f"trial state needs {pair.dim}^{n} amplitudes")
    p1 = reduce(np.kron, [pair.phi1] * n)
    if pair.linearly_dependent:
        return p1
    p2 = reduce(np.kron, [pair.phi2] * n)
    return normalization(pair, n) / np.sqrt(2) * (p1 + p2)


def trial_log_fidelity(channel: Channel, pair: StatePair, n: int) -> float:
    """``log F(N^{⊗n}, psi_n)``, valid for very large ``n``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    kv = kraus_vectors(channel, pair)
    if pair.linearly_dependent:
        return n * float(np.log(np.vdot(kv.w, kv.w).real))
    vecs = (kv.w, kv.x, kv.y, kv.z)
    dots = np.array([np.vdot(a, b) for a in vecs for b in vecs])
    nonzero = dots != 0
    logs = np.full(dots.shape, -np.inf)
    logs[nonzero] = n * np.log(np.abs(dots[nonzero]))
    top = logs.max()
    phases = n * np.angle(dots)
    terms = np.exp(logs - top) * np.exp(1j * phases)
    total = terms[np.argsort(np.abs(terms))].sum()
    if abs(total.imag) >= 1e-8 * max(1.0, abs(total.real)):
        raise ArithmeticError(f"trial fidelity sum has imaginary part {total.imag:.3e}")
    if total.real <= 0:
        return -np.inf
    # c_n^4 / 4 = 1 / (4 (1 + Re s^n)^2), kept in log form as well
    log_mag, cosine = _log_re_power(pair.overlap, n)
    log_norm = -2.0 * np.log1p(np.exp(log_mag) * cosine) - np.log(4.0)
    return float(top + np.log(total.real) + log_norm)


def trial_fidelity(channel: Channel, pair: StatePair, n: int) -> float:
    """``F(N^{⊗n}, psi_n)`` from the 16-term closed form (underflows to 0 for huge ``n``)."""
    return float(np.exp(trial_log_fidelity(channel, pair, n)))


def trial_fidelity_root(channel: Channel, pair: StatePair, n: int) -> float:
    """``F(N^{⊗n}, psi_n)^{1/n}``."""
    return float(np.exp(trial_log_fidelity(channel, pair, n) / n))


def _product_dicke(phi: np.ndarray, n: int) -> np.ndarray:
    a, b = complex(phi[0]), complex(phi[1])
    return np.array([comb(n, k) ** 0.5 * a ** (n - k) * b**k for k in range(n + 1)])


def trial_dicke_coefficients(pair: StatePair, n: int) -> np.ndarray:
    """Dicke coefficients of ``psi_n`` for a qubit pair."""
    if pair.dim != 2:
        raise DimensionMismatch("Dicke coefficients need qubit states")
    if pair.linearly_dependent:
        raise LinearlyDependentPair("phi1 and phi2 are linearly dependent")
    c = _product_dicke(pair.phi1, n) + _product_dicke(pair.phi2, n)
    return c / np.linalg.norm(c)
