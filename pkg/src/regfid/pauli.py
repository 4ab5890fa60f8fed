"""Closed forms for qubit Pauli channels ``rho -> sum_a p_a s_a rho s_a``.

All closed forms take canonical probabilities (``p1 <= p2 <= p3``); use
:func:`canonicalize` first, which also reports the axis relabelling.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log

import numpy as np

from .channel import SIGMA, Channel, make_channel
from .errors import EpsilonOutOfRange, InvalidProbabilities

PROB_TOL = 1e-9


@dataclass(frozen=True)
class PauliChannel:
    p: tuple[float, float, float, float]

    def __post_init__(self):
        p = tuple(float(v) for v in self.p)
        if len(p) != 4:
            raise InvalidProbabilities(f"need four probabilities, got {len(p)}")
        if any(not np.isfinite(v) or v < 0 for v in p):
            raise InvalidProbabilities(f"probabilities must be finite and non-negative: {p}")
        if abs(sum(p) - 1.0) > PROB_TOL:
            raise InvalidProbabilities(f"probabilities sum to {sum(p):.12g}, not 1")
        object.__setattr__(self, "p", p)

    @property
    def is_canonical(self) -> bool:
        return self.p[1] <= self.p[2] <= self.p[3]

    def to_channel(self) -> Channel:
        return pauli_to_kraus(self)


def _as_pauli(p) -> PauliChannel:
    return p if isinstance(p, PauliChannel) else PauliChannel(tuple(p))


def _require_canonical(p) -> tuple[float, float, float, float]:
    ch = _as_pauli(p)
    if not ch.is_canonical:
        raise InvalidProbabilities(f"closed forms need p1 <= p2 <= p3, got {ch.p}; canonicalize first")
    return ch.p


def pauli_to_kraus(p) -> Channel:
    """Kraus form ``{sqrt(p_a) s_a}``."""
    ch = _as_pauli(p)
    return make_channel([np.sqrt(pa) * s for pa, s in zip(ch.p, SIGMA)], require_tp=True)


def canonicalize(p) -> tuple[PauliChannel, tuple[int, int, int]]:
    """Sort ``p1..p3`` ascending.

    Returns the canonical channel and ``perm`` where new axis ``i`` is old
    axis ``perm[i-1]``.  Ties keep their original order.
    """
    ch = _as_pauli(p)
    order = sorted((1, 2, 3), key=lambda a: ch.p[a])
    return PauliChannel((ch.p[0],) + tuple(ch.p[a] for a in order)), tuple(order)


def nu_infty_closed(p) -> float:
    """Max output infinity-norm: ``p0+p3`` if ``p0 >= p2``, else ``p2+p3``."""
    p0, _, p2, p3 = _require_canonical(p)
    return p0 + p3 if p0 >= p2 else p2 + p3


def f_tilde_closed(p) -> float:
    """Asymptotically regularised maximum fidelity; coincides with :func:`nu_infty_closed`."""
    return nu_infty_closed(p)


def trial_fidelity_closed(p, n: int) -> float:
    """``F(P^{⊗n}, psi_n)^{1/n}`` for the sigma_1 eigenstate trial pair.

    ``2^{-1/n} [(p0+p1)^n + (p0-p1)^n + (p3-p2)^n + (p3+p2)^n]^{1/n}``,
    evaluated relative to the largest base.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    p0, p1, p2, p3 = _require_canonical(p)
    bases = np.array([p0 + p1, p0 - p1, p3 - p2, p3 + p2])
    top = np.max(np.abs(bases))
    if top == 0:
        return 0.0
    terms = (bases / top) ** n
    total = terms[np.argsort(np.abs(terms))].sum()
    if total <= 0:
        raise ArithmeticError(f"trial fidelity sum is not positive ({total})")
    return float(top * (total / 2.0) ** (1.0 / n))


def epsilon_channel(eps: float) -> PauliChannel:
    """``p = (1/3 - eps, 0, 1/3, 1/3 + eps)``."""
    if not 0 <= eps <= 1 / 3:
        raise EpsilonOutOfRange(f"eps must lie in [0, 1/3], got {eps}")
    return PauliChannel((1 / 3 - eps, 0.0, 1 / 3, 1 / 3 + eps))


def epsilon_of(p) -> float | None:
    """``eps`` if ``p`` belongs to the :func:`epsilon_channel` family, else ``None``."""
    p0, p1, p2, p3 = _as_pauli(p).p
    eps = p3 - 1 / 3
    if p1 == 0 and abs(p2 - 1 / 3) < PROB_TOL and abs(p0 - (1 / 3 - eps)) < PROB_TOL and eps >= 0:
        return eps
    return None


def crossover_n0(eps: float) -> float:
    """``ln(4) / (3 eps)``: where the trial fidelity overtakes ``F^(1)``."""
    if not eps > 0:
        raise EpsilonOutOfRange(f"eps must be positive, got {eps}")
    return log(4.0) / (3.0 * eps)


def sigma_eigenstates(axis: int) -> tuple[np.ndarray, np.ndarray]:
    """``(+1, -1)`` eigenvectors of ``sigma_axis`` for axis 1, 2 or 3."""
    if axis not in (1, 2, 3):
        raise ValueError("axis must be 1, 2 or 3")
    w, v = np.linalg.eigh(SIGMA[axis])
    return v[:, 1], v[:, 0]
