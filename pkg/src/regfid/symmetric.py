"""Fidelity of ``N^{⊗n}`` on permutation-symmetric n-qubit states.

For a symmetric state ``psi`` the doubled vector ``psi ⊗ conj(psi)`` (sites
paired as ket/conj-ket letters ``00, 01, 10, 11``) lies in the symmetric
subspace of ``(C^4)^{⊗n}``.  That subspace has the occupation basis
``|m>``, ``m = (m00, m01, m10, m11)``, of dimension ``C(n+3, 3)``, and the
restriction of ``T^{⊗n}`` to it is the symmetric transfer matrix.

A symmetric state is given by its ``n+1`` Dicke coefficients ``c_k``
(``k`` = number of ones).  ``psi ⊗ conj(psi)`` only depends on the products
``c_k conj(c_l)``, so the optimiser works with the ``(n+1)^2``-dimensional
compression :class:`DickeTransfer` of the symmetric transfer matrix.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from math import comb, lgamma
from typing import Iterator

import numpy as np

from .channel import TENSOR_POWER_BUDGET, Channel, natural_representation
from .errors import BudgetExceeded, DimensionMismatch
from .optimize import MaximizationResult, OptimizerOptions, bb_maximize

log = logging.getLogger(__name__)

#: Max complex entries of a symmetric transfer matrix.
SYMMETRIC_BUDGET = 20_000_000

Occupation = tuple[int, int, int, int]


def enumerate_occupations(n: int) -> list[Occupation]:
    """All ``(m00, m01, m10, m11)`` summing to ``n``, lexicographically ordered."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return [
        (a, b, c, n - a - b - c)
        for a in range(n + 1)
        for b in range(n + 1 - a)
        for c in range(n + 1 - a - b)
    ]


def _log_multinomial(m) -> float:
    return lgamma(sum(m) + 1) - sum(lgamma(x + 1) for x in m)


@lru_cache(maxsize=64)
def _basis_data(n: int):
    occ = np.array(enumerate_occupations(n))
    log_mult = np.array([_log_multinomial(m) for m in occ])
    ket = occ[:, 2] + occ[:, 3]
    bra = occ[:, 1] + occ[:, 3]
    log_binom = np.array([lgamma(n + 1) - lgamma(k + 1) - lgamma(n - k + 1) for k in range(n + 1)])
    gamma = np.exp(0.5 * (log_mult - log_binom[ket] - log_binom[bra]))
    return occ, log_mult, ket, bra, gamma


def pair_embedding(coeffs: np.ndarray) -> np.ndarray:
    """Occupation-basis coordinates of ``psi ⊗ conj(psi)`` for Dicke coefficients ``coeffs``.

    ``Phi_m = sqrt(mult(n; m)) c_k conj(c_l) / sqrt(C(n,k) C(n,l))`` with
    ``k = m10 + m11`` (ket) and ``l = m01 + m11`` (conjugate copy).
    """
    c = np.asarray(coeffs, dtype=complex)
    _, _, ket, bra, gamma = _basis_data(c.shape[0] - 1)
    return gamma * c[ket] * c[bra].conj()


def _check_transfer(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=complex)
    if t.shape != (4, 4):
        raise DimensionMismatch(f"symmetric transfer needs a 4x4 transfer matrix, got {t.shape}")
    return t


def _check_budget(n: int, budget: int) -> None:
    size = comb(n + 3, 3)
    if size * size > budget:
        raise BudgetExceeded(f"symmetric transfer for n={n} has {size}^2 entries, budget is {budget}")


def _unnormalized_levels(t: np.ndarray, n_max: int) -> Iterator[tuple[int, np.ndarray]]:
    """Yield ``(n, U_n)`` with ``U_n[m, m']`` the coefficient of ``y^m'`` in ``prod_a (T_a . y)^{m_a}``.

    ``U_n`` follows from ``U_{n-1}`` by multiplying each row polynomial with
    one more linear form ``sum_b T_ab y_b``.
    """
    # occupation order at n=1 is not letter order
    letters = [next(a for a in range(4) if m[a]) for m in enumerate_occupations(1)]
    u = t[np.ix_(letters, letters)]
    yield 1, u
    prev_index = {m: i for i, m in enumerate(enumerate_occupations(1))}
    for n in range(2, n_max + 1):
        occ = enumerate_occupations(n)
        size = len(occ)
        parent = np.empty(size, dtype=np.intp)
        letter = np.empty(size, dtype=np.intp)
        shifted = np.full((4, size), -1, dtype=np.intp)
        for i, m in enumerate(occ):
            for b in range(4):
                if m[b]:
                    mm = list(m)
                    mm[b] -= 1
                    shifted[b, i] = prev_index[tuple(mm)]
            letter[i] = next(a for a in range(4) if m[a])
            parent[i] = shifted[letter[i], i]
        rows = u[parent]
        new = np.zeros((size, size), dtype=complex)
        for b in range(4):
            cols = shifted[b] >= 0
            new[:, cols] += t[letter, b][:, None] * rows[:, shifted[b, cols]]
        u = new
        prev_index = {m: i for i, m in enumerate(occ)}
        yield n, u


def _contingency_tables(rows, cols) -> Iterator[np.ndarray]:
    """4x4 non-negative integer tables with the given row and column sums."""
    rows, cols = list(rows), list(cols)

    def fill_row(r, remaining, acc):
        if r == len(rows):
            if not any(remaining):
                yield np.array(acc)
            return
        yield from fill_cells(r, 0, rows[r], remaining, acc, [])

    def fill_cells(r, b, left, remaining, acc, row):
        if b == len(cols) - 1:
            if left <= remaining[b]:
                rem = remaining.copy()
                rem[b] -= left
                yield from fill_row(r + 1, rem, acc + [row + [left]])
            return
        for k in range(min(left, remaining[b]) + 1):
            rem = remaining.copy()
            rem[b] -= k
            yield from fill_cells(r, b + 1, left - k, rem, acc, row + [k])

    yield from fill_row(0, cols, [])


@dataclass(frozen=True)
class SymmetricTransferMatrix:
    n: int
    basis: list[Occupation]
    entries: np.ndarray


def symmetric_transfer(
    t: np.ndarray, n: int, method: str = "recursive", budget: int = SYMMETRIC_BUDGET
) -> SymmetricTransferMatrix:
    """Restriction of ``T^{⊗n}`` to the symmetric subspace, in the occupation basis.

    ``<m|T^{⊗n}|m'> = sqrt(mult(m)/mult(m')) * sum_k prod_a [m_a!/prod_b k_ab!] prod_ab T_ab^k_ab``
    over 4x4 contingency tables ``k`` with row sums ``m`` and column sums ``m'``.
    ``method="tables"`` enumerates the tables directly (slow, for checking);
    ``method="recursive"`` builds the same table sums level by level in ``n``.
    """
    t = _check_transfer(t)
    if n < 1:
        raise ValueError("n must be >= 1")
    _check_budget(n, budget)
    occ, log_mult, *_ = _basis_data(n)
    basis = [tuple(int(v) for v in m) for m in occ]
    if method == "recursive":
        for _, u in _unnormalized_levels(t, n):
            pass
    elif method == "tables":
        u = np.zeros((len(basis), len(basis)), dtype=complex)
        logfact = np.array([lgamma(k + 1) for k in range(n + 1)])
        for i, m in enumerate(basis):
            for j, mp in enumerate(basis):
                total = 0j
                for k in _contingency_tables(m, mp):
                    weight = np.exp(np.sum(logfact[list(m)]) - np.sum(logfact[k]))
                    total += weight * np.prod(t ** k)
                u[i, j] = total
    else:
        raise ValueError(f"unknown method {method!r}")
    scale = np.exp(0.5 * log_mult)
    return SymmetricTransferMatrix(n, basis, scale[:, None] * u / scale[None, :])


@dataclass(frozen=True)
class DickeTransfer:
    """``T_sym`` compressed onto Dicke ket-bra pairs.

    ``matrix[(k,l), (k',l')] = <D_k| N^{⊗n}(|D_k'><D_l'|) |D_l>``, so the
    fidelity of the symmetric state with coefficients ``c`` is
    ``X^dag M X`` with ``X = vec(c c^dag)``.
    """

    n: int
    matrix: np.ndarray


def dicke_transfer_from_symmetric(tsym: SymmetricTransferMatrix) -> DickeTransfer:
    n = tsym.n
    _, _, ket, bra, gamma = _basis_data(n)
    cols = ket * (n + 1) + bra
    g = np.zeros((len(ket), (n + 1) ** 2))
    g[np.arange(len(ket)), cols] = gamma
    return DickeTransfer(n, g.T @ tsym.entries @ g)


def _transfer_matrix(channel: Channel) -> np.ndarray:
    if channel.dim != 2:
        raise DimensionMismatch(f"symmetric route is for qubit channels, got d={channel.dim}")
    return natural_representation(channel)


@lru_cache(maxsize=8)
def dicke_transfer(channel: Channel, n: int) -> DickeTransfer:
    """:class:`DickeTransfer` for ``channel^{⊗n}``; cached per (channel, n)."""
    t = _transfer_matrix(channel)
    if n >= 20:
        log.info("building symmetric transfer matrix for n=%d", n)
    return dicke_transfer_from_symmetric(symmetric_transfer(t, n))


def _dicke_product(c: np.ndarray) -> np.ndarray:
    return np.outer(c, c.conj()).ravel()


def _check_coeffs(coeffs: np.ndarray, n: int) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex)
    if c.shape != (n + 1,):
        raise DimensionMismatch(f"expected {n + 1} Dicke coefficients, got shape {c.shape}")
    return c


def _value_and_gradient(m: np.ndarray, c: np.ndarray) -> tuple[complex, np.ndarray]:
    size = c.shape[0]
    x = _dicke_product(c)
    mx = m @ x
    value = np.vdot(x, mx)
    y = mx.reshape(size, size)
    z = (m.T @ x.conj()).reshape(size, size)
    return value, y @ c + z.T @ c


def symmetric_fidelity(channel: Channel, coeffs: np.ndarray) -> float:
    """``F(N^{⊗n}, psi)`` for the symmetric state with Dicke coefficients ``coeffs``."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.shape[0] - 1
    m = dicke_transfer(channel, n).matrix
    x = _dicke_product(c)
    value = np.vdot(x, m @ x)
    if abs(value.imag) >= 1e-8:
        raise ArithmeticError(f"symmetric fidelity has imaginary part {value.imag:.3e}")
    return float(value.real)


def symmetric_fidelity_gradient(channel: Channel, coeffs: np.ndarray) -> np.ndarray:
    """Wirtinger gradient ``dF/d conj(c)`` of :func:`symmetric_fidelity`.

    With ``X_kl = c_k conj(c_l)`` and ``F = X^dag M X`` the two conjugated
    slots give ``(M X)[j, :] . c`` and ``(M^T conj(X))[:, j] . c``.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = c.shape[0] - 1
    return _value_and_gradient(dicke_transfer(channel, n).matrix, c)[1]


@dataclass(frozen=True)
class SymmetricMaximizationResult(MaximizationResult):
    n: int = 1

    @property
    def regularized(self) -> float:
        """``F_sym^(n) = value^{1/n}``."""
        return max(self.value, 0.0) ** (1.0 / self.n)


def max_symmetric_fidelity(
    channel: Channel, n: int, opts: OptimizerOptions | None = None
) -> SymmetricMaximizationResult:
    """Maximise ``F(N^{⊗n}, psi)`` over symmetric ``psi``.

    The ascent runs on ``F^{1/n}`` (same maximiser, curvature independent of
    ``n``); ``value`` reports the raw fidelity at the maximiser.
    """
    m = dicke_transfer(channel, n).matrix

    def objective(c):
        value, grad = _value_and_gradient(m, c)
        f = max(value.real, 1e-300)
        root = f ** (1.0 / n)
        return root, (root / (n * f)) * grad

    res = bb_maximize(objective, n + 1, opts)
    raw = float(np.vdot(_dicke_product(res.argmax), m @ _dicke_product(res.argmax)).real)
    return SymmetricMaximizationResult(raw, res.argmax, res.iterations, res.restarts_used, res.converged, n=n)


def expand(coeffs: np.ndarray, budget: int = TENSOR_POWER_BUDGET) -> np.ndarray:
    """Full ``2^n`` vector ``sum_k c_k C(n,k)^{-1/2} sum_{|x|=k} |x>``."""
    c = np.asarray(coeffs, dtype=complex)
    n = c.shape[0] - 1
    if 2**n > budget:
        raise BudgetExceeded(f"expanding n={n} needs 2^{n} amplitudes")
    weight = np.array([bin(i).count("1") for i in range(2**n)])
    norms = np.sqrt(np.array([comb(n, k) for k in range(n + 1)], dtype=float))
    return (c / norms)[weight]


def random_symmetric_state(n: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return v / np.linalg.norm(v)
