"""Finite-dimensional quantum channels in Kraus form.

A :class:`Channel` stores its Kraus operators as one or more stacks of shape
``(K_i, d_i, d_i)``.  A plain channel has a single stack; tensor products keep
one stack per factor so that ``N^{⊗n}`` can be applied leg by leg without ever
materialising its ``K^n`` Kraus operators.  The flat Kraus list is still
available (lazily) through :attr:`Channel.kraus`.

States are plain complex numpy vectors; density operators are square arrays.
"""

from __future__ import annotations

from functools import cached_property, reduce
from typing import Sequence

import numpy as np

from .errors import BudgetExceeded, DimensionMismatch, NotHermitian, NotTracePreserving

TOL_TP = 1e-9
TOL_NORM = 1e-9
TOL_HERM = 1e-9
TOL_EIG = 1e-10
TOL_NUM = 1e-10

#: Max complex entries of a materialised tensor-power Kraus list.
TENSOR_POWER_BUDGET = 2**28

SIGMA = np.array(
    [
        [[1, 0], [0, 1]],
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
SIGMA.flags.writeable = False


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.flags.writeable = False
    return a


class Channel:
    """Completely positive map ``rho -> sum_v A_v rho A_v^dagger``.

    Instances are immutable.  Build them with :func:`make_channel`,
    :func:`tensor`, :func:`tensor_power`, :func:`compose` or :func:`adjoint`.
    """

    def __init__(self, factors: Sequence[np.ndarray]):
        if not factors:
            raise DimensionMismatch("a channel needs at least one Kraus stack")
        self._factors = tuple(_frozen(f) for f in factors)

    @property
    def factors(self) -> tuple[np.ndarray, ...]:
        """Kraus stacks of the tensor factors, each of shape ``(K_i, d_i, d_i)``."""
        return self._factors

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.shape[1] for f in self._factors)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @property
    def num_kraus(self) -> int:
        return int(np.prod([f.shape[0] for f in self._factors]))

    @property
    def is_product(self) -> bool:
        return len(self._factors) > 1

    @cached_property
    def kraus(self) -> np.ndarray:
        """Flat Kraus list ``A_v = A_{v1} ⊗ ... ⊗ A_{vn}``, shape ``(K, d, d)``."""
        stack = reduce(_kron_stacks, self._factors)
        stack.flags.writeable = False
        return stack

    @cached_property
    def tp_residual(self) -> float:
        """Spectral norm of ``sum_v A_v^dagger A_v - I``."""
        parts = [np.einsum("kji,kjl->il", f.conj(), f) for f in self._factors]
        s = reduce(np.kron, parts)
        return float(np.linalg.norm(s - np.eye(s.shape[0]), ord=2))

    @property
    def trace_preserving(self) -> bool:
        return self.tp_residual <= TOL_TP

    def __repr__(self) -> str:
        return f"Channel(dims={self.dims}, num_kraus={self.num_kraus})"


def _kron_stacks(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ka, da, _ = a.shape
    kb, db, _ = b.shape
    out = np.einsum("aij,bkl->abikjl", a, b)
    return out.reshape(ka * kb, da * db, da * db)


def make_channel(kraus: Sequence[np.ndarray] | np.ndarray, require_tp: bool = False) -> Channel:
    """Build a channel from a list of equal-size square Kraus operators."""
    ops = [np.asarray(k, dtype=complex) for k in kraus]
    if not ops:
        raise DimensionMismatch("empty Kraus list")
    d = ops[0].shape[0] if ops[0].ndim == 2 else -1
    for k in ops:
        if k.ndim != 2 or k.shape != (d, d):
            raise DimensionMismatch(f"Kraus operators must all be square of size {d}, got {k.shape}")
    if not all(np.isfinite(k).all() for k in ops):
        raise ValueError("Kraus operators must have finite entries")
    ch = Channel([np.stack(ops)])
    if require_tp and not ch.trace_preserving:
        raise NotTracePreserving(f"||sum A^dag A - I|| = {ch.tp_residual:.3e} exceeds {TOL_TP}")
    return ch


def identity_channel(d: int) -> Channel:
    return make_channel([np.eye(d)])


def _check_square(rho: np.ndarray, d: int) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d, d):
        raise DimensionMismatch(f"expected a {d}x{d} operator, got shape {rho.shape}")
    return rho


def _check_vector(psi: np.ndarray, d: int) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d,):
        raise DimensionMismatch(f"expected a state of dimension {d}, got shape {psi.shape}")
    return psi


def apply(channel: Channel, rho: np.ndarray) -> np.ndarray:
    """Return ``N(rho)``."""
    rho = _check_square(rho, channel.dim)
    if not channel.is_product:
        k = channel.factors[0]
        return np.einsum("kij,jl,kml->im", k, rho, k.conj(), optimize=True)
    dims = channel.dims
    n = len(dims)
    t = rho.reshape(dims + dims)
    for i, k in enumerate(channel.factors):
        # contract ket leg i with A, bra leg n+i with conj(A), summing over Kraus index
        t = np.tensordot(k, t, axes=([2], [i]))  # (K, a, ...)
        t = np.tensordot(k.conj(), t, axes=([0, 2], [0, n + i + 1]))  # (b, a, ...)
        t = np.moveaxis(t, [1, 0], [i, n + i])
    return t.reshape(channel.dim, channel.dim)


def adjoint(channel: Channel) -> Channel:
    """Hilbert-Schmidt adjoint, with Kraus operators ``A_v^dagger``."""
    return Channel([f.conj().transpose(0, 2, 1) for f in channel.factors])


def compose(outer: Channel, inner: Channel) -> Channel:
    """``outer ∘ inner`` with Kraus operators ``{A_v B_u}`` (``inner`` acts first)."""
    if outer.dim != inner.dim:
        raise DimensionMismatch(f"cannot compose dimensions {outer.dim} and {inner.dim}")
    a, b = outer.kraus, inner.kraus
    prods = np.einsum("vij,ujk->vuik", a, b).reshape(-1, outer.dim, outer.dim)
    return Channel([prods])


def tensor(first: Channel, second: Channel) -> Channel:
    return Channel(first.factors + second.factors)


def tensor_power(channel: Channel, n: int, budget: int = TENSOR_POWER_BUDGET) -> Channel:
    """``N^{⊗n}``.

    Raises :class:`BudgetExceeded` when the flat Kraus list would hold more
    than ``budget`` complex entries; use the symmetric-subspace route then.
    """
    if n < 1:
        raise ValueError("tensor power needs n >= 1")
    entries = channel.num_kraus**n * channel.dim ** (2 * n)
    if entries > budget:
        raise BudgetExceeded(f"N^(x){n} needs {entries} Kraus entries, budget is {budget}")
    return Channel(channel.factors * n)


def _kraus_expectations(channel: Channel, psi: np.ndarray) -> np.ndarray:
    return np.einsum("i,kij,j->k", psi.conj(), channel.kraus, psi)


def fidelity(channel: Channel, psi: np.ndarray) -> float:
    """Input-output fidelity ``<psi|N(psi)|psi> = sum_v |<psi|A_v|psi>|^2``."""
    psi = _check_vector(psi, channel.dim)
    if channel.is_product:
        out = apply(channel, np.outer(psi, psi.conj()))
        return float(np.real(np.vdot(psi, out @ psi)))
    a = _kraus_expectations(channel, psi)
    return float(np.sum(np.abs(a) ** 2))


def fidelity_gradient(channel: Channel, psi: np.ndarray) -> np.ndarray:
    """Wirtinger gradient ``dF/d conj(psi)`` of :func:`fidelity`.

    Equals ``sum_v [conj(a_v) A_v + a_v A_v^dagger] psi`` with
    ``a_v = <psi|A_v|psi>``, i.e. ``[N(psi psi^dag) + N^dag(psi psi^dag)] psi``.
    A first-order change along ``dpsi`` is ``2 Re <g, dpsi>``.
    """
    return fidelity_and_gradient(channel, psi)[1]


def fidelity_and_gradient(channel: Channel, psi: np.ndarray) -> tuple[float, np.ndarray]:
    psi = _check_vector(psi, channel.dim)
    if channel.is_product:
        proj = np.outer(psi, psi.conj())
        fwd = apply(channel, proj) @ psi
        back = apply(adjoint(channel), proj) @ psi
        return float(np.real(np.vdot(psi, fwd))), fwd + back
    k = channel.kraus
    kpsi = k @ psi  # (K, d)
    a = kpsi @ psi.conj()
    kdag_psi = np.einsum("kji,j->ki", k.conj(), psi)
    grad = a.conj() @ kpsi + a @ kdag_psi
    return float(np.sum(np.abs(a) ** 2)), grad


def natural_representation(channel: Channel) -> np.ndarray:
    """Transfer matrix ``T = sum_v A_v ⊗ conj(A_v)`` of size ``d^2``.

    Rows and columns are indexed by ``(ket, conj-ket)`` pairs, ket index
    major, so that ``<psi ⊗ conj(psi)| T |psi ⊗ conj(psi)> = F(N, psi)``.
    """
    k = channel.kraus
    d = channel.dim
    return np.einsum("vij,vkl->ikjl", k, k.conj()).reshape(d * d, d * d)


def dominant_eigenpair(h: np.ndarray) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector of a Hermitian matrix."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T), initial=0.0) > TOL_HERM:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return float(w[-1]), v[:, -1]


def random_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unit vector of dimension ``d``."""
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_channel(d: int, num_kraus: int, rng: np.random.Generator) -> Channel:
    """Random trace-preserving channel from a Haar-random isometry ``C^d -> C^{dK}``."""
    g = rng.standard_normal((d * num_kraus, d)) + 1j * rng.standard_normal((d * num_kraus, d))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return make_channel(q.reshape(num_kraus, d, d), require_tp=True)


def check_state(psi: np.ndarray, d: int | None = None) -> np.ndarray:
    """Validate a pure-state vector (dimension and unit norm) and return it as complex."""
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1 or (d is not None and psi.shape[0] != d):
        raise DimensionMismatch(f"expected a state of dimension {d}, got shape {psi.shape}")
    if abs(np.linalg.norm(psi) - 1.0) > TOL_NORM:
        raise ValueError(f"state is not normalised (norm {np.linalg.norm(psi):.12g})")
    return psi
