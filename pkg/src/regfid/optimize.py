"""Maximisation engines on the complex unit sphere.

:func:`bb_maximize` runs projected gradient ascent with alternating
Barzilai-Borwein steps from several seeded Haar-random starts.  The
objective is a callable returning ``(value, grad)`` where ``grad`` is the
Wirtinger gradient ``d value / d conj(x)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .channel import (
    Channel,
    adjoint,
    apply,
    compose,
    dominant_eigenpair,
    fidelity_and_gradient,
    random_state,
    tensor_power,
)
from .errors import NonFiniteObjective

Objective = Callable[[np.ndarray], tuple[float, np.ndarray]]


@dataclass(frozen=True)
class OptimizerOptions:
    restarts: int = 20
    max_iters: int = 5000
    grad_tol: float = 1e-10
    step_min: float = 1e-6
    step_max: float = 1e8
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.step_min <= self.step_max:
            raise ValueError("need 0 < step_min <= step_max")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")


@dataclass(frozen=True)
class MaximizationResult:
    value: float
    argmax: np.ndarray
    iterations: int
    restarts_used: int
    converged: bool


def restart_rng(seed: int, restart: int) -> np.random.Generator:
    """Independent generator for one restart; depends only on (seed, restart)."""
    return np.random.default_rng([seed, restart])


def _tangent(x: np.ndarray, g: np.ndarray, blocks: Sequence[slice]) -> np.ndarray:
    out = g.copy()
    for b in blocks:
        out[b] -= np.real(np.vdot(x[b], g[b])) * x[b]
    return out


def _normalize(x: np.ndarray, blocks: Sequence[slice]) -> np.ndarray:
    x = x.copy()
    for b in blocks:
        x[b] /= np.linalg.norm(x[b])
    return x


def _evaluate(objective: Objective, x: np.ndarray) -> tuple[float, np.ndarray]:
    value, grad = objective(x)
    value = float(value)
    if not np.isfinite(value) or not np.all(np.isfinite(grad)):
        raise NonFiniteObjective("objective or gradient is not finite")
    return value, np.asarray(grad, dtype=complex)


def _blocks(x0: np.ndarray, sizes: Sequence[int] | None) -> list[slice]:
    sizes = [x0.shape[0]] if sizes is None else list(sizes)
    if sum(sizes) != x0.shape[0]:
        raise ValueError("block sizes do not add up to the vector length")
    edges = np.cumsum([0] + sizes)
    return [slice(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:])]


def bb_ascent(
    objective: Objective,
    x0: np.ndarray,
    opts: OptimizerOptions,
    blocks: Sequence[int] | None = None,
) -> MaximizationResult:
    """Single BB projected-gradient ascent run from ``x0``.

    ``blocks`` splits the vector into consecutive unit-norm pieces (a product
    of spheres); by default the whole vector lies on one sphere.  The best
    iterate seen is returned, since BB steps are non-monotone.
    """
    parts = _blocks(np.asarray(x0), blocks)
    x = _normalize(np.asarray(x0, dtype=complex), parts)
    f, g = _evaluate(objective, x)
    gt = _tangent(x, g, parts)
    best_f, best_x = f, x
    alpha = opts.step_min * 10
    converged = False
    it = 0
    for it in range(opts.max_iters):
        if np.linalg.norm(gt) <= opts.grad_tol:
            converged = True
            break
        x_new = _normalize(x + alpha * gt, parts)
        f_new, g_new = _evaluate(objective, x_new)
        gt_new = _tangent(x_new, g_new, parts)
        s = x_new - x
        y = gt_new - gt
        sy = abs(np.real(np.vdot(s, y)))
        if it % 2 == 0:
            ss = np.real(np.vdot(s, s))
            alpha = ss / sy if sy > 0 else opts.step_min
        else:
            yy = np.real(np.vdot(y, y))
            alpha = sy / yy if yy > 0 else opts.step_min
        if not np.isfinite(alpha):
            alpha = opts.step_min
        alpha = min(max(alpha, opts.step_min), opts.step_max)
        x, f, gt = x_new, f_new, gt_new
        if f > best_f:
            best_f, best_x = f, x
    else:
        converged = np.linalg.norm(gt) <= opts.grad_tol
        it = opts.max_iters
    return MaximizationResult(best_f, best_x, it, 1, bool(converged))


def bb_maximize(objective: Objective, dim: int, opts: OptimizerOptions | None = None) -> MaximizationResult:
    """Maximise ``objective`` over unit vectors of ``C^dim``; best of all restarts."""
    opts = opts or OptimizerOptions()
    best = None
    total = 0
    for r in range(opts.restarts):
        res = bb_ascent(objective, random_state(dim, restart_rng(opts.seed, r)), opts)
        total += res.iterations
        if best is None or res.value > best.value:
            best = res
    return replace(best, iterations=total, restarts_used=opts.restarts)


def max_fidelity(channel: Channel, opts: OptimizerOptions | None = None) -> MaximizationResult:
    """``F(N) = max_psi <psi|N(psi)|psi>``."""
    return bb_maximize(lambda x: fidelity_and_gradient(channel, x), channel.dim, opts)


def regularized_fidelity_full(channel: Channel, n: int, opts: OptimizerOptions | None = None) -> float:
    """``F^(n)(N) = F(N^{⊗n})^{1/n}`` by maximising over the full ``d^n`` space."""
    res = max_fidelity(tensor_power(channel, n), opts)
    return max(res.value, 0.0) ** (1.0 / n)


@dataclass(frozen=True)
class NuInftyResult:
    """Maximum output infinity-norm with its witnesses.

    ``value = <phi1|N(phi2)|phi1>``; ``ascent_values`` is the half-step
    objective sequence of the alternating ascent on the winning restart.
    """

    value: float
    phi1: np.ndarray
    phi2: np.ndarray
    ascent_values: tuple[float, ...] = field(default=(), repr=False)

    def __iter__(self):
        return iter((self.value, self.phi1, self.phi2))


def _projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())


def _alternating_ascent(channel, channel_dag, psi, opts):
    values = []
    prev = -np.inf
    phi = psi
    for _ in range(opts.max_iters):
        v1, phi = dominant_eigenpair(apply(channel, _projector(psi)))
        v2, psi = dominant_eigenpair(apply(channel_dag, _projector(phi)))
        values += [v1, v2]
        if v2 - prev < opts.grad_tol:
            break
        prev = v2
    return phi, psi, values


def nu_infty(channel: Channel, opts: OptimizerOptions | None = None) -> NuInftyResult:
    """``nu_inf(N) = max_psi ||N(psi)||_inf`` by alternating eigenvector ascent.

    Each half-step replaces one side of ``<phi|N(psi psi^dag)|phi>`` by a
    dominant eigenvector, so the sequence never decreases.  When two output
    directions are nearly degenerate this converges slowly, so every restart
    ends with a joint BB ascent over ``(phi, psi)`` followed by one more exact
    half-step.
    """
    opts = opts or OptimizerOptions()
    d = channel.dim
    dag = adjoint(channel)

    def pair_objective(x):
        phi, psi = x[:d], x[d:]
        out = apply(channel, _projector(psi))
        back = apply(dag, _projector(phi))
        return float(np.real(np.vdot(phi, out @ phi))), np.concatenate([out @ phi, back @ psi])

    best = None
    for r in range(opts.restarts):
        psi0 = random_state(d, restart_rng(opts.seed, r))
        phi, psi, values = _alternating_ascent(channel, dag, psi0, opts)
        polished = bb_ascent(pair_objective, np.concatenate([phi, psi]), opts, blocks=[d, d])
        psi = polished.argmax[d:] / np.linalg.norm(polished.argmax[d:])
        _, phi = dominant_eigenpair(apply(channel, _projector(psi)))
        value = float(np.real(np.vdot(phi, apply(channel, _projector(psi)) @ phi)))
        if best is None or value > best.value:
            best = NuInftyResult(value, phi, psi, tuple(values))
    return best


def nu_2(channel: Channel, opts: OptimizerOptions | None = None) -> float:
    """``nu_2(N) = F(N^dag ∘ N)^{1/2}``."""
    return max(max_fidelity(compose(adjoint(channel), channel), opts).value, 0.0) ** 0.5


def nu_2_direct(channel: Channel, opts: OptimizerOptions | None = None) -> float:
    """``max_psi ||N(psi)||_2`` maximised directly (independent route to :func:`nu_2`)."""
    dag = adjoint(channel)

    def objective(x):
        out = apply(channel, _projector(x))
        return float(np.real(np.sum(np.abs(out) ** 2))), 2 * apply(dag, out) @ x

    return max(bb_maximize(objective, channel.dim, opts).value, 0.0) ** 0.5
