"""Seeded randomized property checks, one report line per property.

Every check returns the largest deviation it saw; a property passes when
that deviation is at most its tolerance.  For inequalities the deviation is
the size of the largest violation (0 when the inequality holds).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channel import (
    apply,
    adjoint,
    fidelity,
    fidelity_gradient,
    natural_representation,
    random_channel,
    random_state,
    tensor,
    tensor_power,
)
from .errors import ConfigError
from .optimize import OptimizerOptions, max_fidelity, nu_infty, regularized_fidelity_full
from .pauli import (
    PauliChannel,
    canonicalize,
    crossover_n0,
    epsilon_channel,
    nu_infty_closed,
    pauli_to_kraus,
    sigma_eigenstates,
    trial_fidelity_closed,
)
from .symmetric import (
    expand,
    max_symmetric_fidelity,
    pair_embedding,
    random_symmetric_state,
    symmetric_fidelity,
    dicke_transfer,
    symmetric_fidelity_gradient,
)
from .trial import (
    StatePair,
    build_trial_state,
    channel_pair_coefficients,
    fix_phase,
    trial_fidelity,
    trial_fidelity_root,
)

FAST = OptimizerOptions(restarts=5, max_iters=3000)
# Haar starts in 2^4 dimensions miss the product basin too often with FAST
THOROUGH = OptimizerOptions(restarts=150)


@dataclass(frozen=True)
class Property:
    name: str
    trials: int
    tol: float
    check: Callable[[np.random.Generator, int], float]


@dataclass(frozen=True)
class PropertyOutcome:
    name: str
    trials: int
    max_deviation: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tol)

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return f"{self.name},{self.trials},{self.max_deviation:.6e},{self.tol:.1e},{status}"


def random_pauli(rng: np.random.Generator, canonical: bool = True) -> PauliChannel:
    p = PauliChannel(tuple(rng.dirichlet(np.ones(4))))
    return canonicalize(p)[0] if canonical else p


def random_qubit_channel(rng: np.random.Generator):
    return random_channel(2, int(rng.integers(1, 5)), rng)


def _random_density(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho)


def directional_fd_error(f, g, x, rng, h=1e-5) -> float:
    """Relative mismatch between a central difference of ``f`` and ``2 Re <g, dx>``."""
    dx = random_state(x.shape[0], rng)
    fd = (f(x + h * dx) - f(x - h * dx)) / (2 * h)
    exact = 2 * np.real(np.vdot(g, dx))
    return abs(fd - exact) / max(abs(exact), np.linalg.norm(g))


# channel_core


def _trace_preservation(rng, trials):
    dev = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 5))
        ch = random_channel(d, int(rng.integers(1, 5)), rng)
        rho = _random_density(d, rng)
        dev = max(dev, abs(np.trace(apply(ch, rho)) - np.trace(rho)))
    return dev


def _positivity(rng, trials):
    dev = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 5))
        ch = random_channel(d, int(rng.integers(1, 5)), rng)
        for _ in range(100):
            psi = random_state(d, rng)
            low = np.linalg.eigvalsh(apply(ch, np.outer(psi, psi.conj())))[0]
            dev = max(dev, -low)
    return dev


def _fidelity_routes(rng, trials):
    dev = 0.0
    for _ in range(trials):
        d = int(rng.integers(2, 5))
        ch = random_channel(d, int(rng.integers(1, 5)), rng)
        psi = random_state(d, rng)
        kraus = fidelity(ch, psi)
        direct = np.real(np.trace(np.outer(psi, psi.conj()) @ apply(ch, np.outer(psi, psi.conj()))))
        v = np.kron(psi, psi.conj())
        quad = np.vdot(v, natural_representation(ch) @ v)
        dev = max(dev, abs(kraus - direct), abs(kraus - quad.real), abs(quad.imag))
    return dev


def _adjoint_involution(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_channel(int(rng.integers(2, 5)), int(rng.integers(1, 5)), rng)
        dev = max(dev, np.max(np.abs(adjoint(adjoint(ch)).kraus - ch.kraus)))
    return dev


def _tensor_consistency(rng, trials):
    dev = 0.0
    for _ in range(trials):
        da, db = (int(v) for v in rng.integers(2, 4, size=2))
        a, b = random_channel(da, 2, rng), random_channel(db, 3, rng)
        psi, phi = random_state(da, rng), random_state(db, rng)
        joint = fidelity(tensor(a, b), np.kron(psi, phi))
        dev = max(dev, abs(joint - fidelity(a, psi) * fidelity(b, phi)))
    return dev


def _fidelity_gradient(rng, trials):
    dev = 0.0
    for _ in range(trials):
        d = int(rng.choice([2, 3, 4]))
        ch = random_channel(d, int(rng.integers(1, 5)), rng)
        psi = random_state(d, rng)
        dev = max(dev, directional_fd_error(lambda x: fidelity(ch, x), fidelity_gradient(ch, psi), psi, rng))
    return dev


# optimize


def _upper_bound(rng, trials):
    dev = 0.0
    for t in range(trials):
        ch = random_qubit_channel(rng) if t % 2 else random_channel(3, 2, rng)
        f = max_fidelity(ch, FAST).value
        dev = max(dev, f - nu_infty(ch, FAST).value)
    return max(dev, 0.0)


def _super_multiplicativity(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_qubit_channel(rng)
        best = {k: max_fidelity(tensor_power(ch, k), THOROUGH).value for k in (1, 2, 3, 4)}
        for m, n in ((1, 1), (1, 2), (1, 3), (2, 2)):
            lhs = best[m + n] ** (1 / (m + n))
            dev = max(dev, (best[m] * best[n]) ** (1 / (m + n)) - lhs)
    return max(dev, 0.0)


def _ascent_monotone(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_channel(int(rng.integers(2, 4)), int(rng.integers(2, 5)), rng)
        vals = np.array(nu_infty(ch, OptimizerOptions(restarts=3, seed=int(rng.integers(1 << 30)))).ascent_values)
        if vals.size > 1:
            dev = max(dev, float(np.max(vals[:-1] - vals[1:])))
    return max(dev, 0.0)


def _nu_infty_closed(rng, trials):
    dev = 0.0
    for _ in range(trials):
        p = random_pauli(rng)
        dev = max(dev, abs(nu_infty(pauli_to_kraus(p), FAST).value - nu_infty_closed(p)))
    return dev


def _king_small_n(rng, trials):
    dev = 0.0
    for _ in range(trials):
        p = random_pauli(rng)
        ch = pauli_to_kraus(p)
        single = nu_infty(ch, FAST).value
        for n in (2, 3):
            dev = max(dev, abs(nu_infty(tensor_power(ch, n), FAST).value ** (1 / n) - single))
    return dev


def _determinism(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_channel(3, 2, rng)
        opts = OptimizerOptions(restarts=3, seed=int(rng.integers(1 << 30)))
        a, b = max_fidelity(ch, opts), max_fidelity(ch, opts)
        dev = max(dev, abs(a.value - b.value), float(np.max(np.abs(a.argmax - b.argmax))))
    return dev


# symmetric_subspace


def _symmetric_oracle(rng, trials):
    dev = 0.0
    for t in range(trials):
        n = 2 + t % 3
        ch = random_qubit_channel(rng)
        c = random_symmetric_state(n, rng)
        dev = max(dev, abs(symmetric_fidelity(ch, c) - fidelity(tensor_power(ch, n), expand(c))))
    return dev


def _embedding_isometry(rng, trials):
    return max(abs(np.linalg.norm(pair_embedding(random_symmetric_state(int(rng.integers(1, 11)), rng))) - 1)
               for _ in range(trials))


def _form_reality(rng, trials):
    dev = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        ch = random_qubit_channel(rng)
        c = random_symmetric_state(n, rng)
        x = np.outer(c, c.conj()).ravel()
        dev = max(dev, abs(np.vdot(x, dicke_transfer(ch, n).matrix @ x).imag))
    return dev


def _symmetric_le_nu_infty(rng, trials):
    dev = 0.0
    for _ in range(trials):
        p = random_pauli(rng)
        n = int(rng.integers(2, 13))
        f = max_symmetric_fidelity(pauli_to_kraus(p), n, FAST).regularized
        dev = max(dev, f - nu_infty_closed(p))
    return max(dev, 0.0)


def _symmetric_le_full(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_qubit_channel(rng)
        n = int(rng.integers(2, 5))
        dev = max(dev, max_symmetric_fidelity(ch, n, FAST).regularized - regularized_fidelity_full(ch, n, THOROUGH))
    return max(dev, 0.0)


def _symmetric_gradient(rng, trials):
    dev = 0.0
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        ch = random_qubit_channel(rng)
        c = random_symmetric_state(n, rng)
        g = symmetric_fidelity_gradient(ch, c)
        dev = max(dev, directional_fd_error(lambda x: symmetric_fidelity(ch, x), g, c, rng))
    return dev


# trial_states


def _random_pair(d, rng):
    return StatePair(random_state(d, rng), random_state(d, rng))


def _trial_consistency(rng, trials):
    dev = 0.0
    for t in range(trials):
        d = 2 + t % 2
        n = int(rng.integers(1, 6 if d == 2 else 4))
        ch = random_channel(d, int(rng.integers(1, 4)), rng)
        pair = _random_pair(d, rng)
        full = fidelity(tensor_power(ch, n), build_trial_state(pair, n))
        dev = max(dev, abs(trial_fidelity(ch, pair, n) - full))
    return dev


def _nu_pair(ch):
    res = nu_infty(ch, FAST)
    return res.value, fix_phase(ch, StatePair(res.phi1, res.phi2))


def _trial_convergence(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_qubit_channel(rng)
        nu, pair = _nu_pair(ch)
        dev = max(dev, abs(trial_fidelity_root(ch, pair, 10_000) - nu) / nu)
    return dev


def _lower_bound_chain(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_qubit_channel(rng)
        _, pair = _nu_pair(ch)
        for n in (2, 7, 13, 20):
            sym = max_symmetric_fidelity(ch, n, FAST).regularized
            dev = max(dev, trial_fidelity_root(ch, pair, n) - sym)
    return max(dev, 0.0)


def _coefficient_bounds(rng, trials):
    dev = 0.0
    for _ in range(trials):
        ch = random_channel(int(rng.integers(2, 4)), int(rng.integers(1, 5)), rng)
        nu, pair = _nu_pair(ch)
        c = channel_pair_coefficients(ch, pair)
        top = c[0, 1, 1, 0].real
        dev = max(dev, abs(top - nu), c[1, 0, 0, 1].real - top, c[0, 0, 0, 0].real - top, c[1, 1, 1, 1].real - top)
    return max(dev, 0.0)


# pauli_analytic


def _crossover(rng, trials):
    bad = 0
    for eps in (0.02, 0.03, 0.05):
        p = epsilon_channel(eps)
        n0 = crossover_n0(eps)
        f1 = p.p[0] + p.p[3]
        for n in range(1, int(np.floor(n0)) - 1):
            bad += trial_fidelity_closed(p, n) > f1
        for n in range(int(np.ceil(n0)) + 2, int(np.ceil(n0)) + 40):
            bad += trial_fidelity_closed(p, n) <= f1
    return float(bad)


def _trial_closed_vs_general(rng, trials):
    dev = 0.0
    plus, minus = sigma_eigenstates(1)
    for _ in range(trials):
        p = random_pauli(rng)
        ch = pauli_to_kraus(p)
        pair = StatePair(plus, minus)
        for n in (1, 2, 3, 10, 100, 1000):
            dev = max(dev, abs(trial_fidelity_root(ch, pair, n) - trial_fidelity_closed(p, n)))
    return dev


PROPERTIES = [
    Property("trace_preservation", 50, 1e-10, _trace_preservation),
    Property("positivity", 20, 1e-10, _positivity),
    Property("fidelity_three_routes", 50, 1e-10, _fidelity_routes),
    Property("adjoint_involution", 20, 0.0, _adjoint_involution),
    Property("tensor_consistency", 50, 1e-10, _tensor_consistency),
    Property("fidelity_gradient_fd", 50, 1e-6, _fidelity_gradient),
    Property("upper_bound_F_le_nu_infty", 20, 1e-8, _upper_bound),
    Property("super_multiplicativity", 3, 1e-8, _super_multiplicativity),
    Property("alternating_ascent_monotone", 20, 1e-12, _ascent_monotone),
    Property("nu_infty_closed_vs_numeric", 100, 1e-8, _nu_infty_closed),
    Property("king_small_n", 10, 1e-7, _king_small_n),
    Property("determinism", 5, 0.0, _determinism),
    Property("symmetric_oracle_equivalence", 20, 1e-9, _symmetric_oracle),
    Property("embedding_isometry", 50, 1e-12, _embedding_isometry),
    Property("hermitian_form_reality", 20, 1e-8, _form_reality),
    Property("symmetric_le_nu_infty_pauli", 10, 1e-6, _symmetric_le_nu_infty),
    Property("symmetric_le_full", 5, 1e-8, _symmetric_le_full),
    Property("symmetric_gradient_fd", 50, 1e-6, _symmetric_gradient),
    Property("trial_consistency", 20, 1e-9, _trial_consistency),
    Property("trial_convergence_n1e4", 20, 1e-2, _trial_convergence),
    Property("lower_bound_chain", 5, 1e-6, _lower_bound_chain),
    Property("coefficient_bounds", 20, 1e-8, _coefficient_bounds),
    Property("crossover_semantics", 1, 0.0, _crossover),
    Property("trial_closed_vs_general", 20, 1e-10, _trial_closed_vs_general),
]


def run_properties(seed: int = 0, trials: int | None = None, names: list[str] | None = None) -> list[PropertyOutcome]:
    """Run the property suite; ``trials`` overrides every property's default count."""
    unknown = sorted(set(names or ()) - {p.name for p in PROPERTIES})
    if unknown:
        raise ConfigError("only", f"unknown properties {unknown}")
    outcomes = []
    for i, prop in enumerate(PROPERTIES):
        if names and prop.name not in names:
            continue
        count = prop.trials if trials is None else trials
        rng = np.random.default_rng([seed, i])
        outcomes.append(PropertyOutcome(prop.name, count, float(prop.check(rng, count)), prop.tol))
    return outcomes


def format_report(outcomes: list[PropertyOutcome]) -> str:
    return "name,trials,max_deviation,tolerance,status\n" + "".join(o.line() + "\n" for o in outcomes)
