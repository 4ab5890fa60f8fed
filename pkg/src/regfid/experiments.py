"""Figure-reproduction sweeps over ``n`` and the channel summary printer."""

from __future__ import annotations

import io
import logging
from math import comb
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import TENSOR_POWER_BUDGET, Channel, make_channel
from .channel_io import read_channel
from .errors import ConfigError
from .optimize import OptimizerOptions, nu_infty, regularized_fidelity_full
from .pauli import (
    PauliChannel,
    canonicalize,
    crossover_n0,
    epsilon_channel,
    epsilon_of,
    f_tilde_closed,
    nu_infty_closed,
    trial_fidelity_closed,
)
from .symmetric import SYMMETRIC_BUDGET, max_symmetric_fidelity
from .trial import StatePair, fix_phase, trial_fidelity_root

log = logging.getLogger(__name__)

MODES = ("full", "symmetric", "trial", "closed")
VALUE_COLUMNS = ("F_full", "F_symmetric", "F_trial", "F_closed_trial", "nu_infty", "F_tilde")
CSV_COLUMNS = ("n",) + VALUE_COLUMNS + tuple(f"seconds_{m}" for m in MODES)

PRESETS = {
    "fig1": (PauliChannel((0.1, 0.2, 0.3, 0.4)), 1, 20),
    "fig2": (epsilon_channel(1 / 21), 1, 26),
    "fig3": (epsilon_channel(0.025), 1, 26),
}


@dataclass(frozen=True)
class ExperimentConfig:
    channel: PauliChannel | Channel
    n_min: int = 1
    n_max: int = 6
    modes: tuple[str, ...] = MODES
    options: OptimizerOptions = field(default_factory=OptimizerOptions)
    full_max_n: int = 6
    jobs: int = 1
    timings: bool = True
    source: str = ""

    def __post_init__(self):
        if self.n_min < 1:
            raise ConfigError("n_min", "must be >= 1")
        if self.n_max < self.n_min:
            raise ConfigError("n_max", f"must be >= n_min ({self.n_min})")
        bad = [m for m in self.modes if m not in MODES]
        if bad or not self.modes:
            raise ConfigError("modes", f"unknown or empty mode list {list(self.modes)}; choose from {MODES}")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        ch = self.kraus_channel
        if "full" in self.modes:
            if self.full_max_n < 1:
                raise ConfigError("full_max_n", "must be >= 1")
            entries = ch.num_kraus**self.full_max_n * ch.dim ** (2 * self.full_max_n)
            if entries > TENSOR_POWER_BUDGET:
                raise ConfigError("full_max_n", f"n={self.full_max_n} exceeds the full-space budget")
        if "symmetric" in self.modes:
            if ch.dim != 2:
                raise ConfigError("modes", "symmetric mode needs a qubit channel")
            if comb(self.n_max + 3, 3) ** 2 > SYMMETRIC_BUDGET:
                raise ConfigError("n_max", f"n={self.n_max} exceeds the symmetric-subspace budget")

    @property
    def kraus_channel(self) -> Channel:
        return self.channel.to_channel() if isinstance(self.channel, PauliChannel) else self.channel

    @classmethod
    def from_preset(cls, name: str, **overrides) -> "ExperimentConfig":
        if name not in PRESETS:
            raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
        channel, n_min, n_max = PRESETS[name]
        kwargs = dict(channel=channel, n_min=n_min, n_max=n_max, source=name)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)


@dataclass
class ResultRow:
    n: int
    values: dict[str, float] = field(default_factory=dict)
    seconds: dict[str, float] = field(default_factory=dict)

    def get(self, column: str) -> float | None:
        return self.values.get(column)


def _cell_seed(master: int, n: int, mode: str) -> int:
    ss = np.random.SeedSequence([master, n, MODES.index(mode)])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class _Job:
    n: int
    mode: str
    kraus: np.ndarray
    pauli: tuple[float, ...] | None
    pair: tuple[np.ndarray, np.ndarray] | None
    options: OptimizerOptions


def _run_cell(job: _Job) -> tuple[int, str, dict[str, float], float]:
    start = time.perf_counter()
    channel = make_channel(job.kraus)
    values: dict[str, float] = {}
    if job.mode == "full":
        values["F_full"] = regularized_fidelity_full(channel, job.n, job.options)
    elif job.mode == "symmetric":
        if job.n >= 20:
            log.info("symmetric maximisation n=%d", job.n)
        values["F_symmetric"] = max_symmetric_fidelity(channel, job.n, job.options).regularized
    elif job.mode == "trial":
        values["F_trial"] = trial_fidelity_root(channel, StatePair(*job.pair), job.n)
    elif job.mode == "closed" and job.pauli is not None:
        canonical, _ = canonicalize(job.pauli)
        values["F_closed_trial"] = trial_fidelity_closed(canonical, job.n)
        values["F_tilde"] = f_tilde_closed(canonical)
    return job.n, job.mode, values, time.perf_counter() - start


def run_sweep(config: ExperimentConfig) -> list[ResultRow]:
    """Evaluate every requested (n, mode) cell; rows come back in ascending ``n``."""
    channel = config.kraus_channel
    pauli = config.channel.p if isinstance(config.channel, PauliChannel) else None
    pair = None
    nu_value = None
    if "trial" in config.modes:
        opts = replace(config.options, seed=_cell_seed(config.options.seed, 0, "trial"))
        res = nu_infty(channel, opts)
        fixed = fix_phase(channel, StatePair(res.phi1, res.phi2))
        pair, nu_value = (fixed.phi1, fixed.phi2), res.value

    jobs = []
    for n in range(config.n_min, config.n_max + 1):
        for mode in config.modes:
            if mode == "full" and n > config.full_max_n:
                continue
            opts = replace(config.options, seed=_cell_seed(config.options.seed, n, mode))
            jobs.append(_Job(n, mode, np.asarray(channel.kraus), pauli, pair, opts))

    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_run_cell, jobs))
    else:
        results = [_run_cell(j) for j in jobs]

    rows = {n: ResultRow(n) for n in range(config.n_min, config.n_max + 1)}
    for n, mode, values, seconds in results:
        rows[n].values.update(values)
        rows[n].seconds[mode] = seconds
    for row in rows.values():
        if nu_value is not None:
            row.values["nu_infty"] = nu_value
    return [rows[n] for n in sorted(rows)]


def _fmt(value: float | None) -> str:
    return "" if value is None else format(value, ".12g")


def format_csv(rows: list[ResultRow], timings: bool = True) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for row in rows:
        cells = [str(row.n)] + [_fmt(row.get(c)) for c in VALUE_COLUMNS]
        cells += [_fmt(row.seconds.get(m)) if timings else "" for m in MODES]
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def monotone_violations(rows: list[ResultRow], column: str = "F_symmetric", slack: float = 1e-7) -> list[int]:
    """Values of ``n`` where ``column`` drops by more than ``slack`` from ``n-1``."""
    series = [(r.n, r.get(column)) for r in rows if r.get(column) is not None]
    return [n for (_, a), (n, b) in zip(series, series[1:]) if b < a - slack]


def load_channel_source(preset: str | None, path: str | Path | None) -> tuple[PauliChannel | Channel, str]:
    if (preset is None) == (path is None):
        raise ConfigError("channel", "give exactly one of --preset or --channel")
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        return PRESETS[preset][0], preset
    return read_channel(path), str(path)


def describe_channel(channel: PauliChannel | Channel) -> str:
    """Human-readable summary: dimension, Kraus count, TP residual and Pauli closed forms."""
    kraus = channel.to_channel() if isinstance(channel, PauliChannel) else channel
    lines = [
        f"dim: {kraus.dim}",
        f"kraus_operators: {kraus.num_kraus}",
        f"tp_residual: {kraus.tp_residual:.3e}",
    ]
    if isinstance(channel, PauliChannel):
        canonical, perm = canonicalize(channel)
        lines += [
            f"p: {list(channel.p)}",
            f"canonical_p: {[round(v, 12) for v in canonical.p]}",
            f"axis_permutation: {list(perm)}",
            f"nu_infty_closed: {nu_infty_closed(canonical):.12g}",
            f"F_tilde: {f_tilde_closed(canonical):.12g}",
        ]
        eps = epsilon_of(canonical)
        if eps is not None and eps > 0:
            lines += [f"epsilon: {eps:.12g}", f"n0: {crossover_n0(eps):.12g}"]
    return "\n".join(lines) + "\n"
