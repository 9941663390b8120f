"""Seeded grid experiment: resilient greedy versus the exact max-min optimum on
random log-det objectives.

Trial seeds come from :func:`trial_seed`, the first 8 bytes (big endian,
top bit cleared) of ``blake2b("{base_seed}/{m}/{beta}/{trial}")``. Any cell can
therefore be rerun on its own and reproduces the rows of a full run.
"""
from __future__ import annotations

import hashlib
import io
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from math import comb
from pathlib import Path
from statistics import fmean
from typing import Optional

from .analysis import compute_curvature, theorem1_bound
from .errors import CapacityError, InvalidInputError
from .functions import random_psd_instance
from .solvers import MAXMIN_CAP, ProblemInstance, exact_maxmin, resilient_greedy

CSV_HEADER = "m,beta,trial,seed,kappa,f_star,f_alg,ratio,bound,evals_alg,evals_exact"
SUMMARY_HEADER = "m,beta,mean_ratio,min_ratio,max_ratio"
KAPPA_WARN = 0.9


def fmt(x) -> str:
    """Shortest round-trip text for a number, without a trailing ``.0``."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    s = repr(float(x))
    return s[:-2] if s.endswith(".0") else s


def trial_seed(base_seed: int, m: int, beta: int, trial: int) -> int:
    key = f"{int(base_seed)}/{int(m)}/{int(beta)}/{int(trial)}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big") & (2 ** 63 - 1)


@dataclass
class ExperimentConfig:
    m_values: list = field(default_factory=lambda: list(range(8, 16)))
    alpha: int = 7
    beta_values: list = field(default_factory=lambda: list(range(1, 7)))
    trials: int = 10
    d: int = 20
    base_seed: int = 0
    removal_method: str = "exact"
    output_path: Optional[str] = None
    cap: int = MAXMIN_CAP
    workers: int = 1

    def validate(self):
        if self.trials < 1:
            raise InvalidInputError(f"trials must be >= 1, got {self.trials}")
        if self.removal_method not in ("exact", "greedy"):
            raise InvalidInputError(f"removal_method must be exact or greedy, got {self.removal_method!r}")
        if not self.m_values or not self.beta_values:
            raise InvalidInputError("m_values and beta_values must be non-empty")
        for m in self.m_values:
            for beta in self.beta_values:
                if not 0 <= beta <= self.alpha <= m:
                    raise InvalidInputError(
                        f"need 0 <= beta <= alpha <= m, got m={m}, alpha={self.alpha}, beta={beta}")
                work = comb(m, self.alpha) * comb(self.alpha, beta)
                if work > self.cap:
                    raise CapacityError(
                        f"cell m={m}, beta={beta} needs {work} residual checks > cap {self.cap}")

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        data = json.loads(Path(path).read_text())
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise InvalidInputError(f"unknown experiment config fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class TrialRow:
    m: int
    beta: int
    trial: int
    seed: int
    kappa: float
    f_star: float
    f_alg: float
    ratio: float
    bound: float
    evals_alg: int
    evals_exact: int

    def csv(self) -> str:
        return ",".join(fmt(v) for v in asdict(self).values())


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list
    warnings: list = field(default_factory=list)

    def to_csv(self) -> str:
        return CSV_HEADER + "\n" + "".join(r.csv() + "\n" for r in self.rows)

    def write(self, path) -> tuple[Path, Path]:
        path = Path(path)
        path.write_text(self.to_csv())
        summary_path = path.with_name(path.stem + "_summary.csv")
        summary_path.write_text(summarize(self).to_csv())
        return path, summary_path


def run_trial(config: ExperimentConfig, m: int, beta: int, trial: int) -> TrialRow:
    seed = trial_seed(config.base_seed, m, beta, trial)
    f = random_psd_instance(m, config.d, seed)
    inst = ProblemInstance(f, config.alpha, beta)
    alg = resilient_greedy(inst, removal=config.removal_method, with_bound=False)
    best = exact_maxmin(inst, cap=config.cap)
    kappa = compute_curvature(f).kappa
    f_star, f_alg = best.residual_value, alg.residual_value
    return TrialRow(m, beta, trial, seed, kappa, f_star, f_alg,
                    f_alg / f_star if f_star > 0 else 1.0,
                    theorem1_bound(kappa, beta).bound, alg.eval_count, best.eval_count)


def _run_cell(args):
    config, m, beta, trial = args
    return run_trial(config, m, beta, trial)


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    config.validate()
    jobs = [(config, m, b, t) for m in config.m_values for b in config.beta_values
            for t in range(config.trials)]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            rows = list(pool.map(_run_cell, jobs, chunksize=8))
    else:
        rows = [_run_cell(j) for j in jobs]
    rows.sort(key=lambda r: (r.m, r.beta, r.trial))
    report = ExperimentReport(config, rows)
    low = [r for r in rows if r.kappa <= KAPPA_WARN]
    if low:
        msg = (f"{len(low)} of {len(rows)} instances have curvature <= {KAPPA_WARN} "
               f"(lowest {min(r.kappa for r in low):.4f})")
        report.warnings.append(msg)
        warnings.warn(msg, stacklevel=2)
    if config.output_path:
        report.write(config.output_path)
    return report


@dataclass(frozen=True)
class SummaryCell:
    m: int
    beta: int
    mean_ratio: float
    min_ratio: float
    max_ratio: float


@dataclass
class Summary:
    cells: list
    mean_by_beta: dict
    # per m: True when the mean ratio never increases with beta
    nonincreasing_in_beta: dict

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(SUMMARY_HEADER + "\n")
        for c in self.cells:
            buf.write(",".join(fmt(v) for v in (c.m, c.beta, c.mean_ratio, c.min_ratio, c.max_ratio)) + "\n")
        return buf.getvalue()


def summarize(report) -> Summary:
    rows = report.rows if isinstance(report, ExperimentReport) else list(report)
    if not rows:
        raise InvalidInputError("cannot summarise an empty report")
    groups: dict = {}
    for r in rows:
        groups.setdefault((r.m, r.beta), []).append(r.ratio)
    cells = [SummaryCell(m, b, fmean(v), min(v), max(v)) for (m, b), v in sorted(groups.items())]
    by_beta: dict = {}
    for r in rows:
        by_beta.setdefault(r.beta, []).append(r.ratio)
    trend = {}
    for m in sorted({c.m for c in cells}):
        means = [c.mean_ratio for c in cells if c.m == m]
        trend[m] = all(b <= a for a, b in zip(means, means[1:]))
    return Summary(cells, {b: fmean(v) for b, v in sorted(by_beta.items())}, trend)
