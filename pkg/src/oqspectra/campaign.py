"""Seeded verification campaigns over constructors and random ensembles.

One CSV row per analyzed subject.  Identical seeds give byte-identical CSV
files: every subject draws from its own ``default_rng((seed, dim-block,
index))`` stream and floats are written with a fixed 12-significant-digit
format.  ``OQS_THREADS`` fans the per-subject analysis out to a thread
pool; results are merged in submission order, so parallel runs produce the
same bytes as sequential ones.
"""

from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import analysis, bounds, constructions
from .constructions import ENSEMBLES
from .gkls import GklsGenerator
from .superop import QuantumChannel, ValidationError

CONSTRUCTORS = "constructors"
ALL_SOURCES = (CONSTRUCTORS,) + ENSEMBLES
MAX_RESAMPLES = 64

CSV_COLUMNS = (
    "source", "dim", "index", "seed", "kind", "classification",
    "l0_or_m0", "lP_or_mP", "margin_steady", "margin_peripheral",
    "ckks_min_margin", "ckks_satisfied", "rejects", "rechecked",
    "violation", "note",
)


@dataclass(frozen=True)
class CampaignConfig:
    dims: tuple[int, ...]
    per_dim: int
    sources: tuple[str, ...] = ALL_SOURCES
    seed: int = 0
    env_dim: int | None = None

    def __post_init__(self):
        unknown = set(self.sources) - set(ALL_SOURCES)
        if unknown:
            raise ValueError(f"unknown sources {sorted(unknown)}; pick from {ALL_SOURCES}")
        if any(d < 2 for d in self.dims):
            raise ValueError("dimensions must be at least 2")
        if self.per_dim < 1:
            raise ValueError("per_dim must be at least 1")


@dataclass(frozen=True)
class CampaignRow:
    source: str
    dim: int
    index: int
    seed: str
    report: analysis.AnalysisReport
    rejects: int = 0
    violation: bool = False
    note: str = ""


@dataclass
class CampaignResult:
    rows: list[CampaignRow] = field(default_factory=list)
    structural_violations: int = 0
    oracle_mismatches: int = 0
    ckks_unital_failures: int = 0

    @property
    def clean(self) -> bool:
        return (self.structural_violations == 0 and self.oracle_mismatches == 0
                and self.ckks_unital_failures == 0)


def run_campaign(config: CampaignConfig) -> CampaignResult:
    tasks = list(_subject_tasks(config))
    workers = int(os.environ.get("OQS_THREADS", "1"))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, tasks))
    else:
        rows = [_run_task(t) for t in tasks]

    result = CampaignResult(rows=rows)
    for row in rows:
        if row.violation:
            if row.source == "gkls-unital" and "ckks" in row.note:
                result.ckks_unital_failures += 1
            elif row.note.startswith("oracle"):
                result.oracle_mismatches += 1
            else:
                result.structural_violations += 1
    return result


@dataclass(frozen=True)
class _Task:
    source: str
    dim: int
    index: int
    seed_key: tuple[int, ...] | None  # None for deterministic constructors
    env_dim: int | None


def _subject_tasks(config: CampaignConfig):
    for source in config.sources:
        for dim_i, d in enumerate(config.dims):
            count = config.per_dim
            if source == CONSTRUCTORS:
                count = 4  # one row per saturating example
            for index in range(count):
                key = None
                if source != CONSTRUCTORS:
                    key = (config.seed, ALL_SOURCES.index(source), dim_i, index)
                yield _Task(source=source, dim=d, index=index,
                            seed_key=key, env_dim=config.env_dim)


def _run_task(task: _Task) -> CampaignRow:
    if task.source == CONSTRUCTORS:
        return _run_constructor(task)
    return _run_sampled(task)


_CONSTRUCTOR_NAMES = ("unitary", "phase-damping", "hamiltonian", "dissipative")


def _run_constructor(task: _Task) -> CampaignRow:
    d = task.dim
    name = _CONSTRUCTOR_NAMES[task.index]
    ceiling = bounds.structural_ceiling(d)
    if name == "unitary":
        subject = constructions.saturating_unitary_channel(d)
        expected = (ceiling, d * d)
    elif name == "phase-damping":
        subject = constructions.phase_damping_channel(d)
        expected = (ceiling, ceiling)
    elif name == "hamiltonian":
        subject = constructions.saturating_hamiltonian_generator(d)
        expected = (ceiling, d * d)
    else:
        subject = constructions.saturating_dissipative_generator(d)
        expected = (ceiling, ceiling)

    report = _analyze(subject, markovian=name == "phase-damping")
    observed = (report.summary.l0_or_m0, report.summary.lP_or_mP)
    note = f"constructor:{name}"
    violation = False
    if observed != expected:
        violation = True
        note = f"oracle mismatch {name}: counts {observed} != advertised {expected}"
    elif not report.bounds_satisfied:
        violation = True
        note = f"constructor:{name} bound check failed"
    return CampaignRow(source=task.source, dim=d, index=task.index, seed="",
                       report=report, violation=violation, note=note)


def _run_sampled(task: _Task) -> CampaignRow:
    rng_key = task.seed_key
    rejects = 0
    note = ""
    subject = None
    for attempt in range(MAX_RESAMPLES):
        rng = np.random.default_rng(rng_key + (attempt,))
        try:
            subject = _draw(task.source, task.dim, task.env_dim, rng)
        except ValidationError:
            rejects += 1
            continue
        if _acceptable(task.source, subject):
            break
        rejects += 1
        subject = None
    if subject is None:
        return CampaignRow(source=task.source, dim=task.dim, index=task.index,
                           seed="-".join(map(str, rng_key)), report=None, rejects=rejects,
                           violation=True, note="oracle: resampling exhausted")

    report = _analyze(subject, markovian=task.source.startswith("gkls"))
    violation = not report.bounds_satisfied
    if violation:
        note = "bound violation" if report.discrepancy is None else report.discrepancy
    if task.source == "gkls-unital" and report.bound_report.ckks:
        if not all(m.satisfied for m in report.bound_report.ckks):
            violation = True
            note = "ckks violated on unital sample"
    return CampaignRow(source=task.source, dim=task.dim, index=task.index,
                       seed="-".join(map(str, rng_key)), report=report, rejects=rejects,
                       violation=violation, note=note)


def _draw(source: str, d: int, env_dim: int | None, rng: np.random.Generator):
    if source == "haar-unitary":
        return constructions.unitary_channel(constructions.haar_unitary(d, rng))
    if source == "cptp-stinespring":
        return constructions.stinespring_channel(d, rng, env_dim)
    if source == "gkls-generic":
        return constructions.generic_gkls(d, rng)
    if source == "gkls-unital":
        return constructions.unital_gkls(d, rng)
    return constructions.hamiltonian_gkls(d, rng)


def _acceptable(source: str, subject) -> bool:
    """Generic ensembles must land in the classification they advertise."""
    if source == "cptp-stinespring":
        return bounds.classify_channel(subject) == "non-unitary"
    if source == "haar-unitary":
        return bounds.classify_channel(subject) != "trivial"
    if source == "gkls-generic":
        return bounds.classify_generator(subject) == "non-hamiltonian"
    if source == "gkls-unital":
        return bounds.classify_generator(subject) == "non-hamiltonian"
    if source == "gkls-hamiltonian":
        return bounds.classify_generator(subject) == "hamiltonian"
    return True


def _analyze(subject, markovian: bool) -> analysis.AnalysisReport:
    if isinstance(subject, QuantumChannel):
        return analysis.analyze_channel(subject, markovian=markovian,
                                        with_commutant=False)
    if isinstance(subject, GklsGenerator):
        return analysis.analyze_generator(subject, with_commutant=False)
    raise TypeError(f"unexpected subject {type(subject)!r}")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def rows_to_csv(rows: list[CampaignRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        rep = row.report
        if rep is None:
            writer.writerow([row.source, row.dim, row.index, row.seed,
                             "", "", "", "", "", "", "", "", row.rejects,
                             "", int(row.violation), row.note])
            continue
        steady = next((c.margin for c in rep.bound_report.checks
                       if c.name.startswith(("l0", "m0"))), "")
        periph = next((c.margin for c in rep.bound_report.checks
                       if c.name.startswith(("lP", "mP"))), "")
        ckks_min = ""
        ckks_ok = ""
        if rep.bound_report.ckks:
            ckks_min = _fmt(min(m.margin for m in rep.bound_report.ckks))
            ckks_ok = int(all(m.satisfied for m in rep.bound_report.ckks))
        writer.writerow([
            row.source, row.dim, row.index, row.seed, rep.kind,
            rep.classification, rep.summary.l0_or_m0, rep.summary.lP_or_mP,
            steady, periph, ckks_min, ckks_ok, row.rejects,
            int(rep.rechecked), int(row.violation), row.note,
        ])
    return buf.getvalue()
