"""Full analysis pipeline: validate -> spectra -> asymptotics -> bounds.

An apparent bound violation is never recorded straight away: the clustered
multiplicity is first cross-checked against the nullspace dimension, then
the whole summary is recomputed at 10x tighter tolerances.  Only a
violation that survives both steps lands in the report, flagged so callers
(CLI exit codes, campaign counters) can react.
"""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass

from . import asymptotics, bounds, commutants, linalg, spectra
from .bounds import BoundReport
from .gkls import GklsGenerator
from .spectra import SpectralSummary
from .superop import QuantumChannel

SCHEMA = "oqs/1"


@dataclass(frozen=True)
class AnalysisReport:
    kind: str  # "channel" | "generator"
    dim: int
    classification: str
    summary: SpectralSummary
    fixed_dim: int  # nullspace dimension of (M - I) or L
    attractor_dim: int
    commutant_dim: int | None
    bound_report: BoundReport
    tolerances: dict
    timings: dict
    discrepancy: str | None = None  # cross-check mismatch, if any survived
    rechecked: bool = False

    @property
    def bounds_satisfied(self) -> bool:
        return self.bound_report.all_satisfied and self.discrepancy is None


def analyze_channel(channel: QuantumChannel,
                    cluster_tol: float | None = None,
                    peripheral_tol: float = spectra.DEFAULT_PERIPHERAL_TOL,
                    markovian: bool = False,
                    with_commutant: bool = True) -> AnalysisReport:
    return _analyze("channel", channel, cluster_tol, peripheral_tol,
                    markovian, with_commutant)


def analyze_generator(gen: GklsGenerator,
                      cluster_tol: float | None = None,
                      peripheral_tol: float = spectra.DEFAULT_PERIPHERAL_TOL,
                      with_commutant: bool = True) -> AnalysisReport:
    return _analyze("generator", gen, cluster_tol, peripheral_tol,
                    False, with_commutant)


def _summarize(kind: str, subject, cluster_tol, peripheral_tol) -> SpectralSummary:
    if kind == "channel":
        return spectra.summarize_channel(subject, cluster_tol, peripheral_tol)
    return spectra.summarize_generator(subject, cluster_tol, peripheral_tol)


def _classify(kind: str, subject, summary) -> str:
    if kind == "channel":
        return bounds.classify_channel(subject, summary)
    return bounds.classify_generator(subject, summary)


def _nullspace_dim(kind: str, subject, summary) -> tuple[int, str | None]:
    """Dimension of Null(M - I) or Null(L); mismatch message if it disagrees
    with the clustered multiplicity."""
    try:
        if kind == "channel":
            basis = asymptotics.fixed_space(subject, summary=summary)
        else:
            basis = asymptotics.kernel(subject, summary=summary)
        return basis.dimension, None
    except asymptotics.ConsistencyError as exc:
        return -1, str(exc)


def _analyze(kind, subject, cluster_tol, peripheral_tol, markovian, with_commutant):
    timings: dict = {}
    t0 = time.perf_counter()
    summary = _summarize(kind, subject, cluster_tol, peripheral_tol)
    timings["spectra"] = time.perf_counter() - t0

    classification = _classify(kind, subject, summary)
    fixed_dim, discrepancy = _nullspace_dim(kind, subject, summary)
    report = _bound_report(kind, summary, classification, markovian)
    rechecked = False

    if discrepancy is not None or not report.all_satisfied:
        # Re-analysis protocol: 10x tighter tolerances before recording.
        rechecked = True
        tight_cluster = summary.cluster_tol / 10.0
        tight_peripheral = peripheral_tol / 10.0
        summary = _summarize(kind, subject, tight_cluster, tight_peripheral)
        classification = _classify(kind, subject, summary)
        fixed_dim, discrepancy = _nullspace_dim(kind, subject, summary)
        report = _bound_report(kind, summary, classification, markovian)

    t1 = time.perf_counter()
    try:
        attractor_dim = asymptotics.attractor(
            subject, cluster_tol=summary.cluster_tol,
            peripheral_tol=summary.peripheral_tol).dimension
    except asymptotics.ConsistencyError as exc:
        attractor_dim = -1
        discrepancy = discrepancy or str(exc)
    timings["asymptotics"] = time.perf_counter() - t1

    commutant_dim = None
    if with_commutant:
        t2 = time.perf_counter()
        commutant_dim = _commutant_dim(kind, subject)
        timings["commutant"] = time.perf_counter() - t2

    return AnalysisReport(
        kind=kind,
        dim=subject.dim,
        classification=classification,
        summary=summary,
        fixed_dim=fixed_dim,
        attractor_dim=attractor_dim,
        commutant_dim=commutant_dim,
        bound_report=report,
        tolerances={
            "cluster": summary.cluster_tol,
            "peripheral": summary.peripheral_tol,
        },
        timings=timings,
        discrepancy=discrepancy,
        rechecked=rechecked,
    )


def _bound_report(kind, summary, classification, markovian) -> BoundReport:
    if kind == "channel":
        report = bounds.check_channel_bounds(summary, classification)
    else:
        report = bounds.check_generator_bounds(summary, classification)
    derived = bounds.ckks_derived_bounds(summary, classification, markovian)
    return dataclasses.replace(report, checks=report.checks + tuple(derived))


def _commutant_dim(kind: str, subject) -> int:
    """Commutant of the Kraus set (with adjoints) or of {H, A_k, A_k^dag}."""
    if kind == "channel":
        ops = list(subject.kraus_operators())
        ops += [linalg.dagger(b) for b in ops]
    else:
        ops = [subject.hamiltonian]
        for a in subject.noise_ops:
            ops.append(a)
            ops.append(linalg.dagger(a))
    return commutants.commutant(ops, with_basis=False).dimension


def report_to_json(report: AnalysisReport) -> dict:
    return {
        "schema": SCHEMA,
        "kind": report.kind,
        "dim": report.dim,
        "classification": report.classification,
        "summary": spectra.summary_to_json(report.summary),
        "subspaces": {
            "fixed_dim": report.fixed_dim,
            "attractor_dim": report.attractor_dim,
            "commutant_dim": report.commutant_dim,
        },
        "bounds": bounds.report_to_json(report.bound_report),
        "tolerances": report.tolerances,
        "timings": report.timings,
        "discrepancy": report.discrepancy,
        "rechecked": report.rechecked,
    }


def report_to_table(report: AnalysisReport) -> str:
    """Human-readable rendering with the same numeric content as the JSON."""
    lines = [
        f"kind            {report.kind}",
        f"dim             {report.dim}",
        f"classification  {report.classification}",
        f"l0/m0           {report.summary.l0_or_m0}",
        f"lP/mP           {report.summary.lP_or_mP}",
        f"bulk            {report.summary.bulk_multiplicity}",
        f"fixed dim       {report.fixed_dim}",
        f"attractor dim   {report.attractor_dim}",
        f"commutant dim   {report.commutant_dim}",
        f"gap / forbidden {report.bound_report.gap} / {report.bound_report.forbidden}",
        "distinct eigenvalues (value, multiplicity, peripheral):",
    ]
    for item in report.summary.distinct:
        lines.append(
            f"  {item.value.real:+.9f}{item.value.imag:+.9f}j"
            f"  x{item.multiplicity}  {'peripheral' if item.peripheral else 'bulk'}"
        )
    lines.append("bound checks:")
    for c in report.bound_report.checks:
        status = "ok " if c.satisfied else "VIOLATED"
        lines.append(f"  [{status}] {c.name}: observed {c.observed}, "
                     f"bound {c.bound}, margin {c.margin}")
    if report.bound_report.ckks:
        worst = min(m.margin for m in report.bound_report.ckks)
        lines.append(f"ckks margins    min {worst:.6g} over "
                     f"{len(report.bound_report.ckks)} eigenvalues")
    lines.append(f"tolerances      cluster {report.tolerances['cluster']:.3g}, "
                 f"peripheral {report.tolerances['peripheral']:.3g}")
    if report.discrepancy:
        lines.append(f"DISCREPANCY     {report.discrepancy}")
    return "\n".join(lines)
