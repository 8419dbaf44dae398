"""Eigenvalue clustering and spectral summaries.

Distinct eigenvalues are recovered from the raw d^2 eigenvalue list by
single-linkage clustering (chaining within ``cluster_tol``), which keeps
numerically smeared multiple eigenvalues together at the cost of possibly
merging adversarially close distinct ones.  Tolerances are caller
overridable and are embedded in every summary.

For a channel, peripheral means |mu| >= 1 - peripheral_tol and l0 is the
multiplicity of the cluster containing 1; for a generator, peripheral means
|Re(lambda)| <= peripheral_tol and m0 is the multiplicity of the cluster
containing 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg

DEFAULT_PERIPHERAL_TOL = 1e-7
DEFAULT_CLUSTER_REL_TOL = 1e-7


def default_cluster_tol(spectral_radius: float) -> float:
    # Well above eig backward error at d <= 12, far below constructed gaps.
    return DEFAULT_CLUSTER_REL_TOL * max(1.0, spectral_radius)


@dataclass(frozen=True)
class DistinctEigenvalue:
    value: complex
    multiplicity: int
    peripheral: bool
    real_part: float
    rate: float | None = None  # -Re(lambda), generators only


@dataclass(frozen=True)
class SpectralSummary:
    """Distinct eigenvalues with multiplicities and the derived counts.

    ``l0_or_m0`` is the multiplicity of the cluster at 1 (channels) or 0
    (generators); ``lP_or_mP`` sums all peripheral multiplicities;
    ``bulk_multiplicity`` is the complement.
    """

    kind: str  # "channel" | "generator"
    dim: int
    distinct: tuple[DistinctEigenvalue, ...]
    l0_or_m0: int
    lP_or_mP: int
    bulk_multiplicity: int
    cluster_tol: float
    peripheral_tol: float


def cluster(values, cluster_tol: float) -> list[tuple[complex, int]]:
    """Single-linkage clustering of complex values.

    Two values share a cluster if they are within ``cluster_tol`` of each
    other through a chain.  Returns (center, multiplicity) pairs with center
    the mean of the cluster members, sorted by descending |center| then by
    phase angle; the result is invariant under permutations of the input.
    """
    if cluster_tol <= 0:
        raise ValueError("cluster_tol must be positive")
    vs = np.asarray(values, dtype=np.complex128).ravel()
    n = vs.size
    if n == 0:
        return []
    # Sorting first makes the arithmetic permutation-invariant.
    order = np.lexsort((vs.imag, vs.real))
    vs = vs[order]

    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for i in range(n):
        for j in range(i + 1, n):
            # Input is sorted by real part: once the real gap alone exceeds
            # the tolerance no later j can link to i.
            if vs[j].real - vs[i].real > cluster_tol:
                break
            if abs(vs[i] - vs[j]) <= cluster_tol:
                union(i, j)

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for members in groups.values():
        vals = vs[members]
        out.append((complex(np.mean(vals)), len(members)))
    out.sort(key=lambda cm: (-abs(cm[0]), np.angle(cm[0])))
    return out


def _summarize(kind: str, dim: int, eigenvalues: np.ndarray,
               cluster_tol: float | None, peripheral_tol: float) -> SpectralSummary:
    radius = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    ctol = cluster_tol if cluster_tol is not None else default_cluster_tol(radius)
    clusters = cluster(eigenvalues, ctol)

    if kind == "channel":
        anchor = 1.0 + 0.0j

        def is_peripheral(c: complex) -> bool:
            return abs(c) >= 1.0 - peripheral_tol
    else:
        anchor = 0.0 + 0.0j

        def is_peripheral(c: complex) -> bool:
            return abs(c.real) <= peripheral_tol

    anchor_idx = min(range(len(clusters)), key=lambda k: abs(clusters[k][0] - anchor))
    anchor_dist = abs(clusters[anchor_idx][0] - anchor)
    if anchor_dist > max(peripheral_tol, 2 * ctol):
        raise ValueError(
            f"no eigenvalue cluster within tolerance of {anchor}: "
            f"nearest at distance {anchor_dist:.3e}; invalid {kind}"
        )

    distinct = []
    lp = 0
    l0 = clusters[anchor_idx][1]
    for center, mult in clusters:
        peripheral = is_peripheral(center)
        rate = max(0.0, -center.real) if kind == "generator" else None
        distinct.append(
            DistinctEigenvalue(
                value=center,
                multiplicity=mult,
                peripheral=peripheral,
                real_part=float(center.real),
                rate=rate,
            )
        )
        if peripheral:
            lp += mult

    total = sum(item.multiplicity for item in distinct)
    if total != dim * dim:
        raise AssertionError(f"multiplicities sum to {total}, expected {dim * dim}")
    return SpectralSummary(
        kind=kind,
        dim=dim,
        distinct=tuple(distinct),
        l0_or_m0=l0,
        lP_or_mP=lp,
        bulk_multiplicity=dim * dim - lp,
        cluster_tol=ctol,
        peripheral_tol=peripheral_tol,
    )


def summarize_channel(channel, cluster_tol: float | None = None,
                      peripheral_tol: float = DEFAULT_PERIPHERAL_TOL) -> SpectralSummary:
    """Spectral summary of a channel: distinct eigenvalues, l0 and lP."""
    w = linalg.eigvals(channel.superop)
    return _summarize("channel", channel.dim, w, cluster_tol, peripheral_tol)


def summarize_generator(gen, cluster_tol: float | None = None,
                        peripheral_tol: float = DEFAULT_PERIPHERAL_TOL) -> SpectralSummary:
    """Spectral summary of a generator: distinct eigenvalues, m0, mP and rates."""
    w = linalg.eigvals(gen.superop)
    return _summarize("generator", gen.dim, w, cluster_tol, peripheral_tol)


def summary_to_json(summary: SpectralSummary) -> dict:
    return {
        "kind": summary.kind,
        "dim": summary.dim,
        "distinct": [
            {
                "value": [item.value.real, item.value.imag],
                "multiplicity": item.multiplicity,
                "peripheral": item.peripheral,
                "real_part": item.real_part,
                **({"rate": item.rate} if item.rate is not None else {}),
            }
            for item in summary.distinct
        ],
        "l0_or_m0": summary.l0_or_m0,
        "lP_or_mP": summary.lP_or_mP,
        "bulk_multiplicity": summary.bulk_multiplicity,
        "tolerances": {
            "cluster": summary.cluster_tol,
            "peripheral": summary.peripheral_tol,
        },
    }
