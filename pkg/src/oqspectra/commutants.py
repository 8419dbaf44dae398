"""Commutants of operator sets and commutant dimension from Jordan data.

The brute-force route stacks the commutation superoperators
I (x) A_k - A_k^T (x) I and takes their joint nullspace.  The structural
route reads the dimension off the Jordan block profile via the Weyr
characteristic: for one eigenvalue with block sizes d_1, d_2, ... the
contribution is sum_i s_i^2 with s_i = #{j : d_j >= i}.

Jordan structure is numerically unstable, so :func:`weyr_profile` only
proceeds when the eigenvalue clusters are certifiably separated; it refuses
rather than guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import linalg, spectra
from .asymptotics import SubspaceBasis
from .linalg import require_square

SEPARATION_FACTOR = 100.0  # required cluster separation, in units of cluster_tol
DEFAULT_RANK_TOL = 1e-10
RANK_GAP_FACTOR = 10.0  # singular values must drop by this across the rank cut


@dataclass(frozen=True)
class JordanProfile:
    """Distinct eigenvalues with their Jordan block sizes."""

    eigenvalues: tuple[tuple[complex, tuple[int, ...]], ...]

    @property
    def dim(self) -> int:
        return sum(sum(sizes) for _, sizes in self.eigenvalues)


@dataclass(frozen=True)
class CommutantResult:
    dimension: int
    basis: SubspaceBasis | None = None


def commutant(ops, tol: float = 0.0, with_basis: bool = True) -> CommutantResult:
    """Dimension (and orthonormal basis) of {B : A B = B A for all A in ops}.

    The nullspace cutoff is anchored at the operator norms, so a set of
    (numerically) scalar operators correctly commutes with everything.
    """
    mats = [require_square(a) for a in ops]
    if not mats:
        raise ValueError("commutant of an empty operator set is everything")
    d = mats[0].shape[0]
    if any(a.shape[0] != d for a in mats):
        raise ValueError("operators must share one dimension")
    stacked = np.vstack([linalg.commutation_superop(a) for a in mats])
    scale = max(float(np.linalg.norm(stacked, 2)),
                max(float(np.linalg.norm(a, 2)) for a in mats))
    ns = linalg.nullspace(stacked, tol=tol, scale=scale)
    dim = int(ns.shape[1])
    if dim < 1:
        raise AssertionError("commutant lost the identity; tolerance too tight")
    basis = SubspaceBasis(ambient_dim=d * d, basis=ns, label="commutant") if with_basis else None
    return CommutantResult(dimension=dim, basis=basis)


def commutant_dim_from_jordan(profile: JordanProfile) -> int:
    """Commutant dimension of a single matrix from its Jordan profile."""
    total = 0
    for _, sizes in profile.eigenvalues:
        if not sizes or any(s < 1 for s in sizes):
            raise ValueError(f"invalid block sizes {sizes}")
        top = max(sizes)
        for i in range(1, top + 1):
            s_i = sum(1 for s in sizes if s >= i)
            total += s_i * s_i
    return total


def weyr_profile(a, cluster_tol: float | None = None,
                 rank_tol: float = DEFAULT_RANK_TOL) -> JordanProfile:
    """Numerical Jordan profile via Weyr rank sequences.

    For each distinct eigenvalue the ranks of (A - lambda I)^i are computed
    with re-orthogonalized image iterates (never explicit high powers), and
    the block sizes are the conjugate partition of the rank differences.
    Raises if the eigenvalue clusters are separated by less than
    ``SEPARATION_FACTOR`` times the clustering tolerance, or if the rank
    sequence is inconsistent with the clustered multiplicities.
    """
    m = require_square(a)
    d = m.shape[0]
    w = linalg.eigvals(m)
    radius = float(np.max(np.abs(w))) if d else 0.0
    ctol = cluster_tol if cluster_tol is not None else spectra.default_cluster_tol(radius)
    clusters = spectra.cluster(w, ctol)

    centers = [c for c, _ in clusters]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            gap = abs(centers[i] - centers[j])
            if gap < SEPARATION_FACTOR * ctol:
                raise ValueError(
                    f"eigenvalue clusters {centers[i]:.6g} and {centers[j]:.6g} "
                    f"separated by {gap:.3e} < {SEPARATION_FACTOR} x cluster_tol; "
                    "Jordan structure not certifiable"
                )

    profile = []
    for center, mult in clusters:
        sizes = _block_sizes(m, center, mult, rank_tol)
        profile.append((complex(center), tuple(sizes)))
    return JordanProfile(eigenvalues=tuple(profile))


def _block_sizes(m: np.ndarray, center: complex, mult: int, rank_tol: float) -> list[int]:
    d = m.shape[0]
    shifted = m - center * np.eye(d)
    # Anchor the cutoff at the scale of A itself: when A is (numerically) a
    # scalar matrix the shifted matrix is pure rounding noise.
    scale = float(max(np.linalg.norm(shifted, 2), np.linalg.norm(m, 2)))
    if scale == 0.0 or np.linalg.norm(shifted, 2) <= rank_tol * scale:
        # A = center * I: every block is trivial.
        return [1] * mult

    # Image iteration: q spans im((A - c I)^i); rank of the next power is the
    # rank of (A - c I) restricted to that image.  Never forms explicit high
    # powers, so rounding noise stays at the eps * ||A - c I|| level.
    ranks = [d]
    q = np.eye(d, dtype=np.complex128)
    while True:
        x = shifted @ q
        u, s, _ = scipy.linalg.svd(x, full_matrices=False)
        r = int(np.sum(s > rank_tol * scale))
        if 0 < r < s.size and s[r - 1] < RANK_GAP_FACTOR * s[r]:
            raise ValueError(
                f"no certified singular-value gap at eigenvalue {center:.6g} "
                f"(sigma_{r} = {s[r - 1]:.3e}, sigma_{r + 1} = {s[r]:.3e})"
            )
        ranks.append(r)
        if r == ranks[-2]:  # stabilized: no more nilpotent directions
            break
        if len(ranks) > d + 1:
            break
        q = u[:, :r]

    weyr = [ranks[i - 1] - ranks[i] for i in range(1, len(ranks))]
    weyr = [x for x in weyr if x > 0]
    if sum(weyr) != mult or any(weyr[i] < weyr[i + 1] for i in range(len(weyr) - 1)):
        raise ValueError(
            f"rank sequence {ranks} inconsistent with multiplicity {mult} at "
            f"eigenvalue {center:.6g}; refusing to guess the Jordan profile"
        )
    sizes: list[int] = []
    weyr.append(0)
    for i in range(len(weyr) - 1):
        sizes.extend([i + 1] * (weyr[i] - weyr[i + 1]))
    sizes.sort(reverse=True)
    return sizes
