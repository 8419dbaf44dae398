"""Bound-saturating constructions and seeded random ensembles.

The deterministic constructors realize, in the computational basis, the
examples that make every structural bound tight:

* a two-level Hamiltonian H = h1 |e1><e1| + h2 (I - |e1><e1|) whose
  generator has m0 = d^2 - 2d + 2 and mP = d^2, and whose exponential is a
  unitary channel with l0 = d^2 - 2d + 2 as long as h1 - h2 is not a
  multiple of 2*pi;
* dissipative generators with diagonal noise operators
  A_k = lam1 P1 + lam2 P2 (lam1 != lam2), unital by construction, reaching
  m0 = mP = d^2 - 2d + 2;
* the phase-damping channel fixing diagonal blocks and shrinking the
  off-diagonal blocks by e^{-1}, reaching l0 = lP = d^2 - 2d + 2.

Sampling uses numpy's PCG64 streams: every subject draws from its own
``default_rng(seed)``, so campaigns are reproducible across platforms and
trivially parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Union

import numpy as np

from . import gkls, linalg
from .gkls import GklsGenerator, build_generator
from .superop import QuantumChannel, from_kraus, from_superop

ENSEMBLES = (
    "haar-unitary",
    "cptp-stinespring",
    "gkls-generic",
    "gkls-unital",
    "gkls-hamiltonian",
)

Subject = Union[QuantumChannel, GklsGenerator]


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    dim: int
    ensemble: str
    count: int = 1
    env_dim: int | None = None  # Stinespring dilation size, default d^2

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("dimension must be at least 2")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if self.ensemble not in ENSEMBLES:
            raise ValueError(f"unknown ensemble {self.ensemble!r}; pick from {ENSEMBLES}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must fit in 64 unsigned bits")


# ---------------------------------------------------------------------------
# deterministic saturating examples
# ---------------------------------------------------------------------------

def two_level_hamiltonian(d: int, h1: float, h2: float) -> np.ndarray:
    h = np.full(d, h2, dtype=np.complex128)
    h[0] = h1
    return np.diag(h)


def saturating_hamiltonian_generator(d: int, h1: float = 0.0, h2: float = 1.0) -> GklsGenerator:
    """Purely Hamiltonian generator with m0 = d^2 - 2d + 2 and mP = d^2."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if h1 == h2:
        raise ValueError("h1 = h2 gives a scalar Hamiltonian, i.e. the zero generator")
    return build_generator(two_level_hamiltonian(d, h1, h2), ())


def saturating_unitary_channel(d: int, h1: float = 0.0, h2: float = 1.0) -> QuantumChannel:
    """Non-trivial unitary channel e^{L_H} with l0 = d^2 - 2d + 2, lP = d^2."""
    if math.isclose((h1 - h2) % (2 * math.pi), 0.0, abs_tol=1e-12) or \
            math.isclose((h1 - h2) % (2 * math.pi), 2 * math.pi, abs_tol=1e-12):
        raise ValueError("h1 - h2 must not be a multiple of 2*pi (trivial channel)")
    return gkls.exponentiate(saturating_hamiltonian_generator(d, h1, h2), 1.0)


def saturating_dissipative_generator(
    d: int, eigenpairs=((1.0, 0.0),)
) -> GklsGenerator:
    """Unital dissipative generator with m0 = mP = d^2 - 2d + 2.

    Each (lam1, lam2) pair contributes the diagonal noise operator
    lam1 P1 + lam2 P2 with P1 = |e1><e1|; the eigenvalues must differ.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    pairs = tuple(eigenpairs)
    if not pairs:
        raise ValueError("at least one eigenvalue pair is required")
    ops = []
    for lam1, lam2 in pairs:
        if lam1 == lam2:
            raise ValueError(f"degenerate eigenvalue pair ({lam1}, {lam2})")
        diag = np.full(d, complex(lam2), dtype=np.complex128)
        diag[0] = complex(lam1)
        ops.append(np.diag(diag))
    return build_generator(np.zeros((d, d)), ops)


def dephasing_generator(d: int) -> GklsGenerator:
    """The projector pair {P1, P2} as noise operators; L flips the sign of
    the off-diagonal blocks and kills everything else."""
    p1 = np.zeros((d, d), dtype=np.complex128)
    p1[0, 0] = 1.0
    p2 = np.eye(d, dtype=np.complex128) - p1
    return build_generator(np.zeros((d, d)), (p1, p2))


def phase_damping_channel(d: int) -> QuantumChannel:
    """e^L for the dephasing generator: off-diagonal blocks scaled by e^{-1}.

    Built in exact block form (the superoperator is diagonal on matrix
    units); agreement with the matrix exponential is part of the test suite.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    factors = np.ones((d, d))
    factors[0, 1:] = math.exp(-1.0)
    factors[1:, 0] = math.exp(-1.0)
    # Column stacking: superoperator entry for matrix unit E_ij sits at
    # diagonal position j*d + i.
    m = np.diag(factors.flatten(order="F")).astype(np.complex128)
    return from_superop(m)


# ---------------------------------------------------------------------------
# random ensembles
# ---------------------------------------------------------------------------

def ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols))
            + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix."""
    q, r = np.linalg.qr(ginibre(d, d, rng))
    phases = np.diagonal(r).copy()
    phases /= np.abs(phases)
    return q * phases


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = ginibre(d, d, rng)
    return (g + linalg.dagger(g)) / 2.0


def unitary_channel(u: np.ndarray) -> QuantumChannel:
    return from_kraus([u])


def stinespring_channel(d: int, rng: np.random.Generator,
                        env_dim: int | None = None) -> QuantumChannel:
    """Generic CPTP map: Haar isometry into system x environment, traced out.

    The Kraus operators are the environment slices of a QR-orthonormalized
    Ginibre matrix of shape (d * env_dim, d).
    """
    env = env_dim if env_dim is not None else d * d
    q, _ = np.linalg.qr(ginibre(d * env, d, rng))
    blocks = q.reshape(d, env, d)
    return from_kraus([blocks[:, k, :] for k in range(env)])


def subspace_supported_channel(d: int, support_dim: int,
                               rng: np.random.Generator) -> QuantumChannel:
    """A non-faithful channel whose image lives in the leading block.

    The Stinespring isometry targets only the first ``support_dim``
    coordinates, so every steady state is supported there.
    """
    if not 1 <= support_dim < d:
        raise ValueError("support_dim must satisfy 1 <= support_dim < d")
    env = d * support_dim
    q, _ = np.linalg.qr(ginibre(support_dim * env, d, rng))
    blocks = q.reshape(support_dim, env, d)
    kraus = []
    for k in range(env):
        b = np.zeros((d, d), dtype=np.complex128)
        b[:support_dim, :] = blocks[:, k, :]
        kraus.append(b)
    return from_kraus(kraus)


def _normalized_generator(h: np.ndarray, ops: list[np.ndarray]) -> GklsGenerator:
    # Rescale so the superoperator has spectral radius ~1, keeping tolerances
    # scale-appropriate; H scales linearly, noise operators by sqrt.
    gen = build_generator(h, ops)
    radius = float(np.max(np.abs(linalg.eigvals(gen.superop))))
    if radius < 1e-12:
        return gen
    return build_generator(h / radius, [a / np.sqrt(radius) for a in ops])


def generic_gkls(d: int, rng: np.random.Generator, n_ops: int | None = None) -> GklsGenerator:
    """GUE Hamiltonian plus Ginibre noise operators, spectral radius ~1."""
    n = n_ops if n_ops is not None else d
    h = random_hermitian(d, rng)
    ops = [ginibre(d, d, rng) for _ in range(n)]
    return _normalized_generator(h, ops)


def unital_gkls(d: int, rng: np.random.Generator, n_ops: int | None = None) -> GklsGenerator:
    """Unital ensemble: Hermitian noise operators make the dissipator
    annihilate the identity, the regime where the CKKS bound is proved."""
    n = n_ops if n_ops is not None else d
    h = random_hermitian(d, rng)
    ops = [random_hermitian(d, rng) for _ in range(n)]
    return _normalized_generator(h, ops)


def hamiltonian_gkls(d: int, rng: np.random.Generator) -> GklsGenerator:
    return _normalized_generator(random_hermitian(d, rng), [])


def sample(config: SamplerConfig) -> Iterator[Subject]:
    """Deterministic stream of channels or generators.

    Each item is drawn from ``default_rng((seed, index))``, so any single
    subject can be regenerated from its (seed, index) pair without replaying
    the stream.
    """
    for index in range(config.count):
        yield sample_one(config, index)


def sample_one(config: SamplerConfig, index: int) -> Subject:
    rng = np.random.default_rng((config.seed, index))
    d = config.dim
    if config.ensemble == "haar-unitary":
        return unitary_channel(haar_unitary(d, rng))
    if config.ensemble == "cptp-stinespring":
        return stinespring_channel(d, rng, config.env_dim)
    if config.ensemble == "gkls-generic":
        return generic_gkls(d, rng)
    if config.ensemble == "gkls-unital":
        return unital_gkls(d, rng)
    if config.ensemble == "gkls-hamiltonian":
        return hamiltonian_gkls(d, rng)
    raise ValueError(f"unknown ensemble {config.ensemble!r}")
