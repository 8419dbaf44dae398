"""Shared test oracles, deliberately independent of the package internals.

Everything here recomputes expected values from first principles (direct
operator actions, elementwise definitions, explicit plantings) so the tests
never assert the implementation against itself.
"""

import numpy as np

from oqspectra.commutants import JordanProfile


def dag(a):
    return np.conj(a.T)


def matrix_unit(d, i, j):
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


def assert_multisets_close(got, expected, atol=1e-9):
    """Greedy nearest matching of two complex multisets."""
    got = list(np.asarray(got, dtype=complex))
    expected = list(np.asarray(expected, dtype=complex))
    assert len(got) == len(expected)
    worst = 0.0
    for z in got:
        k = int(np.argmin([abs(z - r) for r in expected]))
        worst = max(worst, abs(z - expected[k]))
        expected.pop(k)
    assert worst <= atol, f"multiset mismatch, worst distance {worst:.3e}"


def kraus_apply(kraus, rho):
    """Direct action sum_k B rho B^dag."""
    out = np.zeros_like(np.asarray(rho, dtype=complex))
    for b in kraus:
        out += b @ rho @ dag(b)
    return out


def gkls_apply(h, noise_ops, x):
    """Direct GKLS action -i[H,X] + sum_k (A X A^dag - {A^dag A, X}/2)."""
    x = np.asarray(x, dtype=complex)
    out = -1j * (h @ x - x @ h)
    for a in noise_ops:
        aa = dag(a) @ a
        out += a @ x @ dag(a) - 0.5 * (aa @ x + x @ aa)
    return out


def superop_from_action(action, d):
    """Brute-force superoperator matrix: columns are vec(action(E_ij))
    under column stacking, j*d + i ordering."""
    m = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for i in range(d):
            col = j * d + i
            m[:, col] = action(matrix_unit(d, i, j)).flatten(order="F")
    return m


def choi_from_action(action, d):
    """Brute-force Choi matrix sum_ij action(E_ij) (x) E_ij."""
    c = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            c += np.kron(action(matrix_unit(d, i, j)), matrix_unit(d, i, j))
    return c


def random_density(d, rng):
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ dag(g)
    return rho / np.trace(rho)


def haar(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
    ph = np.diagonal(r).copy()
    ph /= np.abs(ph)
    return q * ph


def jordan_block(lam, size):
    j = np.eye(size, dtype=complex) * lam
    if size > 1:
        j += np.diag(np.ones(size - 1), 1)
    return j


# Planted eigenvalues sit on a spacing-5 lattice with small jitter, so the
# defective-eigenvalue smear rings (radius up to ~1e-2 at block size 8 and
# condition 1e3) chain into one cluster at JORDAN_CLUSTER_TOL while distinct
# eigenvalues stay certified 100x apart.
JORDAN_CLUSTER_TOL = 4e-2
JORDAN_COMMUTANT_TOL = 1e-8


def random_jordan_profile(d, rng):
    """Random eigenvalue count, multiplicities and block sizes on the lattice."""
    lattice = [complex(a, b) for a in (-10, -5, 0, 5, 10) for b in (-10, -5, 0, 5, 10)]
    k = int(rng.integers(1, d + 1))
    idx = rng.choice(len(lattice), size=k, replace=False)
    centers = [lattice[i] + complex(rng.uniform(-0.05, 0.05),
                                    rng.uniform(-0.05, 0.05)) for i in idx]
    mults = _random_composition(d, k, rng)
    eigenvalues = []
    for lam, m in zip(centers, mults):
        sizes = _random_partition(m, rng)
        eigenvalues.append((lam, tuple(sorted(sizes, reverse=True))))
    return JordanProfile(eigenvalues=tuple(eigenvalues))


def is_scalar_profile(profile):
    return (len(profile.eigenvalues) == 1
            and all(s == 1 for s in profile.eigenvalues[0][1]))


def _random_composition(total, parts, rng):
    cuts = sorted(rng.choice(np.arange(1, total), size=parts - 1, replace=False)) \
        if parts > 1 else []
    bounds = [0] + list(cuts) + [total]
    return [bounds[k + 1] - bounds[k] for k in range(parts)]


def _random_partition(total, rng):
    sizes = []
    left = total
    while left > 0:
        s = int(rng.integers(1, left + 1))
        sizes.append(s)
        left -= s
    return sizes


def plant_jordan(profile, rng, cond_max=1e3):
    """Similarity-conjugated Jordan form with certified condition number.

    The similarity is U diag(s) V^dag with Haar factors and log-uniform
    singular values, so cond(S) <= cond_max by construction.
    """
    blocks = []
    for lam, sizes in profile.eigenvalues:
        for s in sizes:
            blocks.append(jordan_block(lam, s))
    d = sum(b.shape[0] for b in blocks)
    j = np.zeros((d, d), dtype=complex)
    pos = 0
    for b in blocks:
        k = b.shape[0]
        j[pos:pos + k, pos:pos + k] = b
        pos += k
    spread = np.sqrt(cond_max)
    s = np.exp(rng.uniform(-np.log(spread), np.log(spread), size=d))
    s = np.sort(s)[::-1]
    sim = haar(d, rng) @ np.diag(s) @ dag(haar(d, rng))
    return sim @ j @ np.linalg.inv(sim)
