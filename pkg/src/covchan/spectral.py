"""Hermitian spectral tools: eigensystems, von Neumann entropy, seeded sampling.

All matrices are plain complex ``numpy.ndarray`` values. Density matrices are
d x d arrays validated by :func:`check_density_matrix`; pure states are unit
vectors of length d.
"""

from __future__ import annotations

import numpy as np

# Validation tolerances
HERMITIAN_TOL = 1e-10
DENSITY_HERMITIAN_TOL = 1e-12
DENSITY_EIG_FLOOR = -1e-10
DENSITY_TRACE_TOL = 1e-10
PURE_NORM_TOL = 1e-12

# Eigenvalues in [-1e-10, 0) are treated as round-off and clamped to zero
# before taking logarithms; anything more negative is a hard error.
ENTROPY_CLAMP = 1e-10


def as_matrix(m) -> np.ndarray:
    """Coerce to a complex 2-D array, rejecting non-finite entries."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got array of ndim {a.ndim}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    return a


def _ln_base(base) -> float:
    """Natural log of the entropy base; accepts 2, e, or the string 'e'."""
    if base == 2:
        return np.log(2.0)
    if base == "e" or (isinstance(base, float) and abs(base - np.e) < 1e-12):
        return 1.0
    raise ValueError(f"unsupported entropy base {base!r}; use 2 or 'e'")


def check_density_matrix(rho) -> np.ndarray:
    """Validate a density matrix, returning it as a complex array.

    Raises ``ValueError`` naming the violated bound: hermiticity within
    1e-12, eigenvalues >= -1e-10, trace 1 within 1e-10.
    """
    a = as_matrix(rho)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {a.shape}")
    herm = np.linalg.norm(a - a.conj().T)
    if herm > DENSITY_HERMITIAN_TOL:
        raise ValueError(
            f"not Hermitian: ||S - S^dag||_F = {herm:.3e} > {DENSITY_HERMITIAN_TOL}")
    tr = np.trace(a)
    if abs(tr - 1.0) > DENSITY_TRACE_TOL:
        raise ValueError(f"trace {tr:.12g} differs from 1 by more than {DENSITY_TRACE_TOL}")
    lo = np.linalg.eigvalsh(0.5 * (a + a.conj().T)).min()
    if lo < DENSITY_EIG_FLOOR:
        raise ValueError(
            f"negative eigenvalue {lo:.3e} below the floor {DENSITY_EIG_FLOOR}")
    return a


def check_pure_state(psi) -> np.ndarray:
    """Validate a pure-state vector (unit norm within 1e-12)."""
    v = np.asarray(psi, dtype=complex).reshape(-1)
    nrm2 = float(np.vdot(v, v).real)
    if abs(nrm2 - 1.0) > PURE_NORM_TOL:
        raise ValueError(f"squared norm {nrm2:.12g} differs from 1 by more than {PURE_NORM_TOL}")
    return v


def hermitian_eigensystem(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix.

    Raises ``ValueError`` for non-square or non-Hermitian input.
    """
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    herm = np.linalg.norm(a - a.conj().T)
    if herm > HERMITIAN_TOL:
        raise ValueError(
            f"not Hermitian: ||M - M^dag||_F = {herm:.3e} > {HERMITIAN_TOL}")
    vals, vecs = np.linalg.eigh(a)
    return vals, vecs


def entropy_of_spectrum(eigs: np.ndarray, base=2) -> float:
    """Shannon entropy of a spectrum with 0*log(0) = 0 and round-off clamping."""
    lam = np.asarray(eigs, dtype=float)
    if lam.min() < -ENTROPY_CLAMP:
        raise ValueError(
            f"eigenvalue {lam.min():.3e} below the round-off floor {-ENTROPY_CLAMP}")
    lam = np.clip(lam, 0.0, None)
    pos = lam[lam > 0.0]
    return float(-np.sum(pos * np.log(pos)) / _ln_base(base))


def von_neumann_entropy(rho, base=2) -> float:
    """H(S) = -Tr S log S for a valid density matrix."""
    a = check_density_matrix(rho)
    return entropy_of_spectrum(np.linalg.eigvalsh(a), base=base)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_pure_state(d: int, seed) -> np.ndarray:
    """Haar-uniform pure state: normalized vector of standard complex Gaussians."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = _rng(seed)
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_unitary(d: int, seed, real_orthogonal: bool = False) -> np.ndarray:
    """Random unitary (or real orthogonal) from QR of a Gaussian matrix."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = _rng(seed)
    if real_orthogonal:
        a = rng.standard_normal((d, d)).astype(complex)
    else:
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(a)
    # Fix the diagonal phases so the distribution is Haar, not QR-biased.
    ph = np.diagonal(r).copy()
    ph = ph / np.abs(ph)
    return q * ph


def random_density_matrix(d: int, rank: int, seed) -> np.ndarray:
    """Random density matrix S = AA^dag / Tr(AA^dag) with A a d x rank Gaussian."""
    if not 1 <= rank <= d:
        raise ValueError(f"rank must satisfy 1 <= rank <= {d}, got {rank}")
    rng = _rng(seed)
    a = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    s = a @ a.conj().T
    return s / np.trace(s).real
