"""Finite abelian phase space and generalized Pauli (Weyl) operators.

A group with cyclic orders (d_1, ..., d_s) acts on a Hilbert space of
dimension d = prod d_j. Phase-space points z = (alpha, beta) label unitaries
W_z = U_alpha V_beta built from shift and clock matrices, Kronecker-multiplied
left to right in the declared factor order. Probability distributions on the
dual phase space and their characteristic functions are finite Fourier duals.

Sign convention: the pairing is <beta, alpha> = 2 pi sum_j beta_j alpha_j / d_j,
U shifts |k> -> |k + alpha>, V multiplies by omega^(beta k). With these choices
W_z W_z' = exp(i <beta, alpha'>) W_{z+z'} and conjugating a target W_z by
W_w ... W_w^dag multiplies it by exp(i(<beta_w, alpha> - <beta, alpha_w>))
inverted; see :func:`conjugation_phase` for the exact identity used in tests.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import NamedTuple

import numpy as np

PROB_SUM_TOL = 1e-12
CHAR_ORIGIN_TOL = 1e-12
CHAR_MODULUS_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-10
NEGATIVITY_TOL = 1e-10


class NotPositiveDefiniteError(ValueError):
    """Inverse Fourier transform produced a genuinely negative coefficient."""

    def __init__(self, point, value):
        self.point = point
        self.value = value
        super().__init__(
            f"not positive definite: coefficient at {point} is {value:.6e}")


class InconsistentCharacteristicError(ValueError):
    """Inverse Fourier transform left an imaginary residue above tolerance."""


class PhaseSpacePoint(NamedTuple):
    alpha: tuple[int, ...]
    beta: tuple[int, ...]


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Direct sum of cyclic groups Z_{d_1} + ... + Z_{d_s} and its doubled phase space."""

    orders: tuple[int, ...]

    def __post_init__(self):
        if len(self.orders) == 0:
            raise ValueError("orders must be nonempty")
        for d in self.orders:
            if d < 2:
                raise ValueError(f"every cyclic order must be >= 2, got {d}")
        object.__setattr__(self, "orders", tuple(int(d) for d in self.orders))

    @property
    def total_dim(self) -> int:
        return math.prod(self.orders)

    @property
    def n_points(self) -> int:
        """Number of phase-space points |G| = d^2."""
        return self.total_dim ** 2

    def reduce(self, t) -> tuple[int, ...]:
        """Reduce a component tuple mod the cyclic orders."""
        t = tuple(int(x) for x in t)
        if len(t) != len(self.orders):
            raise ValueError(
                f"tuple arity {len(t)} does not match {len(self.orders)} factors")
        return tuple(x % d for x, d in zip(t, self.orders))

    def point(self, alpha, beta) -> PhaseSpacePoint:
        return PhaseSpacePoint(self.reduce(alpha), self.reduce(beta))

    @property
    def zero(self) -> PhaseSpacePoint:
        z = (0,) * len(self.orders)
        return PhaseSpacePoint(z, z)

    def add(self, z: PhaseSpacePoint, w: PhaseSpacePoint) -> PhaseSpacePoint:
        return self.point(
            tuple(a + b for a, b in zip(z.alpha, w.alpha)),
            tuple(a + b for a, b in zip(z.beta, w.beta)))

    def neg(self, z: PhaseSpacePoint) -> PhaseSpacePoint:
        return self.point(tuple(-a for a in z.alpha), tuple(-b for b in z.beta))

    def points(self) -> list[PhaseSpacePoint]:
        """All d^2 points, lexicographic in (alpha, beta), factors left to right."""
        ranges = [range(d) for d in self.orders]
        return [PhaseSpacePoint(a, b)
                for a in itertools.product(*ranges)
                for b in itertools.product(*ranges)]

    def point_index(self, z: PhaseSpacePoint) -> int:
        """Index of a point in the lexicographic enumeration."""
        ia = ib = 0
        for x, y, d in zip(z.alpha, z.beta, self.orders):
            ia = ia * d + (x % d)
            ib = ib * d + (y % d)
        return ia * self.total_dim + ib


def make_group(orders) -> FiniteAbelianGroup:
    """Build a group from a list of cyclic orders, each >= 2."""
    return FiniteAbelianGroup(tuple(orders))


def duality_pairing(group: FiniteAbelianGroup, beta, alpha) -> float:
    """Duality form <beta, alpha> = 2 pi sum_j beta_j alpha_j / d_j, reduced mod 2 pi."""
    beta = group.reduce(beta)
    alpha = group.reduce(alpha)
    lcm = math.lcm(*group.orders)
    num = sum(b * a * (lcm // d) for b, a, d in zip(beta, alpha, group.orders)) % lcm
    return 2.0 * math.pi * num / lcm


def composition_phase(group: FiniteAbelianGroup, z: PhaseSpacePoint,
                      zp: PhaseSpacePoint) -> float:
    """Phase theta with W_z W_z' = exp(i theta) W_{z+z'}."""
    return duality_pairing(group, z.beta, zp.alpha)


def conjugation_phase(group: FiniteAbelianGroup, z: PhaseSpacePoint,
                      zp: PhaseSpacePoint) -> float:
    """Phase theta with W_z^dag W_z' W_z = exp(i theta) W_z'.

    theta = <beta', alpha> - <beta, alpha'> mod 2 pi for conjugator z and
    target z'.
    """
    t = duality_pairing(group, zp.beta, z.alpha) - duality_pairing(group, z.beta, zp.alpha)
    return t % (2.0 * math.pi)


def _cyclic_weyl(d: int, alpha: int, beta: int) -> np.ndarray:
    # W = U_alpha V_beta on Z_d: entries W[(k+alpha) mod d, k] = omega^(beta k).
    w = np.zeros((d, d), dtype=complex)
    for k in range(d):
        w[(k + alpha) % d, k] = np.exp(2j * np.pi * ((beta * k) % d) / d)
    return w


def weyl_operator(group: FiniteAbelianGroup, z: PhaseSpacePoint) -> np.ndarray:
    """Unitary W_z = U_alpha V_beta, Kronecker product of cyclic factors."""
    z = group.point(z.alpha, z.beta)
    out = np.array([[1.0 + 0j]])
    for d, a, b in zip(group.orders, z.alpha, z.beta):
        out = np.kron(out, _cyclic_weyl(d, a, b))
    return out


@lru_cache(maxsize=None)
def _weyl_stack_cached(orders: tuple[int, ...]) -> np.ndarray:
    g = FiniteAbelianGroup(orders)
    return np.stack([weyl_operator(g, z) for z in g.points()])


def weyl_operators(group: FiniteAbelianGroup) -> np.ndarray:
    """All W_z stacked as a (d^2, d, d) array in point-enumeration order."""
    return _weyl_stack_cached(group.orders)


@dataclass(frozen=True)
class PhaseSpaceDistribution:
    """Probabilities p_{x,y} on the dual phase space, dense in enumeration order."""

    group: FiniteAbelianGroup
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.shape != (self.group.n_points,):
            raise ValueError(
                f"expected {self.group.n_points} probabilities, got shape {p.shape}")
        if p.min() < 0.0:
            raise ValueError(f"negative probability {p.min():.3e}")
        s = p.sum()
        if abs(s - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {s:.15g}, not 1 within {PROB_SUM_TOL}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)

    def prob(self, x, y) -> float:
        return float(self.probs[self.group.point_index(self.group.point(x, y))])


@dataclass(frozen=True)
class CharacteristicFunction:
    """phi(z) on phase space, dense complex values in enumeration order.

    Only phi(0) = 1 is enforced at construction. Positive definite functions
    additionally satisfy |phi| <= 1, but candidates violating that must remain
    representable so :func:`is_positive_definite` can reject them with a
    witness.
    """

    group: FiniteAbelianGroup
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.group.n_points,):
            raise ValueError(
                f"expected {self.group.n_points} values, got shape {v.shape}")
        origin = v[self.group.point_index(self.group.zero)]
        if abs(origin - 1.0) > CHAR_ORIGIN_TOL:
            raise ValueError(f"phi(0) = {origin:.15g}, not 1 within {CHAR_ORIGIN_TOL}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def value(self, z: PhaseSpacePoint) -> complex:
        return complex(self.values[self.group.point_index(z)])


@lru_cache(maxsize=None)
def _character_kernel_cached(orders: tuple[int, ...]) -> np.ndarray:
    # K[i_z, i_w] = exp(i(<x, alpha> + <beta, y>)) with z = (alpha, beta) and
    # dual point w = (x, y), both in lexicographic enumeration order.
    g = FiniteAbelianGroup(orders)
    pts = g.points()
    n = len(pts)
    k = np.empty((n, n), dtype=complex)
    for iz, z in enumerate(pts):
        for iw, w in enumerate(pts):
            x, y = w.alpha, w.beta
            k[iz, iw] = np.exp(1j * (duality_pairing(g, x, z.alpha)
                                     + duality_pairing(g, z.beta, y)))
    return k


def character_kernel(group: FiniteAbelianGroup) -> np.ndarray:
    return _character_kernel_cached(group.orders)


def characteristic_from_distribution(p: PhaseSpaceDistribution) -> CharacteristicFunction:
    """phi(z) = sum_{x,y} exp(i(<x,alpha> + <beta,y>)) p_{x,y}."""
    return CharacteristicFunction(p.group, character_kernel(p.group) @ p.probs)


def distribution_from_characteristic(phi: CharacteristicFunction) -> PhaseSpaceDistribution:
    """Inverse finite Fourier transform; errors if phi is not positive definite."""
    g = phi.group
    raw = character_kernel(g).conj().T @ phi.values / g.n_points
    imag = np.abs(raw.imag).max()
    if imag > IMAG_RESIDUE_TOL:
        raise InconsistentCharacteristicError(
            f"imaginary residue {imag:.3e} exceeds {IMAG_RESIDUE_TOL}")
    p = raw.real
    if p.min() < -NEGATIVITY_TOL:
        i = int(np.argmin(p))
        raise NotPositiveDefiniteError(g.points()[i], float(p[i]))
    return PhaseSpaceDistribution(g, np.clip(p, 0.0, None))


@lru_cache(maxsize=None)
def _difference_index_table(orders: tuple[int, ...]) -> np.ndarray:
    g = FiniteAbelianGroup(orders)
    pts = g.points()
    return np.array([[g.point_index(g.add(zj, g.neg(zk))) for zk in pts]
                     for zj in pts])


def is_positive_definite(phi: CharacteristicFunction, tol: float = NEGATIVITY_TOL):
    """Bochner test on a finite abelian group, with a full Gram cross-check.

    Returns ``(verdict, witness)``; the witness is ``None`` when positive
    definite, otherwise a dict describing the negative Fourier coefficient or
    the violating Gram eigenvector.
    """
    g = phi.group
    coeffs = (character_kernel(g).conj().T @ phi.values / g.n_points).real
    pts = g.points()
    # Gram matrix [phi(z_j - z_k)] over the whole group.
    gram = phi.values[_difference_index_table(g.orders)]
    herm_defect = np.linalg.norm(gram - gram.conj().T)
    eigvals, eigvecs = np.linalg.eigh(0.5 * (gram + gram.conj().T))
    coeff_ok = coeffs.min() >= -tol
    gram_ok = eigvals[0] >= -tol and herm_defect <= tol * g.n_points
    if coeff_ok and gram_ok:
        return True, None
    if not coeff_ok:
        i = int(np.argmin(coeffs))
        witness = {"kind": "negative_coefficient", "point": pts[i],
                   "value": float(coeffs[i])}
    elif eigvals[0] < -tol:
        witness = {"kind": "gram_eigenvector", "eigenvalue": float(eigvals[0]),
                   "vector": eigvecs[:, 0]}
    else:
        witness = {"kind": "gram_not_hermitian", "defect": float(herm_defect)}
    return False, witness
