"""Entropy exchange, Holevo quantity, one-shot and entanglement-assisted capacities.

The one-shot capacity of a covariant bistochastic channel equals
log d - min_S H(Phi[S]); the minimum is searched over pure states (sufficient
by concavity of entropy) with multi-start projected gradient descent on the
unit sphere. Achievability is certified by evaluating the Holevo quantity of
the uniform Weyl-orbit ensemble at the found minimizer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spectral import (_ln_base, check_density_matrix, entropy_of_spectrum,
                       random_pure_state, random_unitary, von_neumann_entropy)
from .weyl import FiniteAbelianGroup, weyl_operators
from .channel import QuantumChannel

# Eigenvalue floor used inside entropy gradients only; keeps descent stable
# where minimizers have rank-deficient outputs.
GRAD_EIG_FLOOR = 1e-14

DEFAULT_RESTARTS = 50
DEFAULT_GRAD_TOL = 1e-8
MAX_ITERATIONS = 500
CERTIFICATE_GAP = 1e-6


@dataclass(frozen=True)
class Ensemble:
    """Probabilities pi_j with states S_j of a common dimension."""

    probs: np.ndarray
    states: tuple[np.ndarray, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 1 or p.size == 0 or p.size != len(self.states):
            raise ValueError("probs and states must be nonempty lists of equal length")
        if p.min() < 0.0 or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("probabilities must be nonnegative and sum to 1")
        states = tuple(check_density_matrix(s) for s in self.states)
        dims = {s.shape[0] for s in states}
        if len(dims) != 1:
            raise ValueError(f"states have mixed dimensions {dims}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    def average_state(self) -> np.ndarray:
        return sum(pi * s for pi, s in zip(self.probs, self.states))


@dataclass(frozen=True)
class OptimizationResult:
    value: float
    argument: np.ndarray
    restarts_used: int
    converged: bool
    gradient_norm: float


@dataclass(frozen=True)
class InequalityReport:
    left_value: float
    right_value: float
    holds: bool
    tolerance: float
    context: str
    inconclusive: bool = False

    @property
    def slack(self) -> float:
        return self.right_value - self.left_value


@dataclass(frozen=True)
class CapacityCertificate:
    value: float
    hmin: float
    chi: float
    gap: float
    certified: bool
    minimizer: np.ndarray = field(repr=False)
    optimization: OptimizationResult = field(repr=False)


def entropy_exchange(channel: QuantumChannel, s, base=2) -> float:
    """H(S, Phi): entropy of the environment matrix [Tr(L_j S L_k^dag)]."""
    rho = check_density_matrix(s)
    env = np.einsum("jab,bc,kac->jk", channel.kraus, rho, channel.kraus.conj())
    return entropy_of_spectrum(np.linalg.eigvalsh(env), base=base)


def holevo_quantity(channel: QuantumChannel, ensemble: Ensemble, base=2) -> float:
    """chi = H(sum pi_j Phi[S_j]) - sum pi_j H(Phi[S_j])."""
    outs = [channel.apply(s) for s in ensemble.states]
    avg = sum(pi * o for pi, o in zip(ensemble.probs, outs))
    chi = entropy_of_spectrum(np.linalg.eigvalsh(avg), base=base)
    chi -= sum(pi * entropy_of_spectrum(np.linalg.eigvalsh(o), base=base)
               for pi, o in zip(ensemble.probs, outs))
    return chi


def _entropy_and_gradient_matrix(rho_out: np.ndarray, base) -> tuple[float, np.ndarray]:
    # Returns H(rho) and the derivative matrix dH/drho = -(ln rho + I)/ln b,
    # with eigenvalues floored at GRAD_EIG_FLOOR inside the logarithm only.
    vals, vecs = np.linalg.eigh(0.5 * (rho_out + rho_out.conj().T))
    h = entropy_of_spectrum(vals, base=base)
    lnb = _ln_base(base)
    g = -(np.log(np.clip(vals, GRAD_EIG_FLOOR, None)) + 1.0) / lnb
    return h, (vecs * g) @ vecs.conj().T


def output_entropy(channel: QuantumChannel, psi: np.ndarray, base=2) -> float:
    rho = channel.apply(np.outer(psi, psi.conj()))
    return entropy_of_spectrum(np.linalg.eigvalsh(rho), base=base)


def output_entropy_gradient(channel: QuantumChannel, psi: np.ndarray, base=2
                            ) -> tuple[float, np.ndarray]:
    """Objective H(Phi[psi psi^dag]) and its Riemannian gradient on the sphere.

    The gradient uses the real inner product Re<u, v>; the component along psi
    (including the unphysical global phase) is projected out.
    """
    rho = channel.apply(np.outer(psi, psi.conj()))
    h, g_out = _entropy_and_gradient_matrix(rho, base)
    g = 2.0 * (channel.adjoint_apply(g_out) @ psi)
    g_r = g - np.vdot(psi, g) * psi
    return h, g_r


def _minimize_on_sphere(channel, rng, tol, base):
    psi = random_pure_state(channel.in_dim, rng)
    f, g = output_entropy_gradient(channel, psi, base)
    step = 1.0
    gn = float(np.linalg.norm(g))
    for _ in range(MAX_ITERATIONS):
        if gn <= tol:
            return f, psi, True, gn
        moved = False
        while step > 1e-14:
            cand = psi - step * g
            cand = cand / np.linalg.norm(cand)
            fc = output_entropy(channel, cand, base)
            if fc <= f - 1e-4 * step * gn * gn:
                psi = cand
                f, g = output_entropy_gradient(channel, psi, base)
                gn = float(np.linalg.norm(g))
                step = min(step * 2.0, 1e6)
                moved = True
                break
            step *= 0.5
        if not moved:
            break
    return f, psi, gn <= tol, gn


def min_output_entropy(channel: QuantumChannel, restarts: int = DEFAULT_RESTARTS,
                       seed=0, tol: float = DEFAULT_GRAD_TOL, base=2
                       ) -> OptimizationResult:
    """Multi-start projected gradient descent over pure states.

    The returned value is an upper bound on the true minimum by construction.
    Ties across restarts break to the lowest restart index, so parallel and
    sequential execution agree.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        f, psi, conv, gn = _minimize_on_sphere(channel, rng, tol, base)
        if best is None or f < best[0] - 1e-12:
            best = (f, psi, conv, gn)
    f, psi, conv, gn = best
    return OptimizationResult(f, psi, restarts, conv, gn)


def orbit_ensemble(group: FiniteAbelianGroup, s0) -> Ensemble:
    """Uniform ensemble {d^-2, W_z S0 W_z^dag} over all phase-space points."""
    rho = check_density_matrix(s0)
    if rho.shape[0] != group.total_dim:
        raise ValueError("state dimension does not match the group")
    w = weyl_operators(group)
    states = tuple(w[i] @ rho @ w[i].conj().T for i in range(group.n_points))
    return Ensemble(np.full(group.n_points, 1.0 / group.n_points), states)


def one_shot_capacity_covariant(channel: QuantumChannel, group: FiniteAbelianGroup,
                                restarts: int = DEFAULT_RESTARTS, seed=0,
                                tol: float = DEFAULT_GRAD_TOL, base=2
                                ) -> CapacityCertificate:
    """Candidate capacity log d - Hmin with a Weyl-orbit achievability certificate.

    ``certified`` is set only when the Holevo quantity of the orbit ensemble at
    the found minimizer matches the candidate within 1e-6; otherwise both
    numbers are reported and the value must not be quoted as a capacity.
    """
    d = channel.in_dim
    if d != group.total_dim:
        raise ValueError("channel dimension does not match the group")
    opt = min_output_entropy(channel, restarts=restarts, seed=seed, tol=tol, base=base)
    candidate = math.log(d) / _ln_base(base) - opt.value
    minimizer = np.outer(opt.argument, opt.argument.conj())
    chi = holevo_quantity(channel, orbit_ensemble(group, minimizer), base=base)
    gap = abs(chi - candidate)
    return CapacityCertificate(candidate, opt.value, chi, gap,
                               gap <= CERTIFICATE_GAP, minimizer, opt)


def mutual_information(channel: QuantumChannel, s, base=2) -> float:
    """I(S, Phi) = H(S) + H(Phi[S]) - H(S, Phi)."""
    rho = check_density_matrix(s)
    out = channel.apply(rho)
    return (von_neumann_entropy(rho, base=base)
            + entropy_of_spectrum(np.linalg.eigvalsh(out), base=base)
            - entropy_exchange(channel, rho, base=base))


def _mutual_info_and_gradient(channel, a, base):
    # S = A A^dag / Tr(A A^dag); Euclidean gradient with respect to A.
    t = float(np.einsum("ij,ij->", a, a.conj()).real)
    s = a @ a.conj().T / t
    comp = channel.complementary()
    h_in, g_in = _entropy_and_gradient_matrix(s, base)
    h_out, g_out = _entropy_and_gradient_matrix(channel.apply(s), base)
    h_env, g_env = _entropy_and_gradient_matrix(comp.apply(s), base)
    f = h_in + h_out - h_env
    g_s = g_in + channel.adjoint_apply(g_out) - comp.adjoint_apply(g_env)
    scal = float(np.trace(g_s @ s).real)
    grad_a = 2.0 * (g_s - scal * np.eye(s.shape[0])) @ a / t
    return f, grad_a


def ea_capacity(channel: QuantumChannel, restarts: int = DEFAULT_RESTARTS, seed=0,
                tol: float = DEFAULT_GRAD_TOL, base=2,
                assume_covariant: bool = False) -> OptimizationResult:
    """Entanglement-assisted capacity max_S [H(S) + H(Phi[S]) - H(S, Phi)].

    With ``assume_covariant`` the maximum is evaluated at I/d, valid for
    irreducibly covariant channels; otherwise multi-start gradient ascent over
    S = A A^dag / Tr(A A^dag) returns a lower bound on the maximum.
    """
    d = channel.in_dim
    if assume_covariant:
        s = np.eye(d) / d
        return OptimizationResult(mutual_information(channel, s, base=base),
                                  s, 0, True, 0.0)
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    best = None
    for r in range(restarts):
        rng = np.random.default_rng([seed, r])
        a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        f, g = _mutual_info_and_gradient(channel, a, base)
        gn = float(np.linalg.norm(g))
        step = 1.0
        conv = False
        for _ in range(MAX_ITERATIONS):
            if gn <= tol:
                conv = True
                break
            moved = False
            while step > 1e-14:
                cand = a + step * g
                fc, gc = _mutual_info_and_gradient(channel, cand, base)
                if fc >= f + 1e-4 * step * gn * gn:
                    a, f, g = cand, fc, gc
                    gn = float(np.linalg.norm(g))
                    step = min(step * 2.0, 1e6)
                    moved = True
                    break
                step *= 0.5
            if not moved:
                break
        if best is None or f > best[0] + 1e-12:
            best = (f, a, gn <= tol, gn)
    f, a, conv, gn = best
    s = a @ a.conj().T
    s = s / np.trace(s).real
    return OptimizationResult(f, s, restarts, conv, gn)


def pure_decompositions(s, count: int, seed=0) -> list[Ensemble]:
    """Random pure-state ensembles averaging to S, via unitary remixes.

    The eigendecomposition S = sum lam_i |e_i><e_i| (rank r) is remixed by a
    random r x r unitary U: psi_j = sum_i U_{ji} sqrt(lam_i) e_i, p_j = |psi_j|^2.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    rho = check_density_matrix(s)
    vals, vecs = np.linalg.eigh(rho)
    keep = vals > 1e-10
    lam = vals[keep]
    basis = vecs[:, keep]
    r = lam.size
    out = []
    for j in range(count):
        u = random_unitary(r, np.random.default_rng([seed, j]))
        # Column k is psi_k = sum_i U_{ki} sqrt(lam_i) e_i; orthonormal columns of
        # U guarantee sum_k psi_k psi_k^dag = S.
        vectors = basis @ (u * np.sqrt(lam)[None, :]).T
        probs = np.einsum("ij,ij->j", vectors, vectors.conj()).real
        states = tuple(np.outer(vectors[:, k], vectors[:, k].conj()) / probs[k]
                       for k in range(r))
        out.append(Ensemble(probs, states))
    return out


def check_eex(channel: QuantumChannel, s, decompositions, base=2,
              tol: float = 1e-9) -> list[InequalityReport]:
    """Entropy-exchange inequality H(S, Phi) >= sum p_j H(Phi[S_j]) per decomposition."""
    rho = check_density_matrix(s)
    right = entropy_exchange(channel, rho, base=base)
    reports = []
    for i, ens in enumerate(decompositions):
        if np.linalg.norm(ens.average_state() - rho) > 1e-8:
            raise ValueError(f"decomposition {i} does not average to S within 1e-8")
        left = sum(p * entropy_of_spectrum(np.linalg.eigvalsh(channel.apply(st)), base=base)
                   for p, st in zip(ens.probs, ens.states))
        reports.append(InequalityReport(float(left), right, right - left >= -tol,
                                        tol, f"decomposition {i} ({len(ens.states)} states)"))
    return reports


def check_ea_bound(channel: QuantumChannel, group: FiniteAbelianGroup, base=2,
                   restarts: int = DEFAULT_RESTARTS, seed=0,
                   assume_covariant: bool = True) -> InequalityReport:
    """C_ea(Phi) <= log d + C1(Phi) for channels covariant under the Weyl group."""
    d = channel.in_dim
    ea = ea_capacity(channel, restarts=restarts, seed=seed, base=base,
                     assume_covariant=assume_covariant)
    cert = one_shot_capacity_covariant(channel, group, restarts=restarts,
                                       seed=seed, base=base)
    right = math.log(d) / _ln_base(base) + cert.value
    return InequalityReport(ea.value, right, right - ea.value >= -1e-6, 1e-6,
                            f"C_ea <= log d + C1, d={d}, certified={cert.certified}",
                            inconclusive=not cert.certified)


@dataclass(frozen=True)
class MultiplicativityReport:
    hmin_single: float
    hmin_double: float
    entangled_point: float
    gap: float
    product_bound_holds: bool


def multiplicativity_probe(channel: QuantumChannel, restarts: int = 10, seed=0,
                           base=2) -> MultiplicativityReport:
    """Desk-scale probe of output-entropy additivity for Phi tensor Phi.

    Reports Hmin(Phi), an optimizer upper bound on Hmin(Phi x Phi), the entropy
    of (Phi x Phi) applied to the normalized maximally entangled state, and the
    gap 2 Hmin(Phi) - Hmin(Phi x Phi). Only the one-sided product-input bound
    is asserted; no conclusion about strict violation is drawn.
    """
    d = channel.in_dim
    if d > 4:
        raise ValueError("probe supports d <= 4 only")
    single = min_output_entropy(channel, restarts=restarts, seed=seed, base=base)
    double_ch = channel.tensor(channel)
    double = min_output_entropy(double_ch, restarts=restarts, seed=seed, base=base)
    omega = np.eye(d).reshape(-1) / np.sqrt(d)
    entangled = output_entropy(double_ch, omega, base=base)
    gap = 2.0 * single.value - double.value
    return MultiplicativityReport(single.value, double.value, float(entangled),
                                  gap, double.value <= 2.0 * single.value + 1e-6)
