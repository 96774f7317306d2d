"""Quantum channels: Kraus and Choi forms, named constructors, covariance tests.

A channel is stored as a stacked Kraus array of shape (r, d_out, d_in) with
sum_k L_k^dag L_k = I. The Choi matrix uses the output-factor-first convention
with the unnormalized maximally entangled vector, so its partial trace over
the output factor equals the identity exactly when the channel preserves
trace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectral import as_matrix, check_density_matrix, random_unitary
from .weyl import (FiniteAbelianGroup, PhaseSpaceDistribution, PhaseSpacePoint,
                   CharacteristicFunction, weyl_operators)

COMPLETENESS_TOL = 1e-8
CHOI_PSD_TOL = 1e-10
CHOI_TP_TOL = 1e-10
CHOI_CUTOFF = 1e-12
DEGENERACY_GAP = 1e-8


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map given by stacked Kraus operators."""

    kraus: np.ndarray = field(repr=False)

    def __post_init__(self):
        k = np.asarray(self.kraus, dtype=complex)
        if k.ndim != 3 or k.shape[0] == 0:
            raise ValueError("kraus must be a nonempty (r, d_out, d_in) stack")
        comp = np.einsum("kij,kil->jl", k.conj(), k)
        resid = np.linalg.norm(comp - np.eye(k.shape[2]))
        if resid > COMPLETENESS_TOL:
            raise ValueError(
                f"Kraus completeness violated: ||sum L^dag L - I||_F = {resid:.3e} "
                f"> {COMPLETENESS_TOL}")
        k = k.copy()
        k.flags.writeable = False
        object.__setattr__(self, "kraus", k)

    @property
    def n_kraus(self) -> int:
        return self.kraus.shape[0]

    @property
    def in_dim(self) -> int:
        return self.kraus.shape[2]

    @property
    def out_dim(self) -> int:
        return self.kraus.shape[1]

    @property
    def dim(self) -> int:
        """Input dimension; equals the output dimension for square channels."""
        return self.in_dim

    def apply(self, x) -> np.ndarray:
        """Phi[X] = sum_k L_k X L_k^dag for any (not necessarily state) input."""
        a = as_matrix(x)
        if a.shape != (self.in_dim, self.in_dim):
            raise ValueError(f"input shape {a.shape} does not match dim {self.in_dim}")
        return np.einsum("kij,jl,kml->im", self.kraus, a, self.kraus.conj())

    def adjoint_apply(self, y) -> np.ndarray:
        """Dual map Phi^dag[Y] = sum_k L_k^dag Y L_k."""
        a = as_matrix(y)
        if a.shape != (self.out_dim, self.out_dim):
            raise ValueError(f"input shape {a.shape} does not match out dim {self.out_dim}")
        return np.einsum("kij,il,klm->jm", self.kraus.conj(), a, self.kraus)

    def choi(self) -> np.ndarray:
        """Choi matrix (Phi x id)|Omega><Omega|, output factor first, trace d."""
        v = self.kraus.reshape(self.n_kraus, -1)
        return v.T @ v.conj()

    def complementary(self) -> "QuantumChannel":
        """Channel to the environment: (Phi_E[S])_{jk} = Tr(L_j S L_k^dag)."""
        # Kraus K_m of the complementary channel collect row m of every L_j.
        k = np.transpose(self.kraus, (1, 0, 2))
        return QuantumChannel(k)

    def tensor(self, other: "QuantumChannel") -> "QuantumChannel":
        """Tensor product channel with Kraus set {A_j (x) B_k}."""
        ks = [np.kron(a, b) for a in self.kraus for b in other.kraus]
        return QuantumChannel(np.stack(ks))


def channel_from_kraus(kraus) -> QuantumChannel:
    """Validate a list of equally-shaped Kraus operators into a channel."""
    mats = [as_matrix(m) for m in kraus]
    if not mats:
        raise ValueError("need at least one Kraus operator")
    shape = mats[0].shape
    for m in mats:
        if m.shape != shape:
            raise ValueError(f"Kraus shapes differ: {m.shape} vs {shape}")
    return QuantumChannel(np.stack(mats))


def identity_channel(d: int) -> QuantumChannel:
    if d < 1:
        raise ValueError("dimension must be at least 1")
    return QuantumChannel(np.eye(d, dtype=complex)[None, :, :])


def kraus_from_choi(choi, cutoff: float = CHOI_CUTOFF,
                    out_dim: int | None = None) -> QuantumChannel:
    """Recover a canonical Kraus set from a Choi matrix by eigendecomposition."""
    c = as_matrix(choi)
    n = c.shape[0]
    if c.shape[0] != c.shape[1]:
        raise ValueError("Choi matrix must be square")
    if np.linalg.norm(c - c.conj().T) > CHOI_PSD_TOL:
        raise ValueError("Choi matrix is not Hermitian")
    if out_dim is None:
        out_dim = int(round(np.sqrt(n)))
    if n % out_dim:
        raise ValueError(f"output dim {out_dim} does not divide Choi size {n}")
    in_dim = n // out_dim
    vals, vecs = np.linalg.eigh(0.5 * (c + c.conj().T))
    if vals[0] < -CHOI_PSD_TOL:
        raise ValueError(
            f"Choi matrix not PSD: minimum eigenvalue {vals[0]:.3e} < -{CHOI_PSD_TOL}")
    tp = np.einsum("iaib->ab", c.reshape(out_dim, in_dim, out_dim, in_dim))
    tp_resid = np.linalg.norm(tp - np.eye(in_dim))
    if tp_resid > CHOI_TP_TOL:
        raise ValueError(
            f"Choi partial trace over output differs from I by {tp_resid:.3e}")
    ks = [np.sqrt(lam) * vecs[:, i].reshape(out_dim, in_dim)
          for i, lam in enumerate(vals) if lam >= cutoff]
    return QuantumChannel(np.stack(ks))


def j_map(group: FiniteAbelianGroup, x, y) -> PhaseSpacePoint:
    """The symplectic relabeling J(x, y) = (-y, x) on phase space."""
    return group.point(tuple(-c for c in y), x)


def weyl_channel(group: FiniteAbelianGroup, p: PhaseSpaceDistribution) -> QuantumChannel:
    """Mixture of Weyl unitaries with Kraus set {sqrt(p_{x,y}) W_{J(x,y)}}.

    The action sum p_{x,y} W_{J(x,y)} X W_{J(x,y)}^dag sends W_z to phi(z) W_z
    with phi the characteristic function of p; the Fourier sign pairs with the
    conjugation phase of :mod:`covchan.weyl` (see the package docs).
    """
    if p.group != group:
        raise ValueError("distribution group does not match")
    w = weyl_operators(group)
    ks = []
    for i, pt in enumerate(group.points()):
        pr = p.probs[i]
        if pr > 0.0:
            jz = j_map(group, pt.alpha, pt.beta)
            ks.append(np.sqrt(pr) * w[group.point_index(jz)])
    return QuantumChannel(np.stack(ks))


def werner_holevo(d: int) -> QuantumChannel:
    """The channel S -> (I - S^T)/(d-1) with antisymmetric Kraus operators."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    c = 1.0 / np.sqrt(d - 1.0)
    ks = []
    for j in range(d):
        for k in range(j + 1, d):
            m = np.zeros((d, d), dtype=complex)
            m[j, k] = c
            m[k, j] = -c
            ks.append(m)
    ch = QuantumChannel(np.stack(ks))
    # Validate the Kraus list against the defining formula on a matrix-unit basis.
    eye = np.eye(d)
    for a in range(d):
        for b in range(d):
            e = np.outer(eye[a], eye[b]).astype(complex)
            expect = (np.trace(e) * np.eye(d) - e.T) / (d - 1.0)
            if np.linalg.norm(ch.apply(e) - expect) > 1e-12:
                raise AssertionError("Kraus set disagrees with (I - S^T)/(d-1)")
    return ch


def depolarizing(d: int, p: float) -> QuantumChannel:
    """(1-p) S + p I/d, realized as a Weyl channel on the cyclic group Z_d."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    g = FiniteAbelianGroup((d,))
    probs = np.full(g.n_points, p / d ** 2)
    probs[g.point_index(g.zero)] += 1.0 - p
    return weyl_channel(g, PhaseSpaceDistribution(g, probs))


def completely_depolarizing(d: int) -> QuantumChannel:
    return depolarizing(d, 1.0)


def random_channel(d: int, n_kraus: int, seed) -> QuantumChannel:
    """Random channel from a Haar-random Stinespring isometry sliced into Kraus blocks."""
    if n_kraus < 1:
        raise ValueError("need at least one Kraus operator")
    u = random_unitary(d * n_kraus, seed)
    v = u[:, :d]  # isometry columns
    return QuantumChannel(v.reshape(n_kraus, d, d))


def channel_characteristic(channel: QuantumChannel, group: FiniteAbelianGroup):
    """phi(z) = Tr(W_z^dag Phi[W_z])/d plus the worst proportionality residual.

    A large residual means the channel is not Weyl-covariant and phi is only
    the diagonal compression.
    """
    d = group.total_dim
    if channel.in_dim != d or channel.out_dim != d:
        raise ValueError("channel dimension does not match the group")
    w = weyl_operators(group)
    vals = np.empty(group.n_points, dtype=complex)
    residual = 0.0
    for i in range(group.n_points):
        out = channel.apply(w[i])
        vals[i] = np.trace(w[i].conj().T @ out) / d
        residual = max(residual, float(np.linalg.norm(out - vals[i] * w[i])))
    return CharacteristicFunction(group, vals), residual


@dataclass(frozen=True)
class CovarianceReport:
    max_residual: float
    samples_tested: int
    per_element_residuals: tuple[float, ...]
    tolerance: float

    @property
    def verdict(self) -> bool:
        return self.max_residual <= self.tolerance


def is_covariant(channel: QuantumChannel, in_rep, out_rep, tol: float = 1e-10
                 ) -> CovarianceReport:
    """Check Phi[V1 S V1^dag] = V2 Phi[S] V2^dag over a matrix-unit basis.

    ``in_rep`` and ``out_rep`` are equal-length lists of unitaries; pass the
    same list twice for ordinary covariance.
    """
    in_rep = [as_matrix(v) for v in in_rep]
    out_rep = [as_matrix(v) for v in out_rep]
    if len(in_rep) != len(out_rep):
        raise ValueError("representation lists must have equal length")
    d = channel.in_dim
    eye = np.eye(d)
    basis = [np.outer(eye[a], eye[b]).astype(complex) for a in range(d) for b in range(d)]
    images = [channel.apply(e) for e in basis]
    residuals = []
    for v1, v2 in zip(in_rep, out_rep):
        for v, name in ((v1, "input"), (v2, "output")):
            u_res = np.linalg.norm(v.conj().T @ v - np.eye(v.shape[0]))
            if u_res > 1e-10:
                raise ValueError(
                    f"{name} representation element is not unitary "
                    f"(||V^dag V - I||_F = {u_res:.3e})")
        r = 0.0
        for e, img in zip(basis, images):
            lhs = channel.apply(v1 @ e @ v1.conj().T)
            rhs = v2 @ img @ v2.conj().T
            r = max(r, float(np.linalg.norm(lhs - rhs)))
        residuals.append(r)
    return CovarianceReport(max(residuals), len(in_rep), tuple(residuals), tol)


def is_bistochastic(channel: QuantumChannel, tol: float = 1e-10):
    """Whether Phi[I] = I; returns (verdict, residual)."""
    resid = float(np.linalg.norm(channel.apply(np.eye(channel.in_dim))
                                 - np.eye(channel.out_dim)))
    return resid <= tol, resid


def tensor(a: QuantumChannel, b: QuantumChannel) -> QuantumChannel:
    return a.tensor(b)


def dilation_sample(group: FiniteAbelianGroup, p: PhaseSpaceDistribution,
                    x, n: int | None, seed=0, exhaustive: bool = False):
    """Monte Carlo estimate of the Weyl channel action by sampling zeta ~ p.

    Averages W_{J zeta} X W_{J zeta}^dag over ``n`` i.i.d. draws and reports
    the Frobenius distance to the exact channel action. With ``exhaustive``
    the full expectation over the dual group is taken instead.
    """
    a = as_matrix(x)
    w = weyl_operators(group)
    conj = np.stack([w[group.point_index(j_map(group, pt.alpha, pt.beta))]
                     for pt in group.points()])
    exact = np.einsum("k,kij,jl,kml->im", p.probs, conj, a, conj.conj())
    if exhaustive:
        est = exact.copy()
    else:
        if n is None or n < 1:
            raise ValueError("n must be at least 1")
        rng = np.random.default_rng(seed)
        idx = rng.choice(group.n_points, size=n, p=p.probs)
        counts = np.bincount(idx, minlength=group.n_points)
        est = np.einsum("k,kij,jl,kml->im", counts / n, conj, a, conj.conj())
    return est, float(np.linalg.norm(est - exact))


@dataclass(frozen=True)
class TensorOperatorResult:
    matrix: np.ndarray
    residual: float
    unitarity_defect: float
    degenerate: bool


def tensor_operator_matrix(channel: QuantumChannel, v, tol: float = 1e-8,
                           conjugate_rep: bool = False) -> TensorOperatorResult:
    """Matrix D with V L_j V^dag = sum_k D_{kj} L_k for trace-orthogonal Kraus.

    With ``conjugate_rep`` the intertwiner V^T L_j V is decomposed instead,
    which is the relation induced by covariance with an entrywise-conjugated
    output representation.

    The ``degenerate`` flag is set when the Choi spectrum (the Kraus trace
    norms) has gaps below 1e-8, in which case the canonical Kraus basis is
    ambiguous and D is only determined up to eigenspace rotations.
    """
    vm = as_matrix(v)
    if np.linalg.norm(vm.conj().T @ vm - np.eye(vm.shape[0])) > 1e-10:
        raise ValueError("V is not unitary")
    k = channel.kraus
    gram = np.einsum("jab,kab->jk", k.conj(), k)
    norms = np.diagonal(gram).real
    off = gram - np.diag(norms)
    if np.abs(off).max() > 1e-8:
        raise ValueError(
            "Kraus set is not orthogonal in the trace inner product; "
            "use canonical Kraus from the Choi matrix")
    sorted_norms = np.sort(norms)
    degenerate = bool(np.min(np.diff(sorted_norms), initial=np.inf) < DEGENERACY_GAP)
    if conjugate_rep:
        rotated = np.einsum("ba,jbc,cd->jad", vm, k, vm)
    else:
        rotated = np.einsum("ab,jbc,dc->jad", vm, k, vm.conj())
    d_mat = np.einsum("kab,jab->kj", k.conj(), rotated) / norms[:, None]
    resid = max(float(np.linalg.norm(rotated[j] - np.einsum("k,kab->ab", d_mat[:, j], k)))
                for j in range(k.shape[0]))
    defect = float(np.linalg.norm(d_mat.conj().T @ d_mat - np.eye(k.shape[0])))
    return TensorOperatorResult(d_mat, resid, defect, degenerate)
