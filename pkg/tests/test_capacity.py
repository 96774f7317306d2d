import numpy as np
import pytest

from covchan.spectral import random_density_matrix, random_pure_state, von_neumann_entropy
from covchan.weyl import PhaseSpaceDistribution, make_group
from covchan.channel import (completely_depolarizing, depolarizing,
                             identity_channel, kraus_from_choi, random_channel,
                             werner_holevo, weyl_channel)
from covchan.capacity import (Ensemble, check_ea_bound, check_eex, ea_capacity,
                              entropy_exchange, holevo_quantity,
                              min_output_entropy, multiplicativity_probe,
                              mutual_information, one_shot_capacity_covariant,
                              orbit_ensemble, output_entropy,
                              output_entropy_gradient, pure_decompositions)

LOG2_3 = np.log2(3.0)
H2_QUARTER = -(0.75 * np.log2(0.75) + 0.25 * np.log2(0.25))


def projector(psi):
    return np.outer(psi, psi.conj())


def random_distribution(group, rng):
    p = rng.random(group.n_points)
    return PhaseSpaceDistribution(group, p / p.sum())


# --- entropy exchange -------------------------------------------------------

def test_entropy_exchange_identity():
    ch = identity_channel(3)
    assert entropy_exchange(ch, random_density_matrix(3, 3, 0)) <= 1e-12


def test_entropy_exchange_pure_input_matches_output_entropy():
    ch = random_channel(3, 3, 1)
    for seed in range(5):
        s = projector(random_pure_state(3, seed))
        assert entropy_exchange(ch, s) == pytest.approx(
            von_neumann_entropy(ch.apply(s)), abs=1e-9)


def test_entropy_exchange_werner_holevo_maximally_mixed():
    # Oracle: the environment matrix at I/3 is I_3/3, entropy log2(3).
    assert entropy_exchange(werner_holevo(3), np.eye(3) / 3) == pytest.approx(
        LOG2_3, abs=1e-12)


def test_entropy_exchange_kraus_representation_independent():
    rng = np.random.default_rng(2)
    for seed in range(5):
        ch = random_channel(3, 3, seed)
        canonical = kraus_from_choi(ch.choi())
        s = random_density_matrix(3, 2, rng)
        assert entropy_exchange(ch, s) == pytest.approx(
            entropy_exchange(canonical, s), abs=1e-9)


# --- Holevo quantity --------------------------------------------------------

def test_holevo_single_state_is_zero():
    ch = random_channel(2, 2, 3)
    ens = Ensemble(np.array([1.0]), (random_density_matrix(2, 2, 4),))
    assert holevo_quantity(ch, ens) == pytest.approx(0.0, abs=1e-12)


def test_holevo_classical_noiseless():
    d = 3
    ch = identity_channel(d)
    states = tuple(np.diag(np.eye(d)[j]).astype(complex) for j in range(d))
    ens = Ensemble(np.full(d, 1 / d), states)
    assert holevo_quantity(ch, ens) == pytest.approx(np.log2(d), abs=1e-12)


def test_holevo_werner_holevo_orbit():
    g = make_group([3])
    ens = orbit_ensemble(g, projector(random_pure_state(3, 5)))
    assert holevo_quantity(werner_holevo(3), ens) == pytest.approx(LOG2_3 - 1.0, abs=1e-12)


def test_holevo_nonnegative():
    rng = np.random.default_rng(6)
    for _ in range(20):
        d = int(rng.integers(2, 4))
        ch = random_channel(d, int(rng.integers(1, 4)), rng)
        k = int(rng.integers(2, 5))
        p = rng.random(k)
        ens = Ensemble(p / p.sum(),
                       tuple(random_density_matrix(d, int(rng.integers(1, d + 1)), rng)
                             for _ in range(k)))
        assert holevo_quantity(ch, ens) >= -1e-9


# --- minimum output entropy -------------------------------------------------

def test_min_output_entropy_identity():
    res = min_output_entropy(identity_channel(3), restarts=3, seed=0)
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_min_output_entropy_completely_depolarizing():
    res = min_output_entropy(completely_depolarizing(3), restarts=3, seed=0)
    assert res.value == pytest.approx(LOG2_3, abs=1e-9)


def test_min_output_entropy_werner_holevo():
    res = min_output_entropy(werner_holevo(3), restarts=10, seed=1)
    assert res.value == pytest.approx(1.0, abs=1e-6)
    assert res.converged


def test_min_output_entropy_depolarizing():
    res = min_output_entropy(depolarizing(2, 0.5), restarts=5, seed=2)
    assert res.value == pytest.approx(H2_QUARTER, abs=1e-6)


def test_min_output_entropy_restart_consistency():
    # Constant-output-entropy channels: every restart lands on the same value.
    for ch in [werner_holevo(3), completely_depolarizing(2)]:
        vals = [min_output_entropy(ch, restarts=1, seed=s).value for s in range(6)]
        assert max(vals) - min(vals) <= 1e-8


def test_min_output_entropy_deterministic():
    ch = random_channel(3, 2, 7)
    a = min_output_entropy(ch, restarts=4, seed=11)
    b = min_output_entropy(ch, restarts=4, seed=11)
    assert a.value == b.value
    assert np.array_equal(a.argument, b.argument)


def test_pure_inputs_suffice():
    # Random mixed inputs never beat the pure-state minimum.
    ch = random_channel(3, 3, 8)
    res = min_output_entropy(ch, restarts=10, seed=3)
    rng = np.random.default_rng(9)
    for _ in range(50):
        s = random_density_matrix(3, int(rng.integers(2, 4)), rng)
        assert von_neumann_entropy(ch.apply(s)) >= res.value - 1e-9


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(10)
    channels = [random_channel(3, 3, 20), random_channel(2, 4, 21),
                random_channel(4, 2, 22), random_channel(2, 2, 23),
                random_channel(3, 2, 24), werner_holevo(3), depolarizing(2, 0.3)]
    checked = 0
    for ch in channels:
        d = ch.in_dim
        for _ in range(15):
            psi = random_pure_state(d, rng)
            _, grad = output_entropy_gradient(ch, psi)
            eta = random_pure_state(d, rng)
            eta = eta - np.vdot(psi, eta) * psi
            eta = eta / np.linalg.norm(eta)
            h = 1e-5
            fp = output_entropy(ch, (psi + h * eta) / np.linalg.norm(psi + h * eta))
            fm = output_entropy(ch, (psi - h * eta) / np.linalg.norm(psi - h * eta))
            num = (fp - fm) / (2 * h)
            ana = float(np.vdot(eta, grad).real)
            if max(abs(num), abs(ana)) > 1e-4:  # skip flat directions
                assert abs(num - ana) / max(abs(num), abs(ana)) <= 1e-5
                checked += 1
    assert checked >= 50


# --- orbit ensembles and the one-shot capacity ------------------------------

def test_orbit_ensemble_maximally_mixed():
    g = make_group([2])
    ens = orbit_ensemble(g, np.eye(2) / 2)
    for s in ens.states:
        assert np.linalg.norm(s - np.eye(2) / 2) <= 1e-12


def test_orbit_ensemble_z2_basis_state():
    g = make_group([2])
    ens = orbit_ensemble(g, np.diag([1.0, 0.0]).astype(complex))
    diag0 = sorted(round(float(s[0, 0].real)) for s in ens.states)
    assert diag0 == [0, 0, 1, 1]
    assert np.allclose(ens.probs, 0.25)


def test_orbit_ensemble_average_is_maximally_mixed():
    g = make_group([2, 3])
    ens = orbit_ensemble(g, random_density_matrix(6, 4, 12))
    assert np.linalg.norm(ens.average_state() - np.eye(6) / 6) <= 1e-12


def test_one_shot_identity():
    cert = one_shot_capacity_covariant(identity_channel(3), make_group([3]),
                                       restarts=3, seed=0)
    assert cert.certified
    assert cert.value == pytest.approx(LOG2_3, abs=1e-9)


def test_one_shot_werner_holevo():
    cert = one_shot_capacity_covariant(werner_holevo(3), make_group([3]),
                                       restarts=10, seed=0)
    assert cert.certified
    assert cert.value == pytest.approx(LOG2_3 - 1.0, abs=1e-6)
    assert cert.gap <= 1e-6


def test_one_shot_depolarizing():
    cert = one_shot_capacity_covariant(depolarizing(2, 0.5), make_group([2]),
                                       restarts=5, seed=0)
    assert cert.certified
    assert cert.value == pytest.approx(1.0 - H2_QUARTER, abs=1e-6)


def test_capacity_not_beaten_by_random_ensembles():
    g = make_group([2])
    ch = weyl_channel(g, random_distribution(g, np.random.default_rng(13)))
    cert = one_shot_capacity_covariant(ch, g, restarts=10, seed=1)
    assert cert.certified
    rng = np.random.default_rng(14)
    for _ in range(100):
        p = rng.random(4)
        ens = Ensemble(p / p.sum(),
                       tuple(projector(random_pure_state(2, rng)) for _ in range(4)))
        assert holevo_quantity(ch, ens) <= cert.value + 1e-6


# --- mutual information and C_ea --------------------------------------------

def test_mutual_information_identity():
    assert mutual_information(identity_channel(3), np.eye(3) / 3) == pytest.approx(
        2 * LOG2_3, abs=1e-9)


def test_mutual_information_completely_depolarizing():
    assert mutual_information(completely_depolarizing(3), np.eye(3) / 3) == pytest.approx(
        0.0, abs=1e-9)


def test_mutual_information_pure_input():
    ch = random_channel(3, 3, 15)
    s = projector(random_pure_state(3, 16))
    assert mutual_information(ch, s) == pytest.approx(0.0, abs=1e-9)


def test_ea_capacity_identity():
    res = ea_capacity(identity_channel(2), assume_covariant=True)
    assert res.value == pytest.approx(2.0, abs=1e-9)


def test_ea_capacity_completely_depolarizing():
    res = ea_capacity(completely_depolarizing(2), assume_covariant=True)
    assert res.value == pytest.approx(0.0, abs=1e-9)


def test_ea_capacity_werner_holevo_shortcut_matches_optimizer():
    shortcut = ea_capacity(werner_holevo(3), assume_covariant=True)
    assert shortcut.value == pytest.approx(LOG2_3, abs=1e-9)
    general = ea_capacity(werner_holevo(3), restarts=6, seed=4)
    assert general.value == pytest.approx(shortcut.value, abs=1e-4)


# --- decompositions and the entropy-exchange inequality ---------------------

def test_pure_decompositions_pure_state():
    s = projector(random_pure_state(3, 17))
    for ens in pure_decompositions(s, 3, seed=0):
        assert len(ens.states) == 1
        assert np.linalg.norm(ens.states[0] - s) <= 1e-9


def test_pure_decompositions_average():
    s = random_density_matrix(4, 3, 18)
    for ens in pure_decompositions(s, 5, seed=1):
        assert np.linalg.norm(ens.average_state() - s) <= 1e-10


def test_pure_decompositions_maximally_mixed():
    decs = pure_decompositions(np.eye(2) / 2, 4, seed=2)
    for ens in decs:
        assert np.linalg.norm(ens.average_state() - np.eye(2) / 2) <= 1e-10


def test_check_eex_pure_state_equality():
    ch = random_channel(3, 3, 19)
    s = projector(random_pure_state(3, 20))
    reports = check_eex(ch, s, pure_decompositions(s, 3, seed=3))
    for r in reports:
        assert abs(r.slack) <= 1e-9 and r.holds


def test_check_eex_identity_channel_equality():
    ch = identity_channel(3)
    s = random_density_matrix(3, 3, 21)
    for r in check_eex(ch, s, pure_decompositions(s, 3, seed=4)):
        assert abs(r.left_value) <= 1e-9 and abs(r.right_value) <= 1e-9


def test_check_eex_random_suite():
    rng = np.random.default_rng(22)
    for _ in range(10):
        ch = random_channel(3, 3, rng)
        s = random_density_matrix(3, 2, rng)
        for r in check_eex(ch, s, pure_decompositions(s, 5, int(rng.integers(2**31)))):
            assert r.slack >= -1e-9


def test_check_eex_rejects_bad_decomposition():
    ch = identity_channel(2)
    other = random_density_matrix(2, 2, 23)
    decs = pure_decompositions(other, 1, seed=5)
    with pytest.raises(ValueError, match="average"):
        check_eex(ch, np.eye(2) / 2, decs)


# --- the C_ea <= log d + C1 bound -------------------------------------------

def test_ea_bound_identity_equality():
    rep = check_ea_bound(identity_channel(2), make_group([2]), restarts=3)
    assert rep.holds and not rep.inconclusive
    assert abs(rep.slack) <= 1e-9


def test_ea_bound_completely_depolarizing():
    d = 2
    rep = check_ea_bound(completely_depolarizing(d), make_group([d]), restarts=3)
    assert rep.holds
    assert rep.slack == pytest.approx(np.log2(d), abs=1e-9)


def test_ea_bound_werner_holevo():
    rep = check_ea_bound(werner_holevo(3), make_group([3]), restarts=10)
    assert rep.holds and not rep.inconclusive
    assert rep.slack == pytest.approx(LOG2_3 + (LOG2_3 - 1.0) - LOG2_3, abs=1e-3)


# --- multiplicativity probe -------------------------------------------------

def test_probe_identity():
    rep = multiplicativity_probe(identity_channel(2), restarts=2, seed=0)
    assert rep.hmin_single == pytest.approx(0.0, abs=1e-8)
    assert rep.hmin_double == pytest.approx(0.0, abs=1e-8)
    assert rep.entangled_point == pytest.approx(0.0, abs=1e-8)
    assert rep.product_bound_holds


def test_probe_completely_depolarizing():
    rep = multiplicativity_probe(completely_depolarizing(2), restarts=2, seed=0)
    assert rep.hmin_single == pytest.approx(1.0, abs=1e-8)
    assert rep.hmin_double == pytest.approx(2.0, abs=1e-8)
    assert rep.product_bound_holds


def test_probe_werner_holevo_entangled_point():
    # Oracle: (Phi x Phi)[|Omega><Omega|/3] evaluated directly below.
    wh = werner_holevo(3)
    double = wh.tensor(wh)
    omega = np.eye(3).reshape(-1) / np.sqrt(3)
    expected = von_neumann_entropy(double.apply(np.outer(omega, omega.conj())))
    rep = multiplicativity_probe(wh, restarts=3, seed=1)
    assert rep.entangled_point == pytest.approx(expected, abs=1e-9)
    assert rep.hmin_single == pytest.approx(1.0, abs=1e-6)
    assert rep.product_bound_holds
