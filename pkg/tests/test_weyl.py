import numpy as np
import pytest

from covchan.spectral import random_density_matrix
from covchan.weyl import (CharacteristicFunction, NotPositiveDefiniteError,
                          PhaseSpaceDistribution, characteristic_from_distribution,
                          composition_phase, conjugation_phase,
                          distribution_from_characteristic, duality_pairing,
                          is_positive_definite, make_group, weyl_operator,
                          weyl_operators)

SMALL_GROUPS = [[2], [3], [4], [2, 2], [2, 3]]


def random_distribution(group, rng):
    p = rng.random(group.n_points)
    return PhaseSpaceDistribution(group, p / p.sum())


def test_make_group():
    assert make_group([2]).total_dim == 2
    assert make_group([2, 3]).total_dim == 6
    assert len(make_group([3, 3]).points()) == 81
    with pytest.raises(ValueError):
        make_group([])
    with pytest.raises(ValueError):
        make_group([2, 1])


def test_duality_pairing():
    z2 = make_group([2])
    assert duality_pairing(z2, (1,), (1,)) == pytest.approx(np.pi)
    assert duality_pairing(z2, (0,), (1,)) == 0.0
    z23 = make_group([2, 3])
    assert duality_pairing(z23, (1, 1), (1, 2)) == pytest.approx(np.pi / 3)


def test_duality_pairing_bilinear():
    g = make_group([3, 4])
    rng = np.random.default_rng(0)
    for _ in range(30):
        b1, b2, a = (tuple(rng.integers(0, 12, size=2)) for _ in range(3))
        lhs = duality_pairing(g, tuple(x + y for x, y in zip(b1, b2)), a)
        rhs = (duality_pairing(g, b1, a) + duality_pairing(g, b2, a)) % (2 * np.pi)
        assert lhs % (2 * np.pi) == pytest.approx(rhs % (2 * np.pi), abs=1e-12)


def test_weyl_operator_z2():
    g = make_group([2])
    assert np.allclose(weyl_operator(g, g.point((1,), (0,))), [[0, 1], [1, 0]])
    assert np.allclose(weyl_operator(g, g.point((0,), (1,))), [[1, 0], [0, -1]])
    # U_1 V_1 in that product order
    assert np.allclose(weyl_operator(g, g.point((1,), (1,))), [[0, -1], [1, 0]])


@pytest.mark.parametrize("orders", SMALL_GROUPS)
def test_ccr_and_conjugation(orders):
    g = make_group(orders)
    w = weyl_operators(g)
    pts = g.points()
    for i, z in enumerate(pts):
        assert np.linalg.norm(w[i].conj().T @ w[i] - np.eye(g.total_dim)) <= 1e-12
        for j, zp in enumerate(pts):
            th = composition_phase(g, z, zp)
            k = g.point_index(g.add(z, zp))
            assert np.linalg.norm(w[i] @ w[j] - np.exp(1j * th) * w[k]) <= 1e-12
            thc = conjugation_phase(g, z, zp)
            lhs = w[i].conj().T @ w[j] @ w[i]
            assert np.linalg.norm(lhs - np.exp(1j * thc) * w[j]) <= 1e-12


def test_phase_examples():
    z2, z3 = make_group([2]), make_group([3])
    assert composition_phase(z2, z2.point((0,), (1,)), z2.point((1,), (0,))) == pytest.approx(np.pi)
    assert composition_phase(z3, z3.point((0,), (1,)), z3.point((2,), (0,))) == pytest.approx(4 * np.pi / 3)
    z = z3.point((1,), (2,))
    assert conjugation_phase(z3, z, z) == pytest.approx(0.0)
    assert conjugation_phase(z2, z2.point((1,), (0,)), z2.point((0,), (1,))) == pytest.approx(np.pi)
    assert conjugation_phase(z3, z3.point((1,), (0,)), z3.point((0,), (2,))) == pytest.approx(4 * np.pi / 3)


@pytest.mark.parametrize("orders", SMALL_GROUPS)
def test_orthogonality_relation(orders):
    g = make_group(orders)
    d = g.total_dim
    w = weyl_operators(g)
    rng = np.random.default_rng(1)
    for _ in range(5):
        s = random_density_matrix(d, d, rng)
        avg = np.einsum("kij,jl,kml->im", w, s, w.conj()) / g.n_points
        assert np.linalg.norm(avg - np.eye(d) / d) <= 1e-12


def test_characteristic_point_mass():
    g = make_group([3])
    p = np.zeros(g.n_points)
    p[g.point_index(g.zero)] = 1.0
    phi = characteristic_from_distribution(PhaseSpaceDistribution(g, p))
    assert np.allclose(phi.values, 1.0)


def test_characteristic_uniform():
    g = make_group([2, 2])
    phi = characteristic_from_distribution(
        PhaseSpaceDistribution(g, np.full(g.n_points, 1 / g.n_points)))
    expected = np.zeros(g.n_points)
    expected[g.point_index(g.zero)] = 1.0
    assert np.abs(phi.values - expected).max() <= 1e-12


def test_characteristic_two_term_oracle():
    # Oracle: evaluate the 2-term character sum at all four points of Z_2.
    g = make_group([2])
    p = np.zeros(4)
    p[g.point_index(g.point((0,), (0,)))] = 0.5
    p[g.point_index(g.point((1,), (0,)))] = 0.5  # mass at (x, y) = (1, 0)
    phi = characteristic_from_distribution(PhaseSpaceDistribution(g, p))
    for z in g.points():
        expected = 1.0 if z.alpha == (0,) else 0.0
        assert phi.value(z) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("orders", SMALL_GROUPS)
def test_fourier_round_trip(orders):
    g = make_group(orders)
    rng = np.random.default_rng(2)
    for _ in range(10):
        dist = random_distribution(g, rng)
        back = distribution_from_characteristic(characteristic_from_distribution(dist))
        assert np.abs(back.probs - dist.probs).max() <= 1e-12


def test_inverse_of_delta_characteristic():
    g = make_group([3])
    v = np.zeros(g.n_points, dtype=complex)
    v[g.point_index(g.zero)] = 1.0
    p = distribution_from_characteristic(CharacteristicFunction(g, v))
    assert np.abs(p.probs - 1 / g.n_points).max() <= 1e-12


def test_not_positive_definite_error():
    g = make_group([2])
    # phi(0,0) = 1, phi(1,0) = -3, others 0: inverse Fourier goes negative.
    v = np.zeros(g.n_points, dtype=complex)
    v[g.point_index(g.zero)] = 1.0
    v[g.point_index(g.point((1,), (0,)))] = -3.0
    with pytest.raises(NotPositiveDefiniteError) as exc:
        distribution_from_characteristic(CharacteristicFunction(g, v))
    assert exc.value.value < -1e-10


def test_is_positive_definite():
    g = make_group([2])
    ones = CharacteristicFunction(g, np.ones(g.n_points, dtype=complex))
    ok, witness = is_positive_definite(ones)
    assert ok and witness is None

    rng = np.random.default_rng(3)
    dist = random_distribution(g, rng)
    ok, _ = is_positive_definite(characteristic_from_distribution(dist))
    assert ok

    v = np.zeros(g.n_points, dtype=complex)
    v[g.point_index(g.zero)] = 1.0
    v[g.point_index(g.point((1,), (0,)))] = -3.0
    ok, witness = is_positive_definite(CharacteristicFunction(g, v))
    assert not ok
    assert witness["kind"] == "negative_coefficient"
    assert witness["value"] < 0


def test_distribution_validation():
    g = make_group([2])
    with pytest.raises(ValueError, match="sum"):
        PhaseSpaceDistribution(g, np.array([0.5, 0.3, 0.1, 0.2]))
    with pytest.raises(ValueError, match="negative"):
        PhaseSpaceDistribution(g, np.array([1.2, -0.2, 0.0, 0.0]))


def test_characteristic_validation():
    g = make_group([2])
    v = np.full(g.n_points, 0.5, dtype=complex)
    with pytest.raises(ValueError, match="phi\\(0\\)"):
        CharacteristicFunction(g, v)
