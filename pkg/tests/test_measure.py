import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_space, seeds
from dudleylab.errors import InputError
from dudleylab.lipschitz import TabulatedFunction
from dudleylab.measure import (
    Coupling,
    ProbabilityMeasure,
    SignedMeasure,
    integrate,
    point_mass,
    pushforward,
    total_variation_norm,
)
from dudleylab.metric_space import PointMap, from_real_points


def test_point_mass_singleton():
    s = from_real_points([0])
    assert point_mass(s, 0).mass.tolist() == [1.0]


def test_point_mass_two_points():
    assert point_mass(from_real_points([0, 1]), 0).mass.tolist() == [1.0, 0.0]


def test_point_mass_bad_index():
    with pytest.raises(InputError):
        point_mass(from_real_points([0, 1]), 2)


@given(seeds)
def test_point_mass_integrates_to_value(seed):
    s, rng = random_space(seed)
    f = TabulatedFunction(s, rng.normal(size=s.size))
    p = int(rng.integers(s.size))
    assert integrate(point_mass(s, p), f) == f[p]


def test_integrate_examples():
    s = from_real_points([0, 1])
    mu = ProbabilityMeasure(s, [0.5, 0.5])
    assert integrate(mu, TabulatedFunction(s, [0, 1])) == 0.5
    assert integrate(mu, TabulatedFunction.constant(s, 1)) == 1.0


def test_integrate_space_mismatch():
    mu = point_mass(from_real_points([0, 1]), 0)
    with pytest.raises(InputError):
        integrate(mu, TabulatedFunction(from_real_points([0, 2]), [0, 1]))


class TestProbability:
    def test_renormalizes_small_drift(self):
        mu = ProbabilityMeasure(from_real_points([0, 1]), [0.5, 0.5 + 5e-10])
        assert abs(mu.mass.sum() - 1.0) < 1e-15

    def test_rejects_large_drift(self):
        with pytest.raises(InputError):
            ProbabilityMeasure(from_real_points([0, 1]), [0.5, 0.6])

    def test_rejects_negative(self):
        with pytest.raises(InputError):
            ProbabilityMeasure(from_real_points([0, 1]), [1.5, -0.5])

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            SignedMeasure(from_real_points([0, 1]), [1.0])


class TestPushforward:
    def test_identity(self):
        s = from_real_points([0, 1, 2])
        mu = ProbabilityMeasure(s, [0.2, 0.3, 0.5])
        assert pushforward(PointMap.identity(s), mu).mass.tolist() == mu.mass.tolist()

    def test_constant(self):
        s = from_real_points([0, 1, 2])
        t = from_real_points([5, 6])
        mu = ProbabilityMeasure(s, [0.2, 0.3, 0.5])
        image = pushforward(PointMap(s, t, (1, 1, 1)), mu)
        assert image == point_mass(t, 1)

    def test_merge(self):
        s = from_real_points([0, 1, 2])
        t = from_real_points([0, 1])
        mu = ProbabilityMeasure(s, [0.3, 0.2, 0.5])
        image = pushforward(PointMap(s, t, (0, 0, 1)), mu)
        assert image.mass.tolist() == [0.5, 0.5]
        assert isinstance(image, ProbabilityMeasure)

    def test_signed_stays_signed(self):
        s = from_real_points([0, 1])
        image = pushforward(PointMap(s, s, (0, 0)), SignedMeasure(s, [1.0, -3.0]))
        assert type(image) is SignedMeasure and image.mass.tolist() == [-2.0, 0.0]

    def test_wrong_source(self):
        s = from_real_points([0, 1])
        with pytest.raises(InputError):
            pushforward(PointMap.identity(s), point_mass(from_real_points([0, 3]), 0))

    @staticmethod
    def _setup(seed):
        x, rng = random_space(seed, 1, 7)
        # integer-valued masses keep sums exact, so identities can be checked with ==
        y, _ = random_space(seed + 1, 1, 6)
        z, _ = random_space(seed + 2, 1, 6)
        psi = PointMap(x, y, tuple(rng.integers(0, y.size, x.size)))
        phi = PointMap(y, z, tuple(rng.integers(0, z.size, y.size)))
        mu = SignedMeasure(x, rng.integers(-8, 9, x.size))
        nu = SignedMeasure(x, rng.integers(-8, 9, x.size))
        return rng, psi, phi, mu, nu

    @given(seeds, st.integers(-5, 5), st.integers(-5, 5))
    def test_linear(self, seed, a, b):
        _, psi, _, mu, nu = self._setup(seed)
        lhs = pushforward(psi, a * mu + b * nu)
        rhs = a * pushforward(psi, mu) + b * pushforward(psi, nu)
        assert lhs == rhs

    @given(seeds)
    def test_functorial(self, seed):
        _, psi, phi, mu, _ = self._setup(seed)
        assert pushforward(phi.compose(psi), mu) == pushforward(phi, pushforward(psi, mu))

    @given(seeds)
    def test_adjoint_identity(self, seed):
        rng, psi, _, mu, _ = self._setup(seed)
        g = TabulatedFunction(psi.target, rng.integers(-10, 11, psi.target.size))
        g_after_psi = TabulatedFunction(psi.source, g.values[list(psi.image)])
        assert integrate(pushforward(psi, mu), g) == integrate(mu, g_after_psi)

    @given(seeds)
    def test_probability_preserved(self, seed):
        rng, psi, _, _, _ = self._setup(seed)
        m = rng.random(psi.source.size) + 0.01
        mu = ProbabilityMeasure(psi.source, m / m.sum())
        image = pushforward(psi, mu)
        assert isinstance(image, ProbabilityMeasure)
        assert abs(image.mass.sum() - 1) < 1e-12


def test_total_variation_examples():
    s = from_real_points([0, 1])
    assert total_variation_norm(SignedMeasure(s, [0, 0])) == 0
    assert total_variation_norm(point_mass(s, 0) - point_mass(s, 1)) == 2
    assert total_variation_norm(ProbabilityMeasure(s, [0.25, 0.75])) == 1


@given(seeds)
def test_integral_bounded_by_tv(seed):
    s, rng = random_space(seed)
    mu = SignedMeasure(s, rng.normal(size=s.size))
    f = TabulatedFunction(s, rng.normal(size=s.size))
    assert abs(integrate(mu, f)) <= f.sup_norm * total_variation_norm(mu) * (1 + 1e-12)


class TestCoupling:
    def test_marginals_checked(self):
        s = from_real_points([0, 1])
        mu, nu = ProbabilityMeasure(s, [0.5, 0.5]), point_mass(s, 0)
        c = Coupling(mu, nu, [[0.5, 0], [0.5, 0]])
        assert c.expected(s.dist) == 0.5
        with pytest.raises(InputError):
            Coupling(mu, nu, [[0.5, 0], [0, 0.5]])

    def test_negative_rejected(self):
        s = from_real_points([0, 1])
        mu = ProbabilityMeasure(s, [0.5, 0.5])
        with pytest.raises(InputError):
            Coupling(mu, mu, [[1.0, -0.5], [-0.5, 1.0]])

    def test_tiny_negative_clipped(self):
        s = from_real_points([0, 1])
        mu = ProbabilityMeasure(s, [0.5, 0.5])
        c = Coupling(mu, mu, [[0.5, -1e-15], [0, 0.5]])
        assert np.all(c.plan >= 0)
