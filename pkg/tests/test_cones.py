import pytest
import numpy as np

from renyicones.barrier import (
    BarrierParameter,
    barrier_gradient,
    barrier_hessian_apply,
    barrier_hessian_solve,
    barrier_parameter,
    barrier_third_directional,
    barrier_value,
    interior_membership,
)
from renyicones.cones import (
    NonNeg,
    PerspectivePoint,
    PSDCone,
    RenyiEpi,
    RenyiHypo,
    RenyiPerspEpi,
    RenyiPoint,
    solve_symmetric,
)
from renyicones.errors import DimensionError, DomainError


CONES = [
    NonNeg(3),
    PSDCone(3),
    PSDCone(2, "real"),
    RenyiHypo(2, 0.5),
    RenyiHypo(2, 0.75, "real"),
    RenyiEpi(2, 1.5),
    RenyiEpi(2, 2.0),
    RenyiPerspEpi(2, 0.75),
]


def _direction(cone, rng):
    d = rng.standard_normal(cone.dim)
    return d / np.linalg.norm(d)


def _barrier_line(cone, x, d, steps):
    return np.array([barrier_value(cone, x + s * d) for s in steps])


class TestConstruction:
    @pytest.mark.parametrize(
        "factory",
        [
            lambda: RenyiHypo(2, 1.5),
            lambda: RenyiEpi(2, 0.75),
            lambda: RenyiPerspEpi(2, 1.0),
        ],
    )
    def test_alpha_out_of_range(self, factory):
        with pytest.raises(DomainError):
            factory()

    @pytest.mark.parametrize("factory", [lambda: NonNeg(0), lambda: PSDCone(0), lambda: RenyiHypo(0, 0.5)])
    def test_bad_dimension(self, factory):
        with pytest.raises(DimensionError):
            factory()

    def test_dims(self):
        assert NonNeg(4).dim == 4
        assert PSDCone(3).dim == 9
        assert PSDCone(3, "real").dim == 6
        assert RenyiHypo(2, 0.5).dim == 9
        assert RenyiPerspEpi(2, 0.5, "real").dim == 8

    def test_kinds(self):
        assert NonNeg(1).kind == "nonneg"
        assert PSDCone(1).kind == "psd"
        assert RenyiHypo(1, 0.5).kind == "renyi-hypo"
        assert RenyiEpi(1, 1.5).kind == "renyi-epi"
        assert RenyiPerspEpi(1, 0.5).kind == "renyi-persp-epi"


class TestMembership:
    def test_examples(self):
        I = np.eye(2)
        assert interior_membership(RenyiHypo(2, 0.5), RenyiPoint(0.0, I, I))
        assert not interior_membership(RenyiHypo(2, 0.5), RenyiPoint(2.0, I, I))
        assert interior_membership(RenyiEpi(2, 1.5), RenyiPoint(3.0, I, I))
        assert not interior_membership(RenyiEpi(2, 1.5), RenyiPoint(2.0, I, I))

    def test_margin(self):
        I = np.eye(2)
        cone = RenyiHypo(2, 0.5)
        assert interior_membership(cone, RenyiPoint(1.5, I, I), margin=0.4)
        assert not interior_membership(cone, RenyiPoint(1.5, I, I), margin=0.6)
        with pytest.raises(ValueError):
            interior_membership(cone, RenyiPoint(1.5, I, I), margin=-1.0)

    def test_indefinite_matrix(self):
        X = np.diag([1.0, -1.0])
        assert not interior_membership(RenyiHypo(2, 0.5), RenyiPoint(-10.0, X, np.eye(2)))
        assert not interior_membership(PSDCone(2), X)

    def test_perspective_needs_positive_u(self):
        I = np.eye(2)
        cone = RenyiPerspEpi(2, 0.5)
        assert interior_membership(cone, PerspectivePoint(1.0, 1.0, I, I))
        assert not interior_membership(cone, PerspectivePoint(1.0, 0.0, I, I))
        assert not interior_membership(cone, PerspectivePoint(1.0, -1.0, I, I))

    def test_wrong_length(self):
        with pytest.raises(DimensionError):
            interior_membership(PSDCone(2), np.ones(3))

    def test_non_finite(self):
        assert not interior_membership(NonNeg(2), np.array([1.0, np.nan]))

    @pytest.mark.parametrize("cone", CONES, ids=repr)
    def test_random_interior(self, cone, rng):
        for bias in (0.0, 0.5):
            assert interior_membership(cone, cone.random_interior(rng, bias))
        assert interior_membership(cone, cone.interior_direction())


class TestBarrierValues:
    def test_examples(self):
        assert barrier_value(RenyiHypo(1, 0.5), RenyiPoint(0.0, np.eye(1), np.eye(1))) == pytest.approx(0.0, abs=1e-14)
        two = 2 * np.eye(2)
        assert barrier_value(RenyiHypo(2, 0.5), RenyiPoint(1.0, two, two)) == pytest.approx(
            -np.log(3) - 4 * np.log(2)
        )
        assert barrier_value(
            RenyiPerspEpi(1, 0.5), PerspectivePoint(1.0, 1.0, np.eye(1), np.eye(1))
        ) == pytest.approx(0.0, abs=1e-14)

    def test_outside_raises(self):
        with pytest.raises(DomainError):
            barrier_value(NonNeg(1), np.array([0.0]))

    def test_nonneg(self):
        cone = NonNeg(1)
        x = np.array([2.0])
        assert barrier_gradient(cone, x)[0] == pytest.approx(-0.5)
        assert barrier_hessian_apply(cone, x, np.array([1.0]))[0] == pytest.approx(0.25)
        assert barrier_hessian_solve(cone, x, np.array([0.25]))[0] == pytest.approx(1.0)
        assert barrier_third_directional(cone, np.array([1.0]), np.array([1.0])) == pytest.approx(-2.0)

    def test_psd_third_at_identity(self, rng):
        cone = PSDCone(3)
        H = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        H = (H + H.conj().T) / 2
        expected = -2 * np.real(np.trace(H @ H @ H))
        assert barrier_third_directional(cone, np.eye(3), H) == pytest.approx(expected)

    def test_structured_points_come_back_structured(self):
        I = np.eye(2)
        gradient = barrier_gradient(RenyiEpi(2, 1.5), RenyiPoint(3.0, I, I))
        assert isinstance(gradient, RenyiPoint)
        assert gradient.t == pytest.approx(-1.0)

    def test_barrier_parameters(self):
        assert barrier_parameter(RenyiHypo(4, 0.75)) == BarrierParameter(9)
        assert barrier_parameter(RenyiEpi(2, 1.5)).nu == 5
        assert barrier_parameter(RenyiPerspEpi(3, 0.5)).nu == 8
        assert barrier_parameter(NonNeg(5)).nu == 5
        assert barrier_parameter(PSDCone(4)).nu == 4
        with pytest.raises(ValueError):
            BarrierParameter(0.0)


@pytest.mark.parametrize("cone", CONES, ids=repr)
class TestBarrierDerivatives:
    def test_gradient(self, cone, rng):
        x = cone.random_interior(rng)
        d = _direction(cone, rng)
        step = 1e-6
        values = _barrier_line(cone, x, d, (-step, step))
        estimate = (values[1] - values[0]) / (2 * step)
        gradient = barrier_gradient(cone, x)
        assert abs(gradient @ d - estimate) <= 1e-6 * max(1.0, np.linalg.norm(gradient))

    def test_hessian(self, cone, rng):
        x = cone.random_interior(rng)
        d = _direction(cone, rng)
        step = 1e-5
        gradients = [barrier_gradient(cone, x + s * d) for s in (-step, step)]
        estimate = (gradients[1] - gradients[0]) / (2 * step)
        analytic = barrier_hessian_apply(cone, x, d)
        assert np.linalg.norm(analytic - estimate) <= 1e-5 * max(1.0, np.linalg.norm(analytic))

    def test_third(self, cone, rng):
        x = cone.random_interior(rng)
        d = _direction(cone, rng)
        step = 1e-5
        curvature = [d @ barrier_hessian_apply(cone, x + s * d, d) for s in (-step, step)]
        estimate = (curvature[1] - curvature[0]) / (2 * step)
        analytic = barrier_third_directional(cone, x, d)
        scale = max(1.0, abs(analytic), (d @ barrier_hessian_apply(cone, x, d)) ** 1.5)
        assert abs(analytic - estimate) <= 1e-4 * scale

    def test_hessian_solve_round_trip(self, cone, rng):
        x = cone.random_interior(rng)
        rhs = rng.standard_normal(cone.dim)
        d = barrier_hessian_solve(cone, x, rhs)
        residual = barrier_hessian_apply(cone, x, d) - rhs
        assert np.linalg.norm(residual) <= 1e-8 * np.linalg.norm(rhs)

    def test_logarithmic_homogeneity(self, cone, rng):
        x = cone.random_interior(rng)
        nu = barrier_parameter(cone).nu
        for scale in (0.5, 3.0):
            assert barrier_value(cone, scale * x) == pytest.approx(barrier_value(cone, x) - nu * np.log(scale), abs=1e-9)
        assert barrier_gradient(cone, x) @ x == pytest.approx(-nu, rel=1e-9)

    def test_self_concordance(self, cone, rng):
        for _ in range(20):
            x = cone.random_interior(rng)
            d = _direction(cone, rng)
            curvature = d @ barrier_hessian_apply(cone, x, d)
            assert curvature > 0
            assert abs(barrier_third_directional(cone, x, d)) <= 2 * curvature ** 1.5 * (1 + 1e-7)


def test_solve_symmetric_indefinite_falls_back():
    matrix = np.array([[0.0, 1.0], [1.0, 0.0]])
    with pytest.warns(RuntimeWarning):
        x = solve_symmetric(matrix, np.array([1.0, 2.0]))
    np.testing.assert_allclose(x, [2.0, 1.0])
