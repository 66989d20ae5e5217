import pytest
import numpy as np

from renyicones import verifier
from renyicones.cones import NonNeg, PSDCone, RenyiEpi, RenyiHypo, RenyiPerspEpi
from renyicones.errors import DimensionError, DomainError
from renyicones.tracefn import DirectionPair, TraceFnParams
from renyicones.verifier import (
    SUITES,
    NegPerspective,
    NegPsi,
    PsiConcave,
    SampleSpec,
    VerificationReport,
    central_difference_weights,
    check_barrier_parameter,
    check_compatibility,
    check_derivative_consistency,
    check_kron_identity,
    check_log_homogeneity,
    check_operator_concavity_line,
    check_scalar_ratio,
    check_self_concordance,
    explore_matrix_alpha_gt2,
    hansen_tomiyama_matrix,
    merge_reports,
    richardson_derivatives,
    run_suite,
    scalar_neg_psi_derivatives,
    suite_passed,
)

from conftest import PAULI_X


def _report(name="r", violation=0.0, tolerance=1.0, exploratory=False):
    return VerificationReport(
        property_name=name,
        samples=1,
        worst_violation=violation,
        worst_case_inputs={},
        passed=violation <= tolerance,
        seed=0,
        tolerance=tolerance,
        exploratory=exploratory,
    )


class TestSampleSpec:
    def test_cycles(self):
        spec = SampleSpec(dims=[1, 2], alpha_grid=[0.5, 1.5, 2])
        assert spec.dims == (1, 2)
        assert [spec.dim(i) for i in range(4)] == [1, 2, 1, 2]
        assert spec.alpha(4) == 1.5

    @pytest.mark.parametrize(
        "overrides",
        [{"seed": -1}, {"seed": 2 ** 64}, {"count": 0}, {"dims": ()}, {"dims": (0,)}, {"boundary_bias": 1.0}],
    )
    def test_validation(self, overrides):
        with pytest.raises(ValueError):
            SampleSpec(**overrides)


class TestReports:
    def test_merge(self):
        merged = merge_reports("all", [_report("a", 0.5), _report("b", 2.0)])
        assert merged.samples == 2
        assert merged.worst_violation == 2.0
        assert not merged.passed
        assert merged.details["worst_part"] == "b"

    def test_merge_errors(self):
        with pytest.raises(ValueError):
            merge_reports("none", [])
        with pytest.raises(ValueError):
            merge_reports("mixed", [_report(tolerance=1.0), _report(tolerance=2.0)])

    def test_suite_passed_ignores_exploratory(self):
        assert suite_passed([_report(), _report(violation=5.0, exploratory=True)])
        assert not suite_passed([_report(), _report(violation=5.0)])


class TestBarrierChecks:
    def test_nonneg_self_concordance_is_tight(self):
        report = check_self_concordance(NonNeg(1), SampleSpec(count=20))
        assert report.passed
        assert report.samples == 20
        assert report.details["worst_ratio"] == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize(
        "cone", [PSDCone(2), RenyiHypo(2, 0.75), RenyiEpi(2, 1.5), RenyiPerspEpi(2, 0.5)], ids=repr
    )
    def test_cone_checks_pass(self, cone):
        spec = SampleSpec(count=20)
        for report in (
            check_self_concordance(cone, spec),
            check_barrier_parameter(cone, spec),
            check_log_homogeneity(cone, spec),
        ):
            assert report.passed, report

    def test_barrier_parameter_is_attained(self):
        report = check_barrier_parameter(RenyiEpi(1, 1.5), SampleSpec(count=10))
        assert report.details["nu"] == 3.0
        assert report.details["supremum"] == pytest.approx(3.0, rel=1e-9)

    def test_log_homogeneity_scales(self):
        with pytest.raises(ValueError):
            check_log_homogeneity(NonNeg(1), SampleSpec(count=1), scales=(0.0,))

    def test_reproducible(self):
        spec = SampleSpec(seed=7, count=10)
        first = check_self_concordance(RenyiHypo(2, 0.5), spec)
        second = check_self_concordance(RenyiHypo(2, 0.5), spec)
        assert first.worst_violation == second.worst_violation
        assert first.seed == 7


class TestCompatibility:
    @pytest.mark.parametrize(
        "fn", [PsiConcave(0.5), PsiConcave(1.0), NegPsi(1.5), NegPsi(2.0), NegPerspective(0.75)], ids=repr
    )
    def test_beta_one_passes(self, fn):
        report = check_compatibility(fn, 1.0, SampleSpec(count=10))
        assert report.passed, report
        assert report.details["beta"] == 1.0

    def test_scalar_beta_below_ratio_fails(self):
        report = check_compatibility(NegPsi(2.0), 0.9, SampleSpec(count=10, dims=(1,)))
        assert not report.passed
        assert report.details["supremum_ratio"] == pytest.approx(3.0, rel=1e-9)

    @pytest.mark.parametrize("alpha", [2.0, 2.5, 3.0, 5.0])
    def test_scalar_ratio(self, alpha):
        compatibility, ratio = check_scalar_ratio(alpha, SampleSpec(count=20))
        assert compatibility.passed
        assert ratio.passed
        assert ratio.details["supremum_ratio"] == pytest.approx(2 * alpha - 1, rel=1e-9)

    def test_scalar_closed_form(self):
        second, third = scalar_neg_psi_derivatives(3.0, 1.0, 1.0, 1.0, -1.0)
        assert second == pytest.approx(-24.0)
        assert third == pytest.approx(-120.0)

    def test_domains(self):
        with pytest.raises(DomainError):
            PsiConcave(1.5)
        with pytest.raises(DomainError):
            NegPsi(0.75)
        with pytest.raises(DomainError):
            NegPerspective(1.0)
        with pytest.raises(DomainError):
            NegPsi(3.0).line_derivatives((np.eye(2), np.eye(2)), (np.eye(2), -np.eye(2)))
        with pytest.raises(ValueError):
            check_compatibility(NegPsi(1.5), 0.0, SampleSpec(count=1))


class TestFiniteDifferences:
    def test_weights(self):
        np.testing.assert_allclose(central_difference_weights(1, 1), [-0.5, 0.0, 0.5], atol=1e-14)
        np.testing.assert_allclose(central_difference_weights(2, 1), [1.0, -2.0, 1.0], atol=1e-14)
        with pytest.raises(ValueError):
            central_difference_weights(3, 1)

    def test_richardson_on_polynomial(self):
        derivatives = richardson_derivatives(lambda t: t ** 4, 1.0, 2, 0.1)
        np.testing.assert_allclose(derivatives, [1.0, 4.0, 12.0, 24.0, 24.0], rtol=1e-7)

    def test_richardson_on_exponential(self):
        derivatives = richardson_derivatives(np.exp, 0.0, 2, 0.03)
        np.testing.assert_allclose(derivatives, np.ones(5), rtol=1e-4)

    def test_sixth_derivative_step(self):
        t = verifier.HANSEN_TOMIYAMA_RANGE
        derivatives = richardson_derivatives(np.exp, t, 3, verifier.HANSEN_TOMIYAMA_STEP)
        np.testing.assert_allclose(derivatives, np.full(7, np.exp(t)), rtol=1e-2)

        # Rounding swamps the order 6 quotient at small steps
        sixth = richardson_derivatives(np.exp, t, 3, 2e-3)[6]
        assert abs(sixth - np.exp(t)) > 1.0

    def test_hansen_tomiyama_matrix(self):
        # x^4 at t = 1
        matrix = hansen_tomiyama_matrix([1.0, 4.0, 12.0, 24.0, 24.0], 2)
        np.testing.assert_allclose(matrix, [[6.0, 4.0], [4.0, 1.0]])
        with pytest.raises(ValueError):
            hansen_tomiyama_matrix([1.0, 2.0, 2.0], 2)

    def test_hansen_tomiyama_of_square_is_psd(self):
        matrix = hansen_tomiyama_matrix([1.0, 2.0, 2.0, 0.0, 0.0], 2)
        assert np.linalg.eigvalsh(matrix)[0] >= 0


class TestOperatorLines:
    @pytest.mark.parametrize("alpha", [0.75, 1.5])
    def test_passes(self, alpha):
        X = np.diag([1.0, 2.0])
        Y = np.eye(2) + 0.2 * PAULI_X
        direction = DirectionPair(0.5 * np.diag([1.0, -1.0]), 0.3 * PAULI_X)
        report = check_operator_concavity_line(
            TraceFnParams(alpha), (X, Y), direction, (1, 2), SampleSpec(count=2)
        )
        assert report.passed, report
        assert report.details["agree"]
        assert report.samples == 8

    def test_lift_dims(self):
        with pytest.raises(DimensionError):
            check_operator_concavity_line(
                TraceFnParams(0.75), (np.eye(2), np.eye(2)), DirectionPair(0 * PAULI_X, 0 * PAULI_X), (4,), SampleSpec()
            )

    def test_inadmissible_direction(self):
        with pytest.raises(DomainError):
            check_operator_concavity_line(
                TraceFnParams(0.75), (np.eye(2), np.eye(2)), DirectionPair(2 * PAULI_X, 0 * PAULI_X), (2,), SampleSpec()
            )


class TestKronIdentity:
    def test_identity_matrices(self):
        report = check_kron_identity(1.5, np.eye(2), np.eye(2))
        assert report.passed
        assert report.details["contracted"] == pytest.approx(-2.0)
        assert report.details["psi"] == pytest.approx(2.0)

    @pytest.mark.parametrize("alpha", [1.25, 1.5, 2.0])
    def test_random(self, alpha, pd_pair):
        X, Y, _, _ = pd_pair
        assert check_kron_identity(alpha, X, Y).passed

    def test_errors(self):
        with pytest.raises(DomainError):
            check_kron_identity(0.75, np.eye(2), np.eye(2))
        with pytest.raises(DimensionError):
            check_kron_identity(1.5, np.eye(2), np.eye(3))
        with pytest.raises(DimensionError):
            check_kron_identity(1.5, np.eye(4), np.eye(4))


class TestDerivativeConsistency:
    def test_trace_fn(self):
        report = check_derivative_consistency("trace-fn", SampleSpec(count=6, dims=(1, 2, 3)))
        assert report.passed, report
        assert report.details["third_error"] <= 1e-4

    @pytest.mark.parametrize("cone", [NonNeg(2), PSDCone(2), RenyiHypo(2, 0.5), RenyiPerspEpi(1, 0.75)], ids=repr)
    def test_barriers(self, cone):
        assert check_derivative_consistency(cone, SampleSpec(count=5)).passed

    def test_unknown_target(self):
        with pytest.raises(ValueError):
            check_derivative_consistency("psi", SampleSpec(count=1))


class TestExploration:
    def test_exploratory_report(self):
        report = explore_matrix_alpha_gt2(2.5, SampleSpec(count=2, dims=(2,)))
        assert report.exploratory
        assert report.details["conjectured_beta"] == pytest.approx(4.0 / 3.0)
        assert suite_passed([report])

    def test_needs_alpha_above_two(self):
        with pytest.raises(DomainError):
            explore_matrix_alpha_gt2(2.0, SampleSpec(count=1))


class TestSuites:
    def test_unknown(self):
        with pytest.raises(ValueError):
            run_suite("everything")

    def test_names(self):
        assert SUITES[0] == "all"
        assert "matrix-alpha-gt2" in SUITES

    def test_kron_suite(self):
        reports = run_suite("kron-identity", seed=3)
        assert len(reports) == 9
        assert all(report.samples == 20 for report in reports)
        assert suite_passed(reports)

    def test_scalar_suite(self):
        reports = run_suite("scalar-alpha-gt2")
        assert len(reports) == 8
        assert suite_passed(reports)

    @pytest.mark.parametrize(
        "name, check",
        [
            ("self-concordance", "check_self_concordance"),
            ("barrier-parameter", "check_barrier_parameter"),
            ("log-homogeneity", "check_log_homogeneity"),
        ],
    )
    def test_barrier_suites_cover_grid(self, monkeypatch, name, check):
        monkeypatch.setattr(verifier, check, lambda cone, spec: (cone, spec.count))
        planned = run_suite(name)

        assert {count for _, count in planned} == {1000}
        cones = {(type(cone), getattr(cone, "n", None), getattr(cone, "alpha", None)) for cone, _ in planned}
        for n in (1, 2, 3, 4):
            for alpha in (0.5, 0.6, 0.75, 0.9, 1.0):
                assert (RenyiHypo, n, alpha) in cones
            for alpha in (1.0, 1.25, 1.5, 1.75, 2.0):
                assert (RenyiEpi, n, alpha) in cones
            for alpha in (0.5, 0.75, 0.9):
                assert (RenyiPerspEpi, n, alpha) in cones

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "name", ["self-concordance", "barrier-parameter", "log-homogeneity", "compatibility", "operator-lines", "derivatives"]
    )
    def test_default_suites_pass(self, name):
        reports = run_suite(name)
        failed = [report.property_name for report in reports if not report.passed]
        assert not failed
