import math

import numpy as np
import pytest

from trace_convexity.counterexamples import (
    CLOSED_FORM_TOL,
    LIMIT_TOL,
    ConstructionCatalog,
    dilation_limit,
    homogeneity_refutation,
    mid_power_closed_form,
    mid_power_counterexample,
    negative_power_counterexample,
    rank_one_reduction,
)
from trace_convexity.errors import DomainError
from trace_convexity.functionals import ParamPoint
from trace_convexity.linalg import RandomSpec, make_rng, random_contraction, random_psd
from trace_convexity.probes import Direction, OperatorProbe, ProbeConfig


class TestNegativePower:
    def test_closed_form_limit(self):
        result = negative_power_counterexample(-1)
        assert result.details["closed_form_limit"] == pytest.approx(-7.0 / 32.0, abs=1e-15)
        assert result.details["limit_margin"] == pytest.approx(-7.0 / 32.0, abs=1e-10)
        assert result.margin < 0.0

    @pytest.mark.parametrize("r", [-2.0, -0.5, 0.25])
    def test_margin_negative(self, r):
        result = negative_power_counterexample(r)
        assert result.margin < 0.0
        assert result.details["null_space_residual"] <= 1e-12

    def test_witness_replays_as_operator_witness(self):
        result = negative_power_counterexample(-1, t=1e-2)
        p, q = result.witness_exponents
        probe = OperatorProbe(p, q, ProbeConfig(dim=2))
        assert probe.margin_of(result.witness) < 0.0

    @pytest.mark.parametrize("r", [0.0, 0.5, 0.75])
    def test_domain(self, r):
        with pytest.raises(DomainError):
            negative_power_counterexample(r)


class TestMidPower:
    @pytest.mark.parametrize("r", [0.1, 0.5, 0.9])
    def test_margin_negative(self, r):
        result = mid_power_counterexample(r)
        assert result.margin < 0.0
        assert result.details["first_term"] <= 1e-20
        assert result.details["second_term"] <= 1e-20

    def test_closed_form(self):
        result = mid_power_counterexample(0.5)
        root5 = math.sqrt(5.0)
        assert np.allclose(result.details["eigenvalues"], [(3 - root5) / 2, (3 + root5) / 2])
        assert abs(result.details["direct"] - mid_power_closed_form(0.5)) <= CLOSED_FORM_TOL

    def test_witness_replays_as_operator_witness(self):
        result = mid_power_counterexample(0.5)
        p, q = result.witness_exponents
        probe = OperatorProbe(p, q, ProbeConfig(dim=2))
        assert probe.margin_of(result.witness) < 0.0

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.5])
    def test_domain(self, r):
        with pytest.raises(DomainError):
            mid_power_counterexample(r)


class TestHomogeneity:
    def test_margin_negative_below_threshold(self):
        baseline = homogeneity_refutation(0.5, 0.25, seed=4)
        threshold = baseline.details["analytic_threshold"]
        result = homogeneity_refutation(0.5, 0.25, scale=0.1 * threshold, seed=4)
        assert result.margin < 0.0
        above = homogeneity_refutation(0.5, 0.25, scale=10.0 * threshold, seed=4)
        assert above.margin > 0.0

    def test_bisection_matches_analytic_threshold(self):
        result = homogeneity_refutation(0.5, 0.5, seed=1)
        assert result.details["threshold"] is not None
        assert result.details["threshold"] == pytest.approx(
            result.details["analytic_threshold"], rel=1e-6
        )

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_default_scale_refutes(self, seed):
        result = homogeneity_refutation(0.5, 0.5, seed=seed)
        threshold = result.details["threshold"]
        assert threshold is not None
        assert result.limit_parameter == pytest.approx(0.1 * threshold)
        assert result.margin < 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_witness_replays_as_operator_witness(self, seed):
        result = homogeneity_refutation(0.5, 0.5, seed=seed)
        p, q = result.witness_exponents
        probe = OperatorProbe(p, q, ProbeConfig(dim=2), Direction.CONCAVE)
        assert probe.margin_of(result.witness) < 0.0

    def test_explicit_scale_must_be_positive(self):
        with pytest.raises(DomainError):
            homogeneity_refutation(0.5, 0.5, scale=0.0)

    @pytest.mark.parametrize("p, q", [(0.75, 0.5), (0.0, 0.5), (0.5, 1.5)])
    def test_domain(self, p, q):
        with pytest.raises(DomainError):
            homogeneity_refutation(p, q)


class TestLimits:
    @pytest.mark.parametrize("q", [-1.0, 1.0])
    def test_dilation_converges(self, q):
        spec = RandomSpec(seed=6, dim=2, cond_cap=10.0)
        rng = make_rng(6)
        k = random_contraction(spec, rng, norm=0.5)
        a, b = random_psd(spec, rng), random_psd(spec, rng)
        report = dilation_limit(k, a, b, ParamPoint(1.0, q, 1.0))
        assert report.converged
        assert report.final_gap <= LIMIT_TOL

    def test_dilation_schedule_direction(self):
        spec = RandomSpec(seed=6, dim=2)
        a = random_psd(spec)
        with pytest.raises(DomainError):
            dilation_limit(np.eye(2) * 0.5, a, a, ParamPoint(1.0, -1.0, 1.0), [1e-2, 1e-4])

    @pytest.mark.parametrize("r", [1.0, -1.0])
    def test_rank_one_converges(self, r):
        spec = RandomSpec(seed=3, dim=3, cond_cap=10.0)
        rng = make_rng(3)
        a, b = random_psd(spec, rng), random_psd(spec, rng)
        report = rank_one_reduction(a, b, np.array([1.0, 1.0j, 0.5]), 0.5, 1.0, r)
        assert report.converged

    def test_rank_one_zero_vector(self):
        a = random_psd(RandomSpec(seed=0, dim=2))
        with pytest.raises(DomainError):
            rank_one_reduction(a, a, np.zeros(2), 1, 1, 1)


class TestCatalog:
    def test_names(self):
        assert ConstructionCatalog().names() == [
            "dilation",
            "homogeneity",
            "mid-power",
            "negative-power",
            "rank-one",
        ]

    def test_aliases_resolve(self):
        catalog = ConstructionCatalog()
        assert catalog.aliases() == {"lemma33-mid": "mid-power", "lemma33-neg": "negative-power"}
        assert catalog.get("lemma33-neg").name == "negative-power"
        assert "lemma33-mid" not in catalog.names()
        described = {c["name"]: c["aliases"] for c in catalog.describe()}
        assert described["mid-power"] == ["lemma33-mid"]
        assert described["dilation"] == []

    def test_schema_from_signature(self):
        construction = ConstructionCatalog().get("homogeneity")
        properties = construction.parameters["properties"]
        assert construction.parameters["required"] == ["p", "q"]
        assert properties["dim"]["type"] == "integer"
        assert properties["scale"]["default"] is None
        assert "Exponent in (0, 1]" in properties["p"]["description"]

    def test_call_coerces_strings(self):
        result = ConstructionCatalog().call("mid-power", {"r": "1/2"})
        assert result.margin < 0.0
        assert result.details["r"] == 0.5

    def test_unknown_name(self):
        with pytest.raises(DomainError, match="Valid names"):
            ConstructionCatalog().get("bogus")

    def test_bad_arguments(self):
        catalog = ConstructionCatalog()
        with pytest.raises(DomainError):
            catalog.call("mid-power", {})
        with pytest.raises(DomainError):
            catalog.call("mid-power", {"r": "0.5", "x": "1"})
        with pytest.raises(DomainError):
            catalog.call("mid-power", {"r": "half"})

    def test_result_serializes(self):
        data = ConstructionCatalog().call("negative-power", {"r": "-1"}).to_dict()
        assert data["name"] == "negative-power"
        assert data["construction_data"]["X1"]["encoding"] == "hex-float"
        assert data["witness"]["kind"] == "operator"
