"""Acceptance-size runs; selected with `pytest -m slow`."""

import numpy as np
import pytest

from trace_convexity.channels import (
    DpiConfig,
    QuantumChannel,
    dpi_check,
    dpi_scan,
    random_state,
)
from trace_convexity.counterexamples import (
    CLOSED_FORM_TOL,
    LIMIT_TOL,
    dilation_limit,
    mid_power_counterexample,
    negative_power_counterexample,
)
from trace_convexity.functionals import (
    ParamPoint,
    TripleParams,
    VariationalMode,
    trace_power_variational,
    variational_objective,
)
from trace_convexity.linalg import (
    RandomSpec,
    make_rng,
    random_contraction,
    random_psd,
    random_unitary,
)
from trace_convexity.probes import (
    Direction,
    ProbeConfig,
    probe_operator_convexity,
    probe_trace_convexity,
    probe_triple_convexity,
)
from trace_convexity.regions import classify_concavity, classify_convexity, classify_triple

pytestmark = pytest.mark.slow

QUARTERS = (0.25, 0.5, 0.75)


def _large_s_points():
    rng = make_rng(2024)
    for index in range(20):
        p = rng.uniform(1.1, 2.0)
        q = rng.uniform(-0.9, -0.05)
        threshold = min(1.0 / (p - 1.0), 1.0 / (1.0 + q))
        for offset in (0.0, 0.5, 2.0):
            yield index, ParamPoint(p, q, threshold + offset)


@pytest.mark.parametrize("index, params", list(_large_s_points()), ids=str)
def test_convex_above_large_s_threshold(index, params):
    assert classify_convexity(params).is_proven_positive
    cfg = ProbeConfig(dim=2 + index % 3, trials=1000, lambdas=QUARTERS, seed=index)
    verdict = probe_trace_convexity(params, cfg, Direction.CONVEX)
    assert not verdict.violated, verdict.worst_margin


def _p2_points():
    for q in (-1.0, -0.75, -0.5, -0.25):
        for s in (1.0 / (2.0 + q), 0.9, 1.0, 2.0):
            if s >= 1.0 / (2.0 + q):
                yield ParamPoint(2.0, q, s)


@pytest.mark.parametrize("params", list(_p2_points()), ids=str)
@pytest.mark.parametrize("dim", [2, 3, 4])
def test_convex_on_p2_line(params, dim):
    assert classify_convexity(params).is_proven_positive
    cfg = ProbeConfig(dim=dim, trials=1000, lambdas=QUARTERS, seed=dim)
    verdict = probe_trace_convexity(params, cfg, Direction.CONVEX)
    assert not verdict.violated, verdict.worst_margin


@pytest.mark.parametrize("p", [-1.0, -0.5, -0.1])
def test_operator_convex_at_q2(p):
    cfg = ProbeConfig(dim=2, trials=1000, lambdas=QUARTERS, seed=11)
    assert not probe_operator_convexity(p, 2.0, cfg).violated


def test_negative_power_limit_matches_closed_form():
    for r in np.concatenate([np.linspace(-3.0, -0.05, 40), np.linspace(0.05, 0.45, 10)]):
        details = negative_power_counterexample(r).details
        assert details["limit_margin"] == pytest.approx(details["closed_form_limit"], abs=1e-8)
        assert details["closed_form_limit"] < 0.0


def test_mid_power_closed_form_on_unit_interval():
    for r in np.linspace(0.02, 0.98, 49):
        result = mid_power_counterexample(r)
        assert abs(result.details["direct"] - result.details["closed_form"]) <= CLOSED_FORM_TOL
        assert result.details["closed_form"] < 0.0


@pytest.mark.parametrize("q", [-1.0, 1.0])
def test_dilation_limits(q):
    for seed in range(20):
        spec = RandomSpec(seed=seed, dim=2, cond_cap=10.0)
        rng = make_rng(seed)
        k = random_contraction(spec, rng, norm=0.5)
        a, b = random_psd(spec, rng), random_psd(spec, rng)
        report = dilation_limit(k, a, b, ParamPoint(1.0, q, 1.0))
        assert report.converged, (seed, report.final_gap)
        assert report.final_gap <= LIMIT_TOL


def test_dilation_limit_at_negative_q_and_s2():
    params = ParamPoint(1.0, -0.5, 2.0)
    for seed in range(20):
        spec = RandomSpec(seed=seed, dim=2, cond_cap=10.0)
        rng = make_rng(seed)
        k = random_contraction(spec, rng, norm=0.5)
        a, b = random_psd(spec, rng), random_psd(spec, rng)
        report = dilation_limit(k, a, b, params)
        assert report.final_gap <= LIMIT_TOL, (seed, report.final_gap)


def _concave_points():
    rng = make_rng(77)
    for _ in range(20):
        p, q = rng.uniform(0.05, 1.0, 2)
        yield ParamPoint(p, q, rng.uniform(0.1, 1.0) / (p + q))


@pytest.mark.parametrize("params", list(_concave_points()), ids=str)
def test_concave_below_reciprocal_sum(params):
    assert classify_concavity(params).is_proven_positive
    cfg = ProbeConfig(dim=2, trials=500, lambdas=QUARTERS, seed=5)
    assert not probe_trace_convexity(params, cfg, Direction.CONCAVE).violated


def _beyond_concave_points():
    rng = make_rng(78)
    for _ in range(10):
        p, q = rng.uniform(0.1, 1.0, 2)
        yield ParamPoint(p, q, 1.0 / (p + q) + 0.25)


@pytest.mark.parametrize("params", list(_beyond_concave_points()), ids=str)
def test_concavity_fails_above_reciprocal_sum(params):
    assert classify_concavity(params).is_proven_negative
    cfg = ProbeConfig(dim=2, trials=10_000, seed=6)
    verdict = probe_trace_convexity(params, cfg, Direction.CONCAVE)
    assert verdict.worst_margin < -1e-6


def test_operator_witnesses():
    cfg = ProbeConfig(dim=2, trials=1000, lambdas=QUARTERS, seed=12)
    convex = probe_operator_convexity(-1.0, 1.9, cfg, Direction.CONVEX)
    concave = probe_operator_convexity(0.5, 0.5, cfg, Direction.CONCAVE)
    assert convex.violated, convex.worst_margin
    assert concave.violated, concave.worst_margin


@pytest.mark.parametrize("mode", list(VariationalMode))
def test_variational_certificate(mode):
    rng = make_rng(31, 0 if mode is VariationalMode.SUP else 1)
    for index in range(200):
        dim = 2 + index % 3
        x = random_psd(RandomSpec(seed=index, dim=dim, cond_cap=100.0), rng)
        s = rng.uniform(1.1, 3.0) if mode is VariationalMode.SUP else rng.uniform(0.1, 0.95)
        result = trace_power_variational(x, s, mode, steps=50, seed=index)
        assert result.certificate_gap <= 1e-10
        assert result.search_excess <= 1e-10

        if index < 50:
            z = random_psd(RandomSpec(seed=index, dim=dim, cond_cap=100.0), rng)
            value = variational_objective(x, z, s)
            if mode is VariationalMode.SUP:
                assert value <= result.value + 1e-10 * abs(result.value)
            else:
                assert value >= result.value - 1e-10 * abs(result.value)


def test_data_processing_at_half_alpha():
    cfg = DpiConfig(dims=(2, 3, 4), trials=1000, seed=9)
    report = dpi_scan([1.1, 1.5, 2.0], None, cfg, workers=1)
    for row in report.rows:
        assert row.known_monotone
        assert row.error is None
        assert row.violations == 0
        assert row.worst_margin >= -1e-8


@pytest.mark.parametrize("alpha", [1.1, 1.5, 2.0])
def test_unitary_channels_preserve_divergence(alpha):
    for seed in range(30):
        dim = 2 + seed % 3
        rng = make_rng(seed, 1)
        rho = random_state(dim, rng=rng)
        sigma = random_state(dim, rng=rng)
        ch = QuantumChannel.unitary(random_unitary(RandomSpec(seed=seed, dim=dim), rng))
        assert abs(dpi_check(rho, sigma, alpha, ch).margin) <= 1e-9


@pytest.mark.parametrize("p, r", [(-0.5, -0.25), (-0.25, -0.25), (-0.6, -0.3), (-0.1, -0.7)])
def test_triple_trace_convex_not_concave(p, r):
    t = TripleParams(p, 2.0, r)
    assert classify_triple(t).convexity.is_proven_positive
    cfg = ProbeConfig(dim=2, trials=1000, lambdas=QUARTERS, seed=13)
    assert not probe_triple_convexity(t, cfg, Direction.CONVEX).violated
    assert probe_triple_convexity(t, cfg, Direction.CONCAVE).violated
