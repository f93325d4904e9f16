import json

import numpy as np
import pytest

from trace_convexity.errors import DomainError
from trace_convexity.functionals import ParamPoint, TripleParams
from trace_convexity.linalg import PsdMatrix, RandomSpec, random_psd
from trace_convexity.probes import (
    Direction,
    GridSpec,
    ProbeConfig,
    ScanOutcome,
    TraceProbe,
    Witness,
    epstein_probe,
    parse_values,
    probe_monotone_chain,
    probe_operator_convexity,
    probe_psi_convexity,
    probe_psi_equivalences,
    probe_trace_convexity,
    probe_triple_convexity,
    region_scan,
)

HALF_POWERS = ParamPoint.parse("1/2", "1/2", "1")


class TestProbeConfig:
    @pytest.mark.parametrize(
        "changes",
        [
            {"trials": 0},
            {"dim": 1},
            {"lambdas": ()},
            {"lambdas": (1.0,)},
            {"tol_rel": 0.0},
            {"cond_cap": 1.0},
            {"seed": -1},
            {"refine_iterations": -1},
        ],
    )
    def test_validation(self, changes):
        with pytest.raises(ValueError):
            ProbeConfig(**changes)

    def test_from_dict_rejects_unknown_keys(self):
        with pytest.raises(ValueError):
            ProbeConfig.from_dict({"trials": 10, "samples": 3})

    def test_dict_round_trip(self):
        cfg = ProbeConfig(dim=3, trials=7, lambdas=(0.25, 0.5), seed=9)
        assert ProbeConfig.from_dict(cfg.to_dict()) == cfg


class TestTraceProbe:
    def test_finds_violation_of_convexity_for_concave_map(self, fast_config):
        verdict = probe_trace_convexity(HALF_POWERS, fast_config, Direction.CONVEX)
        assert verdict.violated
        assert verdict.worst_margin < -fast_config.tol_rel
        assert verdict.witness is not None
        assert verdict.trials_run == fast_config.trials

    def test_witness_replays(self, fast_config):
        verdict = probe_trace_convexity(HALF_POWERS, fast_config)
        probe = TraceProbe(HALF_POWERS, fast_config)
        replayed = probe.margin_of(verdict.witness)
        assert replayed == pytest.approx(verdict.worst_margin, rel=1e-8, abs=1e-12)

        decoded = Witness.from_dict(json.loads(json.dumps(verdict.witness.to_dict())))
        assert probe.margin_of(decoded) == replayed

    def test_witness_survives_embedding(self, fast_config):
        verdict = probe_trace_convexity(HALF_POWERS, fast_config)
        embedded = verdict.witness.embed(extra=2)
        assert embedded.dim == fast_config.dim + 2
        bigger = TraceProbe(HALF_POWERS, fast_config.replace(dim=embedded.dim))
        assert bigger.margin_of(embedded) < 0.0

    def test_no_violation_inside_concave_region(self, fast_config):
        params = ParamPoint.parse("1", "1", "1/2")
        verdict = probe_trace_convexity(params, fast_config, Direction.CONCAVE)
        assert not verdict.violated
        assert verdict.refined

    def test_no_violation_inside_convex_region(self, fast_config):
        params = ParamPoint.parse("2", "-1", "1")
        assert not probe_trace_convexity(params, fast_config).violated

    def test_deterministic(self, fast_config):
        first = probe_trace_convexity(HALF_POWERS, fast_config)
        second = probe_trace_convexity(HALF_POWERS, fast_config)
        assert first.worst_margin == second.worst_margin
        assert np.array_equal(first.witness.first[0], second.witness.first[0])

    def test_psi_with_identity_matches_trace_probe(self, fast_config):
        trace = probe_trace_convexity(HALF_POWERS, fast_config)
        psi = probe_psi_convexity(np.eye(fast_config.dim), HALF_POWERS, fast_config)
        assert psi.kind == "psi"
        assert psi.worst_margin == trace.worst_margin

    def test_endpoint_values_are_reused(self):
        class Counting(TraceProbe):
            calls = 0

            def value(self, args):
                Counting.calls += 1
                return super().value(args)

        cfg = ProbeConfig(trials=1, lambdas=(0.25, 0.5, 0.75), refine_iterations=0)
        Counting(ParamPoint.parse("2", "-1", "1"), cfg).run()
        assert Counting.calls == 5

    def test_witness_kind_is_checked(self, fast_config):
        verdict = probe_psi_convexity(np.eye(fast_config.dim), HALF_POWERS, fast_config)
        with pytest.raises(DomainError):
            TraceProbe(HALF_POWERS, fast_config).margin_of(verdict.witness)


class TestOtherProbes:
    def test_operator_convex_region(self, fast_config):
        assert not probe_operator_convexity(-1, 2, fast_config).violated

    def test_operator_square_map_is_not_convex(self, fast_config):
        assert probe_operator_convexity(2, 2, fast_config).violated

    def test_operator_zero_exponent(self, fast_config):
        with pytest.raises(DomainError):
            probe_operator_convexity(0, 2, fast_config)

    def test_triple_convex_region(self, fast_config):
        verdict = probe_triple_convexity(TripleParams(-0.5, 2, -0.25), fast_config)
        assert verdict.kind == "triple"
        assert len(verdict.witness.first) == 3
        assert not verdict.violated

    def test_monotone_chain(self, fast_config):
        assert not probe_monotone_chain(-0.5, 1.5, fast_config).violated
        with pytest.raises(DomainError):
            probe_monotone_chain(0.5, 1.5, fast_config)
        with pytest.raises(DomainError):
            probe_monotone_chain(-0.5, 0.5, fast_config)

    def test_epstein_concave(self, fast_config):
        d = random_psd(RandomSpec(seed=1, dim=fast_config.dim))
        verdict = epstein_probe(d, 0.5, 2.0, fast_config)
        assert verdict.direction is Direction.CONCAVE
        assert len(verdict.witness.fixed) == 1
        assert not verdict.violated

    def test_epstein_domain(self, fast_config):
        d = PsdMatrix(np.eye(fast_config.dim))
        with pytest.raises(DomainError):
            epstein_probe(d, 2.0, 1.0, fast_config)
        with pytest.raises(DomainError):
            epstein_probe(PsdMatrix(np.eye(3)), 0.5, 1.0, fast_config)


def test_psi_equivalences_agree(fast_config):
    report = probe_psi_equivalences(HALF_POWERS, fast_config)
    assert set(report.verdicts) == {"phi", "psi_unitary", "phi_doubled"}
    assert report.block_identity_gap <= 1e-10
    assert all(report.agreement.values())
    assert report.transported_margin is not None
    assert report.consistent


class TestRegionScan:
    def test_grid_parsing(self):
        grid = GridSpec.parse("1/2", "1/2,1", "0.5,1")
        assert len(grid.points()) == 4
        assert grid.points()[1].as_floats() == (0.5, 0.5, 1.0)
        assert parse_values("") == ()
        with pytest.raises(DomainError):
            GridSpec.parse("0", "1", "1")
        with pytest.raises(DomainError):
            GridSpec.parse("1", "1", "0")

    def test_outcomes(self, fast_config):
        grid = GridSpec.parse("1/2", "1/2", "1/2,1")
        report = region_scan(grid, fast_config, workers=1)
        assert len(report) == 2
        assert [row.index for row in report.rows] == [0, 1]
        for row in report.rows:
            assert row.outcome_concave is ScanOutcome.AGREEMENT
            assert row.outcome_convex in (ScanOutcome.WITNESS, ScanOutcome.INCONCLUSIVE)
        assert not report.has_violation

    def test_open_point(self, fast_config):
        grid = GridSpec.parse("3/2", "-1/4", "0.9")
        row = region_scan(grid, fast_config, workers=1).rows[0]
        assert row.outcome_convex is ScanOutcome.OPEN

    def test_independent_of_worker_count(self, fast_config):
        grid = GridSpec.parse("1/2,1", "1/2", "1/2,1")
        serial = region_scan(grid, fast_config, workers=1)
        parallel = region_scan(grid, fast_config, workers=3)
        assert json.dumps(serial.to_dict()) == json.dumps(parallel.to_dict())

    def test_witness_ids(self, fast_config):
        report = region_scan(GridSpec.parse("1/2", "1/2", "1"), fast_config, workers=1)
        row = report.rows[0]
        assert row.convex.violated
        assert row.witness_id == "w00000"
