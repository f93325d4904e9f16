#!/usr/bin/env python3
"""
Command Line Interface for trace-convexity

Classify exponents, probe and scan convexity, replay counterexample
constructions, check the variational trace-power formulas and test data
processing. Data goes to stdout (or --out); status lines go to stderr.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, Optional

from . import __version__
from .channels import DpiConfig, dpi_scan
from .counterexamples import ConstructionCatalog
from .errors import ConsistencyError, DomainError
from .functionals import (
    CERTIFICATE_TOL,
    DEFAULT_VARIATIONAL_STEPS,
    ParamPoint,
    TripleParams,
    VariationalMode,
    parse_exponent,
    trace_power_variational,
)
from .linalg import RandomSpec, derive_seed, random_psd
from .probes import (
    Direction,
    GridSpec,
    ProbeConfig,
    epstein_probe,
    parse_values,
    probe_monotone_chain,
    probe_operator_convexity,
    probe_psi_equivalences,
    probe_trace_convexity,
    probe_triple_convexity,
    region_scan,
    scan_outcome,
)
from .regions import (
    RegionPair,
    RegionVerdict,
    classify,
    classify_epstein,
    classify_monotone_chain,
    classify_operator_map,
    classify_scalar,
    classify_triple,
)
from .report_writers import get_report_writer
from .session import ExperimentSession, RunManifest

SEED_ENV = "TCL_SEED"

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_IO = 3
# Unexpected failure, distinct from a found violation
EXIT_INTERNAL = 4

# psi_swap(diag(A, B), diag(A, B)) must match phi(A, B) + phi(B, A) this closely
BLOCK_IDENTITY_TOL = 1e-10
TABLE_FORMAT_COMMANDS = ("scan", "dpi")


@dataclass
class CommandResult:
    """What a command hands back for output: the report and whether it is alarming"""

    report: Any
    alarming: bool = False
    summary: Optional[str] = None


def status(message: str) -> None:
    print(message, file=sys.stderr)


def create_parser() -> argparse.ArgumentParser:
    """Create the command line argument parser"""
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument(
        "--seed", type=int, help=f"Base seed (default: 0; {SEED_ENV} overrides when set)"
    )
    common.add_argument("--dim", type=int, help="Matrix dimension (default: 2)")
    common.add_argument("--trials", type=int, help="Random trials per probe or point")
    common.add_argument("--tol", type=float, help="Relative violation tolerance of probes")
    common.add_argument("--out", type=Path, help="Output file; a manifest is written next to it")
    common.add_argument(
        "--format",
        choices=["csv", "json"],
        help="Output format (default: csv for scan/dpi, json otherwise)",
    )
    common.add_argument(
        "--workers", type=int, help="Parallel workers (default: available parallelism)"
    )
    common.add_argument(
        "--config-file", type=Path, help="Load probe or DPI settings from a JSON file"
    )
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        prog="trace-convexity",
        description="trace-convexity - joint convexity of Tr[(A^{q/2} B^p A^{q/2})^s] and relatives",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
Examples:
  %(prog)s classify --p 2 --q=-1/2 --s 2/3
  %(prog)s scan --p-values 0.5,1 --q-values 0.5 --s-values 0.5,1,2 --out scan.csv
  %(prog)s probe --kind operator --p -1 --q 1.9 --trials 2000
  %(prog)s counterexample mid-power --r 0.5
  %(prog)s dpi --alpha-values 1.1,1.5,2 --trials 500 --out dpi.csv
  %(prog)s replay scan.csv.manifest.json --out scan-replay.csv
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        sub = subparsers.add_parser(name, parents=[common], help=help_text, allow_abbrev=False)
        sub.set_defaults(handler=handler)
        return sub

    classify_parser = add("classify", cmd_classify, "Known convexity/concavity region")
    classify_parser.add_argument(
        "--map",
        choices=["trace", "operator", "triple", "scalar"],
        default="trace",
        help="Which map to classify (default: %(default)s)",
    )
    for name in ("p", "q"):
        classify_parser.add_argument(f"--{name}", required=True, help="Exponent, e.g. 0.5 or 2/3")
    classify_parser.add_argument("--s", help="Outer power (trace map)")
    classify_parser.add_argument("--r", help="Power of C (triple map)")

    scan_parser = add("scan", cmd_scan, "Classify and probe a (p, q, s) grid")
    scan_parser.add_argument("--p-values", required=True, help="Comma-separated p values")
    scan_parser.add_argument("--q-values", required=True, help="Comma-separated q values")
    scan_parser.add_argument("--s-values", required=True, help="Comma-separated s values")
    scan_parser.add_argument("--lambdas", help="Comma-separated convex weights (default: 0.5)")

    probe_parser = add("probe", cmd_probe, "Randomized convexity/concavity probe")
    probe_parser.add_argument(
        "--kind",
        choices=["trace", "psi-equivalence", "operator", "triple", "monotone-chain", "epstein"],
        default="trace",
        help="Map to probe (default: %(default)s)",
    )
    probe_parser.add_argument(
        "--direction", choices=[d.value for d in Direction], default=Direction.CONVEX.value
    )
    for name, text in (
        ("p", "Power of B"),
        ("q", "Power of A"),
        ("s", "Outer power"),
        ("r", "Power of C (triple)"),
        ("t", "Inner power (epstein)"),
        ("u", "Outer power (epstein)"),
    ):
        probe_parser.add_argument(f"--{name}", help=text)
    probe_parser.add_argument("--lambdas", help="Comma-separated convex weights (default: 0.5)")

    ce_parser = add(
        "counterexample",
        cmd_counterexample,
        "Replay an explicit construction; parameters follow as --name value",
    )
    ce_parser.add_argument("name", nargs="?", help="Construction name")
    ce_parser.add_argument("--list", action="store_true", help="List constructions and exit")

    var_parser = add("variational", cmd_variational, "Check the variational trace-power formula")
    var_parser.add_argument("--s", required=True, help="Power s > 0, s != 1")
    var_parser.add_argument(
        "--steps",
        type=int,
        default=DEFAULT_VARIATIONAL_STEPS,
        help="Search steps per sample (default: %(default)s)",
    )

    dpi_parser = add("dpi", cmd_dpi, "Data-processing test of the alpha-z Renyi entropies")
    dpi_parser.add_argument("--alpha-values", required=True, help="Comma-separated alphas")
    dpi_parser.add_argument(
        "--z-values", help="Comma-separated z values (default: z = alpha/2 for every alpha)"
    )
    dpi_parser.add_argument("--dims", help="Comma-separated dimensions (default: 2,3,4)")
    dpi_parser.add_argument("--env-dim", type=int, help="Environment dimension of random channels")

    replay_parser = add("replay", None, "Re-run a command from its manifest")
    replay_parser.add_argument("manifest", type=Path, help="Path to a .manifest.json file")

    return parser


def resolve_seed(cli_seed: Optional[int], file_seed: Optional[int], environ: Mapping[str, str]) -> int:
    """TCL_SEED, then --seed, then the config file, then 0"""
    raw = environ.get(SEED_ENV, "").strip()
    if raw:
        try:
            seed = int(raw)
        except ValueError as e:
            raise DomainError(f"{SEED_ENV} must be an integer, got {raw!r}") from e
    elif cli_seed is not None:
        seed = cli_seed
    elif file_seed is not None:
        seed = int(file_seed)
    else:
        seed = 0
    if not 0 <= seed < 2**64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def load_config_data(args: argparse.Namespace) -> Dict[str, Any]:
    """Settings from --config-file; a replay brings its own recorded copy"""
    if getattr(args, "config_data", None) is not None:
        return args.config_data
    if args.config_file is None:
        return {}
    with open(args.config_file, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise DomainError(f"Config file {args.config_file} must hold a JSON object")
    status(f"📝 Loaded configuration from: {args.config_file}")
    return data


def build_probe_config(args: argparse.Namespace, seed: int) -> ProbeConfig:
    data = dict(args.config_data)
    data["seed"] = seed
    overrides = {"dim": args.dim, "trials": args.trials, "tol_rel": args.tol}
    data.update({k: v for k, v in overrides.items() if v is not None})
    if getattr(args, "lambdas", None):
        data["lambdas"] = [float(x) for x in parse_values(args.lambdas)]
    return ProbeConfig.from_dict(data)


def build_dpi_config(args: argparse.Namespace, seed: int) -> DpiConfig:
    data = dict(args.config_data)
    data["seed"] = seed
    if args.trials is not None:
        data["trials"] = args.trials
    if args.env_dim is not None:
        data["env_dim"] = args.env_dim
    if args.dims:
        data["dims"] = [int(d) for d in parse_values(args.dims)]
    elif args.dim is not None:
        data["dims"] = [args.dim]
    return DpiConfig.from_dict(data)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise DomainError(f"{args.command} needs {', '.join(missing)}")


def cmd_classify(args: argparse.Namespace, session: ExperimentSession, seed: int) -> CommandResult:
    """Echo the known region of the chosen map"""
    if args.map == "trace":
        _require(args, "s")
        params = ParamPoint.parse(args.p, args.q, args.s)
        pair = classify(params)
        shown = params.to_dict()
    elif args.map == "triple":
        _require(args, "r")
        t = TripleParams(parse_exponent(args.p), parse_exponent(args.q), parse_exponent(args.r))
        pair = classify_triple(t)
        shown = t.to_dict()
    else:
        p, q = parse_exponent(args.p), parse_exponent(args.q)
        pair = classify_operator_map(p, q) if args.map == "operator" else classify_scalar(p, q)
        shown = {"p": str(p), "q": str(q)}
    report = {"map": args.map, "params": shown, **pair.to_dict()}
    summary = f"convexity: {pair.convexity.status.value}, concavity: {pair.concavity.status.value}"
    return CommandResult(report, summary=summary)


def cmd_scan(args: argparse.Namespace, session: ExperimentSession, seed: int) -> CommandResult:
    cfg = build_probe_config(args, seed)
    grid = GridSpec.parse(args.p_values, args.q_values, args.s_values)
    if not grid.points():
        raise DomainError("Scan grid is empty")
    report = region_scan(grid, cfg, workers=session.workers)
    counts = report.counts()
    summary = (
        f"{len(report)} points: {counts['agreement']} agreements, "
        f"{counts['violation']} violations, {counts['witness']} witnesses, "
        f"{counts['inconclusive']} inconclusive, {counts['open']} open, {counts['error']} errors"
    )
    return CommandResult(report, alarming=report.has_violation, summary=summary)


def cmd_probe(args: argparse.Namespace, session: ExperimentSession, seed: int) -> CommandResult:
    cfg = build_probe_config(args, seed)
    direction = Direction(args.direction)

    def side(pair: RegionPair) -> RegionVerdict:
        return pair.convexity if direction is Direction.CONVEX else pair.concavity

    extra: Dict[str, Any] = {}
    if args.kind in ("trace", "psi-equivalence"):
        _require(args, "p", "q", "s")
        params = ParamPoint.parse(args.p, args.q, args.s)
        region = side(classify(params))
        if args.kind == "trace":
            verdict = probe_trace_convexity(params, cfg, direction)
        else:
            equivalences = probe_psi_equivalences(params, cfg, direction)
            verdict = equivalences.verdicts["phi"]
            extra = {"equivalences": equivalences.to_dict()}
        shown = params.to_dict()
    elif args.kind == "operator":
        _require(args, "p", "q")
        p, q = parse_exponent(args.p), parse_exponent(args.q)
        region = side(classify_operator_map(p, q))
        verdict = probe_operator_convexity(p, q, cfg, direction)
        shown = {"p": str(p), "q": str(q)}
    elif args.kind == "triple":
        _require(args, "p", "q", "r")
        t = TripleParams(parse_exponent(args.p), parse_exponent(args.q), parse_exponent(args.r))
        region = side(classify_triple(t))
        verdict = probe_triple_convexity(t, cfg, direction)
        shown = t.to_dict()
    elif args.kind == "monotone-chain":
        _require(args, "q", "s")
        q, s = parse_exponent(args.q), parse_exponent(args.s)
        region = side(classify_monotone_chain(q, s))
        verdict = probe_monotone_chain(q, s, cfg)
        shown = {"q": str(q), "s": str(s)}
    else:
        _require(args, "t", "u")
        t, u = parse_exponent(args.t), parse_exponent(args.u)
        region = side(classify_epstein(t, u))
        d = random_psd(RandomSpec(seed=derive_seed(seed, 3), dim=cfg.dim, cond_cap=cfg.cond_cap))
        verdict = epstein_probe(d, float(t), float(u), cfg, direction)
        shown = {"t": str(t), "u": str(u)}

    outcome = scan_outcome(region, verdict)
    alarming = region.is_proven_positive and verdict.violated
    if extra:
        eq = extra["equivalences"]
        alarming = alarming or not eq["consistent"] or eq["block_identity_gap"] > BLOCK_IDENTITY_TOL
    report = {
        "kind": args.kind,
        "params": shown,
        "region": region.to_dict(),
        "outcome": outcome.value,
        "verdict": verdict.to_dict(),
        **extra,
    }
    summary = f"{verdict.kind} {direction.value}: {outcome.value} (worst margin {verdict.worst_margin:.3e})"
    return CommandResult(report, alarming=alarming, summary=summary)


def parse_construction_args(tokens: List[str]) -> Dict[str, str]:
    """['--r', '0.5', '--t=1e-6'] -> {'r': '0.5', 't': '1e-6'}"""
    arguments: Dict[str, str] = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token.startswith("--") or len(token) == 2:
            raise DomainError(f"Expected --name value, got {token!r}")
        key, sep, value = token[2:].partition("=")
        if not sep:
            if i + 1 >= len(tokens):
                raise DomainError(f"Missing value for {token}")
            value = tokens[i + 1]
            i += 1
        arguments[key.replace("-", "_")] = value
        i += 1
    return arguments


def cmd_counterexample(
    args: argparse.Namespace, session: ExperimentSession, seed: int
) -> CommandResult:
    catalog = ConstructionCatalog()
    if args.list:
        return CommandResult(catalog.describe(), summary=f"{len(catalog.names())} constructions")
    if args.name is None:
        raise DomainError(f"Name a construction: {', '.join(catalog.names())}")

    construction = catalog.get(args.name)
    arguments: Dict[str, Any] = parse_construction_args(args.construction_args)
    accepted = construction.parameters["properties"]
    if "seed" in accepted:
        arguments["seed"] = seed
    if "dim" in accepted and args.dim is not None:
        arguments["dim"] = args.dim

    result = catalog.call(args.name, arguments)
    report = {"construction": args.name, "arguments": arguments, "result": result.to_dict()}
    if hasattr(result, "margin"):
        summary = f"{args.name}: margin {result.margin:.6e}"
    else:
        summary = f"{args.name}: final gap {result.final_gap:.3e}, converged={result.converged}"
    return CommandResult(report, summary=summary)


def _variational_sample(index: int, s: float, mode: VariationalMode, dim: int, seed: int, steps: int):
    x = random_psd(RandomSpec(seed=derive_seed(seed, index), dim=dim))
    return trace_power_variational(x, s, mode, steps=steps, seed=derive_seed(seed, index, 1))


def cmd_variational(
    args: argparse.Namespace, session: ExperimentSession, seed: int
) -> CommandResult:
    s = float(parse_exponent(args.s))
    if not s > 0.0 or s == 1.0:
        raise DomainError(f"s must be positive and different from 1, got {s}")
    if args.steps < 0:
        raise DomainError(f"steps must be non-negative, got {args.steps}")
    mode = VariationalMode.SUP if s > 1.0 else VariationalMode.INF
    dim = 2 if args.dim is None else args.dim
    samples = 20 if args.trials is None else args.trials
    if dim < 1 or samples < 1:
        raise DomainError(f"dim and trials must be positive, got dim={dim}, trials={samples}")

    results = session.map(
        lambda i: _variational_sample(i, s, mode, dim, seed, args.steps), range(samples)
    )
    rows = [
        {
            "index": i,
            "trace_power": r.trace_power,
            "certificate_value": r.value,
            "search_value": r.search_value,
            "certificate_gap": r.certificate_gap,
            "search_excess": r.search_excess,
            "steps_run": r.steps_run,
        }
        for i, r in enumerate(results)
    ]
    max_gap = max(r.certificate_gap for r in results)
    max_excess = max(r.search_excess for r in results)
    report = {
        "s": s,
        "mode": mode.value,
        "dim": dim,
        "samples": samples,
        "max_certificate_gap": max_gap,
        "max_search_excess": max_excess,
        "results": rows,
    }
    alarming = max_gap > CERTIFICATE_TOL or max_excess > CERTIFICATE_TOL
    summary = f"{mode.value} s={s}: certificate gap {max_gap:.3e}, search excess {max_excess:.3e}"
    return CommandResult(report, alarming=alarming, summary=summary)


def cmd_dpi(args: argparse.Namespace, session: ExperimentSession, seed: int) -> CommandResult:
    cfg = build_dpi_config(args, seed)
    alphas = [float(a) for a in parse_values(args.alpha_values)]
    zs = None if args.z_values is None else [float(z) for z in parse_values(args.z_values)]
    report = dpi_scan(alphas, zs, cfg, workers=session.workers)
    counts = report.counts()
    summary = (
        f"{counts['points']} points: {counts['violations']} violations, "
        f"{counts['alarming']} on known-monotone points, {counts['errors']} errors"
    )
    return CommandResult(report, alarming=report.has_violation, summary=summary)


def _recorded_parameters(args: argparse.Namespace, argv: List[str]) -> Dict[str, Any]:
    options = {
        k: (str(v) if isinstance(v, Path) else v)
        for k, v in vars(args).items()
        if k not in ("handler", "config_data")
    }
    return {"argv": list(argv), "config_data": args.config_data, "options": options}


def emit(
    args: argparse.Namespace,
    argv: List[str],
    session: ExperimentSession,
    seed: int,
    result: CommandResult,
) -> None:
    """Print or write the report; with --out also record the manifest"""
    fmt = args.format or ("csv" if args.command in TABLE_FORMAT_COMMANDS else "json")
    writer = get_report_writer(fmt, args.command)
    if args.out is None:
        sys.stdout.write(writer.render(result.report))
    else:
        written = writer.write(session, args.out, result.report)
        manifest = RunManifest(
            command=args.command,
            parameters=_recorded_parameters(args, argv),
            seed=seed,
            version=__version__,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            outputs=[str(p) for p in written],
        )
        manifest_file = session.write_manifest(manifest, args.out)
        for path in written:
            status(f"📄 Wrote {path}")
        status(f"🧾 Manifest: {manifest_file}")
    if result.summary:
        status(f"📊 {result.summary}")


def replay_arguments(manifest: RunManifest, out: Optional[Path]) -> tuple:
    """Rebuild (args, argv) of a recorded run, optionally redirected to `out`"""
    if manifest.command == "replay":
        raise DomainError("A replay manifest cannot be replayed")
    argv = list(manifest.parameters.get("argv", []))
    if out is not None:
        argv += ["--out", str(out)]
    try:
        args, extra = create_parser().parse_known_args(argv)
    except SystemExit as e:
        raise DomainError(f"Manifest arguments do not parse: {argv}") from e
    args.construction_args = extra
    args.seed = manifest.seed
    args.config_data = manifest.parameters.get("config_data") or {}
    return args, argv


def run(args: argparse.Namespace, argv: List[str], environ: Mapping[str, str]) -> int:
    """Execute one parsed command and map its outcome to an exit code"""
    try:
        session = ExperimentSession(name=args.command, workers=args.workers)
    except ValueError as e:
        status(f"❌ {e}")
        return EXIT_USAGE

    if args.verbose:
        logging.basicConfig(level=logging.DEBUG)
        session.logger.setLevel(logging.DEBUG)

    try:
        with session:
            if args.command == "replay":
                manifest = RunManifest.load(args.manifest)
                status(f"🔁 Replaying {manifest.command} (seed {manifest.seed}, v{manifest.version})")
                replayed_args, replayed_argv = replay_arguments(manifest, args.out)
                replayed_args.verbose = replayed_args.verbose or args.verbose
                return run(replayed_args, replayed_argv, environ={})

            args.config_data = load_config_data(args)
            seed = resolve_seed(args.seed, args.config_data.get("seed"), environ)
            result = args.handler(args, session, seed)
            emit(args, argv, session, seed, result)

    except OSError as e:
        status(f"❌ I/O error: {e}")
        return EXIT_IO
    except ConsistencyError as e:
        status(f"❌ Consistency check failed: {e}")
        return EXIT_VIOLATION
    except ValueError as e:
        status(f"❌ {e}")
        return EXIT_USAGE
    except Exception as e:
        status(f"❌ Internal error: {e}")
        if args.verbose:
            import traceback

            traceback.print_exc()
        return EXIT_INTERNAL

    if result.alarming:
        status("⚠️  Violation where the inequality is known to hold")
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI function"""
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = create_parser()
    try:
        args, extra = parser.parse_known_args(argv)
        if extra and args.command != "counterexample":
            parser.error(f"unrecognized arguments: {' '.join(extra)}")
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    args.construction_args = extra
    return run(args, argv, os.environ)


if __name__ == "__main__":
    sys.exit(main())
