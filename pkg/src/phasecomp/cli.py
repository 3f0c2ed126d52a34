"""Command-line entry point for the phase-compression experiments.

Subcommands: compress-demo, phase-loss, teleport-demo, lemma1, nogo,
residual, optimize. Every run carries an explicit seed (default 0) that
governs all stochastic choices; parameters may come from flags or from a
JSON file via --config, with flags taking precedence and unknown file keys
rejected. Reports go to stdout or, with --out, to a file whose bytes depend
only on config, seed, and artifact version. Timing is printed to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .nogo import (
    CompressionScenario,
    constraint_residual,
    narrow_support_candidate,
    orthogonality_witness,
    phase_assignment_grid,
    support_structure_check,
    verify_constraint_matrix,
)
from .protocols import (
    PartiallyKnownPair,
    compress_two_equatorial,
    extract_partially_known,
    phase_loss_scan,
    predicted_retrieved_state,
    reconstruct_two_qubit,
    teleport_qubit,
)
from .reporting import (
    SCHEMA_VERSION,
    Report,
    render_report,
    state_payload,
    write_csv,
    write_report,
)
from .search import optimize_retrieval
from .states import fidelity, measure_site

TWO_PI = 2.0 * np.pi


class ConfigError(ValueError):
    """Invalid command line or configuration file."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise ConfigError(message)


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict
    seed: int
    out: "str | None" = None
    csv: "str | None" = None

    def echo(self) -> dict:
        """Everything needed to reproduce the payload (paths excluded)."""
        return {"command": self.command, "seed": self.seed, **self.params}


@dataclass(frozen=True)
class _Param:
    name: str
    type: type
    help: str
    default: object = None
    required: bool = False
    choices: tuple = ()
    check: "Callable | None" = None

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


def _range_check(lo: int, hi: int):
    def check(name: str, value) -> None:
        if not lo <= value <= hi:
            raise ConfigError(f"--{name} out of range: must be in {lo}..{hi}, got {value}")

    return check


def _min_check(lo):
    def check(name: str, value) -> None:
        if value < lo:
            raise ConfigError(f"--{name} must be >= {lo}, got {value}")

    return check


def _angle_check(name: str, value) -> None:
    if not 0.0 <= value < TWO_PI:
        raise ConfigError(f"--{name} must be in [0, 2*pi), got {value}")


def _polar_check(name: str, value) -> None:
    if not 0.0 <= value <= np.pi:
        raise ConfigError(f"--{name} must be in [0, pi], got {value}")


def _positive_check(name: str, value) -> None:
    if value <= 0:
        raise ConfigError(f"--{name} must be positive, got {value}")


def _finalize_phase_loss(params: dict) -> None:
    if params["phi2_a"] == params["phi2_b"]:
        raise ConfigError("--phi2-a and --phi2-b must be distinct")


def _finalize_scenario(params: dict) -> None:
    total = params["n"] + params["p"]
    if params["m"] > total:
        raise ConfigError(f"--m must be <= n + p = {total}, got {params['m']}")
    if params["d"] ** total > 125:
        raise ConfigError(
            f"d^(n+p) = {params['d'] ** total} exceeds the supported size 125"
        )


def _finalize_optimize(params: dict) -> None:
    total = params["n"] + params["p"]
    if total > 4:
        raise ConfigError(f"n + p must be <= 4, got {total}")
    if params["m"] > total:
        raise ConfigError(f"--m must be <= n + p = {total}, got {params['m']}")


def _run_compress(params: dict, seed: int) -> dict:
    mode = params["outcome"]
    forced = None if mode == "sample" else int(mode)
    record, retrieved = compress_two_equatorial(
        params["phi1"], params["phi2"], outcome=forced, seed=seed
    )
    predicted = predicted_retrieved_state(params["phi1"], params["phi2"], record.outcome)
    return {
        "outcome": record.outcome,
        "probability": record.probability,
        "retrieved_state": state_payload(retrieved),
        "predicted_state": state_payload(predicted),
        "fidelity_to_prediction": fidelity(retrieved, predicted),
    }


def _run_phase_loss(params: dict, seed: int) -> dict:
    grid = np.linspace(0.0, TWO_PI, params["grid_points"], endpoint=False)
    fids = phase_loss_scan(grid, (params["phi2_a"], params["phi2_b"]), params["outcome"])
    return {
        "outcome": params["outcome"],
        "phi2_pair": [params["phi2_a"], params["phi2_b"]],
        "table": [
            {"phi1": float(phi1), "fidelity": float(f)} for phi1, f in zip(grid, fids)
        ],
    }


def _run_teleport(params: dict, seed: int) -> dict:
    theta, phi = params["theta"], params["phi"]
    pair = PartiallyKnownPair(np.cos(theta / 2.0), np.sin(theta / 2.0) * np.exp(1j * phi))
    original = pair.two_qubit_state()
    extracted = extract_partially_known(pair)
    sender_qubit = measure_site(extracted, 1, outcome=0).post_state
    branches = []
    for m1 in (0, 1):
        for m2 in (0, 1):
            received = teleport_qubit(sender_qubit, branch=(m1, m2))
            final = reconstruct_two_qubit(received)
            branches.append({"branch": [m1, m2], "fidelity": fidelity(final, original)})
    sampled = reconstruct_two_qubit(teleport_qubit(sender_qubit, seed=seed))
    return {
        "theta": theta,
        "phi": phi,
        "branch_fidelities": branches,
        "sampled_fidelity": fidelity(sampled, original),
        "original_state": state_payload(original),
        "sampled_reconstructed_state": state_payload(sampled),
    }


def _run_lemma1(params: dict, seed: int) -> dict:
    check = verify_constraint_matrix(params["d"], params["n"], params["tol"])
    passed = (
        check.nonsingular
        and check.oracle_relative_gap <= 1e-6
        and check.construction_mismatch <= 1e-12
        and check.min_singular_value > 1e-8
        and check.zero_solution_norm <= 1e-12
        and check.min_normalized_row_residual > 1e-8
    )
    return {
        "d": check.d,
        "n": check.n,
        "tol": check.tol,
        "det_magnitude": check.det_magnitude,
        "oracle_magnitude": check.oracle_magnitude,
        "oracle_relative_gap": check.oracle_relative_gap,
        "construction_mismatch": check.construction_mismatch,
        "min_singular_value": check.min_singular_value,
        "zero_solution_norm": check.zero_solution_norm,
        "min_normalized_row_residual": check.min_normalized_row_residual,
        "nonsingular": check.nonsingular,
        "verdict": "pass" if passed else "fail",
    }


def _scenario(params: dict) -> CompressionScenario:
    return CompressionScenario(params["d"], params["n"], params["m"], params["p"])


def _certificate_payload(cert) -> dict:
    return {
        "scenario": {
            "d": cert.scenario.d,
            "n": cert.scenario.n,
            "m": cert.scenario.m,
            "p": cert.scenario.p,
        },
        "verdict": cert.verdict,
        "witness_kind": cert.witness_kind,
        "evidence": dict(cert.evidence),
    }


def _run_nogo(params: dict, seed: int) -> dict:
    return _certificate_payload(orthogonality_witness(_scenario(params)))


_CANDIDATES = {
    "identity": lambda scenario: np.eye(scenario.matrix_size, dtype=complex),
    "zero": lambda scenario: np.zeros((scenario.matrix_size,) * 2, dtype=complex),
    "narrow-support": narrow_support_candidate,
}


def _run_residual(params: dict, seed: int) -> dict:
    scenario = _scenario(params)
    candidate = _CANDIDATES[params["candidate"]](scenario)
    grid_residual = constraint_residual(
        candidate, scenario, phase_assignment_grid(scenario.d, scenario.n)
    )
    rng = np.random.default_rng(seed)
    samples = rng.uniform(0.0, TWO_PI, size=(params["samples"], scenario.n, scenario.d))
    random_residual = constraint_residual(candidate, scenario, samples)
    return {
        "candidate": params["candidate"],
        "grid_residual": grid_residual,
        "random_residual": random_residual,
        "support_check": _certificate_payload(support_structure_check(candidate, scenario)),
    }


def _run_optimize(params: dict, seed: int) -> dict:
    report = optimize_retrieval(
        _scenario(params),
        budget=params["budget"],
        restarts=params["restarts"],
        seed=seed,
        sample_count=params["samples"],
    )
    return {
        "scenario": {
            "d": report.scenario.d,
            "n": report.scenario.n,
            "m": report.scenario.m,
            "p": report.scenario.p,
        },
        "best_mean_fidelity": report.best_mean_fidelity,
        "worst_sample_fidelity": report.worst_sample_fidelity,
        "evaluations": report.evaluations,
        "sample_count": report.sample_count,
        "trace": [[int(i), float(v)] for i, v in report.trace],
        "best_encoder_params": list(report.best_encoder.params),
        "best_decoder_params": list(report.best_decoder.params),
    }


def _phase_loss_csv(report: Report):
    rows = [(row["phi1"], row["fidelity"]) for row in report.results["table"]]
    return ["phi1", "fidelity"], rows


def _optimize_csv(report: Report):
    rows = [(i, v) for i, v in report.results["trace"]]
    return ["evaluation", "best_fidelity"], rows


@dataclass(frozen=True)
class _Command:
    name: str
    help: str
    params: tuple
    runner: Callable
    finalize: "Callable | None" = None
    csv_table: "Callable | None" = None


_SCENARIO_PARAMS = (
    _Param("d", int, "qudit dimension", required=True, check=_range_check(2, 5)),
    _Param("n", int, "number of input qudits", required=True, check=_range_check(1, 3)),
    _Param("m", int, "number of output qudits", required=True, check=_min_check(0)),
    _Param("p", int, "number of ancilla qudits", default=0, check=_min_check(0)),
)

_COMMANDS = {
    cmd.name: cmd
    for cmd in (
        _Command(
            "compress-demo",
            "compress two equatorial qubits into one and compare with the prediction",
            (
                _Param("phi1", float, "first phase angle, radians", required=True, check=_angle_check),
                _Param("phi2", float, "second phase angle, radians", required=True, check=_angle_check),
                _Param(
                    "outcome",
                    str,
                    "measurement branch: force 0 or 1, or sample with the seed",
                    default="sample",
                    choices=("0", "1", "sample"),
                ),
            ),
            _run_compress,
        ),
        _Command(
            "phase-loss",
            "scan how distinguishable two second-angle values stay after compression",
            (
                _Param("grid_points", int, "number of phi1 grid points in [0, 2*pi)", default=41, check=_min_check(1)),
                _Param("phi2_a", float, "first phi2 value, radians", default=0.0, check=_angle_check),
                _Param("phi2_b", float, "second phi2 value, radians", default=float(np.pi), check=_angle_check),
                _Param("outcome", int, "forced measurement branch", default=0, choices=(0, 1)),
            ),
            _run_phase_loss,
            finalize=_finalize_phase_loss,
            csv_table=_phase_loss_csv,
        ),
        _Command(
            "teleport-demo",
            "extract, teleport, and reconstruct a partially known two-qubit state",
            (
                _Param("theta", float, "polar angle of the pair, radians", default=float(np.pi / 3.0), check=_polar_check),
                _Param("phi", float, "relative phase of the pair, radians", default=float(np.pi / 5.0), check=_angle_check),
            ),
            _run_teleport,
        ),
        _Command(
            "lemma1",
            "check nonsingularity of the sampled phase-constraint matrix",
            (
                _Param("d", int, "qudit dimension", required=True, check=_range_check(2, 5)),
                _Param("n", int, "number of input qudits", required=True, check=_range_check(1, 3)),
                _Param("tol", float, "nonsingularity threshold on |det|", default=1e-6, check=_positive_check),
            ),
            _run_lemma1,
        ),
        _Command(
            "nogo",
            "orthogonality-counting verdict for a compression scenario",
            _SCENARIO_PARAMS,
            _run_nogo,
            finalize=_finalize_scenario,
        ),
        _Command(
            "residual",
            "constraint residuals and support structure of a candidate matrix",
            _SCENARIO_PARAMS
            + (
                _Param(
                    "candidate",
                    str,
                    "built-in candidate matrix",
                    default="identity",
                    choices=("identity", "zero", "narrow-support"),
                ),
                _Param("samples", int, "number of random phase samples", default=8, check=_min_check(1)),
            ),
            _run_residual,
            finalize=_finalize_scenario,
        ),
        _Command(
            "optimize",
            "search encoder/decoder unitaries for the best mean retrieval fidelity",
            (
                _Param("d", int, "qudit dimension", required=True, check=_range_check(2, 3)),
                _Param("n", int, "number of input qudits", required=True, check=_range_check(1, 3)),
                _Param("m", int, "number of output qudits", required=True, check=_min_check(0)),
                _Param("p", int, "number of ancilla qudits", default=0, check=_min_check(0)),
                _Param("budget", int, "total objective evaluations", default=2000, check=_min_check(1)),
                _Param("restarts", int, "number of restart points", default=4, check=_min_check(1)),
                _Param("samples", int, "phase samples per objective evaluation", default=32, check=_min_check(1)),
            ),
            _run_optimize,
            finalize=_finalize_optimize,
            csv_table=_optimize_csv,
        ),
    )
}


def build_parser() -> _Parser:
    parser = _Parser(prog="phasecomp", description=__doc__)
    parser.add_argument("--version", action="version", version=f"phasecomp {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    for command in _COMMANDS.values():
        sub = subparsers.add_parser(command.name, help=command.help)
        sub.add_argument("--config", default=None, help="JSON file with parameter values")
        for param in command.params:
            kwargs = {"type": param.type, "default": None, "help": param.help}
            if param.choices:
                kwargs["choices"] = param.choices
            sub.add_argument(param.flag, **kwargs)
        sub.add_argument("--seed", type=int, default=None, help="run seed (default 0)")
        sub.add_argument("--out", default=None, help="write the report to this path")
        if command.csv_table is not None:
            sub.add_argument("--csv", default=None, help="also export the fidelity table as CSV")
    return parser


def _coerce(param: _Param, value, source: str):
    if param.type is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{source} value for --{param.name} must be an integer, got {value!r}")
        return int(value)
    if param.type is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{source} value for --{param.name} must be a number, got {value!r}")
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"{source} value for --{param.name} must be a string, got {value!r}")
    return value


def parse_config(argv=None) -> RunConfig:
    """Parse flags (and an optional --config JSON file) into a validated RunConfig."""
    namespace = build_parser().parse_args(argv)
    command = _COMMANDS[namespace.command]
    file_values: dict = {}
    if namespace.config is not None:
        try:
            file_values = json.loads(open(namespace.config, encoding="utf-8").read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(file_values, dict):
            raise ConfigError("config file must hold a JSON object")
        allowed = {p.name for p in command.params} | {"command", "seed", "out"}
        if command.csv_table is not None:
            allowed.add("csv")
        unknown = sorted(set(file_values) - allowed)
        if unknown:
            raise ConfigError(f"unknown config key(s) for {command.name}: {', '.join(unknown)}")
        if "command" in file_values and file_values["command"] != command.name:
            raise ConfigError(
                f"config file is for command {file_values['command']!r}, not {command.name!r}"
            )
    params: dict = {}
    for param in command.params:
        value = getattr(namespace, param.name)
        if value is None and param.name in file_values:
            value = _coerce(param, file_values[param.name], "config file")
        if value is None:
            value = param.default
        if value is None:
            raise ConfigError(f"missing required parameter {param.flag}")
        if param.choices and value not in param.choices:
            raise ConfigError(
                f"--{param.name} must be one of {list(param.choices)}, got {value!r}"
            )
        if param.check is not None:
            param.check(param.name, value)
        params[param.name] = value
    if command.finalize is not None:
        command.finalize(params)
    seed = namespace.seed if namespace.seed is not None else file_values.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError(f"--seed must be a non-negative integer, got {seed!r}")
    out = namespace.out if namespace.out is not None else file_values.get("out")
    csv_path = getattr(namespace, "csv", None)
    if csv_path is None:
        csv_path = file_values.get("csv")
    return RunConfig(command=command.name, params=params, seed=seed, out=out, csv=csv_path)


def run(config: RunConfig) -> Report:
    """Dispatch a validated config to its module and wrap the result."""
    command = _COMMANDS[config.command]
    results = command.runner(config.params, config.seed)
    return Report(
        schema_version=SCHEMA_VERSION,
        command=config.command,
        config=config.echo(),
        results=results,
        provenance={"artifact_version": __version__, "seed": config.seed},
    )


def _summary(report: Report) -> str:
    r = report.results
    if report.command == "compress-demo":
        return (
            f"outcome {r['outcome']} (probability {r['probability']:.6f}), "
            f"fidelity to prediction {r['fidelity_to_prediction']:.12f}"
        )
    if report.command == "phase-loss":
        fids = [row["fidelity"] for row in r["table"]]
        return f"{len(fids)} grid points, fidelity range [{min(fids):.6f}, {max(fids):.6f}]"
    if report.command == "teleport-demo":
        worst = min(b["fidelity"] for b in r["branch_fidelities"])
        return f"min branch fidelity {worst:.12f}, sampled fidelity {r['sampled_fidelity']:.12f}"
    if report.command == "lemma1":
        return (
            f"verdict {r['verdict']}: |det| = {r['det_magnitude']:.6g}, "
            f"oracle {r['oracle_magnitude']:.6g}"
        )
    if report.command == "nogo":
        e = r["evidence"]
        return (
            f"verdict {r['verdict']}: {e['orthogonal_inputs']:.0f} orthogonal inputs "
            f"vs capacity {e['orthogonal_capacity']:.0f}"
        )
    if report.command == "residual":
        return (
            f"candidate {r['candidate']}: grid residual {r['grid_residual']:.3e}, "
            f"support verdict {r['support_check']['verdict']}"
        )
    return (
        f"best mean fidelity {r['best_mean_fidelity']:.9f} "
        f"after {r['evaluations']} evaluations"
    )


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    started = time.perf_counter()
    try:
        report = run(config)
    except Exception as exc:  # pragma: no cover - defensive context wrapper
        print(f"error in {config.command}: {exc}", file=sys.stderr)
        return 1
    elapsed = time.perf_counter() - started
    if config.out:
        write_report(report, config.out)
        print(_summary(report))
        print(f"report written to {config.out}")
    else:
        sys.stdout.write(render_report(report))
    if config.csv:
        header, rows = _COMMANDS[config.command].csv_table(report)
        write_csv(config.csv, header, rows)
        print(f"table written to {config.csv}")
    print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
