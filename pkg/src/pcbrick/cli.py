"""Command-line front end: ``pcbrick {gates verify, ed, vqe, fidelity}``.

Options may also come from a JSON file given with ``--config``; flags given
on the command line override file values, and unknown file keys are rejected.
Exit codes: 0 success, 1 a check failed, 2 usage or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from . import verify
from .models import PauliHamiltonian, exact_ground_energy, nnn_heisenberg, xx_hamiltonian, xxz_hamiltonian
from .vqe import OptimizerConfig, run_energy_experiment, run_fidelity_experiment

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

MODELS = ("xxz", "xx", "nnn")

DEFAULTS: dict[str, dict[str, Any]] = {
    "gates verify": {"seed": 0, "output": None, "draws": 100},
    "ed": {"model": "xxz", "sites": 4, "gamma": 1.0, "sector": None, "seed": 0, "output": None},
    "vqe": {
        "model": "xxz",
        "sites": 4,
        "gamma": 1.0,
        "particles": None,
        "gate": "G",
        "layers": None,
        "extended": False,
        "trials": 10,
        "budget": None,
        "shots": None,
        "optimizer": "cobyla",
        "initial_step": 0.5,
        "tol": 1e-6,
        "seed": 0,
        "output": "vqe_result.json",
    },
    "fidelity": {
        "sites": 4,
        "particles": 2,
        "gate": "A",
        "layers": None,
        "extended": False,
        "samples": 25,
        "trials": 5,
        "budget": None,
        "optimizer": "cobyla",
        "initial_step": 0.5,
        "tol": 1e-6,
        "seed": 0,
        "output": "fidelity_result.json",
    },
}


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master RNG seed")
    p.add_argument("--output", default=None, help="result file path (JSON)")
    p.add_argument("--config", default=None, help="JSON file of option values")


def _experiment_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sites", "-L", type=int, default=None)
    p.add_argument("--particles", "-N", type=int, default=None)
    p.add_argument("--gate", choices=["A", "B", "G"], type=str.upper, default=None)
    p.add_argument("--layers", type=int, default=None)
    p.add_argument("--extended", action="store_true", default=None, help="alternate NN and NNN layers")
    p.add_argument("--trials", type=int, default=None, help="independent starts per target (N_T)")
    p.add_argument("--budget", type=int, default=None, help="evaluations per trial (default scales with d)")
    p.add_argument("--optimizer", choices=["cobyla", "nelder-mead"], default=None)
    p.add_argument("--initial-step", dest="initial_step", type=float, default=None)
    p.add_argument("--tol", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pcbrick", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gates_p = sub.add_parser("gates", help="gate utilities")
    gates_sub = gates_p.add_subparsers(dest="action", required=True)
    verify_p = gates_sub.add_parser("verify", help="run the gate and circuit oracle suite")
    _common(verify_p)
    verify_p.add_argument("--draws", type=int, default=None, help="random parameter draws per check")

    ed_p = sub.add_parser("ed", help="exact ground energy")
    _common(ed_p)
    ed_p.add_argument("--model", choices=MODELS, default=None)
    ed_p.add_argument("--sites", "-L", type=int, default=None)
    ed_p.add_argument("--gamma", type=float, default=None, help="ZZ anisotropy (xxz only)")
    ed_p.add_argument("--sector", type=int, default=None, help="restrict to N particles")

    vqe_p = sub.add_parser("vqe", help="variational ground-state search")
    _common(vqe_p)
    vqe_p.add_argument("--model", choices=MODELS, default=None)
    vqe_p.add_argument("--gamma", type=float, default=None)
    _experiment_flags(vqe_p)
    vqe_p.add_argument("--shots", type=int, default=None, help="shots per Pauli string (default: exact)")

    fid_p = sub.add_parser("fidelity", help="learn Haar-random Fock states")
    _common(fid_p)
    _experiment_flags(fid_p)
    fid_p.add_argument("--samples", type=int, default=None, help="number of target states (N_S)")
    return parser


def resolve_config(command: str, args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, then the ``--config`` file, then explicit flags."""
    resolved = dict(DEFAULTS[command])
    if args.config is not None:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise UsageError(f"cannot read config {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError(f"config {args.config} must hold a JSON object")
        unknown = sorted(set(data) - set(resolved))
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {', '.join(unknown)}")
        resolved.update(data)
    for key in resolved:
        value = getattr(args, key, None)
        if value is not None:
            resolved[key] = value
    return resolved


def _positive(cfg: dict[str, Any], *keys: str) -> None:
    for key in keys:
        value = cfg.get(key)
        if value is not None and (not isinstance(value, int) or isinstance(value, bool) or value < 1):
            raise UsageError(f"{key} must be a positive integer, got {value!r}")


def _hamiltonian(model: str, sites: int, gamma: float) -> PauliHamiltonian:
    if model not in MODELS:
        raise UsageError(f"unknown model {model!r}")
    if model == "xxz":
        return xxz_hamiltonian(sites, gamma)
    if model == "xx":
        return xx_hamiltonian(sites)
    return nnn_heisenberg(sites)


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def cmd_gates_verify(cfg: dict[str, Any]) -> int:
    _positive(cfg, "draws")
    results = verify.run_all(seed=int(cfg["seed"]), draws=cfg["draws"])
    print(verify.format_table(results))
    counts = verify.cnot_counts()
    print("CNOT counts (A/B/G): " + "/".join(str(counts[k]) for k in "ABG"))
    failed = [r.name for r in results if not r.passed]
    _write(
        cfg["output"],
        json.dumps(
            {
                "config": cfg,
                "checks": [
                    {"name": r.name, "max_residual": r.max_residual, "tolerance": r.tolerance, "passed": r.passed}
                    for r in results
                ],
                "cnot_counts": counts,
            },
            indent=2,
        ),
    )
    if failed:
        print("FAILED: " + ", ".join(failed), file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


def cmd_ed(cfg: dict[str, Any]) -> int:
    sites = cfg["sites"]
    if not isinstance(sites, int) or sites < (3 if cfg["model"] == "nnn" else 2):
        raise UsageError(f"--sites too small for model {cfg['model']}: {sites!r}")
    h = _hamiltonian(cfg["model"], sites, float(cfg["gamma"]))
    sector = cfg["sector"]
    if sector is not None and not 0 <= sector <= sites:
        raise UsageError(f"--sector must lie in [0, {sites}], got {sector}")
    result = exact_ground_energy(h, sector, return_vector=False)
    gamma = {"xxz": float(cfg["gamma"]), "xx": 0.0, "nnn": None}[cfg["model"]]
    text = json.dumps(
        {"model": cfg["model"], "L": sites, "gamma": gamma, "sector": sector, "ground_energy": result.ground_energy}
    )
    print(text)
    _write(cfg["output"], text + "\n")
    return EXIT_OK


def _optimizer(cfg: dict[str, Any]) -> OptimizerConfig:
    try:
        return OptimizerConfig(cfg["optimizer"], 1, float(cfg["initial_step"]), float(cfg["tol"]), int(cfg["seed"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _persist(result: Any, cfg: dict[str, Any]) -> Path:
    path = Path(cfg["output"])
    csv_path = path.with_suffix(".csv")
    _write(str(path), result.to_json() + "\n")
    try:
        result.write_csv(csv_path)
    except OSError as exc:
        raise OSError(f"cannot write {csv_path}: {exc.strerror}") from None
    return csv_path


def cmd_vqe(cfg: dict[str, Any]) -> int:
    _positive(cfg, "sites", "trials", "budget", "shots", "layers")
    sites = cfg["sites"]
    particles = sites // 2 if cfg["particles"] is None else cfg["particles"]
    cfg["particles"] = particles
    if sites < 2 or (cfg["model"] == "nnn" and sites < 3):
        raise UsageError(f"--sites too small for model {cfg['model']}: {sites}")
    h = _hamiltonian(cfg["model"], sites, float(cfg["gamma"]))
    try:
        result = run_energy_experiment(
            sites,
            particles,
            cfg["gate"],
            bool(cfg["extended"]),
            cfg["layers"],
            h,
            cfg["trials"],
            cfg["budget"],
            cfg["shots"],
            int(cfg["seed"]),
            optimizer=_optimizer(cfg),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result.config["run"] = cfg
    csv_path = _persist(result, cfg)
    agg = result.aggregates
    print(
        json.dumps(
            {
                "experiment": "vqe",
                "mean_energy": agg["mean_energy"],
                "reference_energy": agg.get("reference_energy"),
                "relative_error": agg.get("mean_relative_error"),
                "median_relative_error": agg.get("median_relative_error"),
                "trials_failed": agg["trials_failed"],
                "output": cfg["output"],
                "trace": str(csv_path),
            },
            indent=2,
        )
    )
    return EXIT_OK


def cmd_fidelity(cfg: dict[str, Any]) -> int:
    _positive(cfg, "sites", "particles", "trials", "samples", "budget", "layers")
    try:
        result = run_fidelity_experiment(
            cfg["sites"],
            cfg["particles"],
            cfg["gate"],
            bool(cfg["extended"]),
            cfg["layers"],
            cfg["samples"],
            cfg["trials"],
            cfg["budget"],
            int(cfg["seed"]),
            optimizer=_optimizer(cfg),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result.config["run"] = cfg
    csv_path = _persist(result, cfg)
    agg = result.aggregates
    print(
        json.dumps(
            {
                "experiment": "fidelity",
                "free_params": result.config["free_params"],
                "fidelity_bar": agg["fidelity_bar"],
                "epsilon_bar": agg["epsilon_bar"],
                "trials_failed": agg["trials_failed"],
                "output": cfg["output"],
                "trace": str(csv_path),
            },
            indent=2,
        )
    )
    return EXIT_OK


COMMANDS = {"gates verify": cmd_gates_verify, "ed": cmd_ed, "vqe": cmd_vqe, "fidelity": cmd_fidelity}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = "gates verify" if args.command == "gates" else args.command
    try:
        cfg = resolve_config(command, args)
        return COMMANDS[command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"pcbrick {command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"pcbrick {command}: error: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
