"""Cost functions, optimisation and the averaged experiment protocols.

Randomness is drawn from counter-based Philox streams keyed by
``(seed, sample, trial, stream)``, so every trial and sample is reproducible
on its own, independent of execution order.  Initial parameters for trial
``t`` come from one stream that does not depend on the circuit: circuits
compared under the same seed start from the same point (shared prefix of the
same uniform draws).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np
import scipy.optimize

from .circuits import ParamCircuit, bind, build_brickwall, build_brickwall_extended, fock_dimension
from .models import PauliHamiltonian, exact_ground_energy, sector_indices
from .quantum import Statevector, estimate_expectation, expectation, inner_product

STREAM_INIT = 0
STREAM_SHOTS = 1
STREAM_TARGET = 2

BUDGET_ANCHOR_EVALS = 1000
BUDGET_ANCHOR_DIM = 6  # d_{2,4}


def subseed_rng(seed: int, *keys: int) -> np.random.Generator:
    """Philox generator keyed by ``(seed, *keys)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


def initial_parameters(seed: int, trial: int, size: int, sample: int = 0) -> np.ndarray:
    """``size`` i.i.d. draws from U[-pi, pi) for one trial."""
    return subseed_rng(seed, sample, trial, STREAM_INIT).uniform(-np.pi, np.pi, size)


def evaluation_budget(num_sites: int, num_particles: int) -> int:
    """Optimiser evaluations scaled with the Fock dimension, 1000 at d = 6."""
    return round(BUDGET_ANCHOR_EVALS * fock_dimension(num_sites, num_particles) / BUDGET_ANCHOR_DIM)


def sample_haar_fock_state(num_sites: int, num_particles: int, rng: np.random.Generator) -> Statevector:
    """Haar-random state supported on the weight-``num_particles`` subspace."""
    idx = sector_indices(num_sites, num_particles)
    z = rng.standard_normal(idx.size) + 1j * rng.standard_normal(idx.size)
    amps = np.zeros(1 << num_sites, dtype=complex)
    amps[idx] = z / np.linalg.norm(z)
    return Statevector(amps, num_sites)


# ---------------------------------------------------------------------------
# optimisation


@dataclass
class OptimizerConfig:
    method: str = "cobyla"
    max_evals: int = 1000
    initial_step: float = 0.5
    convergence_tol: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        self.method = self.method.lower()
        if self.method not in ("cobyla", "nelder-mead"):
            raise ValueError(f"unknown optimizer {self.method!r}")
        if self.max_evals < 1:
            raise ValueError("max_evals must be at least 1")
        if self.initial_step <= 0 or self.convergence_tol <= 0:
            raise ValueError("initial_step and convergence_tol must be positive")


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    trace: list[float]
    success: bool
    message: str

    @property
    def nfev(self) -> int:
        return len(self.trace)


class _BudgetExhausted(Exception):
    pass


class _NonFiniteCost(Exception):
    pass


class _Stagnated(Exception):
    pass


STAGNATION_ULPS = 64


def minimize(
    cost: Callable[[np.ndarray], float], theta0: Sequence[float], config: OptimizerConfig
) -> OptimizeResult:
    """Derivative-free local minimisation; returns the best point seen.

    Never evaluates ``cost`` more than ``config.max_evals`` times.  A
    non-finite cost aborts the run with ``success=False``.  The run also stops
    once ``2 (n + 1)`` consecutive costs agree to within a few ulps: the
    landscape is flat there and the optimiser would only chase round-off.
    """
    x0 = np.array(theta0, dtype=float).ravel()
    if not np.all(np.isfinite(x0)):
        raise ValueError("initial point must be finite")
    trace: list[float] = []
    best = {"f": math.inf, "x": x0.copy()}
    window, flat = 2 * (x0.size + 1), STAGNATION_ULPS * np.finfo(float).eps

    def tracked(x: np.ndarray) -> float:
        if len(trace) >= config.max_evals:
            raise _BudgetExhausted
        value = float(cost(x))
        if not math.isfinite(value):
            raise _NonFiniteCost(value)
        trace.append(value)
        if value < best["f"]:
            best["f"], best["x"] = value, np.array(x, dtype=float)
        recent = trace[-window:]
        if len(trace) >= window and max(recent) - min(recent) <= flat * max(1.0, abs(value)):
            raise _Stagnated
        return value

    success, message = True, "converged"
    try:
        if config.method == "cobyla":
            res = scipy.optimize.minimize(
                tracked,
                x0,
                method="COBYLA",
                options={"rhobeg": config.initial_step, "tol": config.convergence_tol, "maxiter": config.max_evals},
            )
        else:
            simplex = np.vstack([x0, x0 + config.initial_step * np.eye(x0.size)])
            res = scipy.optimize.minimize(
                tracked,
                x0,
                method="Nelder-Mead",
                options={
                    "initial_simplex": simplex,
                    "maxfev": config.max_evals,
                    "xatol": config.convergence_tol,
                    "fatol": config.convergence_tol,
                    "adaptive": x0.size > 5,
                },
            )
        message = str(res.message)
    except _BudgetExhausted:
        message = "evaluation budget exhausted"
    except _Stagnated:
        message = "cost constant to round-off"
    except _NonFiniteCost as exc:
        success, message = False, f"non-finite cost {exc.args[0]!r}"
    return OptimizeResult(best["x"], best["f"], trace, success, message)


# ---------------------------------------------------------------------------
# cost functions


def energy_cost(
    circuit: ParamCircuit,
    theta: Sequence[float],
    hamiltonian: PauliHamiltonian,
    shots: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """``<psi(theta)|H|psi(theta)>``; exact when ``shots`` is None."""
    state = bind(circuit, theta)
    if shots is None:
        return expectation(state, hamiltonian)
    if rng is None:
        raise ValueError("shot-based estimation needs an rng")
    return estimate_expectation(state, hamiltonian, shots, rng)


def sparse_energy(state: Statevector, matrix: Any) -> float:
    """``<psi|M|psi>`` for a precomputed Hermitian (sparse) matrix."""
    return float(np.vdot(state.amplitudes, matrix @ state.amplitudes).real)


def fidelity_cost(circuit: ParamCircuit, theta: Sequence[float], target: Statevector) -> float:
    """``|<target|psi(theta)>|^2``."""
    return abs(inner_product(target, bind(circuit, theta))) ** 2


# ---------------------------------------------------------------------------
# experiment records


@dataclass
class TrialRecord:
    trial: int
    sample: int | None
    theta0: list[float]
    theta: list[float]
    best_cost: float
    value: float
    trace: list[float]
    success: bool
    message: str


@dataclass
class ExperimentResult:
    """Everything needed to re-derive the averages of one experiment.

    ``experiment`` is ``"energy"`` or ``"fidelity"``.  For energy runs
    ``value`` is the exact energy at the best parameters; for fidelity runs it
    is the fidelity there.
    """

    experiment: str
    config: dict[str, Any]
    circuit: dict[str, Any]
    trials: list[TrialRecord] = field(default_factory=list)
    aggregates: dict[str, Any] = field(default_factory=dict)

    def compute_aggregates(self) -> dict[str, Any]:
        ok = [t for t in self.trials if t.success]
        out: dict[str, Any] = {"trials_total": len(self.trials), "trials_failed": len(self.trials) - len(ok)}
        if self.experiment == "energy":
            energies = [t.value for t in ok]
            e0 = self.config.get("reference_energy")
            out["mean_energy"] = float(np.mean(energies)) if energies else None
            out["best_energy"] = float(np.min(energies)) if energies else None
            if e0 is not None and energies:
                rel = [(e - e0) / abs(e0) for e in energies]
                out["reference_energy"] = e0
                out["relative_errors"] = rel
                out["mean_relative_error"] = (out["mean_energy"] - e0) / abs(e0)
                out["median_relative_error"] = float(np.median(rel))
        else:
            samples = sorted({t.sample for t in ok})
            eps_i = [float(np.mean([1.0 - t.value for t in ok if t.sample == s])) for s in samples]
            eps_bar = float(np.mean(eps_i)) if eps_i else None
            out["samples"] = samples
            out["epsilon_per_sample"] = eps_i
            out["fidelity_per_sample"] = [1.0 - e for e in eps_i]
            out["epsilon_bar"] = eps_bar
            out["fidelity_bar"] = None if eps_bar is None else 1.0 - eps_bar
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "circuit": self.circuit,
            "aggregates": self.aggregates,
            "trials": [asdict(t) for t in self.trials],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentResult:
        return cls(
            experiment=data["experiment"],
            config=data["config"],
            circuit=data["circuit"],
            trials=[TrialRecord(**t) for t in data["trials"]],
            aggregates=data["aggregates"],
        )

    @classmethod
    def load(cls, path: str | Path) -> ExperimentResult:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def trace_rows(self) -> list[tuple[int, int, float]]:
        """``(trial, eval, cost)`` rows; fidelity trials are numbered
        ``sample * N_T + trial``."""
        n_t = int(self.config.get("trials", 1))
        rows = []
        for rec in self.trials:
            flat = rec.trial if rec.sample is None else rec.sample * n_t + rec.trial
            rows += [(flat, k, c) for k, c in enumerate(rec.trace)]
        return rows

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["trial", "eval", "cost"])
            for row in self.trace_rows():
                writer.writerow([row[0], row[1], repr(row[2])])


# ---------------------------------------------------------------------------
# protocols


def make_circuit(
    num_sites: int,
    num_particles: int,
    kind: str,
    extended: bool = False,
    layers: int | None = None,
    free_params: int | None = None,
) -> ParamCircuit:
    if extended:
        if layers is None:
            raise ValueError("extended circuits need an explicit layer count")
        return build_brickwall_extended(num_sites, num_particles, kind, layers, free_params=free_params)
    return build_brickwall(num_sites, num_particles, kind, layers, free_params=free_params)


def _optimizer(budget: int, optimizer: OptimizerConfig | None, seed: int) -> OptimizerConfig:
    if optimizer is None:
        return OptimizerConfig(max_evals=budget, seed=seed)
    return OptimizerConfig(
        optimizer.method, budget, optimizer.initial_step, optimizer.convergence_tol, seed
    )


def run_energy_experiment(
    num_sites: int,
    num_particles: int,
    kind: str,
    extended: bool,
    layers: int | None,
    hamiltonian: PauliHamiltonian,
    num_trials: int,
    budget: int | None = None,
    shots: int | None = None,
    seed: int = 0,
    *,
    free_params: int | None = None,
    optimizer: OptimizerConfig | None = None,
    reference_energy: float | None = None,
    circuit: ParamCircuit | None = None,
) -> ExperimentResult:
    """``num_trials`` independent energy minimisations from U[-pi, pi) starts.

    ``shots=None`` evaluates energies exactly; otherwise each evaluation is a
    fresh ``shots``-per-string estimate.  ``reference_energy`` defaults to the
    exact ground energy in the circuit's particle sector.
    """
    if circuit is None:
        circuit = make_circuit(num_sites, num_particles, kind, extended, layers, free_params)
    if budget is None:
        budget = evaluation_budget(num_sites, num_particles)
    config = _optimizer(budget, optimizer, seed)
    if reference_energy is None:
        reference_energy = exact_ground_energy(hamiltonian, num_particles, return_vector=False).ground_energy

    matrix = hamiltonian.to_sparse() if shots is None else None
    records = []
    for t in range(num_trials):
        theta0 = initial_parameters(seed, t, circuit.num_free_params)
        shot_rng = subseed_rng(seed, 0, t, STREAM_SHOTS) if shots is not None else None

        def cost(theta: np.ndarray) -> float:
            if matrix is not None:
                return sparse_energy(bind(circuit, theta), matrix)
            return energy_cost(circuit, theta, hamiltonian, shots, shot_rng)

        res = minimize(cost, theta0, config)
        value = energy_cost(circuit, res.x, hamiltonian) if res.trace else math.nan
        records.append(
            TrialRecord(t, None, theta0.tolist(), res.x.tolist(), res.fun, value, res.trace, res.success, res.message)
        )

    result = ExperimentResult(
        "energy",
        {
            "L": num_sites,
            "N": num_particles,
            "kind": circuit.kind.value,
            "extended": circuit.extended,
            "layers": circuit.layers,
            "free_params": circuit.num_free_params,
            "slots": circuit.num_slots,
            "trials": num_trials,
            "budget": budget,
            "shots": shots,
            "seed": seed,
            "optimizer": asdict(config),
            "hamiltonian_terms": len(hamiltonian),
            "reference_energy": reference_energy,
        },
        circuit.to_dict(),
        records,
    )
    result.aggregates = result.compute_aggregates()
    return result


def run_fidelity_experiment(
    num_sites: int,
    num_particles: int,
    kind: str,
    extended: bool,
    layers: int | None,
    num_samples: int,
    num_trials: int,
    budget: int | None = None,
    seed: int = 0,
    *,
    free_params: int | None = None,
    optimizer: OptimizerConfig | None = None,
    circuit: ParamCircuit | None = None,
) -> ExperimentResult:
    """Learn ``num_samples`` Haar-random Fock states, ``num_trials`` starts each.

    Each trial minimises ``1 - F``; simulation is exact.
    """
    if circuit is None:
        circuit = make_circuit(num_sites, num_particles, kind, extended, layers, free_params)
    if budget is None:
        budget = evaluation_budget(num_sites, num_particles)
    config = _optimizer(budget, optimizer, seed)

    records = []
    for s in range(num_samples):
        target = sample_haar_fock_state(num_sites, num_particles, subseed_rng(seed, s, 0, STREAM_TARGET))

        def cost(theta: np.ndarray) -> float:
            return 1.0 - fidelity_cost(circuit, theta, target)

        for t in range(num_trials):
            theta0 = initial_parameters(seed, t, circuit.num_free_params, sample=s)
            res = minimize(cost, theta0, config)
            value = 1.0 - res.fun if res.trace else math.nan
            records.append(
                TrialRecord(t, s, theta0.tolist(), res.x.tolist(), res.fun, value, res.trace, res.success, res.message)
            )

    result = ExperimentResult(
        "fidelity",
        {
            "L": num_sites,
            "N": num_particles,
            "kind": circuit.kind.value,
            "extended": circuit.extended,
            "layers": circuit.layers,
            "free_params": circuit.num_free_params,
            "slots": circuit.num_slots,
            "samples": num_samples,
            "trials": num_trials,
            "budget": budget,
            "seed": seed,
            "optimizer": asdict(config),
        },
        circuit.to_dict(),
        records,
    )
    result.aggregates = result.compute_aggregates()
    return result
