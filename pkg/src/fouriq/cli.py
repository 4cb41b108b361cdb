"""Command-line experiment runner.

    fouriq extract|learn|trotter|kernel --config CONFIG [--seed N] [--oracle] [--out DIR]

Exit codes: 0 success, 1 internal error, 2 config error, 3 budget refusal,
4 bound violation.  Errors are reported as one JSON object on stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .circuit_io import DocumentError, load_circuit
from .errors import BoundError, BudgetError
from .families import CircuitFamily, ConceptFamily, HamiltonianFamily, demo_family
from .fourier import compile_expectation, extract_table, grid_dft_oracle, success_probability
from .hamiltonian import Trotter, commutator_bound, eval_dynamics, load_hamiltonian, trotter_error_bound
from .pauli import Observable, ZeroProjector, combination, pauli_obs
from .learning import plan_lasso
from .pipelines import hidden_alpha, run_krr, run_lasso
from .plotting import curve_plot, heatmap, loglog_plot, stem_plot
from .shots import EXACT, Mode, Shots

EXIT_OK, EXIT_INTERNAL, EXIT_CONFIG, EXIT_BUDGET, EXIT_BOUND = 0, 1, 2, 3, 4
DEFAULT_BUDGET = {"max_qubits": 24, "max_lattice": 4096, "max_T": 100_000}
BOUND_SLACK = 1e-8


class ConfigError(ValueError):
    pass


@dataclass
class Context:
    config: dict
    base: Path
    out: Path
    seed: int | None
    digest: str
    oracle: bool

    @property
    def stamp(self) -> str:
        return f"config_sha256={self.digest} seed={self.seed}"

    @property
    def meta(self) -> dict:
        return {"config_sha256": self.digest, "seed": self.seed}

    @property
    def budget(self) -> dict:
        return {**DEFAULT_BUDGET, **self.config.get("budget", {})}

    def path(self, key: str) -> Path:
        value = self.config.get(key)
        if not isinstance(value, str):
            raise ConfigError(f"config field {key!r} must be a path")
        p = Path(value)
        return p if p.is_absolute() else self.base / p

    def require_seed(self) -> int:
        if self.seed is None:
            raise ConfigError("a seed is required for stochastic runs (config 'seed' or --seed)")
        return self.seed

    def write_json(self, name: str, payload: dict) -> None:
        text = json.dumps({"meta": self.meta, **payload}, indent=1, sort_keys=False)
        (self.out / name).write_text(text + "\n")

    def write_csv(self, name: str, header: list[str], rows: list[list[Any]]) -> None:
        buf = io.StringIO()
        buf.write(f"# {self.stamp}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        (self.out / name).write_text(buf.getvalue())


def _observable(spec: Any) -> Observable:
    if not isinstance(spec, dict):
        raise ConfigError("observable must be an object")
    try:
        if "pauli" in spec:
            return pauli_obs(spec["pauli"])
        if "terms" in spec:
            return combination([(float(b), p) for b, p in spec["terms"]])
        if "projector" in spec:
            return ZeroProjector(int(spec["projector"]))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"observable: {exc}") from None
    raise ConfigError("observable needs 'pauli', 'terms' or 'projector'")


def _mode(ctx: Context) -> Mode:
    spec = ctx.config.get("mode", {"kind": "exact"})
    kind = spec.get("kind", "exact")
    if kind == "exact":
        return EXACT
    if kind != "shots":
        raise ConfigError(f"unknown mode kind {kind!r}")
    seed = ctx.require_seed()
    try:
        return Shots(seed, spec.get("shots"), spec.get("epsilon"), spec.get("delta", 0.05))
    except ValueError as exc:
        raise ConfigError(f"mode: {exc}") from None


def _load_circuit(ctx: Context, key: str = "circuit"):
    path = ctx.path(key)
    if not path.exists():
        raise ConfigError(f"circuit document not found: {path}")
    return load_circuit(path)


def _family(ctx: Context) -> ConceptFamily:
    spec = ctx.config.get("family", {"kind": "demo"})
    kind = spec.get("kind")
    if kind == "demo":
        return demo_family()
    sub = Context(spec, ctx.base, ctx.out, ctx.seed, ctx.digest, ctx.oracle)
    if kind == "circuit":
        return CircuitFamily(_load_circuit(sub), _observable(spec.get("observable")))
    if kind == "hamiltonian":
        path = sub.path("hamiltonian")
        if not path.exists():
            raise ConfigError(f"hamiltonian document not found: {path}")
        return HamiltonianFamily(load_hamiltonian(path), int(spec.get("r", 1)), _observable(spec.get("observable")))
    raise ConfigError(f"unknown family kind {kind!r}")


def _table_rows(table) -> list[list[Any]]:
    return [list(l) + [repr(float(b.real)), repr(float(b.imag)), table.provenance] for l, b in table.items()]


def cmd_extract(ctx: Context) -> int:
    circuit = _load_circuit(ctx)
    obs = _observable(ctx.config.get("observable"))
    mode = _mode(ctx)
    budget = ctx.budget
    compiled = compile_expectation(circuit, obs)
    if compiled.layout.n_total > budget["max_qubits"]:
        raise BudgetError(f"compiled circuit needs {compiled.layout.n_total} qubits (budget {budget['max_qubits']})")
    table = extract_table(circuit, obs, mode, budget["max_lattice"], bool(ctx.config.get("symmetric", False)), compiled)
    header = [f"l_{s}" for s in range(table.lattice.d)] + ["re", "im", "provenance"]
    ctx.write_csv("table.csv", header, _table_rows(table))
    ctx.write_json("table.json", table.to_json())
    prob = success_probability(compiled)
    ctx.write_json("success.json", {
        "postselect_probability": prob,
        "sum_abs_b_squared": float(np.sum(np.abs(table.coeffs) ** 2)),
        "scale": compiled.scale,
        "qubits": compiled.layout.n_total,
    })
    stem_plot(table, ctx.out / "table.svg", ctx.stamp)
    if ctx.oracle:
        oracle = grid_dft_oracle(circuit, obs, table.lattice)
        ctx.write_csv("oracle.csv", header, _table_rows(oracle))
        diff = float(np.max(np.abs(oracle.coeffs - table.coeffs)))
        ctx.write_json("oracle_diff.json", {"max_abs_diff": diff, "lattice_size": table.lattice.size})
    return EXIT_OK


def cmd_learn(ctx: Context) -> int:
    seed = ctx.require_seed()
    family = _family(ctx)
    cfg = ctx.config
    eps, delta = float(cfg.get("epsilon", 0.5)), float(cfg.get("delta", 0.1))
    plan = plan_lasso(family.lattice.size, eps, delta)
    T = cfg.get("T")
    if T is None:
        if plan.T > ctx.budget["max_T"]:
            raise BudgetError(f"planned sample count T={plan.T} exceeds budget max_T={ctx.budget['max_T']}; set a T override")
        T = plan.T
    T = int(T)
    alpha = np.asarray(cfg["alpha"], dtype=float) if "alpha" in cfg else hidden_alpha(family.d, seed)
    run = run_lasso(
        family, alpha, T, seed,
        eps3=float(cfg.get("eps3", 1e-3)),
        mode=_mode(ctx),
        n_test=int(cfg.get("n_test", 200)),
        epsilon=eps, delta=delta,
        feature_noise=float(cfg.get("feature_noise", 0.0)),
        label_noise=float(cfg.get("label_noise", 0.0)),
        curve_sizes=tuple(int(k) for k in cfg.get("curve", ())),
    )
    ctx.write_json("plan.json", {
        "m": plan.m, "T_planned": plan.T, "T_override": cfg.get("T"), "epsilon": plan.epsilon,
        "delta": plan.delta, "epsilon_b": plan.epsilon_b, "Lambda1": plan.Lambda1,
        "circuit_executions": plan.circuit_executions,
        "guarantee": "certified" if T >= plan.T else "bound not certified (T below planned value)",
    })
    ctx.write_json("model.json", {"alpha_hidden": alpha.tolist(), **run.model.to_json()})
    ctx.write_json("risk.json", run.report())
    ctx.write_csv("curve.csv", ["T", "test_mse"], [[k, repr(v)] for k, v in run.curve])
    curve_plot([k for k, _ in run.curve], [v for _, v in run.curve], ctx.out / "curve.svg", ctx.stamp)
    return EXIT_OK


def cmd_trotter(ctx: Context) -> int:
    path = ctx.path("hamiltonian")
    if not path.exists():
        raise ConfigError(f"hamiltonian document not found: {path}")
    H = load_hamiltonian(path)
    cfg = ctx.config
    x = cfg.get("x")
    alpha = np.asarray(cfg.get("alpha", [0.5] * H.d), dtype=float)
    obs = _observable(cfg.get("observable"))
    rs = [int(r) for r in cfg.get("r", [1, 2, 4, 8, 16])]
    A = commutator_bound(H, x)
    exact = eval_dynamics(H, obs, x, alpha)
    rows, errors, bounds, violations = [], [], [], []
    for r in rs:
        approx = eval_dynamics(H, obs, x, alpha, Trotter(r))
        err, bound = abs(exact - approx), trotter_error_bound(H.tau, A, r)
        rows.append([r, repr(exact), repr(approx), repr(err), repr(bound)])
        errors.append(err)
        bounds.append(bound)
        if err > bound + BOUND_SLACK:
            violations.append(r)
    ctx.write_csv("trotter.csv", ["r", "exact", "trotter", "error", "bound"], rows)
    positive = [(r, e) for r, e in zip(rs, errors) if e > 1e-12]
    slope = float(np.polyfit(np.log([r for r, _ in positive]), np.log([e for _, e in positive]), 1)[0]) if len(positive) > 1 else None
    ctx.write_json("trotter.json", {"A": A, "tau": H.tau, "slope": slope, "violations": violations, "sound": not violations})
    loglog_plot(rs, np.array(errors), np.array(bounds), ctx.out / "trotter.svg", ctx.stamp)
    if violations:
        raise BoundError(f"Trotter bound violated at r={violations}")
    return EXIT_OK


def cmd_kernel(ctx: Context) -> int:
    seed = ctx.require_seed()
    family = _family(ctx)
    cfg = ctx.config
    T = int(cfg.get("T", 20))
    if T > ctx.budget["max_T"]:
        raise BudgetError(f"T={T} exceeds budget max_T={ctx.budget['max_T']}")
    alpha = np.asarray(cfg["alpha"], dtype=float) if "alpha" in cfg else hidden_alpha(family.d, seed)
    run = run_krr(family, alpha, T, float(cfg.get("lambda", 0.1)), seed, _mode(ctx),
                  int(cfg.get("n_test", 50)), float(cfg.get("label_noise", 0.0)))
    ctx.write_csv("gram.csv", [f"x{j}" for j in range(T)], [[repr(float(v)) for v in row] for row in run.gram_raw])
    ctx.write_json("kernel.json", {
        "alpha_hidden": alpha.tolist(),
        "train_residual": run.train_residual,
        "test_mse": run.test_mse,
        "min_eig_raw": run.min_eig_raw,
        "min_eig_clipped": run.min_eig_clipped,
        "error_bound": run.bound,
        "bound_squared": run.bound**2,
        "within_bound": run.test_mse <= run.bound**2,
        "params": run.params,
        "model": run.model.to_json(),
    })
    heatmap(run.model.gram, ctx.out / "gram.svg", ctx.stamp)
    return EXIT_OK


COMMANDS = {"extract": cmd_extract, "learn": cmd_learn, "trotter": cmd_trotter, "kernel": cmd_kernel}


def _context(args) -> Context:
    path = Path(args.config)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = path.read_bytes()
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    kind = config.get("experiment", args.command)
    if kind != args.command:
        raise ConfigError(f"config is for {kind!r}, not {args.command!r}")
    seed = args.seed if args.seed is not None else config.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ConfigError("seed must be a non-negative integer")
    out = Path(args.out or os.environ.get("FOURIQ_OUT") or config.get("out") or "fouriq-out")
    out.mkdir(parents=True, exist_ok=True)
    return Context(config, path.parent, out, seed, hashlib.sha256(raw).hexdigest(), args.oracle)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="fouriq", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--oracle", action="store_true", help="also write the grid-DFT oracle table")
    parser.add_argument("--out", help="output directory")
    args = parser.parse_args(argv)
    try:
        ctx = _context(args)
        return COMMANDS[args.command](ctx)
    except (ConfigError, DocumentError, KeyError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except BudgetError as exc:
        return _fail(EXIT_BUDGET, exc)
    except BoundError as exc:
        return _fail(EXIT_BOUND, exc)
    except Exception as exc:  # noqa: BLE001
        return _fail(EXIT_INTERNAL, exc)


def _fail(code: int, exc: Exception) -> int:
    msg = str(exc.args[0]) if isinstance(exc, KeyError) and exc.args else str(exc)
    print(json.dumps({"error": msg, "type": type(exc).__name__, "exit_code": code}), file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
