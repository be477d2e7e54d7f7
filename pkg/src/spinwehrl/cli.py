"""Command-line front end: run, compare, sweep, validate, list-scenarios.

Configurations are JSON files with explicit keys; unknown keys are
rejected. Rates are given in units of the scenario's reference rate
(lambda for dephasing, gamma for damping), matching the dimensionless
ratios used throughout (b0/gamma, bandwidth/gamma0, T/omega, ...).

Exit codes: 0 success, 1 comparison above tolerance, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from .dynamics import DissipatorSpec, HamiltonianSpec
from .entropy_rates import (
    BathParams,
    damping_phi_exact,
    damping_phi_quadrature,
    damping_pi_quadrature,
    dephasing_pi_quadrature,
    dephasing_pi_spin_half,
    spin_half_damping_rates,
)
from .errors import ConfigError, NothingToCompare, SpinWehrlError
from .phase_space import husimi, make_grid
from .scenarios import (
    PulseParams,
    custom_scenario,
    photon_pulse_scenario,
    rotating_field,
    spontaneous_emission,
    thermal_quench,
    write_scenario_csv,
)
from .spin_ops import (
    BlochVector,
    DensityMatrix,
    SpinQuantumNumber,
    bloch_to_rho,
    gibbs_state,
    rho_to_bloch,
)

SCENARIOS = {
    "spontaneous_emission": "excited spin-1/2 relaxing into a thermal damping bath",
    "thermal_quench": "Gibbs state at T0 relaxing toward a bath at T",
    "rotating_field": "driven spin-1/2 with dephasing or damping",
    "photon_pulse": "two-level atom absorbing a single-photon pulse (T = 0)",
    "custom": "any spin J with explicit Hamiltonian/dissipator/initial state",
}

_TIME_KEYS = {"t_max": True, "output_dt": True, "tol": False}
_GRID_KEYS = {"n_theta": True, "n_phi": True}
_OUTPUT_KEYS = {"csv": False}
_COMPARE_KEYS = {"tolerance": False}

_SCENARIO_KEYS = {
    "spontaneous_emission": {"omega": True, "gamma": True, "temperature": True},
    "thermal_quench": {
        "omega": True,
        "gamma": True,
        "initial_temperature": True,
        "bath_temperature": True,
    },
    "rotating_field": {
        "b0": True,
        "b1": True,
        "drive_omega": True,
        "dissipator": True,
        "initial_state": True,
    },
    "photon_pulse": {"gamma0": True, "bandwidth": True, "a0": True},
    "custom": {
        "two_j": True,
        "hamiltonian": True,
        "dissipator": True,
        "initial_state": True,
    },
}


def _check_keys(section: dict, allowed: dict, where: str) -> None:
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key '{key}' in {where}")
    for key, required in allowed.items():
        if required and key not in section:
            raise ConfigError(f"missing required key '{key}' in {where}")


def _number(section: dict, key: str, where: str) -> float:
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"key '{key}' in {where} must be a number, got {v!r}")
    return float(v)


def validate_config(cfg: dict) -> dict:
    """Structural validation; returns the config untouched on success."""
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be a JSON object")
    scenario = cfg.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"'scenario' must be one of {sorted(SCENARIOS)}, got {scenario!r}")
    allowed = dict(_SCENARIO_KEYS[scenario])
    allowed.update({"scenario": True, "time": True, "grid": False, "output": False, "compare": False})
    _check_keys(cfg, allowed, "config")
    _check_keys(cfg["time"], _TIME_KEYS, "'time'")
    _number(cfg["time"], "t_max", "'time'")
    _number(cfg["time"], "output_dt", "'time'")
    if "tol" in cfg["time"]:
        _number(cfg["time"], "tol", "'time'")
    if "grid" in cfg:
        _check_keys(cfg["grid"], _GRID_KEYS, "'grid'")
    if "output" in cfg:
        _check_keys(cfg["output"], _OUTPUT_KEYS, "'output'")
    if "compare" in cfg:
        _check_keys(cfg["compare"], _COMPARE_KEYS, "'compare'")
    for key, required in _SCENARIO_KEYS[scenario].items():
        if key in ("dissipator", "hamiltonian", "initial_state"):
            continue
        if key in cfg:
            _number(cfg, key, "config")
    if "dissipator" in cfg:
        _validate_dissipator(cfg["dissipator"])
    if "hamiltonian" in cfg:
        _validate_hamiltonian(cfg["hamiltonian"])
    if "initial_state" in cfg:
        _validate_initial_state(cfg["initial_state"])
    if scenario == "custom":
        two_j = cfg["two_j"]
        if not isinstance(two_j, int) or two_j < 1:
            raise ConfigError(f"'two_j' must be a positive integer, got {two_j!r}")
    return cfg


def _validate_dissipator(sec: dict) -> None:
    kind = sec.get("type")
    if kind == "dephasing":
        _check_keys(sec, {"type": True, "lambda": True}, "'dissipator'")
        _number(sec, "lambda", "'dissipator'")
    elif kind == "amplitude_damping":
        _check_keys(sec, {"type": True, "gamma": True, "nbar": True}, "'dissipator'")
        _number(sec, "gamma", "'dissipator'")
        _number(sec, "nbar", "'dissipator'")
    else:
        raise ConfigError(f"dissipator type must be 'dephasing' or 'amplitude_damping', got {kind!r}")


def _validate_hamiltonian(sec: dict) -> None:
    kind = sec.get("type")
    if kind == "none":
        _check_keys(sec, {"type": True}, "'hamiltonian'")
    elif kind == "static_jz":
        _check_keys(sec, {"type": True, "omega": True}, "'hamiltonian'")
        _number(sec, "omega", "'hamiltonian'")
    elif kind == "rotating_field":
        _check_keys(sec, {"type": True, "b0": True, "b1": True, "drive_omega": True}, "'hamiltonian'")
        for k in ("b0", "b1", "drive_omega"):
            _number(sec, k, "'hamiltonian'")
    else:
        raise ConfigError(
            f"hamiltonian type must be 'none', 'static_jz' or 'rotating_field', got {kind!r}"
        )


def _validate_initial_state(sec: dict) -> None:
    kind = sec.get("type")
    if kind == "bloch":
        _check_keys(sec, {"type": True, "tau_x": True, "tau_y": True, "tau_z": True}, "'initial_state'")
        for k in ("tau_x", "tau_y", "tau_z"):
            _number(sec, k, "'initial_state'")
    elif kind == "bloch_angles":
        _check_keys(sec, {"type": True, "tau": True, "theta": True, "phi": True}, "'initial_state'")
        for k in ("tau", "theta", "phi"):
            _number(sec, k, "'initial_state'")
    elif kind == "diagonal":
        _check_keys(sec, {"type": True, "populations": True}, "'initial_state'")
        pops = sec["populations"]
        if not isinstance(pops, list) or not pops:
            raise ConfigError("'populations' must be a non-empty list")
    elif kind == "gibbs":
        _check_keys(sec, {"type": True, "temperature": True, "omega": True}, "'initial_state'")
        _number(sec, "temperature", "'initial_state'")
        _number(sec, "omega", "'initial_state'")
    else:
        raise ConfigError(
            "initial_state type must be 'bloch', 'bloch_angles', 'diagonal' or 'gibbs', "
            f"got {kind!r}"
        )


def _build_initial_state(sec: dict, j: SpinQuantumNumber) -> DensityMatrix:
    kind = sec["type"]
    if kind == "bloch":
        if j.two_j != 1:
            raise ConfigError("bloch initial states require two_j = 1")
        return bloch_to_rho(BlochVector(sec["tau_x"], sec["tau_y"], sec["tau_z"]))
    if kind == "bloch_angles":
        if j.two_j != 1:
            raise ConfigError("bloch_angles initial states require two_j = 1")
        tau, th, ph = sec["tau"], sec["theta"], sec["phi"]
        return bloch_to_rho(
            BlochVector(
                tau * math.sin(th) * math.cos(ph),
                tau * math.sin(th) * math.sin(ph),
                tau * math.cos(th),
            )
        )
    if kind == "diagonal":
        pops = np.asarray(sec["populations"], dtype=float)
        if pops.size != j.dim:
            raise ConfigError(f"expected {j.dim} populations for two_j={j.two_j}, got {pops.size}")
        total = pops.sum()
        if total <= 0:
            raise ConfigError("populations must have a positive sum")
        return DensityMatrix(j, np.diag(pops / total).astype(complex))
    if kind == "gibbs":
        return gibbs_state(j, sec["omega"], sec["temperature"])
    raise ConfigError(f"unsupported initial_state type {kind!r}")


def _build_dissipator(sec: dict) -> DissipatorSpec:
    if sec["type"] == "dephasing":
        return DissipatorSpec.dephasing(sec["lambda"])
    return DissipatorSpec.amplitude_damping(sec["gamma"], sec["nbar"])


def _build_hamiltonian(sec: dict) -> HamiltonianSpec:
    if sec["type"] == "none":
        return HamiltonianSpec.none()
    if sec["type"] == "static_jz":
        return HamiltonianSpec.static_jz(sec["omega"])
    return HamiltonianSpec.rotating_field(sec["b0"], sec["b1"], sec["drive_omega"])


def _grid_from(cfg: dict, override: str | None):
    if override:
        try:
            a, b = override.lower().split("x")
            return make_grid(int(a), int(b))
        except ValueError as exc:
            raise ConfigError(f"--grid must look like 96x192, got {override!r}") from exc
    if "grid" in cfg:
        return make_grid(int(cfg["grid"]["n_theta"]), int(cfg["grid"]["n_phi"]))
    return make_grid()


def run_config(cfg: dict, grid_override: str | None = None, tol_override: float | None = None):
    """Execute a validated config and return its ScenarioResult."""
    validate_config(cfg)
    grid = _grid_from(cfg, grid_override)
    t_max = float(cfg["time"]["t_max"])
    dt = float(cfg["time"]["output_dt"])
    tol = float(tol_override if tol_override is not None else cfg["time"].get("tol", 1e-10))
    kind = cfg["scenario"]
    if kind == "spontaneous_emission":
        return spontaneous_emission(cfg["omega"], cfg["gamma"], cfg["temperature"], t_max, dt, grid=grid, tol=tol)
    if kind == "thermal_quench":
        return thermal_quench(
            cfg["initial_temperature"], cfg["bath_temperature"], cfg["omega"], cfg["gamma"],
            t_max, dt=dt, grid=grid, tol=tol,
        )
    if kind == "rotating_field":
        rho0 = _build_initial_state(cfg["initial_state"], SpinQuantumNumber(1))
        return rotating_field(
            cfg["b0"], cfg["b1"], cfg["drive_omega"], _build_dissipator(cfg["dissipator"]),
            rho0, t_max, dt=dt, grid=grid, tol=tol,
        )
    if kind == "photon_pulse":
        params = PulseParams(gamma0=cfg["gamma0"], capital_omega=cfg["bandwidth"], a0=cfg["a0"])
        return photon_pulse_scenario(params, t_max, dt, grid=grid, tol=tol)
    j = SpinQuantumNumber(int(cfg["two_j"]))
    rho0 = _build_initial_state(cfg["initial_state"], j)
    return custom_scenario(
        rho0, _build_hamiltonian(cfg["hamiltonian"]), _build_dissipator(cfg["dissipator"]),
        t_max, dt, grid=grid, tol=tol,
    )


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    return f"{x:.6g}"


def _print_summary(cfg: dict, result) -> None:
    w_final = result.wehrl[-1]
    v_final = result.von_neumann[-1]
    print(f"scenario: {cfg['scenario']}  steps: {result.times.size}  t_max: {result.times[-1]:g}")
    print(f"final Pi_wehrl:  {_fmt(w_final.pi)}    final Phi_wehrl: {_fmt(w_final.phi)}")
    print(f"final Pi_vN:     {_fmt(v_final.pi)}    final Phi_vN:    {_fmt(v_final.phi)}")
    print(f"Sigma (wehrl):   {_fmt(result.scalars.get('sigma_wehrl'))}")
    deltas = _method_deltas(cfg, result)
    for name, value in deltas.items():
        print(f"agreement {name}: max rel dev {_fmt(value)}")


def _rel_dev(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = max(np.max(np.abs(a)), np.max(np.abs(b)))
    if scale < 1e-12:  # both series vanish identically (equilibrium runs)
        return 0.0
    return float(np.max(np.abs(a - b)) / scale)


def _method_deltas(cfg: dict, result) -> dict:
    """Cheap cross-method checks printed with the run summary."""
    deltas = {}
    diss = cfg.get("dissipator")
    damping = cfg["scenario"] in ("spontaneous_emission", "thermal_quench") or (
        diss is not None and diss.get("type") == "amplitude_damping"
    )
    if damping and result.bloch is not None:
        nbar = cfg.get("nbar", None)
        if cfg["scenario"] in ("spontaneous_emission", "thermal_quench"):
            nbar = result.scalars.get("nbar", 0.0)
        elif diss is not None:
            nbar = diss["nbar"]
        gamma = cfg.get("gamma", diss["gamma"] if diss else None)
        if nbar and gamma:
            bath = BathParams(gamma=gamma, nbar=nbar)
            j = SpinQuantumNumber(1)
            closed = result.series("wehrl.phi")
            exact = np.array(
                [
                    damping_phi_exact(s.populations(), bath, j)
                    for s in result.trajectory.states
                ]
            )
            deltas["phi closed-form vs exact-2F1"] = _rel_dev(closed, exact)
    return deltas


def compare_config(cfg: dict, tolerance: float, grid_override: str | None = None) -> int:
    """Run every applicable rate method along the trajectory and report the
    maximum relative deviation; returns a process exit code."""
    validate_config(cfg)
    result = run_config(cfg, grid_override=grid_override)
    grid = _grid_from(cfg, grid_override)
    kind = cfg["scenario"]
    diss = cfg.get("dissipator")
    is_dephasing = diss is not None and diss.get("type") == "dephasing"
    is_damping = kind in ("spontaneous_emission", "thermal_quench") or (
        diss is not None and diss.get("type") == "amplitude_damping"
    )
    two_j = int(cfg.get("two_j", 1))
    checks = {}
    if is_dephasing and two_j == 1:
        lam = diss["lambda"]
        quad = []
        closed = []
        for s in result.trajectory.states:
            quad.append(dephasing_pi_quadrature(husimi(s, grid), lam))
            closed.append(dephasing_pi_spin_half(rho_to_bloch(s), lam))
        checks["pi quadrature vs closed-form"] = _rel_dev(quad, closed)
    elif is_damping:
        gamma = cfg.get("gamma", diss["gamma"] if diss else None)
        nbar = result.scalars.get("nbar", diss["nbar"] if diss else None)
        bath = BathParams(gamma=gamma, nbar=nbar)
        j = result.trajectory.states[0].j
        if bath.nbar == 0.0:
            raise NothingToCompare("exact-2F1 flux needs nbar > 0; single method applies at T = 0")
        phi_quad = []
        phi_exact = []
        pi_quad = []
        for s in result.trajectory.states:
            f = husimi(s, grid)
            phi_quad.append(damping_phi_quadrature(f, bath))
            phi_exact.append(damping_phi_exact(s.populations(), bath, j))
            pi_quad.append(damping_pi_quadrature(f, bath).total)
        checks["phi quadrature vs exact-2F1"] = _rel_dev(phi_quad, phi_exact)
        if two_j == 1:
            phi_closed = []
            pi_closed = []
            for s in result.trajectory.states:
                r = spin_half_damping_rates(rho_to_bloch(s), bath, omega=0.0)
                phi_closed.append(r.phi)
                pi_closed.append(r.pi)
            checks["phi quadrature vs closed-form"] = _rel_dev(phi_quad, phi_closed)
            checks["phi exact-2F1 vs closed-form"] = _rel_dev(phi_exact, phi_closed)
            checks["pi quadrature vs closed-form"] = _rel_dev(pi_quad, pi_closed)
    else:
        raise NothingToCompare(f"scenario {kind!r} exposes a single rate method")
    worst = 0.0
    for name, value in checks.items():
        print(f"{name}: max rel dev {value:.3e}")
        worst = max(worst, value)
    if worst > tolerance:
        print(f"FAIL: worst deviation {worst:.3e} exceeds tolerance {tolerance:g}")
        return 1
    print(f"OK: worst deviation {worst:.3e} within tolerance {tolerance:g}")
    return 0


def _set_by_path(cfg: dict, dotted: str, value: float) -> None:
    parts = dotted.split(".")
    node = cfg
    for p in parts[:-1]:
        if not isinstance(node, dict) or p not in node:
            raise ConfigError(f"unknown sweep parameter '{dotted}'")
        node = node[p]
    leaf = parts[-1]
    if not isinstance(node, dict) or leaf not in node:
        raise ConfigError(f"unknown sweep parameter '{dotted}'")
    if not isinstance(node[leaf], (int, float)) or isinstance(node[leaf], bool):
        raise ConfigError(f"sweep parameter '{dotted}' is not a numeric scalar")
    node[leaf] = value


SWEEP_COLUMNS = [
    "value",
    "sigma_wehrl",
    "pi_wehrl_initial",
    "pi_wehrl_final",
    "phi_wehrl_final",
    "pi_vn_initial",
    "pi_vn_final",
]


def sweep_config(cfg: dict, param: str, values: list, out_path: Path,
                 grid_override: str | None = None) -> None:
    """One scenario run per value; a summary-scalar row per run."""
    validate_config(cfg)
    if not values:
        raise ConfigError("sweep needs a non-empty list of values")
    rows = []
    for v in values:
        trial = copy.deepcopy(cfg)
        _set_by_path(trial, param, v)
        result = run_config(trial, grid_override=grid_override)
        sigma = result.scalars.get("sigma_wehrl")
        row = [
            v,
            math.nan if sigma is None else sigma,
            result.wehrl[0].pi,
            result.wehrl[-1].pi,
            result.wehrl[-1].phi,
            result.von_neumann[0].pi,
            result.von_neumann[-1].pi,
        ]
        rows.append(",".join(f"{x:.17g}" for x in row))
    with open(out_path, "w") as fh:
        fh.write(",".join(SWEEP_COLUMNS) + "\n")
        fh.write("\n".join(rows) + "\n")
    print(f"wrote {out_path} ({len(rows)} rows)")


def bundled_configs() -> dict:
    """Name -> path of the example configs shipped with the package."""
    base = resources.files("spinwehrl") / "configs"
    return {p.name: p for p in sorted(base.iterdir(), key=lambda p: p.name) if p.name.endswith(".json")}


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _write_states_csv(result, path: Path) -> None:
    """Trajectory dump: t plus Re/Im of every density-matrix entry."""
    d = result.trajectory.states[0].dim
    header = ["t"]
    for a in range(d):
        for b in range(d):
            header += [f"re_rho_{a}{b}", f"im_rho_{a}{b}"]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for t, s in zip(result.times, result.trajectory.states):
            flat = s.entries.ravel()
            row = [t] + [x for z in flat for x in (z.real, z.imag)]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="spinwehrl", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario config and write its CSV")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--grid", default=None, help="override grid, e.g. 96x192")
    p_run.add_argument("--tol", type=float, default=None, help="override integrator tolerance")
    p_run.add_argument("--states-csv", default=None, help="also dump the raw state trajectory")

    p_cmp = sub.add_parser("compare", help="cross-check every applicable rate method")
    p_cmp.add_argument("--config", required=True)
    p_cmp.add_argument("--grid", default=None)
    p_cmp.add_argument("--tol", type=float, default=None, help="comparison tolerance")

    p_sweep = sub.add_parser("sweep", help="re-run a config over a list of parameter values")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True, help="dotted path, e.g. temperature or initial_state.tau")
    p_sweep.add_argument("--values", required=True, help="comma-separated numbers")
    p_sweep.add_argument("--out", default=".", help="output directory")
    p_sweep.add_argument("--grid", default=None)

    p_val = sub.add_parser("validate", help="schema-check a config file")
    p_val.add_argument("--config", required=True)

    sub.add_parser("list-scenarios", help="list scenario types and bundled configs")

    args = parser.parse_args(argv)
    try:
        if args.command == "list-scenarios":
            for name, desc in SCENARIOS.items():
                print(f"{name}: {desc}")
            print("\nbundled configs:")
            for name in bundled_configs():
                print(f"  {name}")
            return 0
        if args.command == "validate":
            validate_config(_load_config(args.config))
            print("OK")
            return 0
        if args.command == "run":
            cfg = _load_config(args.config)
            validate_config(cfg)
            result = run_config(cfg, grid_override=args.grid, tol_override=args.tol)
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            csv_name = cfg.get("output", {}).get("csv", f"{cfg['scenario']}.csv")
            csv_path = out_dir / csv_name
            write_scenario_csv(result, csv_path)
            print(f"wrote {csv_path}")
            if args.states_csv:
                _write_states_csv(result, Path(args.states_csv))
                print(f"wrote {args.states_csv}")
            _print_summary(cfg, result)
            return 0
        if args.command == "compare":
            cfg = _load_config(args.config)
            tol = args.tol if args.tol is not None else cfg.get("compare", {}).get("tolerance", 1e-5)
            return compare_config(cfg, tolerance=tol, grid_override=args.grid)
        if args.command == "sweep":
            cfg = _load_config(args.config)
            raw = [v for v in args.values.split(",") if v.strip()]
            if not raw:
                raise ConfigError("--values is empty")
            try:
                values = [float(v) for v in raw]
            except ValueError as exc:
                raise ConfigError(f"--values must be numbers: {exc}") from exc
            out_dir = Path(args.out)
            out_dir.mkdir(parents=True, exist_ok=True)
            stem = Path(args.config).stem
            out_path = out_dir / f"{stem}_sweep_{args.param.replace('.', '_')}.csv"
            sweep_config(cfg, args.param, values, out_path, grid_override=args.grid)
            return 0
    except (ConfigError, NothingToCompare) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SpinWehrlError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
