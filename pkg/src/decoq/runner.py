"""Scenario execution: sweeps, tables, plots, and a hashed run manifest.

Every run writes CSV tables with LF line endings and floats at 17 significant
digits, so identical inputs produce byte-identical files.  The manifest
records the canonical scenario, the effective seed, the package version, and
a sha256 per output file.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .errors import ConfigError, SizingError, ValidationError
from .scenario import Scenario, serialize_scenario
from .codes import CodeSpec, asymptotic_x0, build_code, hamming_gv_check
from .dynamics import (
    ContactTerm,
    EnvironmentModel,
    FreeHamiltonian,
    InteractionSpec,
    build_noncontact,
    free_hamiltonian,
    interaction_matrix,
    pair_flip_hamiltonian,
    random_environment,
    single_flip_hamiltonian,
    trivial_environment,
)
from .metrics import (
    FidelityCurve,
    code_error,
    error_bound,
    fit_power_law,
    periodic_correction_decay,
    stabilization_bound,
    threshold_time,
)
from .tensor import operator_norm
from .svg import AxesSpec, emit_svg

BOUND_SLACK = 1e-12


@dataclass(frozen=True)
class RunManifest:
    scenario: str
    seed: int
    version: str
    duration_s: float
    files: dict[str, str]
    warnings: tuple[str, ...]


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.16e}"
    return str(x)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _bloch_state(theta: float, phi: float) -> tuple[complex, complex]:
    import math

    return (
        complex(math.cos(theta / 2.0)),
        complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2.0),
    )


def _materialize(scenario: Scenario, seed: int):
    """Build the code, environment, interaction matrix and free Hamiltonian."""
    code = build_code(scenario.code)
    if scenario.interaction_kind == "contact":
        env = trivial_environment(code.n)
        terms = []
        for omega, factors in scenario.contact_terms:
            string = [0] * code.n
            for axis, pos in factors:
                if not 1 <= pos <= code.n:
                    raise ConfigError(f"contact term addresses qubit {pos}, code has {code.n}")
                if string[pos - 1] != 0:
                    raise ConfigError(f"contact term repeats qubit {pos}")
                string[pos - 1] = axis
            terms.append(ContactTerm(float(omega), tuple(string)))
        if not terms:
            raise ConfigError("contact interaction declared without terms")
        spec = InteractionSpec("contact", terms=tuple(terms))
        v = interaction_matrix(spec, env_dim=1)
    else:
        env = random_environment(code.n, scenario.env_dim, scenario.coupling_bound, scenario.beta, seed)
        spec = InteractionSpec("non_contact", env=env)
        v = build_noncontact(env)
    return code, env, spec, v, free_hamiltonian(env)


def _guard(scenario: Scenario, code: CodeSpec, env_dim: int) -> None:
    joint = env_dim * code.register_dim * code.ancilla_dim
    if joint > scenario.max_dim:
        raise SizingError(
            f"joint dimension {env_dim} x {code.register_dim} x {code.ancilla_dim} = {joint} "
            f"exceeds the cap {scenario.max_dim}"
        )


def _sweep_point(args):
    code_name, env, h0, v, t, grid = args
    code = build_code(code_name)
    res = code_error(code, env, h0, v, float(t), grid)
    return (float(t), res.value, res.theta, res.phi)


def _map_points(tasks, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_point, tasks))
    return [_sweep_point(task) for task in tasks]


class _Outputs:
    """Collects written files and warnings for the manifest."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.names: list[str] = []
        self.warnings: list[str] = []

    def path(self, name: str) -> str:
        self.names.append(name)
        return os.path.join(self.out_dir, name)

    def csv(self, name: str, header: list[str], rows) -> None:
        _write_csv(self.path(name), header, rows)

    def svg(self, name: str, series, axes: AxesSpec) -> None:
        dropped = emit_svg(series, axes, self.path(name))
        if dropped:
            self.warnings.append(f"{name}: dropped {dropped} non-positive points on log axes")


def _fit_rows(label: str, samples) -> list[tuple]:
    fit = fit_power_law(FidelityCurve(tuple(samples)))
    return [(label, fit.exponent, fit.log_coefficient, fit.window[0], fit.window[1], fit.max_residual)]


_FIT_HEADER = ["scenario", "exponent", "log_coefficient", "window_min", "window_max", "residual"]


def _run_scaling(scenario: Scenario, seed: int, workers: int, out: _Outputs, check_bounds: bool) -> None:
    code, env, spec, v, h0 = _materialize(scenario, seed)
    _guard(scenario, code, env.dim)
    ts = scenario.time_grid.times()
    grid = (scenario.n_theta, scenario.n_phi)
    points = _map_points([(scenario.code, env, h0, v, t, grid) for t in ts], workers)
    v_norm = operator_norm(v)
    k = code.k_corr

    if check_bounds:
        coupling = env.coupling_bound
        if coupling <= 0:
            raise ConfigError("bound_check needs a positive coupling bound")
        x0 = asymptotic_x0()
        rows = []
        violations = 0
        for t, e, _, _ in points:
            rigorous = error_bound(t, k, v_norm)
            asymptotic = stabilization_bound(t, coupling, code.n, x0)
            ok = (rigorous > 1.0) or (e <= rigorous + BOUND_SLACK)
            violations += 0 if ok else 1
            rows.append((t, e, rigorous, asymptotic, ok))
        out.csv("bound_check.csv", ["t", "E", "bound", "stab_bound", "ok"], rows)
        out.csv(
            "threshold.csv",
            ["coupling_bound", "x0", "threshold_time"],
            [(coupling, x0, threshold_time(coupling, x0))],
        )
        if scenario.plots:
            out.svg(
                "bound_check.svg",
                [
                    ("measured", [(t, e) for t, e, *_ in rows]),
                    ("bound", [(t, b) for t, _, b, *_ in rows]),
                ],
                AxesSpec("t", "E", xlog=True, ylog=True, title="error vs rigorous envelope"),
            )
        if violations:
            raise ValidationError(f"{violations} sweep points exceed the rigorous error envelope")
        return

    sweep_rows = [(t, e, error_bound(t, k, v_norm), theta, phi) for t, e, theta, phi in points]
    out.csv("sweep.csv", ["t", "E", "bound", "argmax_theta", "argmax_phi"], sweep_rows)
    out.csv(
        "fit_summary.csv",
        _FIT_HEADER,
        _fit_rows(f"{scenario.kind}:{scenario.code}", [(t, e) for t, e, *_ in points]),
    )
    if scenario.plots:
        out.svg(
            "sweep.svg",
            [
                ("E", [(t, e) for t, e, *_ in points]),
                ("bound", [(t, b) for t, _, b, *_ in sweep_rows]),
            ],
            AxesSpec("t", "E", xlog=True, ylog=True, title=f"{scenario.code} error sweep"),
        )


def _run_intro(scenario: Scenario, seed: int, out: _Outputs) -> None:
    if not scenario.code.startswith("repetition"):
        raise ConfigError("the flip-drive benchmark runs on a repetition code")
    code = build_code(scenario.code)
    _guard(scenario, code, 1)
    if len(scenario.single_flip_omegas) != code.n:
        raise ConfigError(
            f"single-flip drive needs {code.n} frequencies, got {len(scenario.single_flip_omegas)}"
        )
    for k_pos, l_pos, _ in scenario.pair_flip:
        if not (1 <= k_pos <= code.n and 1 <= l_pos <= code.n):
            raise ConfigError(f"pair ({k_pos},{l_pos}) outside 1..{code.n}")
    env = trivial_environment(code.n)
    psi = _bloch_state(scenario.state_theta, scenario.state_phi)
    ts = scenario.time_grid.times()
    pairs = {(k_pos, l_pos): w for k_pos, l_pos, w in scenario.pair_flip}

    from .metrics import _CorrectionPipeline  # local import keeps the public surface small

    curves = {}
    for label, h in (
        ("single_flip", single_flip_hamiltonian(scenario.single_flip_omegas)),
        ("pair_flip", pair_flip_hamiltonian(pairs, code.n)),
    ):
        pipeline = _CorrectionPipeline(code, env, None, h)
        curves[label] = [(float(t), pipeline.error_direct(psi, float(t))) for t in ts]
        out.csv(f"{label}.csv", ["t", "E"], curves[label])
    fit_rows = _fit_rows("single_flip", curves["single_flip"]) + _fit_rows("pair_flip", curves["pair_flip"])
    out.csv("fit_summary.csv", _FIT_HEADER, fit_rows)
    if scenario.plots:
        out.svg(
            "flip_curves.svg",
            [(label, samples) for label, samples in curves.items()],
            AxesSpec("t", "E", xlog=True, ylog=True, title=f"{scenario.code} under flip drives"),
        )


def _run_bounds(scenario: Scenario, out: _Outputs) -> None:
    if not (1 <= scenario.n_min <= scenario.n_max):
        raise ConfigError("bounds table needs 1 <= n_min <= n_max")
    if not (0 <= scenario.k_min <= scenario.k_max):
        raise ConfigError("bounds table needs 0 <= k_min <= k_max")
    rows = []
    for n in range(scenario.n_min, scenario.n_max + 1):
        for k in range(scenario.k_min, min(scenario.k_max, n) + 1):
            row = hamming_gv_check(n, k)
            rows.append((row.n, row.k, row.hamming_ok, row.gv_ok))
    out.csv("bounds.csv", ["n", "k", "hamming_ok", "gv_ok"], rows)


def _run_periodic(scenario: Scenario, seed: int, out: _Outputs) -> None:
    code, env, spec, v, h0 = _materialize(scenario, seed)
    _guard(scenario, code, env.dim)
    if scenario.halvings < 0:
        raise ConfigError("halvings must be non-negative")
    psi = _bloch_state(scenario.state_theta, scenario.state_phi)
    rate_rows = []
    plot_series = []
    for i in range(scenario.halvings + 1):
        dt = scenario.dt / 2 ** i
        for corrected in (True, False):
            decay = periodic_correction_decay(
                code, env, h0, v, dt, scenario.cycles, psi, apply_correction=corrected
            )
            tag = "on" if corrected else "off"
            out.csv(f"periodic_{i}_{tag}.csv", ["cycle", "total_t", "fidelity"], decay.samples)
            rate_rows.append((dt, corrected, decay.rate))
            if corrected:
                plot_series.append((f"dt={dt:.6g}", [(t, f) for _, t, f in decay.samples]))
    out.csv("rates.csv", ["dt", "corrected", "rate"], rate_rows)
    if scenario.plots:
        out.svg(
            "periodic.svg",
            plot_series,
            AxesSpec("total time", "fidelity", title=f"{scenario.code} under periodic recovery"),
        )


def run(
    scenario: Scenario,
    out_dir: str | None = None,
    seed: int | None = None,
    workers: int = 1,
    plots: bool | None = None,
) -> RunManifest:
    """Execute a scenario and return the manifest (also written as manifest.json)."""
    started = time.monotonic()
    effective_seed = scenario.seed if seed is None else int(seed)
    effective_out = scenario.out if out_dir is None else str(out_dir)
    if plots is not None or seed is not None or out_dir is not None:
        from dataclasses import replace

        scenario = replace(
            scenario,
            seed=effective_seed,
            out=effective_out,
            plots=scenario.plots if plots is None else bool(plots),
        )
    os.makedirs(effective_out, exist_ok=True)
    out = _Outputs(effective_out)

    if scenario.kind == "scaling_sweep":
        _run_scaling(scenario, effective_seed, workers, out, check_bounds=False)
    elif scenario.kind == "bound_check":
        _run_scaling(scenario, effective_seed, workers, out, check_bounds=True)
    elif scenario.kind == "intro_example":
        _run_intro(scenario, effective_seed, out)
    elif scenario.kind == "bounds_table":
        _run_bounds(scenario, out)
    elif scenario.kind == "periodic_correction":
        _run_periodic(scenario, effective_seed, out)
    else:  # unreachable: Scenario validates kind
        raise ConfigError(f"unknown kind {scenario.kind!r}")

    files = {name: _sha256(os.path.join(effective_out, name)) for name in sorted(out.names)}
    manifest = RunManifest(
        scenario=serialize_scenario(scenario),
        seed=effective_seed,
        version=__version__,
        duration_s=time.monotonic() - started,
        files=files,
        warnings=tuple(out.warnings),
    )
    payload = {
        "scenario": manifest.scenario,
        "seed": manifest.seed,
        "version": manifest.version,
        "duration_s": manifest.duration_s,
        "files": manifest.files,
        "warnings": list(manifest.warnings),
    }
    with open(os.path.join(effective_out, "manifest.json"), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def verify_manifest(out_dir: str) -> list[str]:
    """Re-hash the files listed in a run manifest; returns the names that drifted."""
    with open(os.path.join(out_dir, "manifest.json"), "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    drifted = []
    for name, digest in sorted(payload["files"].items()):
        path = os.path.join(out_dir, name)
        if not os.path.exists(path) or _sha256(path) != digest:
            drifted.append(name)
    return drifted
