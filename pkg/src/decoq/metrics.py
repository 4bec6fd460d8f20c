"""Correction-efficiency metrics.

The figure of merit is the survival probability of an encoded logical state
that is evolved jointly with its environment, run through unitary recovery
with a fresh ancilla, and compared with itself:

    F_psi(t) = tr[ R U(t) (rho_env (x) P_psi (x) P_anc) U(t)^dag R^dag P_psi ].

Everything here is evaluated by propagating the eigenvectors of the initial
environment state, which reproduces the trace exactly while keeping the error
1 - F numerically clean far below machine-epsilon-of-one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import FitError, ShapeError, UnsupportedInteractionError, ValidationError
from . import tolerances as tol
from .tensor import _as_complex, partial_trace_array, require_hermitian
from .pauli import embed
from .dynamics import EnvironmentModel, FreeHamiltonian, InteractionSpec, evolve
from .codes import CodeSpec, asymptotic_x0, encode_logical, recovery_channel, recovery_unitary


@dataclass(frozen=True)
class FidelityCurve:
    """Time-ordered (t, value) samples with light provenance metadata."""

    samples: tuple[tuple[float, float], ...]
    code: str = ""
    interaction: str = ""
    seed: int | None = None

    def __post_init__(self):
        pairs = tuple((float(t), float(v)) for t, v in self.samples)
        object.__setattr__(self, "samples", pairs)
        times = [t for t, _ in pairs]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValidationError("curve times must increase strictly")
        for t, v in pairs:
            if v < -tol.FIDELITY_RANGE_TOL or v > 1.0 + tol.FIDELITY_RANGE_TOL:
                raise ValidationError(f"curve value {v!r} at t={t!r} outside [0, 1]")


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares line through (log t, log E) over the chosen window."""

    exponent: float
    log_coefficient: float
    window: tuple[float, float]
    max_residual: float

    @property
    def coefficient(self) -> float:
        return math.exp(self.log_coefficient)


@dataclass(frozen=True)
class CodeErrorResult:
    """Supremum of the error functional over the logical sphere, with its location."""

    value: float
    theta: float
    phi: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class DecayResult:
    """Fitted fidelity decay rate and the per-cycle trace behind it."""

    rate: float
    samples: tuple[tuple[int, float, float], ...]


@dataclass(frozen=True)
class BoundReport:
    """Measured error next to its rigorous and asymptotic envelopes."""

    rows: tuple[tuple[float, float, float, float], ...]  # (t, measured, bound, stabilization)
    threshold: float

    def __post_init__(self):
        rows = tuple((float(a), float(b), float(c), float(d)) for a, b, c, d in self.rows)
        object.__setattr__(self, "rows", rows)
        times = [r[0] for r in rows]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValidationError("bound report times must increase strictly")
        if any(r[2] < 0 or r[3] < 0 for r in rows):
            raise ValidationError("bounds cannot be negative")


def _logical_amplitudes(psi_logical) -> tuple[complex, complex]:
    try:
        alpha, beta = psi_logical
    except (TypeError, ValueError):
        raise ShapeError("logical state must be a pair (alpha, beta)") from None
    return complex(alpha), complex(beta)


class _CorrectionPipeline:
    """Precomputed machinery for repeated fidelity evaluations.

    Holds the eigendecompositions of the joint Hamiltonian and of the initial
    environment state, plus the unitary recovery.  The joint unitary acts on
    environment (x) register and the recovery on register (x) ancilla, so a
    propagated vector is reshaped rather than embedded in the full space.
    """

    def __init__(self, code: CodeSpec, env: EnvironmentModel, h0: FreeHamiltonian | None, v: np.ndarray):
        self.code = code
        self.env = env
        self.de = env.dim
        self.dc = code.register_dim
        self.da = code.ancilla_dim
        v = _as_complex(v)
        d = self.de * self.dc
        if v.shape != (d, d):
            raise ShapeError(f"interaction shape {v.shape} does not match env {self.de} x register {self.dc}")
        h = v if h0 is None else h0.matrix() + v
        if h.shape != (d, d):
            raise ShapeError("free Hamiltonian dimensions do not match the interaction")
        h = require_hermitian(h, tol.HERMITIAN_INPUT_TOL, "joint Hamiltonian")
        self.evals, self.evecs = np.linalg.eigh(h)

        w, vecs = np.linalg.eigh(env.rho0.array)
        keep = w > 1e-15
        self.env_weights = w[keep]
        self.env_vecs = vecs[:, keep]

        self.recovery = recovery_unitary(code)
        anc = np.zeros(self.da, dtype=complex)
        anc[0] = 1.0
        self.ancilla = anc

    def encoded(self, psi_logical) -> np.ndarray:
        alpha, beta = _logical_amplitudes(psi_logical)
        return encode_logical(self.code, alpha, beta).amplitudes

    def _recovered(self, psi_bar: np.ndarray, t: float):
        """Yield (weight, amplitude sheet, residual block) per environment eigenvector.

        The amplitude sheet collects <psi_bar | . > over register indices, the
        residual block is the orthogonal remainder; together they split every
        propagated vector against the encoded state.
        """
        phases = np.exp(-1j * self.evals * float(t))
        for wi, evec in zip(self.env_weights, self.env_vecs.T):
            vec0 = np.kron(evec, psi_bar)
            vec_t = self.evecs @ (phases * (self.evecs.conj().T @ vec0))
            joint = np.kron(vec_t, self.ancilla).reshape(self.de, self.dc * self.da)
            after = (joint @ self.recovery.T).reshape(self.de, self.dc, self.da)
            amp = np.einsum("c,eca->ea", psi_bar.conj(), after)
            resid = after - psi_bar[None, :, None] * amp[:, None, :]
            yield float(wi), amp, resid

    def fidelity(self, psi_logical, t: float) -> float:
        psi_bar = self.encoded(psi_logical)
        f = 0.0
        for wi, amp, _ in self._recovered(psi_bar, t):
            f += wi * float(np.sum(np.abs(amp) ** 2))
        if f < -tol.FIDELITY_RANGE_TOL or f > 1.0 + tol.FIDELITY_RANGE_TOL:
            raise ValidationError(f"fidelity {f!r} outside [0, 1]")
        return min(max(f, 0.0), 1.0)

    def error_direct(self, psi_logical, t: float) -> float:
        """Error via the complement projector; exact for values far below 1."""
        psi_bar = self.encoded(psi_logical)
        e = 0.0
        for wi, _, resid in self._recovered(psi_bar, t):
            e += wi * float(np.vdot(resid, resid).real)
        if e < -tol.FIDELITY_RANGE_TOL or e > 1.0 + tol.FIDELITY_RANGE_TOL:
            raise ValidationError(f"error value {e!r} outside [0, 1]")
        return max(e, 0.0)


def fidelity(code: CodeSpec, env: EnvironmentModel, h0: FreeHamiltonian | None, v: np.ndarray, psi_logical, t: float) -> float:
    """Survival probability of the encoded state after evolution and recovery."""
    return _CorrectionPipeline(code, env, h0, v).fidelity(psi_logical, t)


def error_functional(
    code: CodeSpec,
    env: EnvironmentModel,
    h0: FreeHamiltonian | None,
    v: np.ndarray,
    psi_logical,
    t: float,
    method: str = "fidelity",
) -> float:
    """1 - fidelity, or the same trace with the complement projector.

    ``method="fidelity"`` subtracts from one; ``method="projector"`` computes
    the orthogonal weight directly, which stays exact for errors far below
    machine epsilon of one.  The two agree within the reconstruction
    tolerance.
    """
    pipeline = _CorrectionPipeline(code, env, h0, v)
    if method == "fidelity":
        return 1.0 - pipeline.fidelity(psi_logical, t)
    if method == "projector":
        return pipeline.error_direct(psi_logical, t)
    raise ShapeError(f"unknown method {method!r}; use 'fidelity' or 'projector'")


def _bloch_pair(theta: float, phi: float) -> tuple[complex, complex]:
    return (
        complex(math.cos(theta / 2.0)),
        complex(math.cos(phi), math.sin(phi)) * math.sin(theta / 2.0),
    )


def code_error(
    code: CodeSpec,
    env: EnvironmentModel,
    h0: FreeHamiltonian | None,
    v: np.ndarray,
    t: float,
    grid: tuple[int, int] = (12, 12),
) -> CodeErrorResult:
    """Supremum of the error over the encoded logical sphere.

    The sphere is scanned on a (theta, phi) grid of at least 8 x 8 and the
    cell around the maximum is rescanned at triple density.  The orthogonal
    projector route is used pointwise so small values keep full precision.
    """
    n_theta, n_phi = int(grid[0]), int(grid[1])
    if n_theta < 8 or n_phi < 8:
        raise ShapeError(f"state grid must be at least 8 x 8, got {grid}")
    pipeline = _CorrectionPipeline(code, env, h0, v)

    def error_at(theta: float, phi: float) -> float:
        return pipeline.error_direct(_bloch_pair(theta, phi), t)

    d_theta = math.pi / (n_theta - 1)
    d_phi = 2.0 * math.pi / n_phi
    best = (-1.0, 0.0, 0.0)
    for i in range(n_theta):
        theta = i * d_theta
        for j in range(n_phi):
            phi = j * d_phi
            e = error_at(theta, phi)
            if e > best[0]:
                best = (e, theta, phi)

    # local 3x refinement around the coarse maximum
    _, theta0, phi0 = best
    for di in range(-3, 4):
        theta = min(max(theta0 + di * d_theta / 3.0, 0.0), math.pi)
        for dj in range(-3, 4):
            phi = (phi0 + dj * d_phi / 3.0) % (2.0 * math.pi)
            e = error_at(theta, phi)
            if e > best[0]:
                best = (e, theta, phi)
    return CodeErrorResult(value=best[0], theta=best[1], phi=best[2])


def fit_power_law(
    curve,
    residual_threshold: float = tol.FIT_RESIDUAL_DEFAULT,
    floor: float = tol.FIT_FLOOR,
    min_samples: int = tol.FIT_MIN_SAMPLES,
) -> PowerLawFit:
    """Fit E ~ c * t^m on the largest clean low-t window.

    Samples at or below ``floor`` are discarded.  Windows are anchored at the
    smallest usable time and grown as far as the max absolute residual of the
    straight-line fit in log-log stays within ``residual_threshold``; if no
    window anchored there qualifies, the anchor moves up.  Raises ``FitError``
    with a actionable message when the data cannot support a fit.
    """
    pairs = curve.samples if isinstance(curve, FidelityCurve) else tuple(curve)
    usable = [(float(t), float(e)) for t, e in pairs if float(e) > floor and float(t) > 0.0]
    if len(usable) < min_samples:
        raise FitError(
            f"only {len(usable)} samples above the floor {floor:g}, need {min_samples}; "
            "extend the sweep toward larger times where the error is resolvable"
        )
    log_t = np.log([t for t, _ in usable])
    log_e = np.log([e for _, e in usable])
    for start in range(0, len(usable) - min_samples + 1):
        for end in range(len(usable), start + min_samples - 1, -1):
            x, y = log_t[start:end], log_e[start:end]
            slope, intercept = np.polyfit(x, y, 1)
            residual = float(np.max(np.abs(y - (slope * x + intercept))))
            if residual <= residual_threshold:
                return PowerLawFit(
                    exponent=float(slope),
                    log_coefficient=float(intercept),
                    window=(usable[start][0], usable[end - 1][0]),
                    max_residual=residual,
                )
    raise FitError(
        f"no window of {min_samples}+ samples fits a line within residual "
        f"{residual_threshold:g}; sample deeper into the small-t regime"
    )


def leading_coefficient(code: CodeSpec, env: EnvironmentModel, interaction: InteractionSpec, psi_logical, k: int) -> float:
    """Coefficient of t^(2k+2) in the short-time error of a k-correcting code.

    Only chains of k+1 interaction factors on pairwise distinct qubits
    survive recovery and the complement projector, so the coefficient is

        || (1 - P_psi) R W (|env_i> (x) |psi_bar> (x) |anc>) ||^2 / ((k+1)!)^2

    summed over the environment eigenvectors, with W the sum of ordered
    products V^{l_1} ... V^{l_{k+1}} over distinct index tuples.  Defined for
    non-contact interactions only.
    """
    if interaction.kind != "non_contact":
        raise UnsupportedInteractionError("the short-time coefficient requires a non-contact interaction")
    k = int(k)
    if k != code.k_corr:
        raise ShapeError(f"k = {k} does not match the code's correction strength {code.k_corr}")
    if env.n_qubits != code.n:
        raise ShapeError(f"environment couples {env.n_qubits} qubits, code uses {code.n}")

    de, dc, da = env.dim, code.register_dim, code.ancilla_dim
    n = code.n
    per_qubit = []
    for l in range(1, n + 1):
        v_l = np.zeros((de * dc, de * dc), dtype=complex)
        for mu in (1, 2, 3):
            h = env.couplings[l - 1][mu - 1]
            if np.any(h):
                v_l += np.kron(h, embed(mu, l, n))
        per_qubit.append(v_l)

    w_total = np.zeros((de * dc, de * dc), dtype=complex)
    for tup in itertools.permutations(range(n), k + 1):
        prod = per_qubit[tup[0]]
        for idx in tup[1:]:
            prod = prod @ per_qubit[idx]
        w_total += prod

    alpha, beta = _logical_amplitudes(psi_logical)
    psi_bar = encode_logical(code, alpha, beta).amplitudes
    recovery = recovery_unitary(code)
    anc = np.zeros(da, dtype=complex)
    anc[0] = 1.0

    w, vecs = np.linalg.eigh(env.rho0.array)
    total = 0.0
    for wi, evec in zip(w, vecs.T):
        if wi <= 1e-15:
            continue
        vec = w_total @ np.kron(evec, psi_bar)
        joint = np.kron(vec, anc).reshape(de, dc * da)
        after = (joint @ recovery.T).reshape(de, dc, da)
        amp = np.einsum("c,eca->ea", psi_bar.conj(), after)
        resid = after - psi_bar[None, :, None] * amp[:, None, :]
        total += float(wi) * float(np.vdot(resid, resid).real)
    return total / math.factorial(k + 1) ** 2


def error_bound(t: float, k: int, v_norm: float) -> float:
    """Rigorous error envelope t^(2k+2) ||V||^(2k+2) / ((k+1)!)^2."""
    t, v_norm, k = float(t), float(v_norm), int(k)
    if t < 0 or v_norm < 0 or k < 0:
        raise ShapeError("need t >= 0, ||V|| >= 0, k >= 0")
    return (t * v_norm) ** (2 * k + 2) / math.factorial(k + 1) ** 2


def stabilization_bound(t: float, coupling_bound: float, n: int, x0: float | None = None) -> float:
    """Asymptotic envelope (t C e / x0)^(2 x0 n) for a length-n code at the rate edge."""
    t, c = float(t), float(coupling_bound)
    n = int(n)
    if t < 0 or c <= 0 or n < 1:
        raise ShapeError("need t >= 0, coupling bound > 0, n >= 1")
    x0 = asymptotic_x0() if x0 is None else float(x0)
    return (t * c * math.e / x0) ** (2.0 * x0 * n)


def threshold_time(coupling_bound: float, x0: float | None = None) -> float:
    """Time below which the stabilization envelope shrinks with code length."""
    c = float(coupling_bound)
    if c <= 0:
        raise ShapeError("coupling bound must be positive")
    x0 = asymptotic_x0() if x0 is None else float(x0)
    return x0 / (c * math.e)


def bound_report(
    times,
    measured,
    k: int,
    v_norm: float,
    coupling_bound: float,
    n: int,
    x0: float | None = None,
) -> BoundReport:
    """Tabulate measured errors against both envelopes."""
    times = [float(t) for t in times]
    measured = [float(e) for e in measured]
    if len(times) != len(measured):
        raise ShapeError("times and measurements must align")
    x0 = asymptotic_x0() if x0 is None else float(x0)
    rows = tuple(
        (t, e, error_bound(t, k, v_norm), stabilization_bound(t, coupling_bound, n, x0))
        for t, e in zip(times, measured)
    )
    return BoundReport(rows=rows, threshold=threshold_time(coupling_bound, x0))


def periodic_correction_decay(
    code: CodeSpec,
    env: EnvironmentModel,
    h0: FreeHamiltonian | None,
    v: np.ndarray,
    dt: float,
    cycles: int,
    psi_logical,
    apply_correction: bool = True,
    reset_environment: bool = False,
) -> DecayResult:
    """Fidelity trace under stroboscopic recovery every ``dt``.

    The joint environment + register state is kept between cycles; each
    recovery consumes a fresh ancilla, which is what the Kraus form of the
    recovery channel implements.  ``reset_environment`` discards environment
    correlations after each correction instead.  The rate is the negative
    slope of log F against total time.
    """
    if int(cycles) < 10:
        raise ShapeError("need at least 10 cycles for a stable rate")
    if float(dt) <= 0:
        raise ShapeError("cycle time must be positive")
    alpha, beta = _logical_amplitudes(psi_logical)
    psi_bar = encode_logical(code, alpha, beta).amplitudes
    de, dc = env.dim, code.register_dim

    u = evolve(h0, v, float(dt))
    if u.shape != (de * dc, de * dc):
        raise ShapeError("interaction dimensions do not match environment x register")
    p_psi = np.outer(psi_bar, psi_bar.conj())
    p_full = np.kron(np.eye(de, dtype=complex), p_psi)
    rho = np.kron(env.rho0.array, p_psi)
    eye_e = np.eye(de, dtype=complex)
    kraus = [np.kron(eye_e, op) for op in recovery_channel(code).operators]

    samples = [(0, 0.0, 1.0)]
    for m in range(1, int(cycles) + 1):
        rho = u @ rho @ u.conj().T
        if apply_correction:
            rho = sum(op @ rho @ op.conj().T for op in kraus)
        if reset_environment:
            register = partial_trace_array(rho, (de, dc), (1,))
            rho = np.kron(env.rho0.array, register)
        f = float(np.einsum("ij,ji->", rho, p_full).real)
        samples.append((m, m * float(dt), f))

    ts = np.array([s[1] for s in samples if s[2] > 0.0])
    lf = np.log([s[2] for s in samples if s[2] > 0.0])
    if ts.size < 2:
        raise FitError("fidelity collapsed to zero; shorten dt or the cycle count")
    slope, _ = np.polyfit(ts, lf, 1)
    return DecayResult(rate=-float(slope), samples=tuple(samples))
