"""Joint environment + register Hamiltonians and their evolutions.

The central object is a non-contact interaction

    V = sum_{l=1}^{n} sum_{mu=1}^{3} h^l_mu (x) sigma^l_mu,

one environment operator per qubit per Pauli axis and no multi-qubit terms.
Free evolution is a sum of an environment part and independent single-qubit
parts; contact interactions (products of Paulis on several qubits) are
supported as explicit term lists so that counterexamples can be driven
through the same machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ShapeError, ValidationError
from . import tolerances as tol
from .tensor import (
    DensityMatrix,
    _as_complex,
    expm_hermitian,
    kron,
    operator_norm,
    partial_trace,
    require_hermitian,
)
from .pauli import embed, pauli_string


@dataclass(frozen=True)
class EnvironmentModel:
    """Environment Hilbert space, initial state and per-qubit couplings.

    ``couplings[l]`` holds the three Hermitian environment operators paired
    with sigma_x, sigma_y, sigma_z on qubit ``l + 1``.  The largest operator
    norm among them is the recorded coupling bound.
    """

    dim: int
    rho0: DensityMatrix
    h_env: np.ndarray
    couplings: tuple[tuple[np.ndarray, np.ndarray, np.ndarray], ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ShapeError("environment dimension must be at least 1")
        if self.rho0.dim != self.dim:
            raise ShapeError(f"rho0 dimension {self.rho0.dim} does not match d_e = {self.dim}")
        object.__setattr__(
            self, "h_env", require_hermitian(self.h_env, tol.HERMITIAN_TOL, "environment Hamiltonian")
        )
        checked = []
        for l, triple in enumerate(self.couplings):
            if len(triple) != 3:
                raise ShapeError(f"qubit {l + 1} needs exactly three coupling operators")
            checked.append(
                tuple(
                    require_hermitian(h, tol.HERMITIAN_TOL, f"coupling h[{l + 1}][{mu + 1}]")
                    for mu, h in enumerate(triple)
                )
            )
        object.__setattr__(self, "couplings", tuple(checked))

    @property
    def n_qubits(self) -> int:
        return len(self.couplings)

    @property
    def coupling_bound(self) -> float:
        norms = [operator_norm(h) for triple in self.couplings for h in triple]
        return max(norms) if norms else 0.0


def gibbs_weights(dim: int, beta: float) -> np.ndarray:
    """Normalized weights w_i proportional to exp(-beta * i); beta = 0 is maximally mixed."""
    w = np.exp(-float(beta) * np.arange(dim, dtype=float))
    return w / w.sum()


def trivial_environment(n_qubits: int) -> EnvironmentModel:
    """One-dimensional environment with zero couplings, for register-only models."""
    zero = np.zeros((1, 1), dtype=complex)
    rho = DensityMatrix(np.eye(1, dtype=complex), (1,))
    return EnvironmentModel(1, rho, zero, tuple((zero, zero, zero) for _ in range(n_qubits)))


def random_environment(
    n_qubits: int,
    env_dim: int,
    coupling_bound: float = 1.0,
    beta: float = 0.0,
    seed: int = 42,
) -> EnvironmentModel:
    """Draw a seeded random environment with couplings of exact operator norm.

    Each coupling starts as the Hermitian part of an i.i.d. standard complex
    Gaussian matrix and is rescaled so its operator norm equals
    ``coupling_bound`` exactly.  The free environment Hamiltonian is a unit
    energy ladder and the initial state carries Gibbs-like diagonal weights
    for the inverse-temperature knob ``beta``.
    """
    if env_dim < 1:
        raise ShapeError("environment dimension must be at least 1")
    if coupling_bound < 0:
        raise ValidationError("coupling bound must be non-negative")
    rng = np.random.Generator(np.random.Philox(seed))
    couplings = []
    for _ in range(n_qubits):
        triple = []
        for _ in range(3):
            g = rng.standard_normal((env_dim, env_dim)) + 1j * rng.standard_normal((env_dim, env_dim))
            h = (g + g.conj().T) / 2.0
            norm = operator_norm(h)
            if coupling_bound == 0.0 or norm == 0.0:
                h = np.zeros_like(h)
            else:
                h = h * (coupling_bound / norm)
            triple.append(h)
        couplings.append(tuple(triple))
    rho0 = DensityMatrix(np.diag(gibbs_weights(env_dim, beta)).astype(complex), (env_dim,))
    h_env = np.diag(np.arange(env_dim, dtype=float)).astype(complex)
    return EnvironmentModel(env_dim, rho0, h_env, tuple(couplings))


@dataclass(frozen=True)
class FreeHamiltonian:
    """Non-interacting part: an environment term plus independent qubit terms."""

    env_term: np.ndarray
    qubit_terms: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "env_term", require_hermitian(self.env_term, tol.HERMITIAN_TOL, "free environment term")
        )
        checked = []
        for l, q in enumerate(self.qubit_terms):
            q = require_hermitian(q, tol.HERMITIAN_TOL, f"free qubit term {l + 1}")
            if q.shape != (2, 2):
                raise ShapeError(f"free qubit term {l + 1} must be 2x2, got {q.shape}")
            checked.append(q)
        object.__setattr__(self, "qubit_terms", tuple(checked))

    @property
    def env_dim(self) -> int:
        return self.env_term.shape[0]

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_terms)

    def matrix(self) -> np.ndarray:
        """Full matrix on environment (x) register."""
        de, n = self.env_dim, self.n_qubits
        dc = 2 ** n
        out = kron(self.env_term, np.eye(dc))
        eye_e = np.eye(de, dtype=complex)
        for l, q in enumerate(self.qubit_terms, start=1):
            single = np.kron(
                np.kron(np.eye(2 ** (l - 1), dtype=complex), q),
                np.eye(2 ** (n - l), dtype=complex),
            )
            out += kron(eye_e, single)
        return out


def free_hamiltonian(env: EnvironmentModel, qubit_terms: Sequence[np.ndarray] | None = None) -> FreeHamiltonian:
    """Free Hamiltonian using the environment's own term; qubit terms default to zero."""
    if qubit_terms is None:
        qubit_terms = tuple(np.zeros((2, 2), dtype=complex) for _ in range(env.n_qubits))
    return FreeHamiltonian(env.h_env, tuple(qubit_terms))


@dataclass(frozen=True)
class ContactTerm:
    """One product term: coefficient, Pauli letters per qubit, optional environment factor."""

    omega: float
    string: tuple[int, ...]
    env_factor: np.ndarray | None = None


@dataclass(frozen=True)
class InteractionSpec:
    """Declared interaction: either non-contact (from an environment model) or a term list."""

    kind: str  # "non_contact" | "contact"
    env: EnvironmentModel | None = None
    terms: tuple[ContactTerm, ...] = ()

    def __post_init__(self):
        if self.kind not in ("non_contact", "contact"):
            raise ShapeError(f"unknown interaction kind {self.kind!r}")
        if self.kind == "non_contact" and self.env is None:
            raise ShapeError("non-contact interaction needs an environment model")
        if self.kind == "contact" and not self.terms:
            raise ShapeError("contact interaction needs at least one term")

    @property
    def n_qubits(self) -> int:
        if self.kind == "non_contact":
            return self.env.n_qubits
        return len(self.terms[0].string)


def build_noncontact(env: EnvironmentModel, n_qubits: int | None = None) -> np.ndarray:
    """Assemble V = sum_l sum_mu h^l_mu (x) sigma^l_mu on environment (x) register."""
    n = env.n_qubits if n_qubits is None else int(n_qubits)
    if n != env.n_qubits:
        raise ShapeError(f"environment provides couplings for {env.n_qubits} qubits, asked for {n}")
    d = env.dim * 2 ** n
    v = np.zeros((d, d), dtype=complex)
    for l, triple in enumerate(env.couplings, start=1):
        for mu, h in enumerate(triple, start=1):
            if np.any(h):
                v += kron(h, embed(mu, l, n))
    require_hermitian(v, tol.HERMITIAN_TOL, "non-contact interaction")
    return v


def interaction_matrix(spec: InteractionSpec, env_dim: int | None = None) -> np.ndarray:
    """Materialize an interaction declaration as a Hermitian matrix."""
    if spec.kind == "non_contact":
        return build_noncontact(spec.env)
    n = spec.n_qubits
    de = env_dim or 1
    for term in spec.terms:
        if len(term.string) != n:
            raise ShapeError("all contact terms must address the same number of qubits")
        if term.env_factor is not None:
            de = term.env_factor.shape[0]
    d = de * 2 ** n
    v = np.zeros((d, d), dtype=complex)
    eye_e = np.eye(de, dtype=complex)
    for term in spec.terms:
        env_part = eye_e if term.env_factor is None else _as_complex(term.env_factor)
        v += float(term.omega) * kron(env_part, pauli_string(term.string))
    return require_hermitian(v, tol.HERMITIAN_TOL, "contact interaction")


def single_flip_hamiltonian(omegas: Sequence[float]) -> np.ndarray:
    """Independent flip drive sum_l omega_l sigma_x^l on a bare register."""
    omegas = [float(w) for w in omegas]
    n = len(omegas)
    if n < 1:
        raise ShapeError("need at least one frequency")
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for l, w in enumerate(omegas, start=1):
        h += w * embed(1, l, n)
    return h


def pair_flip_hamiltonian(pair_omegas: Mapping[tuple[int, int], float], n_qubits: int) -> np.ndarray:
    """Correlated flip drive sum over pairs omega_kl sigma_x^k sigma_x^l."""
    n = int(n_qubits)
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for (k, l), w in pair_omegas.items():
        if k == l:
            raise ShapeError(f"pair ({k},{l}) must couple two distinct qubits")
        if not (1 <= k <= n and 1 <= l <= n):
            raise ShapeError(f"pair ({k},{l}) outside 1..{n}")
        h += float(w) * (embed(1, k, n) @ embed(1, l, n))
    return h


def single_flip_evolution(omegas: Sequence[float], t: float) -> np.ndarray:
    """Closed form prod_l [cos(w_l t) + i sin(w_l t) sigma_x^l].

    All terms commute, so this equals exp(+i H t) for the single-flip drive;
    the sign convention follows the product form.
    """
    omegas = [float(w) for w in omegas]
    n = len(omegas)
    u = np.eye(2 ** n, dtype=complex)
    for l, w in enumerate(omegas, start=1):
        u = u @ (np.cos(w * t) * np.eye(2 ** n) + 1j * np.sin(w * t) * embed(1, l, n))
    return u


def pair_flip_evolution(pair_omegas: Mapping[tuple[int, int], float], n_qubits: int, t: float) -> np.ndarray:
    """Closed form prod over pairs [cos(w_kl t) + i sin(w_kl t) sigma_x^k sigma_x^l]."""
    n = int(n_qubits)
    u = np.eye(2 ** n, dtype=complex)
    for (k, l), w in pair_omegas.items():
        gen = embed(1, k, n) @ embed(1, l, n)
        u = u @ (np.cos(float(w) * t) * np.eye(2 ** n) + 1j * np.sin(float(w) * t) * gen)
    return u


def evolve(h0: FreeHamiltonian | None, v: np.ndarray, t: float) -> np.ndarray:
    """Joint unitary exp(-i (H0 + V) t)."""
    v = _as_complex(v)
    h = v if h0 is None else h0.matrix() + v
    return expm_hermitian(h, t)


def interaction_picture_v(h0: FreeHamiltonian, v: np.ndarray, t: float) -> np.ndarray:
    """Rotated interaction exp(+i H0 t) V exp(-i H0 t)."""
    u_plus = expm_hermitian(h0.matrix(), -t)  # exp(+i H0 t)
    return u_plus @ _as_complex(v) @ u_plus.conj().T


def dyson_truncated(
    v_of_t: Callable[[float], np.ndarray],
    t: float,
    order: int,
    steps: int = 256,
) -> np.ndarray:
    """Time-ordered series for the interaction-picture evolution, truncated.

    Returns sum_{l=0}^{order} of the iterated integrals

        (-i)^l  int_0^t ds_1 int_0^{s_1} ds_2 ... V(s_1) V(s_2) ... V(s_l),

    evaluated with a cumulative composite midpoint rule on a fixed grid, so
    the result is deterministic for fixed ``steps``.  The quadrature error is
    O((t/steps)^2); convergence can be checked by doubling ``steps``.
    """
    if order < 0:
        raise ShapeError("order must be non-negative")
    if steps < 16:
        raise ShapeError("need at least 16 quadrature steps")
    t = float(t)
    h = t / steps
    mids = (np.arange(steps) + 0.5) * h
    samples = [_as_complex(v_of_t(float(s))) for s in mids]
    d = samples[0].shape[0]
    eye = np.eye(d, dtype=complex)

    total = eye.copy()
    # prev[j] approximates the order-(l-1) iterated integral at the midpoint mids[j]
    prev = [eye] * steps
    for _ in range(order):
        prods = [samples[j] @ prev[j] for j in range(steps)]
        running = np.zeros((d, d), dtype=complex)
        cur = []
        for j in range(steps):
            cur.append(-1j * (h * running + 0.5 * h * prods[j]))
            running = running + prods[j]
        total = total + (-1j) * h * running
        prev = cur
    return total


def decoherence_chain(
    rho0: DensityMatrix,
    env: EnvironmentModel,
    h0: FreeHamiltonian | None,
    v: np.ndarray,
    t: float,
) -> DensityMatrix:
    """Reduced register state after joint evolution from a product start.

    rho(t) = tr_env[ U(t) (rho_env (x) rho0) U(t)^dag ] with U = exp(-i(H0+V)t).
    """
    joint0 = kron(env.rho0.array, rho0.array)
    u = evolve(h0, v, t)
    if u.shape != joint0.shape:
        raise ShapeError(f"interaction shape {u.shape} does not match env x register {joint0.shape}")
    joint_t = u @ joint0 @ u.conj().T
    dims = (env.dim,) + rho0.dims
    full = DensityMatrix(joint_t, dims)
    return partial_trace(full, range(1, len(dims)))
