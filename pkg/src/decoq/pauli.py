"""Pauli strings and the error-operator decomposition of joint unitaries.

A unitary U on an environment factor of dimension ``d_e`` tensored with ``n``
qubits splits uniquely as

    U = sum_v  A_v (x) sigma_v,        sigma_v = sigma_{v_1} (x) ... (x) sigma_{v_n),

with v running over index vectors in {0,1,2,3}^n and A_v an operator on the
environment alone.  The inverse is a partial trace over the register,
A_v = 2^{-n} tr_c[U (1 (x) sigma_v)].  The number of non-identity letters in v
is the rank of the error and the Frobenius weights of the A_v, normalized by
d_e, form a probability distribution over ranks whenever U is unitary.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, ValidationError
from . import tolerances as tol
from .tensor import _as_complex

SIGMA0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA0, SIGMA_X, SIGMA_Y, SIGMA_Z)

PauliIndexVector = tuple[int, ...]


def _check_indices(indices) -> PauliIndexVector:
    v = tuple(int(i) for i in indices)
    if any(i not in (0, 1, 2, 3) for i in v):
        raise ShapeError(f"Pauli indices must lie in 0..3, got {v}")
    return v


def embed(mu: int, position: int, n_qubits: int) -> np.ndarray:
    """Single-qubit Pauli ``mu`` acting on qubit ``position`` (1-based) of ``n_qubits``."""
    if not 1 <= position <= n_qubits:
        raise ShapeError(f"position {position} outside 1..{n_qubits}")
    if mu not in (0, 1, 2, 3):
        raise ShapeError(f"Pauli index {mu} outside 0..3")
    left = np.eye(2 ** (position - 1), dtype=complex)
    right = np.eye(2 ** (n_qubits - position), dtype=complex)
    return np.kron(np.kron(left, PAULIS[mu]), right)


def pauli_string(indices) -> np.ndarray:
    """Tensor product ``sigma_{v_1} (x) ... (x) sigma_{v_n}``."""
    v = _check_indices(indices)
    if not v:
        raise ShapeError("pauli_string needs at least one index")
    out = PAULIS[v[0]]
    for i in v[1:]:
        out = np.kron(out, PAULIS[i])
    return out


def error_rank(indices) -> int:
    """Number of non-identity letters in the index vector."""
    return sum(1 for i in _check_indices(indices) if i != 0)


def strings_commute(v, w) -> bool:
    """Whether two Pauli strings commute (symplectic criterion)."""
    v, w = _check_indices(v), _check_indices(w)
    if len(v) != len(w):
        raise ShapeError("index vectors must have equal length")
    anticommuting = sum(1 for a, b in zip(v, w) if a != 0 and b != 0 and a != b)
    return anticommuting % 2 == 0


def decompose(u: np.ndarray, env_dim: int, n_qubits: int) -> dict[PauliIndexVector, np.ndarray]:
    """Error-operator components of an operator on environment (x) register.

    Parameters
    ----------
    u : array of shape (env_dim * 2**n_qubits,) * 2, environment factor first.
    env_dim : dimension of the environment factor (1 for none).
    n_qubits : register size; capped at 7 because the loop enumerates 4**n
        index vectors.

    Returns
    -------
    dict mapping each index vector to its environment-side component, in
    lexicographic order.  Components with Frobenius norm below the storage
    threshold are set to exact zeros.
    """
    u = _as_complex(u)
    if n_qubits < 1:
        raise ShapeError("need at least one qubit")
    if n_qubits > tol.MAX_DECOMPOSE_QUBITS:
        raise ShapeError(
            f"decompose enumerates 4**n index vectors and is capped at "
            f"n = {tol.MAX_DECOMPOSE_QUBITS}, got {n_qubits}"
        )
    if env_dim < 1:
        raise ShapeError("environment dimension must be at least 1")
    dc = 2 ** n_qubits
    d = env_dim * dc
    if u.shape != (d, d):
        raise ShapeError(f"operator shape {u.shape} does not match env {env_dim} x register {dc}")

    blocks = u.reshape(env_dim, dc, env_dim, dc)
    components: dict[PauliIndexVector, np.ndarray] = {}
    for v in itertools.product((0, 1, 2, 3), repeat=n_qubits):
        s = pauli_string(v)
        comp = np.einsum("aibj,ji->ab", blocks, s) / dc
        if np.linalg.norm(comp) < tol.COMPONENT_ZERO_TOL:
            comp = np.zeros((env_dim, env_dim), dtype=complex)
        components[v] = comp
    return components


def reconstruct(components: dict[PauliIndexVector, np.ndarray], env_dim: int, n_qubits: int) -> np.ndarray:
    """Rebuild the joint operator from its components (inverse of ``decompose``)."""
    d = env_dim * 2 ** n_qubits
    out = np.zeros((d, d), dtype=complex)
    for v, comp in components.items():
        out += np.kron(_as_complex(comp), pauli_string(v))
    return out


@dataclass(frozen=True)
class ErrorRankSpectrum:
    """Distribution of Frobenius weight over error ranks 0..n."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if any(x < -1e-12 for x in w):
            raise ValidationError(f"negative rank weight in {w}")
        total = sum(w)
        if abs(total - 1.0) > tol.WEIGHT_SUM_TOL:
            raise ValidationError(f"rank weights sum to {total!r}, expected 1")

    @property
    def n_qubits(self) -> int:
        return len(self.weights) - 1

    def to_csv(self) -> str:
        lines = ["rank,weight"]
        for r, w in enumerate(self.weights):
            lines.append(f"{r},{w:.16e}")
        return "\n".join(lines) + "\n"


def rank_spectrum(u: np.ndarray, env_dim: int, n_qubits: int) -> ErrorRankSpectrum:
    """Rank-resolved weight distribution of a joint unitary.

    The input must be unitary; the weights ||A_v||_F^2 / d_e then sum to one
    and the sum is revalidated after aggregation.
    """
    u = _as_complex(u)
    d = env_dim * 2 ** n_qubits
    if u.shape != (d, d):
        raise ShapeError(f"operator shape {u.shape} does not match env {env_dim} x register {2 ** n_qubits}")
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(d))))
    if defect > tol.UNITARY_INPUT_TOL:
        raise ValidationError(f"rank spectrum needs a unitary input, ||U^dag U - 1||_max = {defect:.3e}")

    weights = [0.0] * (n_qubits + 1)
    for v, comp in decompose(u, env_dim, n_qubits).items():
        weights[error_rank(v)] += float(np.linalg.norm(comp) ** 2) / env_dim
    total = sum(weights)
    if abs(total - 1.0) > tol.WEIGHT_SUM_TOL:
        raise ValidationError(f"weight normalization failed: sum = {total!r}")
    return ErrorRankSpectrum(tuple(weights))
