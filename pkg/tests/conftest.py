import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.Generator(np.random.Philox(20240817))


def random_unitary(rng, d: int) -> np.ndarray:
    """Haar-ish unitary from the QR of a complex Ginibre matrix."""
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(g)
    # fix the phase ambiguity so the draw is well defined
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (g + g.conj().T) / 2.0


def random_density(rng, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_state(rng, d: int) -> np.ndarray:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return psi / np.linalg.norm(psi)
