import itertools
import math

import numpy as np
import pytest
import scipy.optimize

from decoq.errors import ShapeError, ValidationError
from decoq.tensor import partial_trace_array, trace_distance
from decoq.pauli import pauli_string
from decoq.codes import (
    AMPLITUDE_ONLY,
    FULL_PAULI,
    KrausChannel,
    _sphere_sum,
    asymptotic_bound_gap,
    asymptotic_x0,
    build_code,
    build_five_qubit_code,
    build_identity_code,
    build_repetition_code,
    covered_errors,
    encode_logical,
    hamming_gv_check,
    min_code_length,
    recovery_channel,
    recovery_unitary,
)

from conftest import random_density

ALL_CODES = ("identity", "repetition-3", "repetition-5", "five_qubit")


@pytest.mark.parametrize("name", ALL_CODES)
def test_encoder_isometry(name):
    code = build_code(name)
    gram = code.encoder.conj().T @ code.encoder
    assert np.max(np.abs(gram - np.eye(2))) < 1e-12


@pytest.mark.parametrize("name", ALL_CODES)
def test_projectors_resolve_identity(name):
    code = build_code(name)
    total = sum(code.syndrome_projectors.values())
    assert np.max(np.abs(total - np.eye(code.register_dim))) < 1e-12


def test_projectors_mutually_orthogonal():
    code = build_five_qubit_code()
    projs = list(code.syndrome_projectors.values())
    assert len(projs) == 16
    for i, p in enumerate(projs):
        assert np.max(np.abs(p @ p - p)) < 1e-12
        for q in projs[i + 1 :]:
            assert np.max(np.abs(p @ q)) < 1e-12


def test_five_qubit_cosets_span_register():
    # the encoded basis times the 16 covered errors fills all 32 dimensions
    code = build_five_qubit_code()
    columns = []
    for err in covered_errors(code):
        e = pauli_string(err)
        columns.append(e @ code.logical_zero())
        columns.append(e @ code.logical_one())
    basis = np.stack(columns, axis=1)
    gram = basis.conj().T @ basis
    assert np.max(np.abs(gram - np.eye(32))) < 1e-10


def test_covered_error_counts():
    assert sum(1 for _ in covered_errors(build_repetition_code(5))) == 16
    assert sum(1 for _ in covered_errors(build_five_qubit_code())) == 16
    assert sum(1 for _ in covered_errors(build_repetition_code(3))) == 4
    assert sum(1 for _ in covered_errors(build_identity_code())) == 1


def test_error_class_letters():
    rep = build_repetition_code(3)
    assert rep.error_class == AMPLITUDE_ONLY
    assert all(set(v) <= {0, 1} for v in covered_errors(rep))
    five = build_five_qubit_code()
    assert five.error_class == FULL_PAULI


@pytest.mark.parametrize("name", ALL_CODES)
def test_recovery_reverses_covered_errors(name):
    # up to the recorded correction's global phase the channel output is exact
    code = build_code(name)
    psi = encode_logical(code, 0.6, 0.8j).amplitudes
    target = np.outer(psi, psi.conj())
    channel = recovery_channel(code)
    worst = 0.0
    for err in covered_errors(code):
        e = pauli_string(err)
        corrupted = e @ target @ e.conj().T
        worst = max(worst, float(np.max(np.abs(channel.apply(corrupted) - target))))
    assert worst < 1e-12


@pytest.mark.parametrize("name", ALL_CODES)
def test_unitary_recovery_matches_channel(name, rng):
    code = build_code(name)
    r = recovery_unitary(code)
    dc, da = code.register_dim, code.ancilla_dim
    anc = np.zeros((da, da), dtype=complex)
    anc[0, 0] = 1.0
    channel = recovery_channel(code)
    for _ in range(5):
        rho = random_density(rng, dc)
        via_unitary = partial_trace_array(
            r @ np.kron(rho, anc) @ r.conj().T, (dc, da), (0,)
        )
        assert trace_distance(via_unitary, channel.apply(rho)) < 1e-12


def test_ancilla_records_syndrome():
    # after writing, the ancilla holds the syndrome bits as a basis state
    code = build_repetition_code(3)
    r = recovery_unitary(code)
    psi = encode_logical(code, 1.0, 0.0).amplitudes
    flipped = pauli_string((0, 1, 0)) @ psi  # error on qubit 2
    joint = r @ np.kron(flipped, np.array([1.0, 0.0, 0.0, 0.0], dtype=complex))
    anc = partial_trace_array(np.outer(joint, joint.conj()), (8, 4), (1,))
    bits = next(
        b for b, corr in code.syndrome_table.items() if corr == (0, 1, 0)
    )
    idx = int("".join(str(b) for b in bits), 2)
    expected = np.zeros((4, 4), dtype=complex)
    expected[idx, idx] = 1.0
    assert np.max(np.abs(anc - expected)) < 1e-12


def test_repetition_majority_table():
    code = build_repetition_code(5)
    assert code.k_corr == 2
    assert code.syndrome_table[(0, 0, 0, 0)] == (0, 0, 0, 0, 0)
    for bits, corr in code.syndrome_table.items():
        assert sum(1 for c in corr if c) <= 2


def test_repetition_rejects_even_or_tiny():
    with pytest.raises(ShapeError):
        build_repetition_code(4)
    with pytest.raises(ShapeError):
        build_repetition_code(1)


def test_build_code_unknown():
    with pytest.raises(ShapeError):
        build_code("steane")


def test_encode_logical_norm_gate():
    code = build_identity_code()
    with pytest.raises(ValidationError):
        encode_logical(code, 1.0, 1.0)


def test_kraus_channel_validation(rng):
    with pytest.raises(ValidationError):
        KrausChannel((np.eye(2) * 0.5,))
    channel = KrausChannel((np.eye(2),))
    rho = random_density(rng, 2)
    assert np.array_equal(channel.apply(rho), rho)


class TestBoundsArithmetic:
    def test_reference_rows(self):
        row = hamming_gv_check(5, 1)
        assert row.n == 5 and row.k == 1
        assert row.hamming_ok and row.gv_ok
        assert not hamming_gv_check(4, 1).hamming_ok
        assert hamming_gv_check(10, 2).hamming_ok
        assert not hamming_gv_check(9, 2).hamming_ok

    def test_hamming_equality_at_five(self):
        # 1 + 5*3 = 16 = 2^4: the packing is tight
        assert _sphere_sum(5, 1) == 16
        assert _sphere_sum(5, 1) == 2 ** 4

    def test_sphere_sum_against_enumeration(self):
        # brute force count of strings with rank <= radius
        for n in range(1, 7):
            for radius in range(0, n + 1):
                count = sum(
                    1
                    for v in itertools.product(range(4), repeat=n)
                    if sum(1 for x in v if x) <= radius
                )
                assert _sphere_sum(n, radius) == count

    def test_independent_reevaluation(self):
        # re-derive both inequalities with bare integer arithmetic
        for n in range(1, 21):
            for k in range(0, min(3, n) + 1):
                lhs = sum(math.comb(n, l) * 3 ** l for l in range(k + 1))
                rhs = sum(math.comb(n, l) * 3 ** l for l in range(2 * k + 1))
                row = hamming_gv_check(n, k)
                assert row.hamming_ok == (lhs <= 2 ** (n - 1))
                assert row.gv_ok == (2 ** (n - 1) <= rhs)

    def test_min_code_length(self):
        assert min_code_length(0) == 1
        assert min_code_length(1) == 5
        assert min_code_length(2) == 10
        assert min_code_length(3) == 15

    def test_validation(self):
        with pytest.raises(ShapeError):
            hamming_gv_check(0, 0)
        with pytest.raises(ShapeError):
            hamming_gv_check(3, 4)
        with pytest.raises(ShapeError):
            min_code_length(-1)


class TestAsymptoticRoot:
    def test_against_brentq(self):
        # oracle: scipy root finder on the same gap function
        root = scipy.optimize.brentq(asymptotic_bound_gap, 1e-9, 0.499999, xtol=1e-13)
        assert abs(asymptotic_x0() - root / 2.0) < 1e-9

    def test_plug_back_residual(self):
        x0 = asymptotic_x0()
        assert abs(asymptotic_bound_gap(2.0 * x0)) < 1e-9

    def test_gap_sign_structure(self):
        x0 = asymptotic_x0()
        assert asymptotic_bound_gap(2.0 * x0 * 0.999) < 0
        assert asymptotic_bound_gap(2.0 * x0 * 1.001) > 0
        assert asymptotic_bound_gap(0.01) < 0

    def test_published_value(self):
        assert asymptotic_x0() == pytest.approx(0.0946, abs=1e-4)

    def test_domain(self):
        with pytest.raises(ShapeError):
            asymptotic_bound_gap(0.0)
        with pytest.raises(ShapeError):
            asymptotic_bound_gap(1.0)
