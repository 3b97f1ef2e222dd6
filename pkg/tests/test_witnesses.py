import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussent.covariance import GaussianState, CovarianceMatrix
from gaussent.entanglement import ModeSplit, is_ppt, log_negativity
from gaussent.exceptions import CertificationError, DomainError, SymmetryError
from gaussent.fixtures import mixed_one_mode_cm, symmetric_family_witness
from gaussent.generators import random_entangled_two_mode, random_separable_cm
from gaussent.witnesses import (
    GLOBAL,
    NOT_WITNESS,
    SPLIT,
    certify_witness,
    duan_grid,
    duan_scan,
    duan_witness,
    is_p_separable,
    make_witness,
    minimal_witness_two_mode,
    p_separability_level,
    symplectic_trace,
    witness_value,
)


def test_symplectic_trace_examples():
    assert symplectic_trace(np.eye(4)) == pytest.approx(2.0)
    assert symplectic_trace(mixed_one_mode_cm()) == pytest.approx(np.sqrt(2))


def test_certify_examples():
    c = certify_witness(np.eye(4) / 4, ModeSplit(1, 1))
    assert c.status == GLOBAL and c.str_global == pytest.approx(0.5)
    c = certify_witness(symmetric_family_witness(), ModeSplit(1, 1))
    assert c.status == SPLIT
    assert c.str_split == pytest.approx(0.5, abs=1e-12)
    assert certify_witness(np.diag([1.0, 1.0, 1.0, -0.1])).status == NOT_WITNESS
    # positive but too small
    assert certify_witness(np.eye(4) / 10).status == NOT_WITNESS


def test_certify_rejects_asymmetric():
    Z = np.eye(4)
    Z[0, 1] = 0.1
    with pytest.raises(SymmetryError):
        certify_witness(Z)


def test_make_witness_raises_with_diagnostics():
    with pytest.raises(CertificationError) as err:
        make_witness(np.eye(4) / 10)
    assert err.value.str_split == pytest.approx(0.2)


def test_witness_value_examples(sym_family):
    a, b = 2.0, 1.5
    out = witness_value(symmetric_family_witness(), sym_family(a, b))
    assert out.value == pytest.approx(0.5)
    assert out.logneg_lower_bound == pytest.approx(np.log(2))
    out = witness_value(np.eye(4) / 4, 2 * np.eye(4))
    assert out.value == pytest.approx(2.0) and out.logneg_lower_bound == 0.0
    st_ = GaussianState(CovarianceMatrix(np.eye(4)), [1.0, 0, 0, 0])
    out = witness_value(np.eye(4) / 4, st_)
    assert out.expectation_with_displacement == pytest.approx(1.0 + 0.5)


def test_duan_vacuum_sweep():
    for a in duan_grid(41):
        assert witness_value(duan_witness(a), np.eye(4)).value >= 1 - 1e-12


def test_duan_a_one_matrix():
    Z = duan_witness(1.0).matrix
    np.testing.assert_allclose(Z, 0.25 * np.array([[1, 0, 1, 0], [0, 1, 0, -1], [1, 0, 1, 0], [0, -1, 0, 1]]))
    with pytest.raises(DomainError):
        duan_witness(0.0)


def test_duan_sign_branches(sym_family):
    # the symmetric family has x-coupling +b, p-coupling -b: negative a reaches a - b
    g = sym_family(2.0, 1.5)
    assert witness_value(duan_witness(-1.0), g).value == pytest.approx(0.5)
    assert witness_value(duan_witness(1.0), g).value == pytest.approx(3.5)
    # the mirrored coupling pattern is reached by a = +1
    F = np.diag([1.0, 1.0, -1.0, -1.0])
    assert witness_value(duan_witness(1.0), F @ g @ F).value == pytest.approx(0.5)


def test_duan_str_sum_is_half():
    for a in duan_grid(101):
        c = duan_witness(a).certificate
        assert abs(c.str_split - 0.5) <= 1e-12


def test_minimal_witness_examples(ref, sym_family):
    w, m = minimal_witness_two_mode(sym_family(2.0, 1.5))
    assert m == pytest.approx(0.5, abs=1e-12)
    np.testing.assert_allclose(w.matrix, symmetric_family_witness(), atol=1e-12)
    w, m = minimal_witness_two_mode(ref)
    assert m == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    out = witness_value(w, ref)
    assert out.logneg_lower_bound == pytest.approx(log_negativity(ref).log_negativity, abs=1e-10)
    _, m = minimal_witness_two_mode(np.diag([2.0, 0.5, 1.0, 1.0]))
    assert m >= 1 - 1e-12


def test_p_separability(ref):
    assert p_separability_level(ref) == pytest.approx(1 / np.sqrt(2))
    assert p_separability_level(ref, witnesses=[duan_witness(a) for a in duan_grid(41)]) >= 1 / np.sqrt(2) - 1e-12
    assert is_p_separable(ref, 0.7)
    assert not is_p_separable(ref, 0.72)
    with pytest.raises(DomainError):
        p_separability_level(ref, witnesses=[])


def test_duan_scan_reference(ref):
    res = duan_scan(ref)
    assert res.value <= res.grid_value
    # two-mode Duan optimum against the exact minimum
    assert res.value >= 1 / np.sqrt(2) - 1e-12
    assert res.value == pytest.approx(0.75, abs=1e-6)
    assert res.a == pytest.approx(-1.0, abs=1e-4)


def test_duan_scan_separable():
    assert duan_scan(np.eye(4)).value >= 1 - 1e-12


seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_minimal_witness_properties(seed):
    rng = np.random.default_rng(seed)
    g = random_entangled_two_mode(rng)
    w, m = minimal_witness_two_mode(g)
    assert w.certificate.is_witness
    assert abs(witness_value(w, g).value - m) <= 1e-6
    en = log_negativity(g).log_negativity
    out = witness_value(w, g)
    assert out.logneg_lower_bound <= en + 1e-8
    if m < 1:
        assert abs(out.logneg_lower_bound - en) <= 1e-6
    sep = random_separable_cm(1, 1, rng)
    assert witness_value(w, sep).value >= 1 - 1e-8


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(0.3, 3.0), st.floats(1.01, 3.0))
def test_p_ordering(seed, p1, ratio):
    g = random_entangled_two_mode(np.random.default_rng(seed))
    p2 = p1 / ratio
    if is_p_separable(g, p1):
        assert is_p_separable(g, p2)
    assert is_ppt(g / p2) or not is_ppt(g / p1)
