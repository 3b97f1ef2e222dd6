import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaussent.covariance import GaussianState, CovarianceMatrix, symplectic_eigenvalues, vacuum_cm
from gaussent.entanglement import is_ppt
from gaussent.exceptions import (
    DimensionError,
    DomainError,
    NoiseConstraintError,
    NotPositiveError,
    SingularProjectionError,
)
from gaussent.gaussian_ops import (
    ChannelSpec,
    add_classical_noise,
    apply_channel,
    check_noise_constraint,
    coherent_project,
    coherent_project_via_homodyne,
    collective_det_sum,
    homodyne_cm,
    homodyne_project,
    homodyne_project_limit,
    noise_constraint_margin,
    schur_project,
)
from gaussent.generators import random_cm, random_psd, random_separable_cm, random_symplectic
from gaussent.symplectic import beam_splitter_5050, build_sigma, direct_sum

REF_COHERENT = np.diag([3.5 - 6.25 / 4.5, 3 - 6.25 / 4])


def _capital(g):
    s = build_sigma(g.shape[0] // 2)
    return s @ g @ s.T


def test_product_state_projection(rng):
    A, B = random_cm(1, rng), random_cm(1, rng)
    d = rng.normal(size=4)
    out = schur_project(GaussianState(CovarianceMatrix(direct_sum(A, B)), d), np.eye(2))
    np.testing.assert_allclose(out.cm, A, atol=1e-12)
    np.testing.assert_allclose(out.displacement, d[:2], atol=1e-12)
    np.testing.assert_allclose(homodyne_project(direct_sum(A, B), 0.3, x=1.2).cm, A, atol=1e-12)


def test_coherent_projection_reference(ref):
    out = coherent_project(ref)
    np.testing.assert_allclose(out.cm, REF_COHERENT, atol=1e-12)
    np.testing.assert_allclose(out.cm, [[2.1111, 0], [0, 1.4375]], atol=1e-4)


def test_homodyne_eps_one_is_coherent(rng):
    g = random_cm(2, rng)
    d = rng.normal(size=4)
    s = GaussianState(CovarianceMatrix(g), d)
    h = homodyne_project(s, 1.0, x=0.4)
    c = coherent_project(s, alpha=0.4 / np.sqrt(2))
    np.testing.assert_allclose(h.cm, c.cm, atol=1e-12)
    np.testing.assert_allclose(h.displacement, c.displacement, atol=1e-12)


def test_pointer_minimal_uncertainty():
    for eps in (1e-3, 0.1, 1.0, 10.0, 1e3):
        assert np.linalg.det(homodyne_cm(eps)) == pytest.approx(1.0)
    for bad in (0.0, -1.0, np.nan):
        with pytest.raises(DomainError):
            homodyne_cm(bad)


def _moore_penrose_closed_form(g):
    # independent oracle: in the capital convention the ideal homodyne reads
    # A - C (P B P)^+ C^T with P the projector on the second quadrature
    G = _capital(g)
    A, B, C = G[:2, :2], G[2:, 2:], G[:2, 2:]
    b = B[1, 1]
    inv = np.array([[0.0, 0.0], [0.0, 1.0 / b]])
    out = A - C @ inv @ C.T
    s = build_sigma(1)
    return s.T @ out @ s


def test_homodyne_limit_matches_moore_penrose(rng):
    for _ in range(20):
        g = random_cm(2, rng)
        lim = homodyne_project_limit(g)
        np.testing.assert_allclose(lim.cm, _moore_penrose_closed_form(g), atol=1e-10)
        near = homodyne_project(g, 1e-5)
        np.testing.assert_allclose(near.cm, lim.cm, atol=1e-6)


def test_homodyne_outcome_moves_only_displacement(ref):
    a = homodyne_project(ref, 0.5, x=0.0)
    b = homodyne_project(ref, 0.5, x=3.0)
    np.testing.assert_array_equal(a.cm, b.cm)
    assert not np.allclose(a.displacement, b.displacement)


def test_pipeline_reference_and_product(ref, rng):
    res = coherent_project_via_homodyne(ref, eps=0.1)
    np.testing.assert_allclose(res.pipeline.cm, REF_COHERENT, atol=1e-10)
    A = random_cm(1, rng)
    res = coherent_project_via_homodyne(direct_sum(A, random_cm(1, rng)), eps=3.0)
    np.testing.assert_allclose(res.pipeline.cm, A, atol=1e-10)
    with pytest.raises(DimensionError):
        coherent_project_via_homodyne(np.eye(6))


def test_pipeline_displacement_matches_composition(rng):
    g = random_cm(2, rng)
    d = rng.normal(size=4)
    res = coherent_project_via_homodyne(GaussianState(CovarianceMatrix(g), d), eps=1.0, x=0.3, y=-0.2)
    assert np.all(np.isfinite(res.pipeline.displacement))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([0.1, 1.0, 10.0]))
def test_pipeline_eps_independent(seed, eps):
    g = random_cm(2, np.random.default_rng(seed))
    assert coherent_project_via_homodyne(g, eps=eps).max_difference <= 1e-10


def test_singular_projection():
    # B + Gamma_w = diag(0, 2) in the capital convention
    with pytest.raises(SingularProjectionError):
        schur_project(np.eye(4), np.diag([1.0, -1.0]))


def test_classical_noise(rng):
    g = random_cm(2, rng)
    np.testing.assert_array_equal(add_classical_noise(g, np.zeros((4, 4))), g)
    out = add_classical_noise(vacuum_cm(1), np.eye(2))
    np.testing.assert_allclose(symplectic_eigenvalues(out), [2.0])
    with pytest.raises(NotPositiveError):
        add_classical_noise(g, np.diag([1.0, -1.0, 0, 0]))
    for _ in range(20):
        sep = random_separable_cm(1, 1, rng)
        assert is_ppt(add_classical_noise(sep, random_psd(4, rng)))


def test_channel_identity_and_unitary(rng):
    spec = ChannelSpec(np.eye(2), np.zeros((2, 2)), np.eye(2))
    out, G = apply_channel(spec, vacuum_cm(1))
    np.testing.assert_array_equal(out, np.eye(2))
    S = random_symplectic(1, rng)
    assert noise_constraint_margin(S, np.zeros((2, 2))) == pytest.approx(0.0, abs=1e-10)


def test_channel_from_dilation(rng):
    spec = ChannelSpec.from_dilation(beam_splitter_5050(), 1, 3 * np.eye(2))
    out, G = apply_channel(spec, vacuum_cm(1))
    np.testing.assert_allclose(G, 1.5 * np.eye(2), atol=1e-12)
    np.testing.assert_allclose(out, 2 * np.eye(2), atol=1e-12)
    # joint state after the dilation is a valid CM
    big = beam_splitter_5050() @ direct_sum(np.eye(2), 3 * np.eye(2)) @ beam_splitter_5050().T
    assert np.min(symplectic_eigenvalues(big)) >= 1 - 1e-9


def test_time_reversal_noise_boundary():
    T = np.diag([1.0, -1.0])
    assert noise_constraint_margin(T, 2 * np.eye(2)) >= -1e-10
    assert noise_constraint_margin(T, 1.999 * np.eye(2)) < 0
    assert not check_noise_constraint(T, 1.9 * np.eye(2))
    with pytest.raises(NoiseConstraintError) as err:
        apply_channel(ChannelSpec(T, np.eye(2), 1.9 * np.eye(2)), vacuum_cm(1))
    assert err.value.margin < 0


def test_collective_det_sum(ref, rng):
    res = collective_det_sum(ref)
    assert res.det_sum == pytest.approx(42.0)
    assert res.det_sum_direct == pytest.approx(42.0)
    A = random_cm(1, rng)
    res = collective_det_sum(direct_sum(A, A))
    np.testing.assert_allclose(res.central_block, A, atol=1e-12)
    assert res.det_sum == pytest.approx(np.linalg.det(2 * A))
    for _ in range(50):
        res = collective_det_sum(random_cm(2, rng))
        assert abs(res.det_sum - res.det_sum_direct) <= 1e-10 * max(1.0, abs(res.det_sum_direct))
    with pytest.raises(DimensionError):
        collective_det_sum(np.eye(6))
