import numpy as np
import pytest
from hypothesis import given, strategies as st

from kdrep.config import Config
from kdrep.errors import DimensionMismatchError, OrthogonalPairError, ValidationError
from kdrep.frame import (
    BasisPair,
    build_frame,
    canonical_phase,
    duality_matrix,
    frame_from_bases,
    sum_of_frame_preserves_trace,
    tensor_frame,
    tensor_frames,
)
from kdrep.qops import haar_unitary, sample
from kdrep.suites import random_frame

from conftest import HADAMARD

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 4)


def oracle_frame_ops(a, ap):
    """Frame and dual built one outer product at a time."""
    d = a.shape[0]
    fs, ds = [], []
    for i in range(d):
        for j in range(d):
            ov = np.vdot(ap[:, j], a[:, i])
            fs.append(np.outer(ap[:, j], a[:, i].conj()) * ov)
            ds.append(np.outer(a[:, i], ap[:, j].conj()) / ov)
    return np.array(fs), np.array(ds)


@given(seed=seeds, d=dims)
def test_frame_matches_outer_product_oracle(seed, d):
    rng = np.random.default_rng(seed)
    frame = random_frame(d, rng)
    a, ap = frame.basis_pair.basis_a, frame.basis_pair.basis_a_prime
    f, dd = oracle_frame_ops(a, ap)
    np.testing.assert_allclose(frame.frame_ops, f, atol=1e-12)
    np.testing.assert_allclose(frame.dual_ops, dd, atol=1e-10)


@given(seed=seeds, d=dims)
def test_duality_and_traces(seed, d):
    rng = np.random.default_rng(seed)
    frame = random_frame(d, rng)
    np.testing.assert_allclose(duality_matrix(frame), np.eye(d * d), atol=1e-9)
    np.testing.assert_allclose(np.trace(frame.dual_ops, axis1=1, axis2=2), 1, atol=1e-12)
    ov = np.vdot(frame.basis_pair.basis_a_prime[:, 0], frame.basis_pair.basis_a[:, 0])
    assert abs(np.trace(frame.frame_ops[0]) - abs(ov) ** 2) < 1e-12
    np.testing.assert_allclose(frame.frame_ops.sum(axis=0), np.eye(d), atol=1e-12)


@given(seed=seeds, d=dims)
def test_frame_sum_preserves_trace(seed, d):
    rng = np.random.default_rng(seed)
    frame = random_frame(d, rng)
    op = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    assert abs(sum_of_frame_preserves_trace(frame, op) - np.trace(op)) < 1e-10


def test_frame_operators_are_rank_one_and_non_hermitian(zx_frame):
    for f in zx_frame.frame_ops:
        assert np.linalg.matrix_rank(f, tol=1e-12) == 1
    # |+><1|<+|1> is not Hermitian
    assert not np.allclose(zx_frame.frame_ops[2], zx_frame.frame_ops[2].conj().T)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_frame_operators_span_operator_space(d):
    frame = build_frame(BasisPair.computational_fourier(d))
    vecs = frame.frame_ops.reshape(d * d, -1)
    gram = vecs.conj() @ vecs.T
    assert abs(np.linalg.det(gram)) > 1e-12
    assert np.linalg.matrix_rank(vecs) == d * d


def test_zx_frame_values(zx_frame):
    # F[0, 0] = |+><0| <+|0>; the first entry is |<+|0>|^2 = 1/2
    np.testing.assert_allclose(zx_frame.frame_ops[0], [[0.5, 0], [0.5, 0]], atol=1e-15)
    np.testing.assert_allclose(zx_frame.dual_ops[0], [[1, 1], [0, 0]], atol=1e-15)
    assert zx_frame.min_overlap == pytest.approx(2**-0.5)


def test_orthogonal_pair_is_rejected():
    with pytest.raises(OrthogonalPairError):
        frame_from_bases(np.eye(2), np.eye(2))
    near = np.array([[np.cos(1e-10), -np.sin(1e-10)], [np.sin(1e-10), np.cos(1e-10)]])
    with pytest.raises(OrthogonalPairError, match="overlap floor"):
        frame_from_bases(np.eye(2), near)


def test_overlap_floor_is_configurable():
    near = np.array([[np.cos(1e-6), -np.sin(1e-6)], [np.sin(1e-6), np.cos(1e-6)]])
    with pytest.raises(OrthogonalPairError):
        frame_from_bases(np.eye(2), near, Config(overlap_floor=1e-4))
    frame = frame_from_bases(np.eye(2), near, Config(overlap_floor=1e-8))
    np.testing.assert_allclose(duality_matrix(frame), np.eye(4), atol=1e-6)


def test_basis_validation():
    with pytest.raises(ValidationError, match="orthonormal"):
        BasisPair.from_bases(np.eye(2), [[1, 1], [0, 1]])
    with pytest.raises(DimensionMismatchError):
        BasisPair.from_bases(np.eye(2), np.eye(3))


def test_canonical_phase_makes_leading_entries_positive(rng):
    u = haar_unitary(3, rng)
    c = canonical_phase(u * np.exp(1j * rng.uniform(0, 2 * np.pi, 3)))
    np.testing.assert_allclose(c[0].imag, 0, atol=1e-15)
    assert np.all(c[0].real > 0)
    np.testing.assert_allclose(canonical_phase(c), c, atol=1e-15)


@given(seed=seeds, d=dims)
def test_frame_is_independent_of_basis_phases(seed, d):
    rng = np.random.default_rng(seed)
    a, ap = haar_unitary(d, rng), haar_unitary(d, rng)
    pa = np.exp(1j * rng.uniform(0, 2 * np.pi, d))
    pap = np.exp(1j * rng.uniform(0, 2 * np.pi, d))
    raw = build_frame(BasisPair.from_bases(a, ap, canonical=False))
    rephased = build_frame(BasisPair.from_bases(a * pa, ap * pap, canonical=False))
    np.testing.assert_allclose(raw.frame_ops, rephased.frame_ops, atol=1e-12)
    np.testing.assert_allclose(raw.dual_ops, rephased.dual_ops, atol=1e-9)
    # canonicalisation makes even the stored bases identical
    c1 = BasisPair.from_bases(a, ap)
    c2 = BasisPair.from_bases(a * pa, ap * pap)
    np.testing.assert_allclose(c1.basis_a, c2.basis_a, atol=1e-12)
    np.testing.assert_allclose(c1.basis_a_prime, c2.basis_a_prime, atol=1e-12)


def test_tensor_frame_ordering(rng):
    fa, fb = random_frame(2, rng), random_frame(3, rng)
    fab = tensor_frame(fa, fb)
    assert fab.size == 36 and fab.dims == (2, 3)
    # flat index (i, i'; j, j') = (i * 2 + i') * 9 + (j * 3 + j')
    for k in range(4):
        for m in range(9):
            np.testing.assert_allclose(
                fab.frame_ops[k * 9 + m], np.kron(fa.frame_ops[k], fb.frame_ops[m]), atol=1e-14
            )
    assert fab.index_pairs[1 * 9 + 5] == ((0, 1), (1, 2))
    np.testing.assert_allclose(duality_matrix(fab), np.eye(36), atol=1e-9)


def test_tensor_frame_is_frame_of_tensor_bases(rng):
    fa, fb = random_frame(2, rng), random_frame(2, rng)
    fab = tensor_frame(fa, fb)
    direct = build_frame(BasisPair(4, fab.basis_pair.basis_a, fab.basis_pair.basis_a_prime, 0.1))
    # direct indexing is (composite i, composite i'); the tensor frame's is (i, i'; j, j')
    for i in range(2):
        for ip in range(2):
            for j in range(2):
                for jp in range(2):
                    t = ((i * 2 + ip) * 2 + j) * 2 + jp
                    k = (i * 2 + j) * 4 + (ip * 2 + jp)
                    np.testing.assert_allclose(fab.frame_ops[t], direct.frame_ops[k], atol=1e-12)


def test_tensor_frames_associative(rng):
    fs = [random_frame(2, rng) for _ in range(3)]
    left = tensor_frame(tensor_frame(fs[0], fs[1]), fs[2])
    right = tensor_frame(fs[0], tensor_frame(fs[1], fs[2]))
    np.testing.assert_allclose(left.frame_ops, right.frame_ops, atol=1e-14)
    assert tensor_frames(fs).matches(left)


def test_traces_with_checks_shape(zx_frame):
    with pytest.raises(DimensionMismatchError):
        zx_frame.traces_with(np.eye(3))
    rho = sample("random_density", 2, seed=3).matrix
    np.testing.assert_allclose(
        zx_frame.traces_with(rho), [np.trace(f @ rho) for f in zx_frame.frame_ops], atol=1e-15
    )


def test_hadamard_pair_is_zx():
    pair = BasisPair.from_bases(np.eye(2), HADAMARD)
    np.testing.assert_allclose(pair.basis_a_prime, BasisPair.zx().basis_a_prime)
