import numpy as np
import pytest

from paramcz.clifford import (CZ4, GROUP_ORDER, CliffordError, NativeSequence,
                              clifford_compose, clifford_group,
                              clifford_invert, clifford_sample,
                              compile_to_native, compose_tableaus,
                              conjugate_pauli, decompose_with_cz,
                              is_symplectic, pauli_multiply,
                              tableau_from_unitary)


def equal_up_to_phase(a, b, tol=1e-9):
    tr = np.trace(a.conj().T @ b)
    return abs(abs(tr) - a.shape[0]) < tol


@pytest.fixture(scope="module")
def group():
    return clifford_group()


def test_group_order(group):
    assert len(group.unitaries) == GROUP_ORDER == 11520
    assert len(group.c1) == 24


def test_singleton(group):
    assert clifford_group() is group


def test_identity_and_cz(group):
    assert group.identity.index == 0
    assert np.allclose(group.identity.unitary, np.eye(4))
    assert equal_up_to_phase(group.cz.unitary, CZ4)


def test_lookup_ignores_global_phase(group):
    rng = np.random.default_rng(0)
    for _ in range(20):
        c = clifford_sample(rng)
        phased = np.exp(1j * rng.uniform(0, 2 * np.pi)) * c.unitary
        assert group.index_of_unitary(phased) == c.index


def test_lookup_rejects_non_clifford(group):
    t = np.diag([1.0, 1.0, 1.0, np.exp(1j * np.pi / 4)])
    with pytest.raises(CliffordError):
        group.index_of_unitary(t)
    with pytest.raises(CliffordError):
        group.element(GROUP_ORDER)


def test_compose_and_inverse_axioms(group):
    rng = np.random.default_rng(1)
    for _ in range(30):
        a, b = clifford_sample(rng), clifford_sample(rng)
        ab = clifford_compose(a, b)
        assert equal_up_to_phase(ab.unitary, a.unitary @ b.unitary)
        assert clifford_compose(clifford_invert(a), a) == group.identity
        assert clifford_invert(clifford_invert(a)) == a


def test_sampling_is_seeded_and_uniformish():
    a = [clifford_sample(np.random.default_rng(42)).index for _ in range(3)]
    assert len(set(a)) == 1
    rng = np.random.default_rng(7)
    idx = [clifford_sample(rng).index for _ in range(2000)]
    assert len(set(idx)) > 1500  # few collisions out of 11520


def test_tableau_matches_conjugation(group):
    rng = np.random.default_rng(2)
    for _ in range(10):
        c = clifford_sample(rng)
        tab = c.tableau
        assert is_symplectic(tab)
        assert tab == tableau_from_unitary(c.unitary)


def test_tableau_composition_homomorphism(group):
    rng = np.random.default_rng(3)
    for _ in range(10):
        a, b = clifford_sample(rng), clifford_sample(rng)
        lhs = compose_tableaus(a.tableau, b.tableau)
        rhs = clifford_compose(a, b).tableau
        assert lhs == rhs


def test_pauli_algebra():
    # Z.X = -XZ on the first qubit: base word XZ with phase i^2
    v, e = pauli_multiply((0, 1, 0, 0), 0, (1, 0, 0, 0), 0)
    assert v == (1, 1, 0, 0) and e == 2
    # X.X = I
    v, e = pauli_multiply((1, 0, 0, 0), 0, (1, 0, 0, 0), 0)
    assert v == (0, 0, 0, 0) and e == 0
    # conjugation by the identity tableau is the identity map
    ident = tableau_from_unitary(np.eye(4, dtype=complex))
    v, e = conjugate_pauli(ident, (1, 1, 1, 0), 1)
    assert v == (1, 1, 1, 0) and e == 1


def test_compile_identity_is_empty(group):
    assert compile_to_native(group.identity) == NativeSequence(())
    assert compile_to_native(group.identity).n_cz == 0


def test_compile_cz_uses_one_cz(group):
    seq = compile_to_native(group.cz)
    assert seq.n_cz == 1
    assert equal_up_to_phase(seq.unitary(group), CZ4)


def test_compile_random_sample_roundtrip(group):
    rng = np.random.default_rng(4)
    for _ in range(100):
        c = clifford_sample(rng)
        seq = compile_to_native(c)
        assert 0 <= seq.n_cz <= 3
        assert equal_up_to_phase(seq.unitary(group), c.unitary)


def test_cz_count_distribution(group):
    # stratified over the 20 entangling templates: 1 needs no CZ, 9 need
    # one, 9 need two, the SWAP class needs three; locals never add CZs
    counts = np.zeros(4, dtype=int)
    rng = np.random.default_rng(5)
    for e in range(20):
        for _ in range(5):
            i, j = rng.integers(24), rng.integers(24)
            idx = (int(i) * 24 + int(j)) * 20 + e
            counts[compile_to_native(group.element(idx)).n_cz] += 1
    assert counts.tolist() == [5, 45, 45, 5]


def test_decompose_with_cz(group):
    rng = np.random.default_rng(6)
    for _ in range(20):
        c = clifford_sample(rng)
        r = decompose_with_cz(c)
        assert r.compose(group.cz) == c


def test_conjugacy_classes(group):
    label = group.conjugacy_class_sizes()
    sizes = np.bincount(label)
    assert sizes.sum() == GROUP_ORDER
    assert len(sizes) == 21
    # the identity is alone in its class
    assert sizes[label[0]] == 1
