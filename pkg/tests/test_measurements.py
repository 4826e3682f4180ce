import numpy as np
import pytest

from qcausal.channels import apply, measurement_channel
from qcausal.linalg import BiDims, HADAMARD, haar_unitary, partial_trace, proj, trace_distance
from qcausal.measurements import (
    basis_signaling_witness,
    bell_basis,
    causal_grid_basis,
    causal_structure,
    completion_basis,
    conditional_basis,
    product_basis,
    reduced_states,
    rotate_basis,
    semicausal_basis_test,
    semicausal_partition_basis,
    semicausal_structure,
)
from qcausal.localizability import twisted_partition_basis

D22 = BiDims(2, 2)


def test_reduced_states_product_basis():
    sigmas = reduced_states(product_basis(D22), "A")
    for s in sigmas:
        evals = np.linalg.eigvalsh(s)
        assert abs(evals[-1] - 1) < 1e-12 and np.all(evals[:-1] < 1e-12)


def test_reduced_states_bell_basis():
    for side in "AB":
        for s in reduced_states(bell_basis(), side):
            assert np.allclose(s, np.eye(2) / 2)


def test_reduced_states_conditional_basis():
    sigmas = reduced_states(conditional_basis(), "A")
    e0, e1 = np.zeros((2, 2)), np.zeros((2, 2))
    e0[0, 0] = 1
    e1[1, 1] = 1
    assert np.allclose(sigmas[0], e0) and np.allclose(sigmas[1], e0)
    assert np.allclose(sigmas[2], e1) and np.allclose(sigmas[3], e1)


def test_reduced_states_resolve_identity(corpus):
    for name, basis in corpus[:12]:
        for side, other_dim in (("A", basis.dims.dim_b), ("B", basis.dims.dim_a)):
            sigmas = reduced_states(basis, side)
            total = sum(sigmas)
            dim = basis.dims.dim_a if side == "A" else basis.dims.dim_b
            assert np.linalg.norm(total - other_dim * np.eye(dim)) < 1e-9 * basis.size, name
            for s in sigmas:
                assert abs(np.trace(s) - 1) < 1e-10


def test_pairwise_test_bell_and_conditional():
    assert semicausal_basis_test(bell_basis(), "A").semicausal
    assert semicausal_basis_test(bell_basis(), "B").semicausal
    assert semicausal_basis_test(conditional_basis(), "A").semicausal
    verdict = semicausal_basis_test(conditional_basis(), "B")
    assert not verdict.semicausal and verdict.violating_pair is not None


def test_pairwise_test_completion_fails_side_a():
    verdict = semicausal_basis_test(completion_basis(), "A")
    assert not verdict.semicausal


def test_structure_product_basis():
    st = semicausal_structure(product_basis(D22), "A")
    assert [s.dim for s in st.subspaces] == [1, 1]
    assert sorted(len(s.member_indices) for s in st.subspaces) == [2, 2]


def test_structure_bell_basis():
    st = semicausal_structure(bell_basis(), "A")
    assert len(st.subspaces) == 1
    assert st.subspaces[0].dim == 2
    assert len(st.subspaces[0].member_indices) == 4


def test_structure_6x6_partition(rng):
    basis = semicausal_partition_basis(BiDims(6, 6), (3, 2, 1), rng)
    st = semicausal_structure(basis, "A")
    dims = sorted((s.dim for s in st.subspaces), reverse=True)
    counts = sorted((len(s.member_indices) for s in st.subspaces), reverse=True)
    assert dims == [3, 2, 1]
    assert counts == [18, 12, 6]


def test_structure_members_maximally_entangled(rng):
    basis = semicausal_partition_basis(BiDims(4, 4), (2, 2), rng)
    st = semicausal_structure(basis, "A")
    from qcausal.linalg import schmidt_coefficients

    for s in st.subspaces:
        for idx in s.member_indices:
            coeffs = schmidt_coefficients(basis.vectors[idx], basis.dims)
            nonzero = coeffs[coeffs > 1e-9]
            assert np.all(np.abs(nonzero - 1 / np.sqrt(s.dim)) < 1e-9)


def test_structure_rejects_signaling_basis():
    with pytest.raises(ValueError):
        semicausal_structure(completion_basis(), "A")


def test_causal_grid_product_and_bell():
    grid = causal_structure(product_basis(D22))
    assert (grid.d, grid.r_a, grid.r_b) == (1, 2, 2)
    grid = causal_structure(bell_basis())
    assert (grid.d, grid.r_a, grid.r_b) == (2, 1, 1)


def test_causal_grid_6x6(rng):
    basis = causal_grid_basis(BiDims(6, 6), 2, rng)
    grid = causal_structure(basis)
    assert (grid.d, grid.r_a, grid.r_b) == (2, 3, 3)
    for row in grid.cells:
        for cell in row:
            assert len(cell) == 4


def test_causal_grid_twisted_partition():
    for u in (np.eye(2), HADAMARD):
        grid = causal_structure(twisted_partition_basis(u))
        assert (grid.d, grid.r_a, grid.r_b) == (2, 2, 2)


def test_witness_conditional_basis_side_b():
    w = basis_signaling_witness(conditional_basis(), "B")
    assert w.separation > 0.1
    # oracle: steering the receiver between |0><0| and the even mixture
    assert w.separation <= 0.5 + 1e-9


def test_witness_completion_basis_side_a():
    basis = completion_basis()
    w = basis_signaling_witness(basis, "A")
    # steering between a pure reduced output and the even mixture: distance 1/2
    assert abs(w.separation - 0.5) < 1e-9
    # replaying the witness reproduces the separation through the channel
    ch = measurement_channel(basis)
    full = np.kron(np.eye(2), w.unitary)
    vec = basis.vectors[w.b_index]
    out_plain = partial_trace(apply(ch, proj(vec)), basis.dims, "B")
    out_steered = partial_trace(apply(ch, proj(full @ vec)), basis.dims, "B")
    assert abs(trace_distance(out_plain, out_steered) - w.separation) < 1e-9


def test_witness_requires_failing_side():
    with pytest.raises(ValueError):
        basis_signaling_witness(bell_basis(), "A")


def test_witness_unitary_is_unitary():
    w = basis_signaling_witness(conditional_basis(), "B")
    assert np.linalg.norm(w.unitary @ w.unitary.conj().T - np.eye(2)) < 1e-9


def test_witness_exists_across_corpus(corpus):
    found = 0
    for name, basis in corpus:
        for side in "AB":
            verdict = semicausal_basis_test(basis, side)
            if verdict.semicausal:
                continue
            w = basis_signaling_witness(basis, side)
            assert w.separation > 1e-6, name
            found += 1
    assert found >= 10


def test_rotation_preserves_structure(rng):
    basis = rotate_basis(bell_basis(), haar_unitary(2, rng), haar_unitary(2, rng))
    assert semicausal_basis_test(basis, "A").semicausal
    assert semicausal_basis_test(basis, "B").semicausal
    grid = causal_structure(basis)
    assert (grid.d, grid.r_a, grid.r_b) == (2, 1, 1)
