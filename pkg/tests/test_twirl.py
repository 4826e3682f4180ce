import numpy as np
import pytest

from qcausal.causality import A_TO_B, B_TO_A, semicausal_test
from qcausal.channels import apply, choi, choi_distance, measurement_channel, validate
from qcausal.linalg import BiDims, PAULI_X, PAULI_Z, proj, random_density_matrix, tensor_product
from qcausal.measurements import bell_basis, bell_states
from qcausal.twirl import (
    PauliString,
    ProjectiveUnitaryGroup,
    bell_twirl,
    close_group,
    pauli_twirl_group,
    stabilizer_channel,
    stabilizer_twirl,
    tetrahedral_group,
    twirl_channel,
    twirl_structure_check,
    werner_twirl,
)

D22 = BiDims(2, 2)


def test_pauli_string_parse_and_matrix():
    s = PauliString.parse("-ZIZ")
    assert s.sign == -1 and s.letters == "ZIZ"
    assert str(s) == "-ZIZ"
    m = PauliString.parse("+XXI").to_matrix()
    assert np.allclose(m, tensor_product(tensor_product(PAULI_X, PAULI_X), np.eye(2)))
    # Y convention: the standard matrix equals i X Z
    assert np.allclose(PauliString.parse("+Y").to_matrix(), 1j * PAULI_X @ PAULI_Z)


def test_pauli_string_commutation():
    assert PauliString("XX").commutes_with(PauliString("ZZ"))
    assert not PauliString("XI").commutes_with(PauliString("ZI"))
    assert PauliString("XZ").commutes_with(PauliString("ZX"))


def test_close_group_small_cases():
    g = close_group([PAULI_X])
    assert g.order == 2
    g = close_group([tensor_product(PAULI_X, PAULI_X), tensor_product(PAULI_Z, PAULI_Z)])
    assert g.order == 4
    assert tetrahedral_group().order == 12


def test_close_group_rejects_nonunitary():
    with pytest.raises(ValueError):
        close_group([np.diag([1.0, 0.5]).astype(complex)])


def test_close_group_order_overflow():
    t_like = np.diag([1, np.exp(1j * np.pi / 7)]).astype(complex)
    with pytest.raises(ValueError, match="max_order"):
        close_group([t_like], max_order=5)


def test_trivial_twirl_is_identity(rng):
    g = close_group([np.eye(4, dtype=complex)])
    ch = twirl_channel(g, D22)
    rho = random_density_matrix(4, rng)
    assert np.allclose(apply(ch, rho), rho)


def test_pauli_twirl_equals_bell_measurement():
    assert choi_distance(choi(bell_twirl()), choi(measurement_channel(bell_basis()))) < 1e-9


def test_tetrahedral_twirl_on_00(rng):
    # oracle: direct 12-term summation over the closed group
    group = tetrahedral_group()
    rho = proj([1, 0, 0, 0])
    acc = np.zeros((4, 4), dtype=complex)
    for u in group.elements:
        w = tensor_product(u, u)
        acc += w @ rho @ w.conj().T
    acc /= group.order
    out = apply(werner_twirl(), rho)
    assert np.linalg.norm(out - acc) < 1e-12
    # the singlet weight of |00> is zero, so the output is the even triplet mixture
    psi_minus = bell_states()[3]
    expected = (np.eye(4) - proj(psi_minus)) / 3
    assert np.linalg.norm(out - expected) < 1e-9


def test_tetrahedral_twirl_on_phi_plus():
    # singlet weight of phi+ is zero too: same even triplet mixture
    phi_plus, psi_minus = bell_states()[0], bell_states()[3]
    out = apply(werner_twirl(), proj(phi_plus))
    expected = (np.eye(4) - proj(psi_minus)) / 3
    assert np.linalg.norm(out - expected) < 1e-9


def test_stabilizer_single_qubit_dephasing(rng):
    ch = stabilizer_channel([PauliString.parse("+Z")], dims=BiDims(1, 2))
    rho = random_density_matrix(2, rng)
    assert np.allclose(apply(ch, rho), np.diag(np.diag(rho)))


def test_stabilizer_bell_case():
    ch = stabilizer_channel([PauliString.parse("+XX"), PauliString.parse("+ZZ")])
    assert validate(ch).tp
    assert choi_distance(choi(ch), choi(measurement_channel(bell_basis()))) < 1e-9


def test_stabilizer_parity_sector_coherence():
    # oracle: projector algebra, |phi+><phi-| lives inside the even sector
    ch = stabilizer_channel([PauliString.parse("+ZZ")])
    phi_p, phi_m = bell_states()[0], bell_states()[1]
    coherence = np.outer(phi_p, phi_m.conj())
    assert np.allclose(apply(ch, coherence), coherence)
    # cross-sector coherence dies
    psi_p = bell_states()[2]
    cross = np.outer(phi_p, psi_p.conj())
    assert np.linalg.norm(apply(ch, cross)) < 1e-12


def test_stabilizer_rejects_bad_generators():
    with pytest.raises(ValueError, match="commute"):
        stabilizer_channel([PauliString.parse("+XI"), PauliString.parse("+ZI")])
    with pytest.raises(ValueError, match="dependent"):
        stabilizer_channel([PauliString.parse("+XX"), PauliString.parse("+ZZ"),
                            PauliString.parse("-YY")])


def test_stabilizer_matches_twirl_on_fixtures():
    fixture_sets = [
        [PauliString.parse("+XX"), PauliString.parse("+ZZ")],
        [PauliString.parse("+ZZ")],
        [PauliString.parse("+XX")],
        [PauliString.parse("+ZI"), PauliString.parse("+IZ")],
    ]
    for gens in fixture_sets:
        direct = stabilizer_channel(gens)
        via_group = stabilizer_twirl(gens)
        assert choi_distance(choi(direct), choi(via_group)) < 1e-9


def test_werner_twirl_preserves_singlet_fidelity(rng):
    ch = werner_twirl()
    psi_minus = bell_states()[3]
    for _ in range(50):
        rho = random_density_matrix(4, rng)
        before = np.vdot(psi_minus, rho @ psi_minus).real
        after = np.vdot(psi_minus, apply(ch, rho) @ psi_minus).real
        assert abs(before - after) < 1e-9


def test_werner_twirl_fixed_points(rng):
    ch = werner_twirl()
    psi_minus = bell_states()[3]
    assert np.linalg.norm(apply(ch, proj(psi_minus)) - proj(psi_minus)) < 1e-9
    assert np.linalg.norm(apply(ch, np.eye(4) / 4) - np.eye(4) / 4) < 1e-9


def test_werner_twirl_output_form(rng):
    # Bell-diagonal with the three triplet weights equal
    ch = werner_twirl()
    basis = np.stack(bell_states(), axis=1)
    for _ in range(10):
        out = apply(ch, random_density_matrix(4, rng))
        in_bell = basis.conj().T @ out @ basis
        off_diag = in_bell - np.diag(np.diag(in_bell))
        assert np.linalg.norm(off_diag) < 1e-9
        triplet = [in_bell[k, k].real for k in range(3)]
        assert max(triplet) - min(triplet) < 1e-9


def test_twirl_channels_are_causal_for_product_groups():
    for ch in (bell_twirl(), werner_twirl()):
        assert semicausal_test(ch, B_TO_A)
        assert semicausal_test(ch, A_TO_B)


def test_structure_check_on_twirls():
    for group, dims in ((pauli_twirl_group(), D22),):
        report = twirl_structure_check(group, twirl_channel(group, dims))
        assert report.ok
    wt = werner_twirl()
    tetra_two_qubit = ProjectiveUnitaryGroup(
        tuple(tensor_product(u, u) for u in tetrahedral_group().elements))
    report = twirl_structure_check(tetra_two_qubit, wt)
    assert report.ok
    trivial = close_group([np.eye(4, dtype=complex)])
    report = twirl_structure_check(trivial, twirl_channel(trivial, D22))
    assert report.ok


def test_structure_check_rejects_mismatched_channel():
    with pytest.raises(ValueError):
        twirl_structure_check(pauli_twirl_group(), werner_twirl())
