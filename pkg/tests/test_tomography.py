import numpy as np
import pytest
from conftest import T_MIX

from optkit import native, tomography
from optkit.models import decode_channel, encode_channel, quantum_model, random_channel, random_kraus, random_trans
from optkit.tomography import CountTable


def amplitude_damping(gamma):
    return [np.array([[1, 0], [0, np.sqrt(1 - gamma)]]), np.array([[0, np.sqrt(gamma)], [0, 0]])]


def test_exact_table_examples(faithful_qubit, qubit, rng):
    F = faithful_qubit.F
    assert np.array_equal(tomography.exact_joint_table(np.eye(4), faithful_qubit), F)
    table = tomography.exact_joint_table(T_MIX, faithful_qubit)
    assert np.allclose(table[0], F[0])
    assert np.allclose(table[1:], 0.5 * np.tile(F[0], (3, 1)))
    A = random_trans(qubit, rng)
    # probability of A on party 1 of the faithful state, via the native Choi matrix
    choi = decode_channel(A, qubit)
    assert tomography.exact_joint_table(A, faithful_qubit)[0, 0] == pytest.approx(np.trace(choi).real / 2)


def test_reconstruct_examples(faithful_qubit, qubit, rng):
    assert np.allclose(tomography.reconstruct(faithful_qubit.F, faithful_qubit), np.eye(4), atol=1e-13)
    for _ in range(50):
        A = random_trans(qubit, rng)
        est = tomography.reconstruct(tomography.exact_joint_table(A, faithful_qubit), faithful_qubit)
        assert np.linalg.norm(est - A) < 1e-10


def test_reconstruct_generalized(faithful_qutrit, qutrit, rng):
    for _ in range(10):
        A = random_trans(qutrit, rng, generalized=True)
        est = tomography.reconstruct(tomography.exact_joint_table(A, faithful_qutrit), faithful_qutrit)
        assert np.linalg.norm(est - A) < 1e-10


def test_reconstruct_normalized_table(faithful_qubit, qubit, rng):
    A = 0.7 * random_trans(qubit, rng)
    table = tomography.exact_joint_table(A, faithful_qubit)
    prob = table[0, 0]
    est = tomography.reconstruct(table / prob, faithful_qubit, prob=prob)
    assert np.linalg.norm(est - A) < 1e-12


def test_amplitude_damping_round_trip(faithful_qubit, qubit):
    choi = native.kraus_to_choi(amplitude_damping(0.3))
    A = encode_channel(choi, qubit)
    est = tomography.reconstruct(tomography.exact_joint_table(A, faithful_qubit), faithful_qubit)
    assert 0.5 * native.trace_norm(decode_channel(est, qubit) - choi) < 1e-10


@pytest.mark.parametrize("d", range(2, 9))
def test_povm_is_valid(d):
    m = quantum_model(d)
    Q = tomography.povm_operators(m)
    assert len(Q) == d * d
    assert np.allclose(Q.sum(axis=0), np.eye(d), atol=1e-12)
    assert min(np.linalg.eigvalsh(q).min() for q in Q) > -1e-12
    # the completing element keeps a margin from the PSD boundary
    assert np.linalg.eigvalsh(Q[0]).min() > 0.2


def test_povm_frame_round_trip(qubit, rng):
    P = rng.dirichlet(np.ones(16)).reshape(4, 4)
    assert np.abs(tomography.frame_to_povm(tomography.povm_to_frame(P, qubit), qubit) - P).max() < 1e-12


def test_exact_distribution_matches_frame_path(faithful_qutrit, qutrit, rng):
    A = encode_channel(random_kraus(qutrit, rng, trace_preserving=False), qutrit)
    P, no_click = tomography.exact_distribution(A, qutrit)
    table = tomography.frame_to_povm(tomography.exact_joint_table(A, faithful_qutrit), qutrit)
    assert np.abs(P - table).max() < 1e-12
    assert P.min() > -1e-12 and no_click > 0
    assert P.sum() + no_click == pytest.approx(1.0, abs=1e-12)


def test_exact_frequencies_reconstruct(faithful_qubit, qubit, rng):
    A = random_trans(qubit, rng)
    P, _ = tomography.exact_distribution(A, qubit)
    est = tomography.reconstruct_from_frequencies(P, faithful_qubit, qubit)
    assert np.linalg.norm(est - A) < 1e-10


def test_zero_shots(faithful_qubit, qubit):
    table = tomography.simulate_counts(np.eye(4), faithful_qubit, qubit, 0, seed=1)
    assert table.shots == 0 and not table.counts.any()
    with pytest.raises(ValueError):
        tomography.reconstruct_from_counts(table, faithful_qubit, qubit)


def test_counts_within_four_sigma(faithful_qubit, qubit):
    shots = 10**6
    table = tomography.simulate_counts(np.eye(4), faithful_qubit, qubit, shots, seed=1)
    P, _ = tomography.exact_distribution(np.eye(4), qubit)
    sigma = np.sqrt(shots * P * (1 - P))
    assert np.all(np.abs(table.counts - shots * P) <= 4 * sigma + 1e-9)


def test_sampling_is_deterministic(faithful_qubit, qubit, rng):
    A = random_trans(qubit, rng)
    a = tomography.simulate_counts(A, faithful_qubit, qubit, 5000, seed=9)
    b = tomography.simulate_counts(A, faithful_qubit, qubit, 5000, seed=9)
    assert np.array_equal(a.counts, b.counts) and a.no_click == b.no_click


def test_no_click_bin(faithful_qubit, qubit):
    A = 0.5 * np.eye(4)
    table = tomography.simulate_counts(A, faithful_qubit, qubit, 20000, seed=2)
    assert table.no_click == pytest.approx(10000, abs=5 * 71)
    assert table.counts.sum() + table.no_click == 20000


def test_count_table_validates_total():
    with pytest.raises(ValueError):
        CountTable(np.ones((4, 4), dtype=np.int64), 0, 17)


def test_error_report(faithful_qubit, qubit, rng):
    A = random_trans(qubit, rng)
    table = tomography.simulate_counts(A, faithful_qubit, qubit, 10**5, seed=3)
    est, report = tomography.reconstruct_from_counts(table, faithful_qubit, qubit, reference=A)
    assert report.frobenius == pytest.approx(np.linalg.norm(est - A))
    assert 0 < report.trace_distance < 0.1
    assert report.trace_distance_clipped is not None
    assert report.physical == (report.min_choi_eigenvalue >= -1e-10)
    blind = tomography.error_report(est, qubit)
    assert blind.frobenius is None and blind.trace_distance is None


def test_error_shrinks_with_shots(faithful_qubit, qubit):
    A = encode_channel(random_channel(qubit, 7), qubit)
    errs = []
    for shots in (10**3, 10**4, 10**5):
        runs = [
            tomography.reconstruct_from_counts(
                tomography.simulate_counts(A, faithful_qubit, qubit, shots, seed=s), faithful_qubit, qubit, A
            )[1].frobenius
            for s in range(10)
        ]
        errs.append(np.median(runs))
    assert errs[0] > errs[1] > errs[2]
