"""Acceptance criteria, one test and one PASS/FAIL line per criterion.

Each test prints its measured values next to the stated tolerance, then
asserts. Run with ``pytest -s tests/test_acceptance.py`` to see the lines.
"""
import io
import json

import numpy as np
import pytest

from optkit import bloch, cli, dims, faithful, gns, native, tomography
from optkit.models import (
    classical_model,
    decode_channel,
    decode_effect,
    decode_state,
    encode_channel,
    encode_effect,
    encode_state,
    max_entangled_joint,
    quantum_model,
    random,
    random_channel,
    random_effect,
    random_state,
    random_trans,
)

DIMS = (2, 3)


def verdict(n, title, checks):
    """Print one line for criterion ``n`` and return whether every part held."""
    ok = all(passed for _, passed in checks)
    parts = "; ".join(f"{text} [{'ok' if passed else 'FAIL'}]" for text, passed in checks)
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {n} ({title}): {parts}")
    return ok


def setup(d):
    m = quantum_model(d)
    return m, faithful.f_matrix(max_entangled_joint(m), require_symmetric=True)


def test_criterion_1_twin_adjoint():
    checks = []
    for d in DIMS:
        m, FS = setup(d)
        rng = np.random.default_rng(100 + d)
        chois = [random("generalized_trans", m, rng) for _ in range(200)]
        mats = [encode_channel(C, m) for C in chois]
        ident = max(np.linalg.norm(A @ FS.F - FS.F @ faithful.twin(A, FS).T) for A in mats)
        report = faithful.check_generalized_adjoint(FS, mats, tol=1e-9)
        unit = np.abs(faithful.twin(np.eye(m.size), FS) - np.eye(m.size)).max()
        oracle = max(
            np.linalg.norm(faithful.twin(A, FS) - encode_channel(native.transpose_kraus_choi(C, d), m))
            for A, C in zip(mats, chois)
        )
        checks += [
            (f"d={d} identity {ident:.2e} < 1e-10", ident < 1e-10),
            (
                f"d={d} axioms add {report.additivity:.2e}, inv {report.involution:.2e}, "
                f"prod {report.anti_homomorphism:.2e} <= 1e-9, axiom4 ratio {report.axiom4_min_ratio:.3g} > 1e-6",
                report.ok,
            ),
            (f"d={d} twin(I) {unit:.2e} <= 1e-12", unit <= 1e-12),
            (f"d={d} Kraus transpose {oracle:.2e} < 1e-10", oracle < 1e-10),
        ]
    assert verdict(1, "twin and generalized adjoint", checks)


def test_criterion_2_gns():
    checks = []
    for d in DIMS:
        m, FS = setup(d)
        G = gns.build_gns(FS)
        rng = np.random.default_rng(200 + d)
        adm = dims.adm(m)
        idim, _ = dims.idim(m)
        hom = adj = ideal = 0.0
        for _ in range(100):
            A, B, C = (random_trans(m, rng, generalized=True) for _ in range(3))
            hom = max(hom, np.abs(gns.represent(A @ B, G) - gns.represent(A, G) @ gns.represent(B, G)).max())
            adj = max(adj, abs(gns.gns_inner(faithful.twin(C, FS) @ A, B, FS) - gns.gns_inner(A, C @ B, FS)))
            ideal = max(ideal, gns.left_ideal_residual(G, A))
        pair = 0.0
        for _ in range(100):
            CA, CB = (random("generalized_trans", m, rng) for _ in range(2))
            EA, EB = (native.choi_heisenberg(C, np.eye(d)) for C in (CA, CB))
            A, B = encode_channel(CA, m), encode_channel(CB, m)
            lhs = gns.gns_inner(faithful.twin(A, FS), faithful.twin(B, FS), FS)
            pair = max(pair, abs(lhs - np.trace(EA @ EB.T).real / d))
        checks += [
            (f"d={d} Gram min eigenvalue {G.min_eigenvalue:.4g} > -1e-9", G.min_eigenvalue > -1e-9),
            (f"d={d} rank {G.dim} = adm+1 = {adm + 1} = idim^2 = {idim**2}", G.dim == adm + 1 == idim**2 == d * d),
            (f"d={d} homomorphism {hom:.2e}, adjoint {adj:.2e} <= 1e-9", hom <= 1e-9 and adj <= 1e-9),
            (f"d={d} left ideal {ideal:.2e} <= 1e-9", ideal <= 1e-9),
            (f"d={d} trace pairing {pair:.2e} <= 1e-10", pair <= 1e-10),
        ]
    assert verdict(2, "GNS construction", checks)


def test_criterion_3_pairing():
    checks = []
    for d in DIMS:
        m, FS = setup(d)
        G = gns.build_gns(FS)
        rng = np.random.default_rng(300 + d)
        err = prob = 0.0
        for _ in range(100):
            w = encode_state(random_state(m, rng), m)
            A = random_trans(m, rng)
            err = max(err, abs(bloch.probability(A[0], w) - gns.pairing(w, A, G, m)))
            _, p = faithful.find_preparation_map(w, m, FS)
            prob = max(prob, abs(p - 1 / d))
        checks += [
            (f"d={d} pairing {err:.2e} < 1e-9", err < 1e-9),
            (f"d={d} preparation probability off 1/d by {prob:.2e} <= 1e-12", prob <= 1e-12),
        ]
    assert verdict(3, "state pairing", checks)


def test_criterion_4_norm_bounds():
    checks = []
    for d in DIMS:
        m, FS = setup(d)
        G = gns.build_gns(FS)
        rng = np.random.default_rng(400 + d)
        report = gns.check_norm_bounds(G, m, [random_trans(m, rng) for _ in range(200)], tol=1e-9)
        checks.append(
            (f"d={d} slacks {report.min_slack_first:.3g}, {report.min_slack_second:.3g} >= -1e-9", report.ok)
        )
    assert verdict(4, "norm bounds", checks)


def test_criterion_5_tomography():
    m, FS = setup(2)
    rng = np.random.default_rng(500)
    exact = max(
        np.linalg.norm(tomography.reconstruct(tomography.exact_joint_table(A, FS), FS) - A)
        for A in (random_trans(m, rng) for _ in range(50))
    )
    channels = [random_trans(m, rng) for _ in range(20)]

    def median_error(shots):
        errs = []
        for seed, A in enumerate(channels):
            counts = tomography.simulate_counts(A, FS, m, shots, seed=seed)
            _, report = tomography.reconstruct_from_counts(counts, FS, m, reference=A)
            errs.append(report.frobenius)
        return float(np.median(errs))

    base = median_error(10**6)
    ratio = base / median_error(4 * 10**6)
    checks = [
        (f"exact round trip {exact:.2e} < 1e-10", exact < 1e-10),
        (f"median Frobenius error at 1e6 shots {base:.4g} < 5e-3", base < 5e-3),
        (f"4x-shots error ratio {ratio:.3f} in [1.33, 3.0]", 1.33 <= ratio <= 3.0),
    ]
    assert verdict(5, "tomography", checks)


def test_criterion_6_dimensionality_audit():
    q2, q3 = dims.audit(quantum_model(2)), dims.audit(quantum_model(3))
    checks = [
        (
            f"quantum(2) adm {q2.adm}, pair adm {q2.pair_adm}, idim {q2.idim}, pair idim {q2.pair_idim}, "
            f"{len(q2.checks) - q2.violations}/6 checks",
            (q2.adm, q2.pair_adm, q2.idim, q2.pair_idim, q2.violations) == (3, 15, 2, 4, 0),
        ),
        (
            f"quantum(3) adm {q3.adm}, quadratic law {q3.check('quadratic_law').arithmetic}",
            q3.adm == 8 and q3.check("quadratic_law").passed,
        ),
    ]
    for n, arithmetic in ((2, "1 != 3"), (3, "2 != 8")):
        c = dims.audit(classical_model(n))
        law = c.check("quadratic_law")
        bounds = c.check("bound_upper").passed and c.check("bound_lower").passed
        checks.append(
            (
                f"classical({n}) quadratic law {law.arithmetic}, bounds {'hold' if bounds else 'fail'}",
                not law.passed and law.arithmetic == arithmetic and bounds,
            )
        )
    assert verdict(6, "dimensionality audit", checks)


def test_criterion_7_round_trips():
    checks = []
    for d in DIMS:
        m = quantum_model(d)
        rng = np.random.default_rng(700 + d)
        s = c = e = 0.0
        for _ in range(100):
            rho = random_state(m, rng)
            s = max(s, np.abs(decode_state(encode_state(rho, m), m) - rho).max())
            C = random_channel(m, rng)
            c = max(c, np.abs(decode_channel(encode_channel(C, m), m) - C).max())
            E = random_effect(m, rng)
            e = max(e, np.abs(decode_effect(encode_effect(E, m), m) - E).max())
        checks.append((f"d={d} state {s:.1e}, channel {c:.1e}, effect {e:.1e} < 1e-12", max(s, c, e) < 1e-12))
    assert verdict(7, "encode/decode round trips", checks)


def test_criterion_8_null_ideal():
    checks = []
    for d in DIMS:
        m, FS = setup(d)
        G = gns.build_gns(FS)
        report = gns.null_ideal_characterization(G, m, tol=1e-8)
        n = m.size
        expected = n * n - n
        w = report.witness
        checks += [
            (
                f"d={d} null dim {report.null_dim} = kernel dim {report.kernel_dim} = {expected}",
                report.null_dim == report.kernel_dim == expected,
            ),
            (
                f"d={d} null->kernel {report.null_in_kernel:.1e}, kernel->null {report.kernel_in_null:.1e} < 1e-8",
                report.ok,
            ),
            (
                f"d={d} witness gns_norm {w['gns_norm']:.1e}, twin gns_norm {w['twin_gns_norm']:.3f}, "
                f"propensity {w['propensity_max_abs']:.3f}, twin propensity {w['twin_propensity_max_abs']:.1e}",
                w["boundary_case"] and w["gns_norm"] < 1e-9 and w["twin_gns_norm"] > 0.4,
            ),
        ]
    assert verdict(8, "null ideal characterization", checks)


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    return cli.execute(list(argv), stdout=out, stderr=err), out.getvalue(), err.getvalue()


def test_criterion_9_cli():
    qubit = '{"kind":"quantum","dim":2}'
    code, first, _ = _cli("audit", "--model", qubit)
    _, second, _ = _cli("audit", "--model", qubit)
    bit_code, bit_out, _ = _cli("audit", "--model", '{"kind":"classical","n":2}')
    bad_code, _, bad_err = _cli("audit", "--model", '{"kind":"quantum","dim":"two"}')
    checks = [
        (f"quantum(2) exit {code}", code == 0),
        ("byte-stable report", first == second and first != ""),
        (
            f"classical(2) exit {bit_code}, violations {json.loads(bit_out)['violations']}",
            bit_code == 1 and json.loads(bit_out)["violations"] >= 1,
        ),
        (f"schema error exit {bad_code} ({bad_err.strip()})", bad_code == 2 and "/dim" in bad_err),
    ]
    assert verdict(9, "command line", checks)


@pytest.mark.parametrize("d", DIMS)
def test_literal_boundary_reading_is_impossible(d):
    # twin(X) row 0 is (X f)^T F^-1, so no null element has an informative twin
    m, FS = setup(d)
    G = gns.build_gns(FS)
    worst = max(np.abs(faithful.twin(G.null_basis[:, k].reshape(m.size, m.size), FS)[0]).max() for k in range(G.null_basis.shape[1]))
    assert worst < 1e-10
