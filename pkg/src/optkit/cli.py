"""Command-line front end.

Usage::

    optkit audit --model '{"kind": "quantum", "dim": 2}'
    optkit gns   --model model.json [--samples N]
    optkit twin  --model ... --trans trans.json
    optkit tomo  --model ... --trans trans.json [--shots N] [--seed S]
    optkit pair  --model ... [--samples N]

Global flags ``--tol``, ``--json OUT`` and ``--seed`` go before or after the
subcommand. The default seed is 0 unless ``OPTKIT_SEED`` is set.

Exit codes: 0 when the report has no violations, 1 when a check fails or a
numerical error occurs (embedded in the report), 2 on invalid input.
"""
from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from optkit import bloch, dims, faithful, gns, jsonio, native, tomography
from optkit.errors import OptkitError
from optkit.models import (
    Model,
    decode_effect,
    encode_channel,
    encode_state,
    max_entangled_joint,
    random_state,
    random_trans,
)

DEFAULT_TOL = 1e-9


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_seed() -> int:
    raw = os.environ.get("OPTKIT_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"OPTKIT_SEED must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS, help="check tolerance (default 1e-9)")
    common.add_argument("--json", dest="json_out", default=argparse.SUPPRESS, help="write the report here instead of stdout")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="RNG seed (default $OPTKIT_SEED or 0)")

    parser = _Parser(prog="optkit", description=__doc__.split("\n\n")[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("audit", parents=[common], help="dimensionality audit of a model and its pair")
    p.add_argument("--model", required=True)

    p = sub.add_parser("gns", parents=[common], help="build the GNS space and check its structure")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, default=20)

    p = sub.add_parser("twin", parents=[common], help="twin of a transformation on the faithful state")
    p.add_argument("--model", required=True)
    p.add_argument("--trans", required=True)

    p = sub.add_parser("tomo", parents=[common], help="faithful-state tomography of a transformation")
    p.add_argument("--model", required=True)
    p.add_argument("--trans", required=True)
    p.add_argument("--shots", type=int, default=0)

    p = sub.add_parser("pair", parents=[common], help="state/propensity pairing through the scalar product")
    p.add_argument("--model", required=True)
    p.add_argument("--samples", type=int, default=20)
    return parser


def _faithful_state(m: Model):
    return faithful.f_matrix(max_entangled_joint(m), require_symmetric=True)


def _trans_matrix(fmt, payload, m: Model) -> np.ndarray:
    return payload if fmt == "bloch" else encode_channel(payload, m)


def run_audit(m: Model, args) -> tuple[list, dict, dict]:
    report = dims.audit(m, seed=args.seed)
    checks = [jsonio.check(c.name, c.passed, c.left, c.right) for c in report.checks]
    details = {
        "adm": report.adm,
        "pair_adm": report.pair_adm,
        "idim": report.idim,
        "pair_idim": report.pair_idim,
        "arithmetic": {c.name: c.arithmetic for c in report.checks},
        "monotone_discrimination": report.monotone_discrimination,
    }
    return checks, details, {"adm_rtol": dims.ADM_RTOL, "witness": dims.WITNESS_TOL}


def run_gns(m: Model, args) -> tuple[list, dict, dict]:
    tol = args.tol
    FS = _faithful_state(m)
    G = gns.build_gns(FS)
    rng = np.random.default_rng(args.seed)
    hom = adj = ideal = pair_err = 0.0
    for _ in range(args.samples):
        A, B, C = (random_trans(m, rng, generalized=True) for _ in range(3))
        hom = max(hom, np.max(np.abs(gns.represent(A @ B, G) - gns.represent(A, G) @ gns.represent(B, G))))
        lhs = gns.gns_inner(faithful.twin(C, FS) @ A, B, FS)
        adj = max(adj, abs(lhs - gns.gns_inner(A, C @ B, FS)))
        ideal = max(ideal, gns.left_ideal_residual(G, A))
        EA = decode_effect(bloch.propensity_of(A), m)
        EB = decode_effect(bloch.propensity_of(B), m)
        oracle = np.trace(EA @ EB.T).real / m.d
        pair_err = max(pair_err, abs(gns.gns_inner(faithful.twin(A, FS), faithful.twin(B, FS), FS) - oracle))
    null = gns.null_ideal_characterization(G, m, seed=args.seed)
    checks = [
        jsonio.check("gram_psd", G.min_eigenvalue > -gns.TOL_PSD, G.min_eigenvalue, -gns.TOL_PSD),
        jsonio.check("rank", G.dim == m.size, G.dim, m.size),
        jsonio.check("homomorphism", hom <= tol, hom, tol),
        jsonio.check("adjoint_relation", adj <= tol, adj, tol),
        jsonio.check("left_ideal", ideal <= tol, ideal, tol),
        jsonio.check("trace_pairing", pair_err <= 1e-10, pair_err, 1e-10),
        jsonio.check("null_ideal_kernel", null.ok, max(null.null_in_kernel, null.kernel_in_null), null.tol),
    ]
    details = {
        "dim": G.dim,
        "gram_size": G.gram.shape[0],
        "null_dim": null.null_dim,
        "eigenvalue_signs": {
            "positive": int(np.sum(G.eigenvalues > gns.TOL_RANK * np.max(np.abs(G.eigenvalues)))),
            "negative": int(np.sum(G.eigenvalues < -gns.TOL_RANK * np.max(np.abs(G.eigenvalues)))),
        },
        "boundary_witness": null.witness,
        "faithful_cond": FS.cond,
    }
    return checks, details, {"check": tol, "psd": gns.TOL_PSD, "rank": gns.TOL_RANK, "trace_pairing": 1e-10, "null_ideal": null.tol}


def run_twin(m: Model, args) -> tuple[list, dict, dict]:
    tol = args.tol
    fmt, payload = jsonio.transformation_from_json(jsonio.load_json_arg(args.trans), m)
    FS = _faithful_state(m)
    A = _trans_matrix(fmt, payload, m)
    At = faithful.twin(A, FS)
    ident = faithful.twin_identity_residual(A, FS)
    invol = float(np.linalg.norm(faithful.twin(At, FS) - A))
    unit = float(np.max(np.abs(faithful.twin(np.eye(m.size), FS) - np.eye(m.size))))
    checks = [
        jsonio.check("defining_identity", ident < 1e-10, ident, 1e-10),
        jsonio.check("involution", invol < tol, invol, tol),
        jsonio.check("identity_fixed", unit < 1e-12, unit, 1e-12),
    ]
    tolerances = {"check": tol, "defining_identity": 1e-10, "identity_fixed": 1e-12}
    if fmt != "bloch":
        choi = payload if fmt == "choi" else native.kraus_to_choi(payload)
        oracle = encode_channel(native.transpose_kraus_choi(choi, m.d), m)
        err = float(np.linalg.norm(At - oracle))
        checks.append(jsonio.check("kraus_transpose", err < 1e-10, err, 1e-10))
        tolerances["kraus_transpose"] = 1e-10
    details = {"twin": At, "trans": A}
    return checks, details, tolerances


def run_tomo(m: Model, args) -> tuple[list, dict, dict]:
    if args.shots < 0:
        raise UsageError("--shots must be non-negative")
    fmt, payload = jsonio.transformation_from_json(jsonio.load_json_arg(args.trans), m)
    FS = _faithful_state(m)
    A = _trans_matrix(fmt, payload, m)
    if args.shots == 0:
        est = tomography.reconstruct(tomography.exact_joint_table(A, FS), FS)
        report = tomography.error_report(est, m, A)
        checks = [jsonio.check("exact_round_trip", report.frobenius < 1e-10, report.frobenius, 1e-10)]
        details = {"path": "exact", "estimate": est, "trace_distance": report.trace_distance}
        return checks, details, {"exact_round_trip": 1e-10}
    counts = tomography.simulate_counts(A, FS, m, args.shots, args.seed)
    est, report = tomography.reconstruct_from_counts(counts, FS, m, A)
    total = int(counts.counts.sum()) + counts.no_click
    checks = [jsonio.check("count_total", total == args.shots, total, args.shots)]
    details = {
        "path": "sampled",
        "shots": args.shots,
        "counts": jsonio.count_table_to_json(counts),
        "estimate": est,
        "frobenius": report.frobenius,
        "trace_distance": report.trace_distance,
        "trace_distance_clipped": report.trace_distance_clipped,
        "min_choi_eigenvalue": report.min_choi_eigenvalue,
        "physical": report.physical,
    }
    return checks, details, {"psd": native.PSD_TOL}


def run_pair(m: Model, args) -> tuple[list, dict, dict]:
    tol = args.tol
    FS = _faithful_state(m)
    G = gns.build_gns(FS)
    rng = np.random.default_rng(args.seed)
    err = prob_err = 0.0
    for _ in range(args.samples):
        w = encode_state(random_state(m, rng), m)
        A = random_trans(m, rng)
        err = max(err, abs(gns.pairing(w, A, G, m) - bloch.probability(A[0], w)))
        _, p = faithful.find_preparation_map(w, m, FS)
        prob_err = max(prob_err, abs(p - 1 / m.d))
    checks = [
        jsonio.check("pairing", err < tol, err, tol),
        jsonio.check("preparation_probability", prob_err <= 1e-12, prob_err, 1e-12),
    ]
    return checks, {"samples": args.samples}, {"check": tol, "preparation_probability": 1e-12}


RUNNERS = {"audit": run_audit, "gns": run_gns, "twin": run_twin, "tomo": run_tomo, "pair": run_pair}


def execute(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        args.tol = getattr(args, "tol", DEFAULT_TOL)
        args.seed = getattr(args, "seed", None)
        if args.seed is None:
            args.seed = _default_seed()
        args.json_out = getattr(args, "json_out", None)
        m = jsonio.model_from_json(jsonio.load_json_arg(args.model))
        model_json = jsonio.model_to_json(m)
        try:
            checks, details, tolerances = RUNNERS[args.command](m, args)
        except OptkitError as exc:
            checks = [jsonio.check("numerical_error", False, type(exc).__name__, str(exc))]
            details, tolerances = {}, {"check": args.tol}
    except (UsageError, jsonio.SpecError) as exc:
        print(f"optkit: error: {exc}", file=stderr)
        return 2
    report = jsonio.envelope(args.command, model_json, args.seed, tolerances, checks, details)
    text = jsonio.dumps(report) + "\n"
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return 0 if report["violations"] == 0 else 1


def main() -> None:
    sys.exit(execute())


if __name__ == "__main__":
    main()
