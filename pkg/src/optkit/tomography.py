"""Faithful-state process tomography by linear inversion.

A transformation ``A`` acting on party 1 of the faithful state produces the
joint table ``A F``; right-multiplying by ``F^-1`` recovers ``A``. The noisy
path measures a local IC-POVM built from the frame on both parties,
samples multinomial counts and maps the frequencies back to frame
coordinates before inverting.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from optkit import native
from optkit.errors import InvalidPOVM
from optkit.faithful import FaithfulState
from optkit.models import Model, decode_channel


@dataclass(frozen=True)
class CountTable:
    counts: np.ndarray
    no_click: int
    shots: int

    def __post_init__(self):
        total = int(self.counts.sum()) + int(self.no_click)
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots} shots")


@dataclass
class ErrorReport:
    frobenius: float | None
    trace_distance: float | None
    trace_distance_clipped: float | None
    min_choi_eigenvalue: float
    physical: bool


def exact_joint_table(A, FS: FaithfulState) -> np.ndarray:
    return np.asarray(A, dtype=float) @ FS.F


def reconstruct(table, FS: FaithfulState, prob: float | None = None) -> np.ndarray:
    """Invert ``table = A F``.

    When ``prob`` is given, ``table`` is the normalized conditioned joint
    state and ``prob`` the probability of ``A`` on the faithful state.
    """
    table = np.asarray(table, dtype=float)
    if prob is not None:
        table = table * prob
    return table @ FS.F_inv


def povm_map(m: Model) -> np.ndarray:
    """Matrix ``L`` with ``Q_k = sum_j L_kj G_j``.

    ``Q_k = G_k / D`` for ``k >= 1`` and ``Q_0 = I - sum_k Q_k``.
    """
    n = m.size
    L = np.zeros((n, n))
    L[1:, 1:] = np.eye(n - 1) / m.D
    L[0, 0] = 1.0
    L[0, 1:] = -1.0 / m.D
    return L


def povm_operators(m: Model) -> np.ndarray:
    Q = np.einsum("kj,jab->kab", povm_map(m), m.frame)
    if not m.is_classical:
        lmin = min(np.linalg.eigvalsh(q).min() for q in Q)
    else:
        lmin = min(np.diag(q).real.min() for q in Q)
    if lmin < -native.PSD_TOL:
        raise InvalidPOVM(f"frame-derived POVM has an element with eigenvalue {lmin:.3g}")
    return Q


def frame_to_povm(N, m: Model) -> np.ndarray:
    """Joint outcome probabilities from a joint frame table: ``L N L^T``."""
    L = povm_map(m)
    return L @ np.asarray(N, dtype=float) @ L.T


def povm_to_frame(P, m: Model) -> np.ndarray:
    Linv = np.linalg.inv(povm_map(m))
    return Linv @ np.asarray(P, dtype=float) @ Linv.T


def exact_distribution(A, m: Model) -> tuple[np.ndarray, float]:
    """Outcome probabilities ``Tr[(Q_k (x) Q_l)(A (x) id)(Omega)]`` and the no-click weight.

    Computed natively from the Choi matrix of ``A`` on the maximally
    entangled state, independently of the Bloch-matrix path.
    """
    Q = povm_operators(m)
    d = m.d
    choi = decode_channel(A, m)
    # (A (x) id)(Omega) is the Choi matrix with its factors swapped, over d
    joint = choi.reshape(d, d, d, d).transpose(1, 0, 3, 2).reshape(d * d, d * d) / d
    P = np.einsum("kab,lcd,bdac->kl", Q, Q, joint.reshape(d, d, d, d)).real
    return P, 1.0 - float(P.sum())


def simulate_counts(A, FS: FaithfulState, m: Model, shots: int, seed=None) -> CountTable:
    """Multinomial sample of the joint IC-POVM record, with a no-click bin."""
    P, no_click = exact_distribution(A, m)
    n = P.shape[0]
    if shots == 0:
        return CountTable(np.zeros((n, n), dtype=np.int64), 0, 0)
    probs = np.append(P.reshape(-1), no_click)
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum()
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    draw = rng.multinomial(shots, probs)
    return CountTable(draw[:-1].reshape(n, n).astype(np.int64), int(draw[-1]), int(shots))


def reconstruct_from_frequencies(P, FS: FaithfulState, m: Model) -> np.ndarray:
    return reconstruct(povm_to_frame(P, m), FS)


def error_report(estimate, m: Model, reference=None) -> ErrorReport:
    est_choi = decode_channel(estimate, m)
    est_choi = (est_choi + native.dagger(est_choi)) / 2
    ev, U = np.linalg.eigh(est_choi)
    frob = td = td_clip = None
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        frob = float(np.linalg.norm(estimate - reference))
        ref_choi = decode_channel(reference, m)
        td = 0.5 * native.trace_norm(est_choi - ref_choi) / m.d
        clipped = U @ np.diag(np.clip(ev, 0, None)) @ native.dagger(U)
        td_clip = 0.5 * native.trace_norm(clipped - ref_choi) / m.d
    return ErrorReport(
        frobenius=frob,
        trace_distance=td,
        trace_distance_clipped=td_clip,
        min_choi_eigenvalue=float(ev[0]),
        physical=bool(ev[0] >= -native.PSD_TOL),
    )


def reconstruct_from_counts(counts: CountTable, FS: FaithfulState, m: Model, reference=None) -> tuple[np.ndarray, ErrorReport]:
    """Linear-inversion estimate from counts; no positivity projection is applied.

    The report's ``trace_distance_clipped`` is computed after zeroing negative
    Choi eigenvalues, for comparison only; the returned estimate is raw.
    """
    if counts.shots <= 0:
        raise ValueError("reconstruction needs at least one shot")
    estimate = reconstruct_from_frequencies(counts.counts / counts.shots, FS, m)
    return estimate, error_report(estimate, m, reference)
