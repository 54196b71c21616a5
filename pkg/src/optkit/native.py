"""Native quantum objects: density matrices, Kraus sets and Choi matrices.

Choi convention (column stacking on the input): for a map ``C`` on
``d_in x d_in`` matrices,

    choi = sum_ij  E_ij (x) C(E_ij)

so the input factor comes first and ``C(X) = Tr_1[(X^T (x) I) choi]``.
"""
from __future__ import annotations

import numpy as np

from optkit.errors import InvalidChannel, InvalidEffect, InvalidState

HERM_TOL = 1e-12
PSD_TOL = 1e-10


def dagger(X: np.ndarray) -> np.ndarray:
    return X.conj().T


def is_hermitian(X, tol: float = HERM_TOL) -> bool:
    X = np.asarray(X)
    return X.ndim == 2 and X.shape[0] == X.shape[1] and np.max(np.abs(X - dagger(X)), initial=0.0) <= tol


def ket(i: int, d: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


def projector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def matrix_unit(i: int, j: int, d: int) -> np.ndarray:
    E = np.zeros((d, d), dtype=complex)
    E[i, j] = 1.0
    return E


def validate_state(rho, tol: float = PSD_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho):
        raise InvalidState("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1) > 1e-10:
        raise InvalidState(f"density matrix has trace {np.trace(rho).real:.12g}")
    lmin = np.linalg.eigvalsh(rho).min()
    if lmin < -tol:
        raise InvalidState(f"density matrix has eigenvalue {lmin:.3g}")
    return rho


def validate_effect(E, tol: float = PSD_TOL) -> np.ndarray:
    E = np.asarray(E, dtype=complex)
    if not is_hermitian(E):
        raise InvalidEffect("effect is not Hermitian")
    ev = np.linalg.eigvalsh(E)
    if ev.min() < -tol or ev.max() > 1 + tol:
        raise InvalidEffect(f"effect spectrum [{ev.min():.3g}, {ev.max():.3g}] not inside [0, 1]")
    return E


def choi_dims(choi, d_in: int | None = None) -> tuple[int, int]:
    n = np.asarray(choi).shape[0]
    if d_in is None:
        d_in = int(round(np.sqrt(n)))
    if n % d_in:
        raise InvalidChannel(f"Choi size {n} not divisible by input dimension {d_in}")
    return d_in, n // d_in


def kraus_to_choi(kraus) -> np.ndarray:
    kraus = [np.asarray(K, dtype=complex) for K in kraus]
    d_out, d_in = kraus[0].shape
    choi = np.zeros((d_in * d_out, d_in * d_out), dtype=complex)
    for K in kraus:
        # vec with input index first: |K>> = sum_i |i> (x) K|i>
        v = K.T.reshape(-1)
        choi += np.outer(v, v.conj())
    return choi


def choi_to_kraus(choi, d_in: int | None = None, zero_eps: float = 1e-12) -> list[np.ndarray]:
    """Kraus operators of a completely positive map from its Choi matrix."""
    d_in, d_out = choi_dims(choi, d_in)
    ev, U = np.linalg.eigh(np.asarray(choi, dtype=complex))
    kraus = []
    for lam, v in zip(ev, U.T):
        if lam > zero_eps:
            kraus.append(np.sqrt(lam) * v.reshape(d_in, d_out).T)
    return kraus


def apply_choi(choi, X, d_in: int | None = None) -> np.ndarray:
    d_in, d_out = choi_dims(choi, d_in)
    C4 = np.asarray(choi).reshape(d_in, d_out, d_in, d_out)
    return np.einsum("ij,iajb->ab", np.asarray(X), C4)


def apply_kraus(kraus, X) -> np.ndarray:
    X = np.asarray(X)
    return sum(K @ X @ dagger(K) for K in kraus)


def choi_heisenberg(choi, Y, d_in: int | None = None) -> np.ndarray:
    """Adjoint map ``C^dagger(Y)`` defined by ``Tr[C(X) Y] = Tr[X C^dagger(Y)]``."""
    d_in, d_out = choi_dims(choi, d_in)
    C4 = np.asarray(choi).reshape(d_in, d_out, d_in, d_out)
    # Tr[C(E_ij) Y] = sum_ab C4[i,a,j,b] Y[b,a] is entry (j, i) of C^dagger(Y)
    return np.einsum("iajb,ba->ji", C4, np.asarray(Y))


def partial_trace_output(choi, d_in: int | None = None) -> np.ndarray:
    """``Tr_out choi`` which equals ``C^dagger(I)^T``."""
    d_in, d_out = choi_dims(choi, d_in)
    return np.einsum("iaja->ij", np.asarray(choi).reshape(d_in, d_out, d_in, d_out))


def validate_choi(choi, d_in: int | None = None, tol: float = PSD_TOL) -> np.ndarray:
    choi = np.asarray(choi, dtype=complex)
    if not is_hermitian(choi, 1e-10):
        raise InvalidChannel("Choi matrix is not Hermitian")
    lmin = np.linalg.eigvalsh(choi).min()
    if lmin < -tol:
        raise InvalidChannel(f"Choi matrix has eigenvalue {lmin:.3g} (not completely positive)")
    ptr = partial_trace_output(choi, d_in)
    lmax = np.linalg.eigvalsh((ptr + dagger(ptr)) / 2).max()
    if lmax > 1 + tol:
        raise InvalidChannel(f"partial trace has eigenvalue {lmax:.12g} > 1 (trace increasing)")
    return choi


def transpose_kraus_choi(choi, d_in: int | None = None) -> np.ndarray:
    """Choi matrix of the map whose Kraus operators are the transposes of ``choi``'s.

    For ``C(X) = sum K X K^dagger`` the transposed map is
    ``X -> sum K^T X conj(K) = (C^dagger(X^T))^T``; the right-hand side is
    linear in ``choi`` so Hermiticity-preserving generalized maps are
    covered as well.
    """
    d_in, d_out = choi_dims(choi, d_in)
    if d_in != d_out:
        raise InvalidChannel("transposed Kraus map needs equal input and output dimension")
    d = d_in
    out = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            Eij = matrix_unit(i, j, d)
            out += np.kron(Eij, choi_heisenberg(choi, Eij.T, d).T)
    return out


def max_entangled(d: int) -> np.ndarray:
    """Projector onto ``sum_k |kk> / sqrt(d)``."""
    v = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return np.outer(v, v.conj())


def trace_norm(X) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh((X + dagger(X)) / 2))))
