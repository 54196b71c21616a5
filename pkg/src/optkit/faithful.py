"""Faithful bipartite states, the twin involution and preparation maps."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from optkit import bloch
from optkit.errors import (
    AsymmetricState,
    NotFaithful,
    NotNormalized,
    NotSymmetric,
    PreparationFailed,
    UnsupportedModel,
)
from optkit.models import Model, decode_state, encode_channel

FAITHFUL_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class FaithfulState:
    J: np.ndarray = field(repr=False)
    F_inv: np.ndarray = field(repr=False)
    sym: bool
    cond: float

    @property
    def F(self) -> np.ndarray:
        return self.J

    @property
    def size(self) -> int:
        return self.J.shape[0]

    @property
    def cyclic_weight(self) -> np.ndarray:
        """Column 0 of ``F``: the local state of party 1."""
        return self.J[:, 0].copy()


def f_matrix(J, require_symmetric: bool = False, tol: float = FAITHFUL_TOL) -> FaithfulState:
    """Validate a joint weight as a (dynamically) faithful state.

    Raises :class:`NotFaithful` when ``F`` is numerically singular and
    :class:`NotSymmetric` when symmetry is requested but absent.
    """
    F = np.array(J, dtype=float)
    if F.ndim != 2 or F.shape[0] != F.shape[1]:
        raise NotFaithful(f"faithful state needs a square joint weight, got shape {F.shape}")
    s = np.linalg.svd(F, compute_uv=False)
    if s[-1] <= tol * s[0]:
        raise NotFaithful(f"F is singular: sigma_min/sigma_max = {s[-1] / s[0]:.3g}")
    sym = bool(np.linalg.norm(F - F.T) < tol * np.linalg.norm(F))
    if require_symmetric and not sym:
        raise NotSymmetric(f"||F - F^T||_F = {np.linalg.norm(F - F.T):.3g}")
    F.setflags(write=False)
    F_inv = np.linalg.inv(F)
    F_inv.setflags(write=False)
    return FaithfulState(J=F, F_inv=F_inv, sym=sym, cond=float(s[0] / s[-1]))


def transformed_faithful(M, FS: FaithfulState, **kwargs) -> FaithfulState:
    """Faithful state after an invertible transformation on party 1 (``F -> M F``)."""
    return f_matrix(bloch.joint_apply("first", M, FS.F), **kwargs)


def twin(A, FS: FaithfulState) -> np.ndarray:
    """``F^T A^T (F^T)^-1``, the transformation on party 2 mimicking ``A`` on party 1."""
    A = np.asarray(A, dtype=float)
    return FS.F.T @ A.T @ FS.F_inv.T


def twin_identity_residual(A, FS: FaithfulState) -> float:
    """``||A F - F twin(A)^T||_F``."""
    A = np.asarray(A, dtype=float)
    return float(np.linalg.norm(A @ FS.F - FS.F @ twin(A, FS).T))


@dataclass
class AdjointReport:
    samples: int
    additivity: float
    involution: float
    anti_homomorphism: float
    axiom4_min_ratio: float
    tol: float
    axiom4_floor: float

    @property
    def passed(self) -> dict[str, bool]:
        return {
            "additivity": self.additivity <= self.tol,
            "involution": self.involution <= self.tol,
            "anti_homomorphism": self.anti_homomorphism <= self.tol,
            "axiom4": self.axiom4_min_ratio > self.axiom4_floor,
        }

    @property
    def ok(self) -> bool:
        return all(self.passed.values())


def check_generalized_adjoint(
    FS: FaithfulState,
    samples: Sequence,
    tol: float = 1e-9,
    axiom4_floor: float = 1e-6,
    require_symmetric: bool = True,
) -> AdjointReport:
    """Check the four generalized-adjoint axioms of the twin over sample pairs.

    Deviations are relative to the Frobenius size of the operands. Axiom 4
    (``A'A = 0 => A = 0``) cannot be checked universally; it is reported as
    the smallest ``||A'A|| / ||A||^2`` over the samples.
    """
    if require_symmetric and not FS.sym:
        raise AsymmetricState("generalized-adjoint axioms need a symmetric faithful state")
    mats = [np.asarray(A, dtype=float) for A in samples]
    twins = [twin(A, FS) for A in mats]
    add = inv = prod = 0.0
    ratio = np.inf
    for A, Ap in zip(mats, twins):
        scale = max(np.linalg.norm(A), 1.0)
        inv = max(inv, np.linalg.norm(twin(Ap, FS) - A) / scale)
        nA = np.linalg.norm(A)
        if nA > 0:
            ratio = min(ratio, np.linalg.norm(Ap @ A) / nA**2)
    for i, (A, Ap) in enumerate(zip(mats, twins)):
        for B, Bp in zip(mats[i:], twins[i:]):
            scale = max(np.linalg.norm(A) + np.linalg.norm(B), 1.0)
            add = max(add, np.linalg.norm(twin(A + B, FS) - (Ap + Bp)) / scale)
            scale = max(np.linalg.norm(A) * np.linalg.norm(B), 1.0)
            prod = max(prod, np.linalg.norm(twin(A @ B, FS) - Bp @ Ap) / scale)
            prod = max(prod, np.linalg.norm(twin(B @ A, FS) - Ap @ Bp) / scale)
    return AdjointReport(
        samples=len(mats),
        additivity=float(add),
        involution=float(inv),
        anti_homomorphism=float(prod),
        axiom4_min_ratio=float(ratio),
        tol=tol,
        axiom4_floor=axiom4_floor,
    )


def preparation_choi(omega, reference=None) -> np.ndarray:
    """Choi matrix of ``rho -> Tr[omega^T rho] sigma0`` (equal to ``omega (x) sigma0``)."""
    omega = np.asarray(omega, dtype=complex)
    d = omega.shape[0]
    if reference is None:
        reference = np.zeros((d, d), dtype=complex)
        reference[0, 0] = 1.0
    return np.kron(omega, reference)


def find_preparation_map(w, m: Model, FS: FaithfulState, tol: float = 1e-10) -> tuple[np.ndarray, float]:
    """Local transformation on party 1 steering party 2 of ``FS`` into ``w``.

    Returns the transformation matrix and its probability on the faithful
    state (``1/d`` for the maximally entangled state). The steering identity
    is verified before returning.
    """
    if not m.is_quantum:
        raise UnsupportedModel(f"no faithful state is constructed for {m.label()}")
    w = np.asarray(w, dtype=float)
    if abs(w[0] - 1) > 1e-12:
        raise NotNormalized(f"weight has total mass {w[0]:.15g}")
    T = encode_channel(preparation_choi(decode_state(w, m)), m)
    steered = bloch.joint_apply("first", T, FS.F)
    p = float(steered[0, 0])
    if p <= bloch.EPS_PROB:
        raise PreparationFailed(f"preparation map has probability {p:.3g}")
    err = np.max(np.abs(bloch.local_weight(steered, 2) / p - w))
    if err > tol:
        raise PreparationFailed(f"steered state misses target by {err:.3g}")
    return T, p
