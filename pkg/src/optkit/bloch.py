"""Bloch-matrix algebra of weights, propensities and transformations.

Everything here works on plain real numpy arrays expressed in the frame
coordinates of some model:

* a *weight* is a vector ``(n0, n1, ..., nD)``; ``n0`` is the total mass and
  equals 1 for normalized states;
* a *propensity* is a row ``(q, m1, ..., mD)`` and assigns the probability
  ``propensity @ weight``;
* a *transformation matrix* is ``(D+1, D+1)``; row 0 is its propensity,
  column 0 below it the translation ``k`` and the lower-right block the
  linear part ``M``;
* a *joint weight* is a ``(D1+1, D2+1)`` matrix of joint frame coordinates.

Generalized (non-physical) elements are accepted everywhere. Norms need a
model because they are suprema over its state set; the model is asked for
the range of a propensity over normalized states (``propensity_range``) and
for the dual norm of a weight (``weight_norm``).
"""
from __future__ import annotations

from typing import Literal, Sequence

import numpy as np

from optkit.errors import DimensionMismatch, NotCoexistent, NotPhysical, ZeroProbability

EPS_PROB = 1e-12
NORM_TOL = 1e-9


def _as_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


def _as_square(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be a square matrix, got shape {arr.shape}")
    return arr


def unit_propensity(dim: int) -> np.ndarray:
    """The propensity of the identity, ``(1, 0, ..., 0)`` for ``dim = D+1``."""
    p = np.zeros(dim)
    p[0] = 1.0
    return p


def propensity_of(T) -> np.ndarray:
    """Row 0 of a transformation matrix."""
    return _as_square(T, "transformation").copy()[0]


def blocks(T):
    """Split ``T`` into ``(q, m, k, M)`` as laid out in the block picture."""
    T = _as_square(T, "transformation")
    return T[0, 0], T[0, 1:].copy(), T[1:, 0].copy(), T[1:, 1:].copy()


def from_blocks(q, m, k, M) -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    D = M.shape[0]
    T = np.empty((D + 1, D + 1))
    T[0, 0] = q
    T[0, 1:] = m
    T[1:, 0] = k
    T[1:, 1:] = M
    return T


def probability(P, w) -> float:
    """Probability assigned by propensity ``P`` to weight ``w``."""
    P = _as_vector(P, "propensity")
    w = _as_vector(w, "weight")
    if P.shape != w.shape:
        raise DimensionMismatch(f"propensity has length {P.size}, weight has length {w.size}")
    return float(P @ w)


def apply(T, w) -> np.ndarray:
    """Unnormalized output weight; its component 0 is the probability of ``T``."""
    T = _as_square(T, "transformation")
    w = _as_vector(w, "weight")
    if T.shape[1] != w.size:
        raise DimensionMismatch(f"transformation is {T.shape}, weight has length {w.size}")
    return T @ w


def condition(T, w, eps: float = EPS_PROB) -> tuple[np.ndarray, float]:
    """State-reduction rule: returns the conditioned state and the probability."""
    out = apply(T, w)
    p = float(out[0])
    if p <= eps:
        raise ZeroProbability(f"transformation occurs with probability {p:.3g} <= {eps:g}")
    return out / p, p


def compose(outer, inner) -> np.ndarray:
    """Matrix of ``outer`` performed after ``inner``."""
    outer = _as_square(outer, "outer")
    inner = _as_square(inner, "inner")
    if outer.shape != inner.shape:
        raise DimensionMismatch(f"cannot compose {outer.shape} with {inner.shape}")
    return outer @ inner


def combine(
    kind: Literal["add", "scale", "mix"],
    T1,
    T2=None,
    lam: float | None = None,
    *,
    model=None,
    physical: bool = False,
    tol: float = NORM_TOL,
) -> np.ndarray:
    """Linear combinations of transformations.

    ``add`` is the coarse-graining ``T1 + T2``, ``scale`` is ``lam * T1`` and
    ``mix`` is ``lam * T1 + (1 - lam) * T2``. With ``physical=True`` a model is
    required and the result is checked to stay a contraction.
    """
    T1 = _as_square(T1, "T1")
    if kind != "scale":
        if T2 is None:
            raise ValueError(f"{kind!r} needs two transformations")
        T2 = _as_square(T2, "T2")
        if T1.shape != T2.shape:
            raise DimensionMismatch(f"cannot combine {T1.shape} with {T2.shape}")
    if kind in ("scale", "mix") and lam is None:
        raise ValueError(f"{kind!r} needs a coefficient")
    if physical and model is None:
        raise ValueError("physicality checks need a model")

    if kind == "add":
        out = T1 + T2
        if physical and trans_norm(out, model) > 1 + tol:
            raise NotCoexistent(f"sum has norm {trans_norm(out, model):.6g} > 1")
    elif kind == "scale":
        if physical:
            bound = trans_norm(T1, model)
            if lam < 0 or lam * bound > 1 + tol:
                raise NotPhysical(f"scale {lam} outside [0, 1/{bound:.6g}]")
        out = lam * T1
    elif kind == "mix":
        if physical and not 0 <= lam <= 1:
            raise NotPhysical(f"mixing weight {lam} outside [0, 1]")
        out = lam * T1 + (1 - lam) * T2
    else:
        raise ValueError(f"unknown combination {kind!r}")
    return out


def trans_norm(T, model) -> float:
    """Sup over normalized states of ``|probability|``; a seminorm on generalized elements."""
    lo, hi = model.propensity_range(propensity_of(T))
    return max(abs(lo), abs(hi))


def weight_norm(w, model) -> float:
    """Sup over physical propensities of ``|probability|`` on ``w``."""
    return model.weight_norm(_as_vector(w, "weight"))


def sampled_trans_norm(T, weights: Sequence) -> float:
    """Lower bound on :func:`trans_norm` from an explicit list of normalized weights.

    Useful for user-defined models with no exact oracle; the estimate only
    increases as more states are supplied.
    """
    P = propensity_of(T)
    W = np.atleast_2d(np.asarray(weights, dtype=float))
    return float(np.max(np.abs(W @ P)))


def is_coexistent(T1, T2, model, tol: float = NORM_TOL) -> bool:
    return trans_norm(np.asarray(T1) + np.asarray(T2), model) <= 1 + tol


def joint_apply(side: Literal["first", "second"], A, J) -> np.ndarray:
    """Act with ``A`` on one party of a joint weight (``A J`` or ``J A^T``)."""
    A = _as_square(A, "transformation")
    J = np.asarray(J, dtype=float)
    if J.ndim != 2:
        raise DimensionMismatch(f"joint weight must be a matrix, got shape {J.shape}")
    if side == "first":
        if A.shape[1] != J.shape[0]:
            raise DimensionMismatch(f"{A.shape} does not act on first party of {J.shape}")
        return A @ J
    if side == "second":
        if A.shape[1] != J.shape[1]:
            raise DimensionMismatch(f"{A.shape} does not act on second party of {J.shape}")
        return J @ A.T
    raise ValueError(f"side must be 'first' or 'second', got {side!r}")


def local_weight(J, party: int) -> np.ndarray:
    """Marginal weight of party 1 (column 0) or party 2 (row 0)."""
    J = np.asarray(J, dtype=float)
    if party == 1:
        return J[:, 0].copy()
    if party == 2:
        return J[0, :].copy()
    raise ValueError(f"party must be 1 or 2, got {party!r}")


def product_joint(u, v) -> np.ndarray:
    return np.outer(_as_vector(u, "u"), _as_vector(v, "v"))
