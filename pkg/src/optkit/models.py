"""Concrete theories: quantum qudits, classical simplices and their composites.

A :class:`Model` stores its frame as a stack of operators ``G_0 .. G_D``
acting on a ``d``-dimensional space, with ``G_0 = I`` the normalization.
Classical models use diagonal operators, so the same trace formulas serve
both kinds. The frame coordinates of a native object ``X`` are
``Tr[G_j X]``; the dual frame ``D_l`` reconstructs it, ``X = sum_l n_l D_l``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Literal

import numpy as np

from optkit import native
from optkit.errors import (
    FrameDegenerate,
    InvalidChannel,
    InvalidEffect,
    InvalidState,
    UnsupportedComposite,
    UnsupportedModel,
)

MAX_QUANTUM_DIM = 8


@dataclass(frozen=True, eq=False)
class Model:
    kind: Literal["quantum", "classical", "composite"]
    d: int
    frame: np.ndarray = field(repr=False)
    dual: np.ndarray = field(repr=False)
    known_idim: int
    parts: tuple = ()

    @property
    def D(self) -> int:
        """Affine dimension of the state set."""
        return self.frame.shape[0] - 1

    @property
    def size(self) -> int:
        return self.frame.shape[0]

    @property
    def is_classical(self) -> bool:
        if self.kind == "composite":
            return all(p.is_classical for p in self.parts)
        return self.kind == "classical"

    @property
    def is_quantum(self) -> bool:
        if self.kind == "composite":
            return all(p.is_quantum for p in self.parts)
        return self.kind == "quantum"

    def label(self) -> str:
        if self.kind == "quantum":
            return f"quantum({self.d})"
        if self.kind == "classical":
            return f"classical({self.d})"
        return "composite(" + ", ".join(p.label() for p in self.parts) + ")"

    # --- exact oracles -------------------------------------------------

    def _spectrum(self, H: np.ndarray) -> np.ndarray:
        if self.is_classical:
            return np.sort(np.diag(H).real)
        return np.linalg.eigvalsh((H + native.dagger(H)) / 2)

    def propensity_range(self, coords) -> tuple[float, float]:
        """Min and max probability a propensity assigns over normalized states."""
        ev = self._spectrum(decode_effect(coords, self))
        return float(ev[0]), float(ev[-1])

    def weight_norm(self, coords) -> float:
        """Largest of the positive and negative parts of the represented operator."""
        ev = self._spectrum(decode_state(coords, self))
        return float(max(ev[ev > 0].sum(), -ev[ev < 0].sum()))


def gell_mann(d: int) -> list[np.ndarray]:
    """Traceless generalized Gell-Mann matrices: symmetric/antisymmetric pairs, then diagonals."""
    mats = []
    for j, k in combinations(range(d), 2):
        S = np.zeros((d, d), dtype=complex)
        S[j, k] = S[k, j] = 1.0
        A = np.zeros((d, d), dtype=complex)
        A[j, k] = -1j
        A[k, j] = 1j
        mats += [S, A]
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(np.sqrt(2 / (l * (l + 1))) * diag).astype(complex))
    return mats


def _dual_frame(frame: np.ndarray) -> np.ndarray:
    gram = np.einsum("jab,lba->jl", frame, frame).real
    s = np.linalg.svd(gram, compute_uv=False)
    if s[-1] <= 1e-12 * s[0]:
        raise FrameDegenerate(f"frame Gram matrix is singular (sigma_min/sigma_max = {s[-1] / s[0]:.3g})")
    return np.einsum("lk,kab->lab", np.linalg.inv(gram), frame)


def _build(kind, d, frame, known_idim, parts=()) -> Model:
    frame = np.asarray(frame, dtype=complex)
    frame.setflags(write=False)
    dual = _dual_frame(frame)
    dual.setflags(write=False)
    return Model(kind=kind, d=d, frame=frame, dual=dual, known_idim=known_idim, parts=tuple(parts))


def quantum_model(d: int) -> Model:
    """Qudit with the effect-valued frame ``G_j = (I + g_j/||g_j||)/2``."""
    if not 2 <= d <= MAX_QUANTUM_DIM:
        raise ValueError(f"quantum dimension must be in [2, {MAX_QUANTUM_DIM}], got {d}")
    I = np.eye(d, dtype=complex)
    frame = [I] + [(I + g / np.linalg.norm(g, 2)) / 2 for g in gell_mann(d)]
    return _build("quantum", d, frame, d)


def classical_model(n: int) -> Model:
    """Probability simplex on ``n`` outcomes: total mass plus the first ``n-1`` coordinates."""
    if n < 2:
        raise ValueError(f"classical model needs n >= 2, got {n}")
    frame = [np.eye(n)] + [np.diag(np.eye(n)[k]) for k in range(n - 1)]
    return _build("classical", n, frame, n)


def composite_model(m1: Model, m2: Model) -> Model:
    """Joint system with the product frame ``G_i (x) G_j``, index ``i*(D2+1) + j``."""
    if not ((m1.is_quantum and m2.is_quantum) or (m1.is_classical and m2.is_classical)):
        raise UnsupportedComposite(f"cannot compose {m1.label()} with {m2.label()}")
    if m1.kind == "composite" or m2.kind == "composite":
        raise UnsupportedComposite("composites are limited to two parties")
    frame = [np.kron(a, b) for a in m1.frame for b in m2.frame]
    return _build("composite", m1.d * m2.d, frame, m1.known_idim * m2.known_idim, (m1, m2))


def rotated_model(m: Model, U) -> Model:
    """Same theory, frame conjugated by a unitary (``G_j -> U G_j U^dagger``)."""
    U = np.asarray(U, dtype=complex)
    if not m.is_quantum:
        raise UnsupportedModel("frame rotation is defined for quantum models only")
    frame = [U @ G @ native.dagger(U) for G in m.frame]
    return _build(m.kind, m.d, frame, m.known_idim, m.parts)


# --- converters -----------------------------------------------------------


def _native_operator(x, m: Model) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim == 1 and m.is_classical:
        return np.diag(x).astype(complex)
    return x.astype(complex)


def frame_coords(X, m: Model) -> np.ndarray:
    """``Tr[G_j X]`` for every frame operator (complex for non-Hermitian ``X``)."""
    return np.einsum("jab,ba->j", m.frame, np.asarray(X))


def encode_state(rho, m: Model, validate: bool = False) -> np.ndarray:
    rho = _native_operator(rho, m)
    if validate:
        native.validate_state(rho)
        if m.is_classical and np.max(np.abs(rho - np.diag(np.diag(rho)))) > 1e-12:
            raise InvalidState("classical states must be diagonal")
    return frame_coords(rho, m).real


def decode_state(w, m: Model) -> np.ndarray:
    """Operator represented by a weight. Non-physical weights decode to non-PSD matrices."""
    return np.einsum("l,lab->ab", np.asarray(w, dtype=float), m.dual)


def is_physical_weight(w, m: Model, tol: float = native.PSD_TOL) -> bool:
    return m._spectrum(decode_state(w, m))[0] >= -tol


def encode_effect(E, m: Model, validate: bool = False) -> np.ndarray:
    E = _native_operator(E, m)
    if validate:
        native.validate_effect(E)
    return np.einsum("lab,ba->l", m.dual, E).real


def decode_effect(P, m: Model) -> np.ndarray:
    return np.einsum("l,lab->ab", np.asarray(P, dtype=float), m.frame)


def _apply_native(channel, X):
    kind, data = channel
    if kind == "kraus":
        return native.apply_kraus(data, X)
    return native.apply_choi(data, X)


def _as_channel(C, m: Model):
    if isinstance(C, (list, tuple)):
        return "kraus", [np.asarray(K, dtype=complex) for K in C]
    C = np.asarray(C, dtype=complex)
    if C.ndim == 3:
        return "kraus", list(C)
    if C.shape != (m.d * m.d, m.d * m.d):
        raise InvalidChannel(f"Choi matrix for {m.label()} must be {m.d**2}x{m.d**2}, got {C.shape}")
    return "choi", C


def encode_channel(C, m: Model, validate: bool = False) -> np.ndarray:
    """Transformation matrix of a Choi matrix or Kraus set.

    Entry ``(j, l)`` is ``Tr[G_j C(D_l)]``: frame functional ``j`` on the image
    of dual element ``l``.
    """
    channel = _as_channel(C, m)
    if validate:
        choi = channel[1] if channel[0] == "choi" else native.kraus_to_choi(channel[1])
        native.validate_choi(choi, m.d)
    images = np.stack([_apply_native(channel, Dl) for Dl in m.dual])
    return np.einsum("jab,lba->jl", m.frame, images).real


def decode_channel(T, m: Model) -> np.ndarray:
    """Choi matrix (column-stacking convention) of a transformation matrix."""
    T = np.asarray(T, dtype=float)
    d = m.d
    images = np.einsum("jl,jab->lab", T, m.dual)  # C(D_l)
    choi = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            Eij = native.matrix_unit(i, j, d)
            choi += np.kron(Eij, np.einsum("l,lab->ab", frame_coords(Eij, m), images))
    return choi


def max_entangled_joint(m: Model) -> np.ndarray:
    """Joint weight of ``sum_k |kk>/sqrt(d)``: entries ``Tr[G_i G_j^T]/d``."""
    if not m.is_quantum:
        raise UnsupportedModel(f"no maximally entangled state for {m.label()}")
    return np.einsum("iab,jab->ij", m.frame, m.frame).real / m.d


# --- random generators ------------------------------------------------------


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _ginibre(rng, rows, cols) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_state(m: Model, seed=None) -> np.ndarray:
    rng = _rng(seed)
    X = _ginibre(rng, m.d, m.d)
    rho = X @ native.dagger(X)
    if m.is_classical:
        rho = np.diag(np.diag(rho))
    rho = (rho + native.dagger(rho)) / 2
    return rho / np.trace(rho).real


def random_effect(m: Model, seed=None) -> np.ndarray:
    rng = _rng(seed)
    X = _ginibre(rng, m.d, m.d)
    X = X @ native.dagger(X)
    if m.is_classical:
        X = np.diag(np.diag(X))
    X = (X + native.dagger(X)) / 2
    return X / (np.linalg.eigvalsh(X).max() + rng.uniform())


def random_kraus(m: Model, seed=None, rank: int | None = None, trace_preserving: bool = True) -> list[np.ndarray]:
    """Kraus set from a random Stinespring isometry (QR of a Gaussian matrix)."""
    rng = _rng(seed)
    d = m.d
    if m.is_classical:
        P = np.abs(rng.standard_normal((d, d))) ** 2
        P /= P.sum(axis=0, keepdims=True)
        kraus = [np.sqrt(P[i, j]) * np.outer(native.ket(i, d), native.ket(j, d)) for i in range(d) for j in range(d)]
    else:
        r = d if rank is None else rank
        V, _ = np.linalg.qr(_ginibre(rng, d * r, d))
        kraus = [V[k * d:(k + 1) * d, :] for k in range(r)]
    if not trace_preserving:
        E = random_effect(m, rng)
        ev, U = np.linalg.eigh(E)
        root = U @ np.diag(np.sqrt(np.clip(ev, 0, None))) @ native.dagger(U)
        kraus = [K @ root for K in kraus]
    return kraus


def random_channel(m: Model, seed=None, rank: int | None = None, trace_preserving: bool = True) -> np.ndarray:
    return native.kraus_to_choi(random_kraus(m, seed, rank, trace_preserving))


def random_generalized(m: Model, seed=None) -> tuple[tuple[float, float], list, list]:
    """Coefficients and Kraus sets of ``a*C1 + b*C2`` with ``a, b ~ U[-1, 1]``."""
    rng = _rng(seed)
    a, b = rng.uniform(-1, 1, size=2)
    return (float(a), float(b)), random_kraus(m, rng), random_kraus(m, rng)


def random(kind: Literal["state", "channel", "effect", "generalized_trans"], m: Model, seed=None) -> np.ndarray:
    """Seeded native sample; channels and generalized maps come back as Choi matrices."""
    rng = _rng(seed)
    if kind == "state":
        return random_state(m, rng)
    if kind == "channel":
        return random_channel(m, rng)
    if kind == "effect":
        return random_effect(m, rng)
    if kind == "generalized_trans":
        (a, b), K1, K2 = random_generalized(m, rng)
        return a * native.kraus_to_choi(K1) + b * native.kraus_to_choi(K2)
    raise ValueError(f"unknown random kind {kind!r}")


def random_trans(m: Model, seed=None, generalized: bool = False) -> np.ndarray:
    """Random transformation matrix (channel, or a generalized combination)."""
    kind = "generalized_trans" if generalized else "channel"
    return encode_channel(random(kind, m, seed), m)
