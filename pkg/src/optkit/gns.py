"""GNS construction over the algebra of generalized transformations.

The faithful state's local state defines the form
``<A|B> = (F^T A^T F^-T B F)_00``. The algebra is spanned by the
``(D+1)^2`` matrix units; the form's Gram matrix over them, its radical
(the null ideal) and its range (the quotient space) are computed once in
:func:`build_gns`.

Vectorization is row-major, so left multiplication ``X -> A X`` acts on
``vec(X)`` as ``kron(A, I)``.

Note: for the maximally entangled qudit state ``F`` has the signature of
the transpose pairing on Hermitian matrices, so the Gram matrix is
indefinite. Rank uses ``|eigenvalue|`` and the minimum eigenvalue is
reported rather than enforced unless ``require_psd`` is set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from optkit import bloch, native
from optkit.errors import AsymmetricState, NotPSD, ZeroProbability
from optkit.faithful import FaithfulState, find_preparation_map, twin
from optkit.models import Model, encode_channel

TOL_RANK = 1e-10
TOL_PSD = 1e-9
NOT_PSD_LIMIT = -1e-6


def _require_symmetric(FS: FaithfulState) -> None:
    if not FS.sym:
        raise AsymmetricState("the GNS form needs a symmetric faithful state")


def gns_inner(A, B, FS: FaithfulState) -> float:
    _require_symmetric(FS)
    F = FS.F
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    return float((F.T @ A.T @ FS.F_inv.T @ B @ F)[0, 0])


def gns_inner_twin_form(A, B, FS: FaithfulState) -> float:
    """Same form evaluated as the joint probability ``(A' F B'^T)_00``."""
    _require_symmetric(FS)
    return float((twin(A, FS) @ FS.F @ twin(B, FS).T)[0, 0])


@dataclass(frozen=True, eq=False)
class GnsSpace:
    FS: FaithfulState = field(repr=False)
    gram: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    quotient_basis: np.ndarray = field(repr=False)
    null_basis: np.ndarray = field(repr=False)
    dim: int
    min_eigenvalue: float

    @property
    def n(self) -> int:
        return self.FS.size

    @property
    def psd(self) -> bool:
        return self.min_eigenvalue >= -TOL_PSD * max(1.0, float(np.max(np.abs(self.eigenvalues))))

    def vector_of(self, A) -> np.ndarray:
        """Quotient coordinates of the class of ``A``."""
        return self.quotient_basis.T @ np.asarray(A, dtype=float).reshape(-1)

    def null_component(self, A) -> np.ndarray:
        return self.null_basis.T @ np.asarray(A, dtype=float).reshape(-1)


def matrix_units(n: int) -> np.ndarray:
    return np.eye(n * n).reshape(n * n, n, n)


def gns_gram(FS: FaithfulState) -> np.ndarray:
    """Gram matrix of the form over the matrix units."""
    _require_symmetric(FS)
    f = FS.F[:, 0]
    # <X|Y> = (X f)^T F^-T (Y f); columns of V are X_k f for each unit X_k
    V = np.einsum("kab,b->ak", matrix_units(FS.size), f)
    gram = V.T @ FS.F_inv.T @ V
    return (gram + gram.T) / 2


def build_gns(FS: FaithfulState, tol_rank: float = TOL_RANK, require_psd: bool = False) -> GnsSpace:
    gram = gns_gram(FS)
    ev, U = np.linalg.eigh(gram)
    scale = np.max(np.abs(ev))
    if require_psd and ev[0] < NOT_PSD_LIMIT * max(scale, 1.0):
        raise NotPSD(f"GNS Gram matrix has eigenvalue {ev[0]:.6g}")
    keep = np.abs(ev) > tol_rank * scale
    for a in (gram, ev, U):
        a.setflags(write=False)
    return GnsSpace(
        FS=FS,
        gram=gram,
        eigenvalues=ev,
        quotient_basis=U[:, keep],
        null_basis=U[:, ~keep],
        dim=int(keep.sum()),
        min_eigenvalue=float(ev[0]),
    )


def left_multiplication(A, n: int) -> np.ndarray:
    return np.kron(np.asarray(A, dtype=float), np.eye(n))


def represent(A, G: GnsSpace) -> np.ndarray:
    """Matrix of ``{B} -> {A B}`` in quotient coordinates."""
    Q = G.quotient_basis
    return Q.T @ left_multiplication(A, G.n) @ Q


def gns_norm(A, G: GnsSpace | FaithfulState) -> float:
    FS = G.FS if isinstance(G, GnsSpace) else G
    return float(np.sqrt(max(gns_inner(A, A, FS), 0.0)))


def left_ideal_residual(G: GnsSpace, A) -> float:
    """Largest quotient component of ``A X`` over null-basis elements ``X``."""
    L = left_multiplication(A, G.n)
    if G.null_basis.shape[1] == 0:
        return 0.0
    return float(np.max(np.abs(G.quotient_basis.T @ L @ G.null_basis)))


@dataclass
class NormBoundsReport:
    samples: int
    min_slack_first: float
    min_slack_second: float
    cyclic_constant: float | None
    tol: float

    @property
    def ok(self) -> bool:
        return self.min_slack_first >= -self.tol and self.min_slack_second >= -self.tol


def check_norm_bounds(G: GnsSpace, m: Model, samples: Sequence, states: Sequence = (), tol: float = 1e-9) -> NormBoundsReport:
    """Check ``||A||_phi <= ||A'||`` and ``||A||_phi^2 <= ||A'|| ||A||``.

    When normalized ``states`` are given, also records the largest
    ``||T~_omega||_phi`` among their preparation maps.
    """
    s1 = s2 = np.inf
    for A in samples:
        nphi = gns_norm(A, G)
        ntw = bloch.trans_norm(twin(A, G.FS), m)
        s1 = min(s1, ntw - nphi)
        s2 = min(s2, ntw * bloch.trans_norm(A, m) - nphi**2)
    const = None
    for w in states:
        T, p = find_preparation_map(w, m, G.FS)
        val = gns_norm(twin(T, G.FS), G) / p
        const = val if const is None else max(const, val)
    return NormBoundsReport(
        samples=len(samples), min_slack_first=float(s1), min_slack_second=float(s2), cyclic_constant=const, tol=tol
    )


def pairing(w, A, G: GnsSpace, m: Model) -> float:
    """State evaluated on ``A`` through the scalar product, ``<A'|T~_omega>``."""
    T, _ = find_preparation_map(w, m, G.FS)
    phi_T = float((T @ G.FS.F)[0, 0])
    if phi_T <= bloch.EPS_PROB:
        raise ZeroProbability(f"preparation map has probability {phi_T:.3g}")
    return gns_inner(twin(A, G.FS), twin(T, G.FS), G.FS) / phi_T


@dataclass
class NullIdealReport:
    null_dim: int
    kernel_dim: int
    max_null_residual: float
    null_in_kernel: float
    kernel_in_null: float
    twin_of_trivial_in_null: float
    twin_of_null_row0: float
    witness: dict
    tol: float

    @property
    def ok(self) -> bool:
        return (
            self.null_dim == self.kernel_dim
            and self.max_null_residual < self.tol
            and self.null_in_kernel < self.tol
            and self.kernel_in_null < self.tol
            and self.twin_of_trivial_in_null < self.tol
            and self.twin_of_null_row0 < self.tol
        )


def _orth_kernel(M: np.ndarray, rtol: float = 1e-10) -> np.ndarray:
    _, s, Vt = np.linalg.svd(M)
    rank = int(np.sum(s > rtol * s[0])) if s.size else 0
    return Vt[rank:].T


def boundary_witness(m: Model) -> np.ndarray:
    """``X = A - B`` with ``A: rho -> <0|rho|0>|0><0|`` and ``B: rho -> <1|rho|1>|0><0|``.

    ``X`` annihilates the cyclic weight, so it lies in the null ideal, yet
    its propensity ``|0><0| - |1><1|`` is not zero.
    """
    d = m.d
    k0, k1 = native.ket(0, d), native.ket(1, d)
    A = encode_channel([np.outer(k0, k0.conj())], m)
    B = encode_channel([np.outer(k0, k1.conj())], m)
    return A - B


def generic_boundary_witness(FS: FaithfulState) -> np.ndarray:
    """Rank-one ``X = e0 v^T`` with ``v`` orthogonal to the cyclic weight but ``v_0 != 0``."""
    f = FS.cyclic_weight
    v = np.zeros_like(f)
    v[0] = 1.0
    v -= f * (f @ v) / (f @ f)
    return np.outer(np.eye(f.size)[0], v)


def null_ideal_characterization(G: GnsSpace, m: Model | None = None, tol: float = 1e-8, seed=0) -> NullIdealReport:
    """Compare the null ideal with ``{X : X f0 = 0}`` and with informational triviality.

    Both directions are checked via projections: null basis vectors must
    annihilate ``f0`` and the kernel of ``X -> X f0`` must lie in the null
    span. Twin correspondence: ``X`` informationally trivial (row 0 zero)
    puts ``twin(X)`` in the null ideal, and ``X`` null makes ``twin(X)``
    informationally trivial.
    """
    rng = np.random.default_rng(seed)
    n = G.n
    FS = G.FS
    f0 = FS.cyclic_weight
    K = np.kron(np.eye(n), f0[None, :])  # vec(X) -> X f0
    kernel = _orth_kernel(K)
    N = G.null_basis
    resid = max((np.linalg.norm(N[:, k].reshape(n, n) @ f0) for k in range(N.shape[1])), default=0.0)
    null_in_kernel = np.linalg.norm(N - kernel @ (kernel.T @ N)) if N.size else 0.0
    kernel_in_null = np.linalg.norm(kernel - N @ (N.T @ kernel)) if kernel.size else 0.0

    trivial_max = 0.0
    null_row0_max = 0.0
    for _ in range(20):
        X = rng.standard_normal((n, n))
        X[0] = 0.0
        trivial_max = max(trivial_max, np.max(np.abs(G.vector_of(twin(X, FS)))))
        Y = (N @ rng.standard_normal(N.shape[1])).reshape(n, n)
        null_row0_max = max(null_row0_max, np.max(np.abs(twin(Y, FS)[0])))

    X = boundary_witness(m) if m is not None and not m.is_classical else generic_boundary_witness(FS)
    Xt = twin(X, FS)
    witness = {
        "source": "explicit" if m is not None and not m.is_classical else "generic",
        "gns_norm": gns_norm(X, G),
        "quotient_component": float(np.max(np.abs(G.vector_of(X)))),
        "propensity_max_abs": float(np.max(np.abs(X[0]))),
        "informationally_trivial": bool(np.max(np.abs(X[0])) < tol),
        "twin_gns_norm": gns_norm(Xt, G),
        "twin_propensity_max_abs": float(np.max(np.abs(Xt[0]))),
        "twin_informationally_trivial": bool(np.max(np.abs(Xt[0])) < tol),
    }
    witness["boundary_case"] = bool(witness["quotient_component"] < tol and not witness["informationally_trivial"])
    return NullIdealReport(
        null_dim=int(N.shape[1]),
        kernel_dim=int(kernel.shape[1]),
        max_null_residual=float(resid),
        null_in_kernel=float(null_in_kernel),
        kernel_in_null=float(kernel_in_null),
        twin_of_trivial_in_null=float(trivial_max),
        twin_of_null_row0=float(null_row0_max),
        witness=witness,
        tol=tol,
    )
