"""Affine and informational dimensions, and the dimensionality audit."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from optkit import bloch, native
from optkit.errors import WitnessInvalid
from optkit.models import Model, composite_model, encode_effect, encode_state

ADM_RTOL = 1e-9
WITNESS_TOL = 1e-12


def _random_states_batch(m: Model, count: int, rng) -> np.ndarray:
    X = rng.standard_normal((count, m.d, m.d)) + 1j * rng.standard_normal((count, m.d, m.d))
    rho = X @ np.conj(np.swapaxes(X, 1, 2))
    if m.is_classical:
        rho = rho * np.eye(m.d)
    return rho / np.trace(rho, axis1=1, axis2=2).real[:, None, None]


def spanning_states(m: Model, seed=0, count: int | None = None) -> np.ndarray:
    """Encoded basis states followed by ``count`` random states (default ``2 (D+1)^2``)."""
    rng = np.random.default_rng(seed)
    count = 2 * m.size**2 if count is None else count
    frame_t = m.frame.transpose(0, 2, 1).reshape(m.size, -1)
    basis = [encode_state(native.projector(native.ket(k, m.d)), m) for k in range(m.d)]
    chunks = [np.array(basis)]
    for start in range(0, count, 4096):
        batch = _random_states_batch(m, min(4096, count - start), rng)
        chunks.append((batch.reshape(len(batch), -1) @ frame_t.T).real)
    return np.vstack(chunks)


def adm(m: Model, seed=0, rtol: float = ADM_RTOL) -> int:
    """Numerical rank of the centered matrix of encoded states."""
    W = spanning_states(m, seed)
    centered = W[1:] - W[0]
    # R of a thin QR has the singular values of the tall centered matrix
    s = np.linalg.svd(np.linalg.qr(centered, mode="r"), compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


@dataclass
class Witness:
    states: np.ndarray
    propensities: np.ndarray
    max_delta_error: float
    normalization_error: float


def _basis_witness(m: Model) -> Witness:
    kets = [native.ket(k, m.d) for k in range(m.d)]
    W = np.array([encode_state(native.projector(v), m) for v in kets])
    P = np.array([encode_effect(native.projector(v), m) for v in kets])
    return Witness(W, P, np.nan, np.nan)


def verify_witness(w: Witness, m: Model, tol: float = WITNESS_TOL) -> Witness:
    """Check ``l_n(omega_k) = delta_nk``, normalization and predictability of each ``l_n``."""
    table = w.propensities @ w.states.T
    err = np.abs(table - np.eye(len(table)))
    if err.max() > tol:
        n, k = np.unravel_index(np.argmax(err), err.shape)
        raise WitnessInvalid(f"l_{n}(omega_{k}) = {table[n, k]:.15g}", pair=(int(n), int(k)))
    norm_err = np.abs(w.propensities.sum(axis=0) - bloch.unit_propensity(m.size)).max()
    if norm_err > tol:
        raise WitnessInvalid(f"propensities sum to the unit one only within {norm_err:.3g}")
    for n, P in enumerate(w.propensities):
        lo, hi = m.propensity_range(P)
        if abs(hi - 1) > tol or abs(lo) > tol:
            raise WitnessInvalid(f"l_{n} ranges over [{lo:.15g}, {hi:.15g}], not predictable", pair=(n, n))
    return Witness(w.states, w.propensities, float(err.max()), float(norm_err))


def idim(m: Model, witness: Witness | None = None) -> tuple[int, Witness]:
    """Informational dimension from a verified perfectly discriminable set.

    Built-in models use their computational basis (vertices for classical
    models) with the matching projectors; maximality is taken from the model.
    """
    w = verify_witness(witness if witness is not None else _basis_witness(m), m)
    return len(w.states), w


def exhaustive_classical_idim(m: Model) -> int:
    """Largest perfectly discriminable subset of vertices, found by brute force.

    Each candidate subset is tested with a linear program for effects
    ``0 <= l_n <= 1`` summing to one with ``l_n(v_k) = delta_nk``.
    """
    if not m.is_classical or m.d > 4:
        raise ValueError("exhaustive search is limited to classical models with at most 4 outcomes")
    n = m.d
    for size in range(n, 0, -1):
        for subset in combinations(range(n), size):
            # variables: effect values l[s, x] for s in subset, x outcome
            nv = size * n
            A_eq, b_eq = [], []
            for x in range(n):
                row = np.zeros(nv)
                row[x::n] = 1.0
                A_eq.append(row)
                b_eq.append(1.0)
            for a, s in enumerate(subset):
                for b, t in enumerate(subset):
                    row = np.zeros(nv)
                    row[a * n + t] = 1.0
                    A_eq.append(row)
                    b_eq.append(1.0 if a == b else 0.0)
            res = linprog(np.zeros(nv), A_eq=np.array(A_eq), b_eq=b_eq, bounds=(0, 1), method="highs")
            if res.status == 0:
                return size
    return 0


@dataclass
class Check:
    name: str
    passed: bool
    left: int
    right: int
    relation: str

    @property
    def arithmetic(self) -> str:
        symbol = self.relation if self.passed else {"==": "!=", "<=": ">", ">=": "<"}[self.relation]
        return f"{self.left} {symbol} {self.right}"


@dataclass
class AuditReport:
    model: str
    adm: int
    pair_adm: int
    idim: int
    pair_idim: int
    checks: list[Check] = field(default_factory=list)
    monotone_discrimination: bool = True

    @property
    def violations(self) -> int:
        return sum(not c.passed for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


def _cmp(name, left, right, relation) -> Check:
    ok = {"==": left == right, "<=": left <= right, ">=": left >= right}[relation]
    return Check(name, bool(ok), int(left), int(right), relation)


def audit(m: Model, seed=0) -> AuditReport:
    """Audit a model against the composite-system dimension laws.

    Violations are report content; nothing is raised for a failing law.
    """
    pair = composite_model(m, m)
    a, a2 = adm(m, seed), adm(pair, seed)
    i, _ = idim(m)
    i2, _ = idim(pair)
    checks = [
        _cmp("bound_upper", a2, a * a + 2 * a, "<="),
        _cmp("bound_lower", a2, a * (a + 2), ">="),
        _cmp("pair_equality", a2, a * (a + 2), "=="),
        _cmp("quadratic_law", a, i * i - 1, "=="),
        _cmp("tensor_rule", i2, i * i, "=="),
        _cmp("discriminating_relation", a, i2 - 1, "=="),
    ]
    return AuditReport(m.label(), a, a2, i, i2, checks, monotone_discrimination=i2 >= i * i)
