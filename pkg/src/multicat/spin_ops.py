"""Spin operators and states in the full tensor space and the Dicke subspace.

Conventions
-----------
* ``|0>`` is spin up along +z, so ``sigma_z |0> = |0>``.
* Full tensor space: spin ``k`` occupies tensor slot ``k`` (big-endian), i.e.
  basis index ``b`` has spin ``k`` in state ``(b >> (M - 1 - k)) & 1``.
* Dicke subspace (total spin ``J = M/2``): index ``j`` holds ``m = J - j``,
  which is the symmetric state with ``j`` spins in ``|1>``. Index 0 is all up.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .constants import CAPS, NORMALIZED_TOL, SYMMETRIC_RESIDUAL_TOL
from .errors import CapExceededError, NotSymmetricError, RepresentationError

FULL = "full"
DICKE = "dicke"
REPRESENTATIONS = (FULL, DICKE)

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class SCSParams:
    """Bloch angles of a single-spin direction ``cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>``."""

    theta: float
    phi_azimuth: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= np.pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi_azimuth < 2 * np.pi:
            raise ValueError(f"phi_azimuth must lie in [0, 2pi), got {self.phi_azimuth}")

    @classmethod
    def from_spinor(cls, v) -> "SCSParams":
        """Bloch angles of a (nonzero) single-qubit vector, global phase dropped."""
        v = np.asarray(v, dtype=complex)
        v = v / np.linalg.norm(v)
        theta = 2 * np.arctan2(abs(v[1]), abs(v[0]))
        phase = np.angle(v[1]) - np.angle(v[0]) if abs(v[1]) > 0 and abs(v[0]) > 0 else 0.0
        return cls(float(min(theta, np.pi)), float(np.mod(phase, 2 * np.pi)) % (2 * np.pi))

    def spinor(self) -> np.ndarray:
        return np.array(
            [np.cos(self.theta / 2), np.exp(1j * self.phi_azimuth) * np.sin(self.theta / 2)]
        )


@dataclass(frozen=True)
class State:
    """Pure (possibly unnormalized) state of ``M`` qubits.

    ``vec`` has length ``2**M`` for the full representation and ``M + 1``
    for the Dicke representation.
    """

    vec: np.ndarray
    M: int
    rep: str = FULL

    def __post_init__(self):
        check_rep(self.rep)
        vec = np.asarray(self.vec, dtype=complex).reshape(-1)
        if vec.shape[0] != dimension(self.M, self.rep):
            raise RepresentationError(
                f"vector of length {vec.shape[0]} does not match M={self.M} in {self.rep} representation"
            )
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.vec, self.vec).real)

    def normalized(self) -> "State":
        return State(self.vec / np.sqrt(self.norm2), self.M, self.rep)


def check_rep(rep: str) -> None:
    if rep not in REPRESENTATIONS:
        raise RepresentationError(f"unsupported representation {rep!r}; use one of {REPRESENTATIONS}")


def check_full_cap(M: int, max_spins: int | None = None) -> None:
    cap = CAPS.full_spins if max_spins is None else max_spins
    if M > cap:
        raise CapExceededError(f"M={M} exceeds the full-tensor cap of {cap} spins")


def dimension(M: int, rep: str) -> int:
    return 2**M if rep == FULL else M + 1


def _dicke_matrices(M: int) -> dict[str, np.ndarray]:
    J = M / 2
    m = J - np.arange(M + 1)
    jz = np.diag(m).astype(complex)
    # J_+ |J, m> = sqrt(J(J+1) - m(m+1)) |J, m+1>; m+1 sits one index lower
    cp = np.sqrt(J * (J + 1) - m[1:] * (m[1:] + 1))
    jp = np.diag(cp, k=1).astype(complex)
    jm = jp.conj().T
    return {"x": (jp + jm) / 2, "y": (jp - jm) / 2j, "z": jz}


def _full_matrix(axis: str, M: int) -> np.ndarray:
    dim = 2**M
    if axis == "z":
        return np.diag(jz_diagonal(M)).astype(complex)
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(M):
        out += local_op(PAULI[axis], k, M)
    return out / 2


@lru_cache(maxsize=64)
def _collective_cached(axis: str, M: int, rep: str) -> np.ndarray:
    mat = _dicke_matrices(M)[axis] if rep == DICKE else _full_matrix(axis, M)
    mat.setflags(write=False)
    return mat


def collective_op(axis: str, M: int, rep: str = FULL, *, max_spins: int | None = None) -> np.ndarray:
    """Collective spin ``J_axis = 1/2 sum_k sigma_axis^(k)`` as a dense matrix.

    The returned array is cached and read-only.
    """
    if axis not in PAULI:
        raise ValueError(f"axis must be one of x, y, z; got {axis!r}")
    if M < 1:
        raise ValueError("M must be at least 1")
    check_rep(rep)
    if rep == FULL:
        check_full_cap(M, max_spins)
    return _collective_cached(axis, M, rep)


def jz_diagonal(M: int, rep: str = FULL) -> np.ndarray:
    """Diagonal of ``J_z`` (real), avoiding a dense matrix in the full space."""
    if rep == DICKE:
        return M / 2 - np.arange(M + 1, dtype=float)
    b = np.arange(2**M)
    ones = np.zeros(2**M, dtype=float)
    for k in range(M):
        ones += (b >> (M - 1 - k)) & 1
    return M / 2 - ones


def local_op(op: np.ndarray, k: int, M: int) -> np.ndarray:
    """Embed a single-qubit operator on spin ``k`` into the ``2**M`` space."""
    return np.kron(np.kron(np.eye(2**k), op), np.eye(2 ** (M - k - 1)))


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def product_state(spinors) -> np.ndarray:
    """Tensor product of single-qubit vectors, spin 0 leftmost."""
    out = np.ones(1, dtype=complex)
    for v in spinors:
        out = np.kron(out, np.asarray(v, dtype=complex))
    return out


def apply_local(vecs: np.ndarray, ops: np.ndarray) -> np.ndarray:
    """Apply ``ops[0] ⊗ ops[1] ⊗ ...`` to a batch of full-tensor vectors.

    ``vecs`` has shape ``(B, 2**M)``, ``ops`` has shape ``(M, 2, 2)``.
    Cost is ``O(B M 2**M)``; no ``2**M x 2**M`` matrix is formed.
    """
    B = vecs.shape[0]
    M = ops.shape[0]
    t = vecs.reshape((B,) + (2,) * M)
    for k in range(M):
        t = np.moveaxis(np.tensordot(ops[k], t, axes=([1], [k + 1])), 0, k + 1)
    return t.reshape(B, 2**M)


def scs_state(params: SCSParams, M: int, rep: str = FULL) -> State:
    """Spin coherent state ``(cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>)^{⊗M}``."""
    check_rep(rep)
    a, b = params.spinor()
    if rep == FULL:
        check_full_cap(M)
        return State(product_state([(a, b)] * M), M, FULL)
    j = np.arange(M + 1)
    binom = np.sqrt(np.array([comb(M, int(x)) for x in j], dtype=float))
    amps = binom * a ** (M - j) * b**j
    return State(amps, M, DICKE)


def ghz_state(M: int, rep: str = FULL) -> State:
    """``(|0...0> + |1...1>)/sqrt(2)``."""
    vec = np.zeros(dimension(M, rep), dtype=complex)
    vec[0] = vec[-1] = 1 / np.sqrt(2)
    return State(vec, M, rep)


def expectation(state: State, op: np.ndarray) -> complex:
    """Unnormalized ``<psi|op|psi>``; divide by ``state.norm2`` if needed."""
    op = np.asarray(op)
    if op.shape != (state.vec.size, state.vec.size):
        raise RepresentationError(f"operator shape {op.shape} does not match state dimension {state.vec.size}")
    return complex(np.vdot(state.vec, op @ state.vec))


@lru_cache(maxsize=32)
def dicke_isometry(M: int) -> np.ndarray:
    """``2**M x (M+1)`` matrix whose columns are the normalized Dicke states."""
    check_full_cap(M)
    weights = np.rint(jz_diagonal(M) * -1 + M / 2).astype(int)  # number of |1>s
    V = np.zeros((2**M, M + 1), dtype=complex)
    for j in range(M + 1):
        mask = weights == j
        V[mask, j] = 1 / np.sqrt(mask.sum())
    V.setflags(write=False)
    return V


def dicke_embed(state: State, tol: float = SYMMETRIC_RESIDUAL_TOL) -> State:
    """Express a permutation-symmetric full-tensor state in the Dicke basis."""
    if state.rep == DICKE:
        return state
    V = dicke_isometry(state.M)
    coeffs = V.conj().T @ state.vec
    residual = np.linalg.norm(state.vec - V @ coeffs)
    scale = max(np.linalg.norm(state.vec), 1.0)
    if residual > tol * scale:
        raise NotSymmetricError(f"state has weight {residual:.3e} outside the symmetric subspace")
    return State(coeffs, state.M, DICKE)


def dicke_lift(state: State) -> State:
    """Inverse of :func:`dicke_embed`."""
    if state.rep == FULL:
        return state
    return State(dicke_isometry(state.M) @ state.vec, state.M, FULL)


def is_normalized(state: State, tol: float = NORMALIZED_TOL) -> bool:
    return abs(state.norm2 - 1.0) <= tol
