"""Sequential weak-measurement cycle acting on the spin ensemble.

One cycle is precession by ``phi`` about z, a coupling to the central spin and
a y-readout of the central spin. Eliminating the central spin leaves a pair of
Kraus operators on the ensemble,

    T_s = 1/2 (B_0 + i s B_1),    B_b = ⊗_k exp(∓ i alpha_k sigma_x) exp(-i phi/2 sigma_z),

with ``s = ±1`` the readout and ``∓`` the sign ``-`` for ``b = 0``. The central
spin is never represented.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .constants import CAPS
from .errors import CapExceededError, RepresentationError
from .spin_ops import (
    DICKE,
    FULL,
    PAULI,
    PLUS,
    SCSParams,
    State,
    apply_local,
    check_full_cap,
    check_rep,
    collective_op,
    dimension,
    kron_all,
)


@dataclass(frozen=True)
class ProtocolParams:
    """Couplings ``alpha_k`` (accumulated per cycle) and precession angle ``phi``."""

    couplings: tuple
    phi: float

    def __post_init__(self):
        c = tuple(float(a) for a in np.atleast_1d(self.couplings))
        if len(c) < 1:
            raise ValueError("need at least one coupling")
        if not all(np.isfinite(c)) or not np.isfinite(self.phi):
            raise ValueError("couplings and phi must be finite")
        object.__setattr__(self, "couplings", c)
        object.__setattr__(self, "phi", float(self.phi))

    @classmethod
    def uniform(cls, alpha: float, phi: float, M: int) -> "ProtocolParams":
        return cls((alpha,) * M, phi)

    @property
    def M(self) -> int:
        return len(self.couplings)

    @property
    def symmetric(self) -> bool:
        return max(self.couplings) == min(self.couplings)

    @property
    def alpha(self) -> float:
        """Common coupling; only defined for symmetric couplings."""
        if not self.symmetric:
            raise RepresentationError("couplings are not symmetric")
        return self.couplings[0]


@dataclass(frozen=True)
class TrajectorySample:
    """Outcome of one trajectory.

    ``state`` is normalized unless ``probability`` is zero, in which case it
    is the (zero) unnormalized vector.
    """

    record: tuple
    state: State
    probability: float
    log_probability: float


@dataclass(frozen=True)
class MulticatDecomposition:
    """``|phi(S)> = sum_i w_i ⊗_k |psi_i^k>`` over ``2**n`` branch strings.

    Branch ``i`` is the binary string ``(i_1, ..., i_n)`` read with ``i_1``
    most significant. ``spinors[i, k]`` is the (phase-carrying) single-qubit
    vector of spin ``k`` in branch ``i``.
    """

    weights: np.ndarray
    spinors: np.ndarray
    M: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "M", self.spinors.shape[1])

    @cached_property
    def directions(self) -> list[list[SCSParams]]:
        return [[SCSParams.from_spinor(v) for v in branch] for branch in self.spinors]

    def reconstruct(self) -> State:
        """Full-tensor state from the branch expansion."""
        check_full_cap(self.M)
        vec = np.zeros(2**self.M, dtype=complex)
        for w, branch in zip(self.weights, self.spinors):
            prod = np.ones(1, dtype=complex)
            for v in branch:
                prod = np.kron(prod, v)
            vec += w * prod
        return State(vec, self.M, FULL)


def kraus_single(alpha_k: float, phi: float) -> tuple[np.ndarray, np.ndarray]:
    """Single-spin branch unitaries ``(T0, T1)``.

    ``T0 = exp(-i alpha sigma_x) exp(-i phi/2 sigma_z)`` and ``T1`` is the
    same with ``+i alpha``.
    """
    c, s = np.cos(alpha_k), np.sin(alpha_k)
    eye = np.eye(2, dtype=complex)
    prec = np.diag([np.exp(-0.5j * phi), np.exp(0.5j * phi)])
    t0 = (c * eye - 1j * s * PAULI["x"]) @ prec
    t1 = (c * eye + 1j * s * PAULI["x"]) @ prec
    return t0, t1


def _expm_hermitian(h: np.ndarray, scale: complex) -> np.ndarray:
    """``exp(scale * h)`` for Hermitian ``h`` via its eigendecomposition."""
    w, v = np.linalg.eigh(h)
    return (v * np.exp(scale * w)) @ v.conj().T


def choose_rep(params: ProtocolParams, rep: str | None = None) -> str:
    if rep is None:
        rep = DICKE if params.symmetric else FULL
    check_rep(rep)
    if rep == DICKE and not params.symmetric:
        raise RepresentationError("Dicke representation requires symmetric couplings")
    if rep == FULL:
        check_full_cap(params.M)
    return rep


class BranchPropagator:
    """Applies the two branch operators ``B_0``, ``B_1`` to batches of states."""

    def __init__(self, params: ProtocolParams, rep: str | None = None):
        self.params = params
        self.rep = choose_rep(params, rep)
        self.dim = dimension(params.M, self.rep)
        if self.rep == DICKE:
            M, a, phi = params.M, params.alpha, params.phi
            prec = _expm_hermitian(collective_op("z", M, DICKE), -1j * phi)
            jx = collective_op("x", M, DICKE)
            self.mats = (
                _expm_hermitian(jx, -2j * a) @ prec,
                _expm_hermitian(jx, 2j * a) @ prec,
            )
        else:
            pairs = [kraus_single(a, params.phi) for a in params.couplings]
            self.local = (np.array([p[0] for p in pairs]), np.array([p[1] for p in pairs]))

    def apply(self, b: int, vecs: np.ndarray) -> np.ndarray:
        """``B_b`` applied to the rows of ``vecs`` (shape ``(B, dim)``)."""
        if self.rep == DICKE:
            return vecs @ self.mats[b].T
        return apply_local(vecs, self.local[b])

    def step(self, vecs: np.ndarray, s) -> np.ndarray:
        """Unnormalized ``T_s`` applied row-wise; ``s`` is a scalar or per-row array."""
        s = np.asarray(s, dtype=float)
        if s.ndim:
            s = s[:, None]
        return 0.5 * (self.apply(0, vecs) + 1j * s * self.apply(1, vecs))

    def matrix(self, b: int) -> np.ndarray:
        if self.rep == DICKE:
            return self.mats[b]
        return kron_all(self.local[b])

    def average_channel(self, rho: np.ndarray) -> np.ndarray:
        """One cycle of the outcome-averaged map ``rho -> 1/2 sum_b B_b rho B_b^†``."""
        out = np.zeros_like(rho, dtype=complex)
        for b in (0, 1):
            half = self.apply(b, np.asarray(rho, dtype=complex).T).T  # B rho
            out += self.apply(b, half.conj()).conj()  # (B (B rho)^†)^† = B rho B^†
        return 0.5 * out


def step_operator(s: int, params: ProtocolParams, rep: str | None = None) -> np.ndarray:
    """Dense Kraus operator ``T_s`` (full tensor or Dicke)."""
    _check_outcome(s)
    prop = BranchPropagator(params, rep)
    return 0.5 * (prop.matrix(0) + 1j * s * prop.matrix(1))


def _check_outcome(s) -> None:
    if s not in (1, -1):
        raise ValueError(f"measurement outcome must be +1 or -1, got {s!r}")


def initial_state(M: int, rep: str) -> State:
    """``|+>^{⊗M}`` in the requested representation."""
    from .spin_ops import scs_state

    return scs_state(SCSParams(np.pi / 2, 0.0), M, rep)


def apply_cycle(state: State, s: int, params: ProtocolParams) -> State:
    """Unnormalized conditional update ``T_s |state>``."""
    _check_outcome(s)
    if state.M != params.M:
        raise RepresentationError(f"state has M={state.M} but params have M={params.M}")
    prop = BranchPropagator(params, state.rep)
    return State(prop.step(state.vec[None, :], s)[0], state.M, state.rep)


def trajectory_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent substream for trajectory ``index`` under master ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _trajectory_uniforms(seed: int, n: int, indices) -> np.ndarray:
    return np.array([trajectory_rng(seed, int(i)).random(n) for i in indices]).reshape(len(indices), n)


def sample_batch(params: ProtocolParams, n: int, n_samples: int, seed: int, rep: str | None = None,
                 start_index: int = 0):
    """Born-sample ``n_samples`` trajectories of ``n`` cycles in one vectorized pass.

    Trajectory ``start_index + j`` draws from its own substream, so results do
    not depend on batching.

    Returns
    -------
    records : ndarray of int8, shape (n_samples, n)
    states : ndarray, shape (n_samples, dim), normalized
    log_probs : ndarray, shape (n_samples,)
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    prop = BranchPropagator(params, rep)
    u = _trajectory_uniforms(seed, n, range(start_index, start_index + n_samples))
    vecs = np.repeat(initial_state(params.M, prop.rep).vec[None, :], n_samples, axis=0)
    records = np.empty((n_samples, n), dtype=np.int8)
    log_p = np.zeros(n_samples)
    for j in range(n):
        b0 = prop.apply(0, vecs)
        b1 = prop.apply(1, vecs)
        plus = 0.5 * (b0 + 1j * b1)
        minus = 0.5 * (b0 - 1j * b1)
        p_plus = np.einsum("ij,ij->i", plus.conj(), plus).real
        p_minus = np.einsum("ij,ij->i", minus.conj(), minus).real
        total = p_plus + p_minus
        p_plus, p_minus = p_plus / total, p_minus / total
        take_plus = (u[:, j] < p_plus) & (p_plus > 0)
        take_plus |= p_minus <= 0
        records[:, j] = np.where(take_plus, 1, -1)
        p = np.where(take_plus, p_plus, p_minus)
        chosen = np.where(take_plus[:, None], plus, minus)
        vecs = chosen / np.sqrt(np.einsum("ij,ij->i", chosen.conj(), chosen).real)[:, None]
        log_p += np.log(p)
    return records, vecs, log_p


def sample_trajectory(params: ProtocolParams, n: int, seed: int, index: int = 0,
                      rep: str | None = None) -> TrajectorySample:
    """One Born-sampled trajectory; deterministic in ``(seed, index)``."""
    records, vecs, log_p = sample_batch(params, n, 1, seed, rep, start_index=index)
    r = choose_rep(params, rep)
    return TrajectorySample(
        tuple(int(s) for s in records[0]),
        State(vecs[0], params.M, r),
        float(np.exp(log_p[0])),
        float(log_p[0]),
    )


def record_from_index(index: int, n: int) -> tuple:
    """Canonical record for ``index``: bit ``1`` ↦ ``-1``, first outcome most significant."""
    return tuple(-1 if (index >> (n - 1 - q)) & 1 else 1 for q in range(n))


def enumerate_states(params: ProtocolParams, n: int, rep: str | None = None, *,
                     max_cycles: int | None = None, history: bool = False):
    """Unnormalized conditional states for all ``2**n`` records, canonical order.

    With ``history=True`` returns the list of arrays after every cycle
    ``0..n``; otherwise only the final ``(2**n, dim)`` array.
    """
    cap = CAPS.enumerate_n if max_cycles is None else max_cycles
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the enumeration cap of {cap} cycles")
    if n < 0:
        raise ValueError("n must be non-negative")
    prop = BranchPropagator(params, rep)
    vecs = initial_state(params.M, prop.rep).vec[None, :]
    out = [vecs]
    for _ in range(n):
        b0 = prop.apply(0, vecs)
        b1 = prop.apply(1, vecs)
        # child order per parent: s=+1 then s=-1
        vecs = np.stack([0.5 * (b0 + 1j * b1), 0.5 * (b0 - 1j * b1)], axis=1).reshape(-1, prop.dim)
        if history:
            out.append(vecs)
    return out if history else vecs


def enumerate_trajectories(params: ProtocolParams, n: int, rep: str | None = None, *,
                           max_cycles: int | None = None) -> list[TrajectorySample]:
    """Every record of length ``n`` with its exact probability."""
    r = choose_rep(params, rep)
    vecs = enumerate_states(params, n, r, max_cycles=max_cycles)
    samples = []
    for i, v in enumerate(vecs):
        p = float(np.vdot(v, v).real)
        vec = v / np.sqrt(p) if p > 0 else v
        samples.append(TrajectorySample(record_from_index(i, n), State(vec, params.M, r), p,
                                        float(np.log(p)) if p > 0 else -np.inf))
    return samples


def branch_weights(record) -> np.ndarray:
    """``w_i(S) = 2^-n prod_q (i s_q)^{i_q}`` for all branch strings ``i``."""
    s = np.asarray(record, dtype=float)
    n = s.size
    w = np.ones(1, dtype=complex)
    for q in range(n):
        w = np.stack([w, w * 1j * s[q]], axis=1).reshape(-1)
    return w / 2**n


def multicat_decomposition(record, params: ProtocolParams, *,
                           max_cycles: int | None = None) -> MulticatDecomposition:
    """Expand the conditional state for ``record`` into ``2**n`` product branches."""
    record = tuple(int(s) for s in record)
    for s in record:
        _check_outcome(s)
    n = len(record)
    cap = CAPS.decompose_n if max_cycles is None else max_cycles
    if n > cap:
        raise CapExceededError(f"n={n} exceeds the decomposition cap of {cap} cycles")
    pairs = [kraus_single(a, params.phi) for a in params.couplings]
    t = np.array([[p[0] for p in pairs], [p[1] for p in pairs]])  # (2, M, 2, 2)
    spinors = np.broadcast_to(PLUS, (1, params.M, 2)).copy()
    for _ in range(n):
        # new = T_{i_q} applied on top of the previous product
        nxt = np.einsum("bkij,pkj->pbki", t, spinors)
        spinors = nxt.reshape(-1, params.M, 2)
    return MulticatDecomposition(branch_weights(record), spinors)


def average_state(params: ProtocolParams, n: int, rep: str | None = None) -> np.ndarray:
    """Outcome-averaged state ``sum_S |phi_n(S)><phi_n(S)|`` after ``n`` cycles."""
    prop = BranchPropagator(params, rep)
    psi = initial_state(params.M, prop.rep).vec
    rho = np.outer(psi, psi.conj())
    for _ in range(n):
        rho = prop.average_channel(rho)
    return rho
