"""Quantum Fisher information of the conditional states and its outcome average."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .constants import CAPS, DEPTH_NUDGE, NORMALIZED_TOL
from .errors import CapExceededError
from .protocol import ProtocolParams, choose_rep, enumerate_states, kraus_single, sample_batch
from .spin_ops import PAULI, PLUS, State, jz_diagonal

ZZ = np.kron(PAULI["z"], PAULI["z"]).real.diagonal().copy()  # diag(1, -1, -1, 1)


@dataclass(frozen=True)
class AvgQfiCurve:
    """Average QFI and pair correlator for every cycle ``0..n``."""

    cycles: np.ndarray
    values: np.ndarray
    h_values: np.ndarray
    params: ProtocolParams

    @property
    def final(self) -> float:
        return float(self.values[-1])


def qfi_jz_batch(vecs: np.ndarray, M: int, rep: str) -> np.ndarray:
    """``4 Var(J_z)`` for each row of ``vecs`` (rows normalized)."""
    jz = jz_diagonal(M, rep)
    probs = np.abs(vecs) ** 2
    m1 = probs @ jz
    m2 = probs @ jz**2
    return 4 * (m2 - m1**2)


def jz_mean_batch(vecs: np.ndarray, M: int, rep: str) -> np.ndarray:
    """Unnormalized ``<J_z>`` for each row."""
    return (np.abs(vecs) ** 2) @ jz_diagonal(M, rep)


def pure_qfi_jz(state: State) -> float:
    """QFI of a pure state for rotations about z, ``4(<J_z^2> - <J_z>^2)``."""
    if abs(state.norm2 - 1.0) > NORMALIZED_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {state.norm2:.3e})")
    return float(qfi_jz_batch(state.vec[None, :], state.M, state.rep)[0])


def avg_qfi_mc(params: ProtocolParams, n: int, n_samples: int, seed: int, *,
               rep: str | None = None, batch: int = 4096) -> tuple[float, float]:
    """Monte Carlo estimate of the average QFI from Born-sampled trajectories.

    Returns the sample mean and its standard error ``std / sqrt(n_samples)``.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    r = choose_rep(params, rep)
    values = np.empty(n_samples)
    for start in range(0, n_samples, batch):
        size = min(batch, n_samples - start)
        _, vecs, _ = sample_batch(params, n, size, seed, r, start_index=start)
        values[start:start + size] = qfi_jz_batch(vecs, params.M, r)
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(n_samples))


def _pair_superop(t0a, t1a, t0b, t1b) -> np.ndarray:
    """Row-major vectorized ``rho -> 1/2 sum_b K_b rho K_b^†`` with ``K_b = T_b^a ⊗ T_b^b``."""
    k0 = np.kron(t0a, t0b)
    k1 = np.kron(t1a, t1b)
    return 0.5 * (np.kron(k0, k0.conj()) + np.kron(k1, k1.conj()))


def _pair_correlators(superops: np.ndarray, n: int) -> np.ndarray:
    """``Tr rho_q sigma_z ⊗ sigma_z`` for each stacked pair channel, cycles ``0..n``.

    ``superops`` has shape ``(P, 16, 16)``; returns shape ``(n + 1, P)``.
    """
    plus2 = np.kron(PLUS, PLUS)
    rho = np.tile(np.outer(plus2, plus2.conj()).reshape(16), (superops.shape[0], 1))
    diag_idx = np.arange(4) * 5  # (i, i) entries in row-major 4x4
    out = np.empty((n + 1, superops.shape[0]))
    out[0] = (rho[:, diag_idx].real @ ZZ)
    for q in range(1, n + 1):
        rho = np.einsum("pij,pj->pi", superops, rho)
        out[q] = rho[:, diag_idx].real @ ZZ
    return out


def pair_average_state(alpha_a: float, alpha_b: float, phi: float, n: int) -> np.ndarray:
    """Average two-spin reduced state after ``n`` cycles (4x4)."""
    t0a, t1a = kraus_single(alpha_a, phi)
    t0b, t1b = kraus_single(alpha_b, phi)
    s = _pair_superop(t0a, t1a, t0b, t1b)
    plus2 = np.kron(PLUS, PLUS)
    rho = np.outer(plus2, plus2.conj()).reshape(16)
    for _ in range(n):
        rho = s @ rho
    return rho.reshape(4, 4)


def avg_qfi_exact_sym(alpha: float, phi: float, M: int, n: int) -> AvgQfiCurve:
    """Exact average QFI for equal couplings, ``M + M(M-1) H_S(n)``.

    ``H_S`` comes from a single 4x4 recursion, so the cost is ``O(n)`` and
    independent of ``M``.
    """
    t0, t1 = kraus_single(alpha, phi)
    h = _pair_correlators(_pair_superop(t0, t1, t0, t1)[None], n)[:, 0]
    return AvgQfiCurve(np.arange(n + 1), M + M * (M - 1) * h, h, ProtocolParams.uniform(alpha, phi, M))


def avg_qfi_exact_nonsym(couplings, phi: float, n: int) -> AvgQfiCurve:
    """Exact average QFI for arbitrary couplings, ``M + 2 H_NS(M, n)``.

    ``H_NS`` sums the pair correlator over all unordered pairs ``k < m``;
    each pair runs its own 4x4 recursion (``O(n M^2)`` overall).
    """
    params = ProtocolParams(tuple(couplings), phi)
    M = params.M
    if M < 2:
        raise ValueError("need at least two spins")
    singles = [kraus_single(a, phi) for a in params.couplings]
    pairs = list(combinations(range(M), 2))
    superops = np.array([_pair_superop(*singles[k], *singles[m]) for k, m in pairs])
    h = _pair_correlators(superops, n).sum(axis=1)
    return AvgQfiCurve(np.arange(n + 1), M + 2 * h, h, params)


def avg_qfi_exact(params: ProtocolParams, n: int) -> AvgQfiCurve:
    """Dispatch to the symmetric or general recursion."""
    if params.symmetric:
        return avg_qfi_exact_sym(params.alpha, params.phi, params.M, n)
    return avg_qfi_exact_nonsym(params.couplings, params.phi, n)


def asymptotic_qfi(M: int, symmetric: bool) -> float:
    """Long-time average QFI: ``M(M+2)/3`` for equal couplings, else ``M``."""
    if M < 1:
        raise ValueError("M must be at least 1")
    return M * (M + 2) / 3 if symmetric else float(M)


def avg_qfi_brute(params: ProtocolParams, n: int, *, rep: str | None = None) -> float:
    """Average QFI by summing ``P(S) F_Q`` over every record (independent oracle)."""
    if n > CAPS.brute_n or params.M > CAPS.brute_spins:
        raise CapExceededError(
            f"brute force limited to n <= {CAPS.brute_n}, M <= {CAPS.brute_spins}; got n={n}, M={params.M}"
        )
    r = choose_rep(params, rep)
    vecs = enumerate_states(params, n, r)
    probs = np.einsum("ij,ij->i", vecs.conj(), vecs).real
    keep = probs > 0
    normed = vecs[keep] / np.sqrt(probs[keep])[:, None]
    return float(probs[keep] @ qfi_jz_batch(normed, params.M, r))


def entanglement_depth(fq: float, M: int) -> int:
    """Lower bound ``floor(F_Q / M)`` on the number of mutually entangled spins."""
    if fq < 0:
        raise ValueError("fq must be non-negative")
    return int(math.floor(fq / M + DEPTH_NUDGE))


def disorder_averaged_curve(mean: float, sigma: float, M: int, phi: float, n: int,
                            realizations: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Average QFI curve averaged over normally distributed coupling draws.

    Realization ``r`` draws its couplings from substream ``r`` of ``seed``, so
    runs with different ``sigma`` reuse the same standard-normal draws.

    Returns the mean curve and its standard error (both length ``n + 1``).
    """
    from .nv_model import DisorderModel, disorder_sample

    model = DisorderModel(mean, sigma)
    curves = np.array([
        avg_qfi_exact(ProtocolParams(tuple(disorder_sample(model, M, (seed, r))), phi), n).values
        for r in range(realizations)
    ])
    stderr = curves.std(axis=0, ddof=1) / np.sqrt(realizations) if realizations > 1 else np.zeros(n + 1)
    return curves.mean(axis=0), stderr
