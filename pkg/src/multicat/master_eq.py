"""Continuous-time limit of the outcome-averaged protocol.

For small ``alpha`` and ``phi`` one cycle of the averaged map is close to
``exp(dt L)`` with

    L rho = -i [phi_dot J_z, rho] + gamma D[J_x] rho + sum_k Gamma_k D[sigma_x^(k)] rho,

``phi_dot = phi / dt``, ``gamma = 4 alpha^2 / dt`` and ``Gamma_k = 4 <delta_k^2> / dt``
for couplings ``alpha_k = alpha + delta_k``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .constants import CAPS, POSITIVITY_ABORT, TRACE_TOL
from .errors import CapExceededError, PositivityError, RepresentationError
from .protocol import ProtocolParams, average_state, initial_state
from .spin_ops import DICKE, FULL, State, check_rep, collective_op, dimension, jz_diagonal


@dataclass(frozen=True)
class DensityOperator:
    matrix: np.ndarray
    M: int
    rep: str = DICKE

    def __post_init__(self):
        check_rep(self.rep)
        mat = np.asarray(self.matrix, dtype=complex)
        d = dimension(self.M, self.rep)
        if mat.shape != (d, d):
            raise RepresentationError(f"matrix shape {mat.shape} does not match M={self.M} ({self.rep})")
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def pure(cls, state: State) -> "DensityOperator":
        v = state.vec / np.sqrt(state.norm2)
        return cls(np.outer(v, v.conj()), state.M, state.rep)

    @classmethod
    def maximally_mixed(cls, M: int, rep: str = DICKE) -> "DensityOperator":
        d = dimension(M, rep)
        return cls(np.eye(d) / d, M, rep)

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def purity(self) -> float:
        return float(np.vdot(self.matrix, self.matrix).real)


@dataclass(frozen=True)
class LindbladParams:
    """Rates of the averaged master equation.

    ``collective`` selects the jump operator of the collective term. The
    default ``"x"`` follows the small-angle expansion of the cycle; ``"z"``
    swaps in ``J_z`` for comparison with that alternative form.
    """

    phi_dot: float
    gamma: float
    gammas_site: tuple = ()
    dt: float = 1.0
    collective: str = "x"

    def __post_init__(self):
        object.__setattr__(self, "gammas_site", tuple(float(g) for g in self.gammas_site))
        if self.gamma < 0 or any(g < 0 for g in self.gammas_site):
            raise ValueError("rates must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.collective not in ("x", "z"):
            raise ValueError("collective must be 'x' or 'z'")

    @classmethod
    def from_protocol(cls, alpha: float, phi: float, dt: float, site_variances=(), collective: str = "x"):
        """Rates for mean coupling ``alpha`` and per-site disorder variances ``<delta_k^2>``."""
        return cls(phi / dt, 4 * alpha**2 / dt, tuple(4 * v / dt for v in site_variances), dt, collective)

    def default_step(self) -> float:
        rates = [abs(self.phi_dot), self.gamma, *self.gammas_site]
        rates = [r for r in rates if r > 0]
        return min(1 / r for r in rates) / 100 if rates else math.inf


def _dissipator(L: np.ndarray, rho: np.ndarray) -> np.ndarray:
    LdL = L.conj().T @ L
    return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)


def lindblad_rhs_sym(rho: DensityOperator, params: LindbladParams) -> np.ndarray:
    """``-i[phi_dot J_z, rho] + gamma D[J_x] rho`` in the Dicke basis."""
    if rho.rep != DICKE:
        raise RepresentationError("symmetric master equation acts in the Dicke representation")
    M, r = rho.M, rho.matrix
    jz = jz_diagonal(M, DICKE)
    jx = collective_op("x", M, DICKE)
    out = -1j * params.phi_dot * (jz[:, None] - jz[None, :]) * r
    if params.gamma:
        out = out + params.gamma * _dissipator(jx, r)
    return out


@lru_cache(maxsize=16)
def _flip_perms(M: int) -> np.ndarray:
    b = np.arange(2**M)
    return np.array([b ^ (1 << (M - 1 - k)) for k in range(M)])


def _jx_left(r: np.ndarray, perms: np.ndarray) -> np.ndarray:
    return 0.5 * sum(r[p, :] for p in perms)


def _jx_right(r: np.ndarray, perms: np.ndarray) -> np.ndarray:
    return 0.5 * sum(r[:, p] for p in perms)


def lindblad_rhs_nonsym(rho: DensityOperator, params: LindbladParams, *, max_spins: int | None = None) -> np.ndarray:
    """Full-space generator with collective and per-site dephasing terms.

    ``sigma_x^(k)`` acts as a bit flip, so every term is an index permutation
    and the cost is ``O(M 4^M)`` rather than a dense matrix product.
    """
    if rho.rep != FULL:
        raise RepresentationError("general master equation acts in the full tensor representation")
    M, r = rho.M, rho.matrix
    cap = CAPS.lindblad_full_spins if max_spins is None else max_spins
    if M > cap:
        raise CapExceededError(f"M={M} exceeds the full-space master equation cap of {cap}")
    if params.gammas_site and len(params.gammas_site) != M:
        raise ValueError(f"expected {M} site rates, got {len(params.gammas_site)}")
    jz = jz_diagonal(M, FULL)
    diff = jz[:, None] - jz[None, :]
    out = -1j * params.phi_dot * diff * r
    perms = _flip_perms(M)
    if params.gamma:
        if params.collective == "x":
            xr = _jx_left(r, perms)
            xxr = _jx_left(xr, perms)
            out = out + params.gamma * (_jx_right(xr, perms) - 0.5 * (xxr + _jx_right(_jx_right(r, perms), perms)))
        else:
            out = out - 0.5 * params.gamma * diff**2 * r
    for k, g in enumerate(params.gammas_site):
        if g:
            p = perms[k]
            out = out + g * (r[np.ix_(p, p)] - r)
    return out


def lindblad_rhs(rho: DensityOperator, params: LindbladParams) -> np.ndarray:
    if rho.rep == DICKE:
        if params.gammas_site and any(params.gammas_site):
            raise RepresentationError("site-local dissipation breaks permutation symmetry; use the full representation")
        return lindblad_rhs_sym(rho, params)
    return lindblad_rhs_nonsym(rho, params)


def integrate(rho0: DensityOperator, params: LindbladParams, t_final: float, steps: int | None = None,
              *, record_every: int = 1, check_every: int = 1):
    """Fixed-step RK4 propagation from ``rho0`` to ``t_final``.

    The state is re-symmetrized after each step. Positivity is checked every
    ``check_every`` steps; an eigenvalue below the abort threshold raises
    :class:`PositivityError`.

    Returns a list of ``(t, DensityOperator)`` for step ``0`` and every
    ``record_every``-th step (the final step is always included).
    """
    if steps is None:
        h0 = params.default_step()
        steps = max(1, math.ceil(t_final / h0)) if math.isfinite(h0) else 1
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if abs(rho0.trace - 1) > TRACE_TOL:
        raise ValueError("initial state must have unit trace")
    M, rep = rho0.M, rho0.rep
    h = t_final / steps

    def f(m):
        return lindblad_rhs(DensityOperator(m, M, rep), params)

    r = rho0.matrix.copy()
    out = [(0.0, DensityOperator(r.copy(), M, rep))]
    for i in range(1, steps + 1):
        k1 = f(r)
        k2 = f(r + 0.5 * h * k1)
        k3 = f(r + 0.5 * h * k2)
        k4 = f(r + h * k3)
        r = r + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        r = 0.5 * (r + r.conj().T)
        if i % check_every == 0 or i == steps:
            lam = np.linalg.eigvalsh(r)[0]
            if lam < POSITIVITY_ABORT:
                raise PositivityError(
                    f"eigenvalue {lam:.3e} at t={i * h:.6g}; step size h={h:.3e} is too large, "
                    f"try more than {steps} steps"
                )
        if i % record_every == 0 or i == steps:
            out.append((i * h, DensityOperator(r.copy(), M, rep)))
    return out


def qfi_proxy(rho: DensityOperator) -> float:
    """``4 Tr(rho J_z^2)``.

    Equals the trajectory-averaged QFI only because every conditional state
    has ``<J_z> = 0``; it is not the QFI of ``rho`` itself.
    """
    jz = jz_diagonal(rho.M, rho.rep)
    return float(4 * (np.diagonal(rho.matrix).real @ jz**2))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    d = np.asarray(a) - np.asarray(b)
    return float(0.5 * np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T))).sum())


def discrete_continuum_check(alpha: float, phi: float, M: int, n: int, dt: float = 1.0,
                             steps: int | None = None) -> float:
    """Trace distance between ``n`` averaged cycles and the master equation at ``t = n dt``.

    Symmetric couplings, Dicke representation. Meaningful only for
    ``alpha, phi <= 0.1``; outside that regime a warning is issued.
    """
    if alpha > 0.1 or phi > 0.1:
        warnings.warn("discrete/continuum comparison is only meaningful for alpha, phi <= 0.1", stacklevel=2)
    if n == 0:
        return 0.0
    params = ProtocolParams.uniform(alpha, phi, M)
    discrete = average_state(params, n, DICKE)
    lp = LindbladParams.from_protocol(alpha, phi, dt)
    rho0 = DensityOperator.pure(initial_state(M, DICKE))
    if steps is None:
        steps = max(20 * n, math.ceil(n * dt / lp.default_step()))
    final = integrate(rho0, lp, n * dt, steps, record_every=steps)[-1][1]
    return trace_distance(discrete, final.matrix)


class Timescales(NamedTuple):
    n_s: float
    n_l: float
    t_s: float
    t_l: float


def timescales(alpha: float, sigma: float, dt: float = 1.0) -> Timescales:
    """Onset ``n_s ~ 1/alpha^2`` of Heisenberg scaling and its loss ``n_l ~ 1/sigma^2``.

    Order-of-magnitude estimates; ``t = n dt``. ``sigma = 0`` gives ``n_l = inf``.
    """
    if alpha <= 0 or sigma < 0 or dt <= 0:
        raise ValueError("alpha and dt must be positive and sigma non-negative")
    n_s = 1 / alpha**2
    n_l = math.inf if sigma == 0 else 1 / sigma**2
    return Timescales(n_s, n_l, n_s * dt, n_l * dt)


def lindblad_qfi_curve(mean: float, sigma: float, M: int, phi: float, n: int, dt: float = 1.0,
                       steps: int | None = None, collective: str = "x", record_every: int = 1):
    """``qfi_proxy`` along the master-equation solution for disorder ``sigma``.

    Uses the Dicke space when ``sigma == 0``, else the full space with
    ``Gamma_k = 4 sigma^2 / dt`` on every site.

    Returns times (in cycles) and proxy values.
    """
    if sigma == 0 and collective == "x":
        lp = LindbladParams.from_protocol(mean, phi, dt)
        rep = DICKE
    else:
        lp = LindbladParams.from_protocol(mean, phi, dt, [sigma**2] * M, collective)
        rep = FULL
    rho0 = DensityOperator.pure(initial_state(M, rep))
    traj = integrate(rho0, lp, n * dt, steps, record_every=record_every)
    t = np.array([p[0] for p in traj]) / dt
    return t, np.array([qfi_proxy(p[1]) for p in traj])
