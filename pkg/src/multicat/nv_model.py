"""Couplings of nuclear spins to an NV electron spin from their positions.

The NV sits at the origin with its symmetry axis along z. Couplings are
angular frequencies (rad/s); the dipolar energy carries ``hbar^2``, one of
which is divided out. Only the
perpendicular hyperfine component enters the effective ``sigma_z ⊗ sigma_n``
interaction; each nuclear frame is rotated so that ``sigma_n`` becomes
``sigma_x``, and the rotation angle is kept as metadata.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import GAMMA_13C, GAMMA_E, HBAR, MU_0

NM = 1e-9


@dataclass(frozen=True)
class SpinGeometry:
    """Nuclear positions in meters (NV at the origin) and coupling constants."""

    positions: np.ndarray
    mu0: float = MU_0
    gamma_e: float = GAMMA_E
    gamma_n: float = GAMMA_13C
    hbar: float = HBAR

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        if pos.ndim != 2 or pos.shape[1] != 3:
            raise ValueError("positions must have shape (M, 3)")
        if np.any(np.linalg.norm(pos, axis=1) == 0):
            raise ValueError("a nuclear spin sits on the NV (zero-length position)")
        if self.mu0 <= 0 or self.hbar <= 0 or self.gamma_e == 0:
            raise ValueError("mu0 and hbar must be positive and gamma_e nonzero")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def M(self) -> int:
        return self.positions.shape[0]

    @property
    def prefactor(self) -> float:
        """``3 mu0 gamma_e gamma_n hbar / 4 pi`` in SI units (rad/s m^3)."""
        return 3 * self.mu0 * self.gamma_e * self.gamma_n * self.hbar / (4 * np.pi)


@dataclass(frozen=True)
class CouplingSet:
    betas: np.ndarray
    frame_angles: np.ndarray
    alphas: np.ndarray
    tau_cycle: float


@dataclass(frozen=True)
class DisorderModel:
    """Normally distributed couplings with mean ``mean`` and spread ``sigma``."""

    mean: float
    sigma: float = 0.0
    distribution: str = field(default="normal")

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        if self.distribution != "normal":
            raise ValueError(f"unsupported distribution {self.distribution!r}")


def hyperfine_perp(r, mu0: float = MU_0, gamma_e: float = GAMMA_E, gamma_n: float = GAMMA_13C,
                   hbar: float = HBAR) -> np.ndarray:
    """Perpendicular hyperfine vector (rad/s) for a nucleus at ``r`` (meters).

    ``A_perp = -(3 mu0 ge gn hbar / 4 pi |r|^3) (z.r / |r|^2) [(x.r) x + (y.r) y]``;
    the z component is exactly zero. Pass ``hbar=1`` for energy-free units.
    """
    r = np.asarray(r, dtype=float)
    d = np.linalg.norm(r)
    if d == 0:
        raise ValueError("zero-length position")
    pref = -3 * mu0 * gamma_e * gamma_n * hbar / (4 * np.pi * d**3) * r[2] / d**2
    return np.array([pref * r[0], pref * r[1], 0.0])


def couplings_from_positions(geom: SpinGeometry, tau_cycle: float) -> CouplingSet:
    """Rates ``beta_m = (2/pi)|A_perp|``, frame angles and per-cycle ``alpha = beta tau``.

    Spins with vanishing ``A_perp`` are decoupled; they get ``alpha = 0`` and a
    warning.
    """
    A = np.array([hyperfine_perp(r, geom.mu0, geom.gamma_e, geom.gamma_n, geom.hbar) for r in geom.positions])
    mags = np.linalg.norm(A, axis=1)
    betas = 2 / np.pi * mags
    angles = np.mod(np.arctan2(A[:, 1], A[:, 0]), 2 * np.pi)
    dead = np.flatnonzero(mags == 0)
    if dead.size:
        warnings.warn(f"spins {dead.tolist()} have zero perpendicular coupling and are decoupled",
                      stacklevel=2)
        angles[dead] = 0.0
    return CouplingSet(betas, angles, betas * tau_cycle, tau_cycle)


def ring_positions(count: int, radius: float, height: float, offset: float = 0.0) -> np.ndarray:
    """``count`` positions evenly spaced on a ring of ``radius`` at height ``height``."""
    chi = offset + 2 * np.pi * np.arange(count) / count
    return np.column_stack([radius * np.cos(chi), radius * np.sin(chi), np.full(count, height)])


def disorder_sample(model: DisorderModel, M: int, seed) -> np.ndarray:
    """``M`` independent draws ``alpha_k ~ Normal(mean, sigma)``, not truncated.

    ``seed`` is anything accepted by :func:`numpy.random.default_rng`
    (an int or a tuple of ints).
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    rng = np.random.default_rng(seed)
    return model.mean + model.sigma * rng.standard_normal(M)


def init_pulse_time(beta: float) -> float:
    """Interaction time ``pi / (4 beta)`` that rotates ``|0>`` nuclei onto the equator."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return np.pi / (4 * beta)


_CONSTANT_KEYS = {"mu0", "gamma_e", "gamma_n", "hbar"}


def parse_geometry(text: str) -> SpinGeometry:
    """Parse a geometry description.

    One ``x y z`` triple per line in nanometers; optional ``name = value``
    lines override ``mu0``, ``gamma_e``, ``gamma_n`` or ``hbar`` (SI). ``#`` starts a
    comment.
    """
    positions, consts = [], {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            key, value = (p.strip() for p in line.split("=", 1))
            if key not in _CONSTANT_KEYS:
                raise ValueError(f"line {lineno}: unknown constant {key!r}")
            consts[key] = float(value)
            continue
        parts = line.replace(",", " ").split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected three coordinates, got {len(parts)}")
        positions.append([float(p) * NM for p in parts])
    if not positions:
        raise ValueError("geometry contains no positions")
    return SpinGeometry(np.array(positions), **consts)


def load_geometry(path) -> SpinGeometry:
    return parse_geometry(Path(path).read_text())
