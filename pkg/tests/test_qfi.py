import numpy as np
import pytest

from multicat.errors import CapExceededError
from multicat.nv_model import DisorderModel, disorder_sample
from multicat.protocol import BranchPropagator, ProtocolParams, kraus_single
from multicat.qfi import (
    asymptotic_qfi,
    avg_qfi_brute,
    avg_qfi_exact,
    avg_qfi_exact_nonsym,
    avg_qfi_exact_sym,
    avg_qfi_mc,
    entanglement_depth,
    pair_average_state,
    pure_qfi_jz,
)
from multicat.spin_ops import DICKE, FULL, SCSParams, State, collective_op, ghz_state, scs_state


@pytest.mark.parametrize("rep", [FULL, DICKE])
@pytest.mark.parametrize("M", [1, 2, 5])
def test_pure_qfi_examples(M, rep):
    assert pure_qfi_jz(scs_state(SCSParams(np.pi / 2), M, rep)) == pytest.approx(M)
    assert pure_qfi_jz(ghz_state(M, rep)) == pytest.approx(M**2)
    assert pure_qfi_jz(scs_state(SCSParams(0.0), M, rep)) == pytest.approx(0, abs=1e-14)


def test_pure_qfi_uses_variance():
    # tilted coherent state has <J_z> != 0; the mean must be subtracted
    theta = 1.0
    assert pure_qfi_jz(scs_state(SCSParams(theta), 4, DICKE)) == pytest.approx(4 * np.sin(theta) ** 2)


def test_pure_qfi_rejects_unnormalized():
    with pytest.raises(ValueError):
        pure_qfi_jz(State(np.array([1.0, 1.0]), 1, FULL))


def test_mc_without_precession():
    est, err = avg_qfi_mc(ProtocolParams.uniform(0.2, 0.0, 5), 40, 200, seed=3)
    assert est == pytest.approx(5, abs=1e-10)
    assert err < 1e-12


def test_mc_zero_cycles():
    est, err = avg_qfi_mc(ProtocolParams((0.1, 0.2, 0.05), 0.5), 0, 50, seed=0)
    assert est == pytest.approx(3, abs=1e-12) and err < 1e-12


def test_mc_matches_exact_recursion():
    p = ProtocolParams.uniform(0.05, 0.5, 4)
    est, err = avg_qfi_mc(p, 50, 10_000, seed=2024)
    exact = avg_qfi_exact_sym(0.05, 0.5, 4, 50).final
    assert abs(est - exact) < 3 * err


def test_mc_independent_of_batching():
    p = ProtocolParams((0.1, 0.2, 0.15), 0.5)
    assert avg_qfi_mc(p, 10, 300, seed=9, batch=64) == avg_qfi_mc(p, 10, 300, seed=9, batch=1000)


def test_mc_rejects_single_sample():
    with pytest.raises(ValueError):
        avg_qfi_mc(ProtocolParams.uniform(0.1, 0.1, 2), 3, 1, seed=0)


def test_exact_sym_examples():
    c = avg_qfi_exact_sym(0.05, 0.5, 10, 5000)
    assert c.h_values[0] == pytest.approx(0, abs=1e-15)
    assert c.values[0] == pytest.approx(10)
    assert abs(c.h_values[-1] - 1 / 3) < 0.02
    assert c.final == pytest.approx(40, rel=0.05)
    assert len(c.cycles) == len(c.values) == len(c.h_values) == 5001


def test_exact_nonsym_reduces_to_sym():
    a = avg_qfi_exact_nonsym([0.05] * 5, 0.5, 300)
    b = avg_qfi_exact_sym(0.05, 0.5, 5, 300)
    assert np.abs(a.values - b.values).max() < 1e-10


def test_exact_nonsym_product_start():
    assert avg_qfi_exact_nonsym([0.05, 0.06], 0.5, 0).final == pytest.approx(2)
    with pytest.raises(ValueError):
        avg_qfi_exact_nonsym([0.05], 0.5, 3)


def test_nonsym_transient_then_decay():
    alphas = disorder_sample(DisorderModel(0.05, 0.008), 4, seed=0)
    c = avg_qfi_exact_nonsym(alphas, 0.5, 60_000)
    peak = int(np.argmax(c.values))
    assert c.values[peak] > 4
    assert 0 < peak < 20_000
    assert c.values[-1] < c.values[peak] - 0.25 * (c.values[peak] - 4)


def test_nonsym_long_time_limit_for_separated_couplings():
    c = avg_qfi_exact_nonsym([0.02, 0.05, 0.08, 0.11], 0.5, 40_000)
    assert c.final == pytest.approx(asymptotic_qfi(4, symmetric=False), rel=0.05)


def test_asymptotic_examples():
    assert asymptotic_qfi(3, True) == 5
    assert asymptotic_qfi(1, True) == 1
    assert asymptotic_qfi(4, False) == 4


@pytest.mark.parametrize("couplings", [(0.1,) * 3, (0.05, 0.2, -0.1)])
def test_brute_without_precession(couplings):
    assert avg_qfi_brute(ProtocolParams(couplings, 0.0), 6) == pytest.approx(3)


def test_brute_matches_recursions():
    sym = ProtocolParams.uniform(0.05, 0.5, 3)
    assert abs(avg_qfi_brute(sym, 8) - avg_qfi_exact(sym, 8).final) < 1e-8
    assert abs(avg_qfi_brute(sym, 8, rep=FULL) - avg_qfi_exact(sym, 8).final) < 1e-8
    ns = ProtocolParams((0.05, 0.08, 0.03), 0.5)
    assert abs(avg_qfi_brute(ns, 8) - avg_qfi_exact(ns, 8).final) < 1e-8


def test_brute_caps():
    with pytest.raises(CapExceededError):
        avg_qfi_brute(ProtocolParams.uniform(0.1, 0.1, 2), 13)
    with pytest.raises(CapExceededError):
        avg_qfi_brute(ProtocolParams.uniform(0.1, 0.1, 7), 2)


def test_entanglement_depth():
    assert entanglement_depth(10, 10) == 1
    assert entanglement_depth(100, 10) == 10
    assert entanglement_depth(10 * 12 / 3, 10) == 4
    assert entanglement_depth(3.9999999999, 1) == 4
    assert entanglement_depth(3.9, 1) == 3
    with pytest.raises(ValueError):
        entanglement_depth(-1, 3)


@pytest.mark.parametrize("alpha,phi", [(0.05, 0.5), (0.2, 1.0), (0.01, 0.1), (0.7, 2.0)])
def test_h_bounds(alpha, phi):
    h = avg_qfi_exact_sym(alpha, phi, 2, 2000).h_values
    assert h.min() >= -1e-12 and h.max() <= 1 + 1e-12
    couplings = [alpha, 1.3 * alpha, 0.6 * alpha, -alpha]
    hns = avg_qfi_exact_nonsym(couplings, phi, 2000).h_values
    assert hns.max() < 4 * 3 / 2


@pytest.mark.xfail(strict=True, reason="H_S(n) oscillates: per-cycle drops up to ~2e-3 at alpha=0.05, phi=0.5")
@pytest.mark.parametrize("alpha,phi", [(0.05, 0.5), (0.01, 0.5), (0.2, 1.0)])
def test_h_sym_monotone(alpha, phi):
    h = avg_qfi_exact_sym(alpha, phi, 2, 3000).h_values
    assert np.all(np.diff(h) >= -1e-9)


@pytest.mark.parametrize("a,b,phi,n", [(0.05, 0.05, 0.5, 40), (0.1, -0.03, 1.1, 25)])
def test_pair_state_is_density_operator(a, b, phi, n):
    rho = pair_average_state(a, b, phi, n)
    assert np.abs(rho - rho.conj().T).max() < 1e-10
    assert np.trace(rho).real == pytest.approx(1, abs=1e-10)
    assert np.linalg.eigvalsh(rho).min() >= -1e-10


def test_pair_state_reproduces_h():
    rho = pair_average_state(0.05, 0.05, 0.5, 123)
    zz = np.diag([1, -1, -1, 1])
    assert np.trace(rho @ zz).real == pytest.approx(avg_qfi_exact_sym(0.05, 0.5, 2, 123).h_values[-1], abs=1e-13)


def test_symmetric_pair_channel_fixed_point():
    t0, t1 = kraus_single(0.05, 0.5)
    k0, k1 = np.kron(t0, t0), np.kron(t1, t1)
    rho = np.eye(4) / 4
    out = 0.5 * (k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T)
    assert np.abs(out - rho).max() < 1e-12


@pytest.mark.parametrize("M", [2, 5, 10, 40])
def test_dicke_channel_fixed_point(M):
    prop = BranchPropagator(ProtocolParams.uniform(0.05, 0.5, M), DICKE)
    rho = np.eye(M + 1) / (M + 1)
    assert np.abs(prop.average_channel(rho) - rho).max() < 1e-10
    jz = collective_op("z", M, DICKE)
    assert 4 * np.trace(rho @ jz @ jz).real == pytest.approx(M * (M + 2) / 3, abs=1e-10)
