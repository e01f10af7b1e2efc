"""Average Fisher information for equal couplings.

Averaged over outcomes, the QFI starts at the standard quantum limit M and
settles at M(M+2)/3, i.e. Heisenberg-like scaling. Three estimators agree:
the pair recursion (any n, cheap), Monte Carlo over sampled records, and
brute-force enumeration for short runs.
"""

from multicat import ProtocolParams, asymptotic_qfi, avg_qfi_brute, avg_qfi_exact, avg_qfi_exact_sym, avg_qfi_mc

params = ProtocolParams.uniform(0.3, 0.5, 4)
for n in (2, 5, 8):
    mc, err = avg_qfi_mc(params, n, 4000, seed=1)
    print(f"n={n}: exact {avg_qfi_exact(params, n).final:.5f}  brute {avg_qfi_brute(params, n):.5f}  "
          f"MC {mc:.3f} +- {err:.3f}")

print("\nlong runs, alpha=0.05, phi=0.5, n=5000")
print(" M   F(5000)   M(M+2)/3")
for M in range(2, 11):
    curve = avg_qfi_exact_sym(0.05, 0.5, M, 5000)
    print(f"{M:2d}  {curve.final:8.4f}  {asymptotic_qfi(M, True):8.4f}")

curve = avg_qfi_exact_sym(0.05, 0.5, 6, 2000)
print("\nM=6 growth:", " ".join(f"{curve.values[k]:.2f}" for k in range(0, 2001, 250)))
