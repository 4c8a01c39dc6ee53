"""Partial isometries and the product criterion.

A partial isometry maps its initial space isometrically onto its final space.
Products of two partial isometries need not be partial isometries; the exact
criterion is that the final projection of the right factor commutes with the
initial projection of the left factor.  This script walks through the classic
2x2 counterexample and the decomposition of power partial isometries.
"""

import numpy as np

from pisomlab import (
    hw_decompose,
    hw_product_test,
    is_power_partial_isometry,
    make_partial_isometry,
)

E = np.array([[0.5, 0.5], [0.5, 0.5]])   # projection onto span{(1,1)}
F = np.array([[1.0, 0.0], [0.0, 0.0]])   # projection onto span{e1}

print("E and F are projections, hence partial isometries.")
v = make_partial_isometry(E)
w = make_partial_isometry(F)

result = hw_product_test(v, w)
print(f"product criterion for E·F: is_pi={result.is_pi}, "
      f"commutator norm = {result.commutator:.6f} (= 1/sqrt(2))")
print("indeed E·F =", (E @ F).tolist(), "is not even hermitian.\n")

print("A truncated shift J3 (ones on the subdiagonal) is a power partial isometry:")
J3 = np.zeros((3, 3))
J3[1, 0] = J3[2, 1] = 1.0
pi = make_partial_isometry(J3)
print("  all powers are partial isometries:", is_power_partial_isometry(pi))

print("\nHide a unitary + two shifts behind a random change of basis,")
print("then recover the structure:")
rng = np.random.default_rng(0)
q, r = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))
u6 = q * (np.diag(r) / np.abs(np.diag(r)))
block = np.zeros((6, 6), dtype=complex)
block[0, 0] = np.exp(0.7j)                  # 1x1 unitary
block[2, 1] = 1.0                           # shift of length 2
block[4, 3] = block[5, 4] = 1.0             # shift of length 3
hidden = u6 @ block @ u6.conj().T

dec = hw_decompose(make_partial_isometry(hidden))
print(f"  unitary dimension: {dec.unitary_dim}")
print(f"  shift lengths:     {sorted(dec.shift_lengths)}")
print(f"  reassembly error:  {np.linalg.norm(dec.reassemble() - hidden):.2e}")
