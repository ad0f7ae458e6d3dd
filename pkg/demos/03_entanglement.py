"""Entanglement built up between the system and the bath at zero temperature.

The joint state stays in a small subspace (one excitation at most), so it is
stored sparsely. The closed form is compared with the sum over bipartitions
and with the GHZ value of the same size.
"""

import math

from qcollide.bathsim import simulate_sparse_T0
from qcollide.channel import CanonicalChannelParams
from qcollide.entanglement import (
    entanglement_bruteforce,
    entanglement_closed_form,
    entanglement_limit,
    entanglement_no_overlap_form,
    ghz_reference,
)

params = CanonicalChannelParams(phi=0.6, theta=0.3)
c = math.cos(params.phi)
c0, c1 = 0.6, 0.8j

print(" n   closed    brute     no-overlap  GHZ")
for n in range(1, 9):
    psi = simulate_sparse_T0(c0, c1, params, n).to_dense()
    brute = entanglement_bruteforce(psi).value
    closed = entanglement_closed_form(abs(c1), c, n).value
    loose = entanglement_no_overlap_form(abs(c1), c, n).value
    print(f"{n:2d}  {closed:.6f}  {brute:.6f}  {loose:.6f}    {ghz_reference(n):.6f}")

# the no-overlap column ignores <0..0|v> = c0; it is exact only for |c1| in {0, 1}
print("\nexcited input, growing n:")
for phi in (0.6, 0.2, 0.05):
    c = math.cos(phi)
    n = math.ceil(math.log(1e-12) / math.log(c * c)) + 1
    e = entanglement_closed_form(1.0, c, n).value
    print(f"phi = {phi:4.2f}: E({n}) = {e:.6f}, limit 2c/sqrt(1+c^2) = {entanglement_limit(c):.6f}")
print(f"weak-coupling limit sqrt(2) = {math.sqrt(2):.6f}")
