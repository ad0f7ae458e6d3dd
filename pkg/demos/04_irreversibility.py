"""How hard is it to undo thermalization once the bath labels are lost?

Run n collisions forward, shuffle the bath qubits, then run the inverse
collisions. Averaged over all shuffles the fidelity with the input decays
roughly like 1/n, far slower than the 1/n! chance of guessing the order.
"""

import math

from qcollide.channel import CanonicalChannelParams
from qcollide.irreversibility import (
    Permutation,
    average_fidelity_asymptotic,
    average_fidelity_closed,
    average_fidelity_exact,
    average_fidelity_montecarlo,
    scramble_simulate,
)

params = CanonicalChannelParams(phi=0.5)
c = math.cos(params.phi)

pi = Permutation((2, 1, 3, 4))
res = scramble_simulate(0.0, 1.0, params, pi, 4)
print(f"swap the first two bath qubits, n = 4: f_pi = {res.f_pi.real:.6f}, F = {res.fidelity:.6f}\n")

print(" n   exact      closed     Monte Carlo (1e5)")
for n in range(2, 9):
    exact = average_fidelity_exact(0.0, 1.0, c, n).mean
    closed = average_fidelity_closed(0.0, 1.0, c, n).mean
    mc = average_fidelity_montecarlo(0.0, 1.0, params, n, 100_000, seed=2024)
    print(f"{n:2d}  {exact:.6f}  {closed:.6f}  {mc.mean:.6f} +- {mc.std_error:.1e}")

print("\n   n   closed       asymptotic   1/n!")
for n in (10, 20, 40, 80, 160):
    closed = average_fidelity_closed(0.0, 1.0, c, n).mean
    asym = average_fidelity_asymptotic(c, n).mean
    print(f"{n:4d}  {closed:.4e}  {asym:.4e}  {1 / math.factorial(n):.1e}")

# a theta != 0 collision has no closed form for f_pi; sample the statevector route
mc = average_fidelity_montecarlo(0.6, 0.8, CanonicalChannelParams(0.5, 0.4), 5, 2000, seed=1)
print(f"\ntheta = 0.4, n = 5, c0 = 0.6: F = {mc.mean:.4f} +- {mc.std_error:.1e}")
