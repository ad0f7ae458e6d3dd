"""Small collision angles turn the discrete map into T1/T2 relaxation.

With phi = sqrt(tau0/T1) and theta = sqrt(tau0/(2 T_pf)) the iterate at
n = t/tau0 follows exp(-t/T1) and exp(-t/T2), with 1/T2 = 1/(2 T1) + p q / T_pf.
"""

import math

from qcollide.channel import BathSpec, QubitState, closed_form_state, continuous_time

bath = BathSpec(0.7)
start = QubitState(0.2, 0.3 + 0.1j)

for tau0 in (1e-2, 1e-3, 1e-4):
    rates = continuous_time(T1=1.0, T_pf=1.0, bath=bath, tau0=tau0)
    worst = 0.0
    for t in (0.5, 1.0, 2.0):
        disc = closed_form_state(start, rates.params, bath, round(t / tau0))
        worst = max(
            worst,
            abs(disc.d / rates.d(t, start.d) - 1),
            abs(abs(disc.k) / rates.abs_k(t, abs(start.k)) - 1),
        )
    print(f"tau0 = {tau0:.0e}: worst relative deviation from exponentials {worst:.2e}")

print(f"\nT2 = {rates.T2:.6f} for T1 = T_pf = 1, p = 0.7")
print(f"zero temperature: T2 = {continuous_time(1.0, 1.0, BathSpec(1.0), 1e-4).T2:.6f} (= 2 T1)")
print(f"no dephasing:     T2 = {continuous_time(1.0, math.inf, bath, 1e-4).T2:.6f} (= 2 T1)")
