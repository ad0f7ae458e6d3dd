"""Relaxation of a qubit through repeated collisions with a thermal bath.

Every collision is the same two-qubit unitary acting on the system and a fresh
bath qubit. The population of |0> relaxes geometrically towards p and the
coherence shrinks by |lambda| cos(phi) per step.
"""

import math

import numpy as np

from qcollide.bathsim import qubit_deviations, simulate_dense
from qcollide.channel import BathSpec, CanonicalChannelParams, QubitState, iterate_channel, lambda_of

bath = BathSpec.from_beta_e(0.8)
params = CanonicalChannelParams(phi=0.35, theta=0.2)
start = QubitState(d=0.1, k=0.25 + 0.1j)

print(f"bath ground-state weight p = {bath.p:.4f}")
print(f"|lambda| cos(phi) = {abs(lambda_of(params, bath)) * math.cos(params.phi):.4f} per collision\n")

# every step is checked against the closed form while iterating
traj = iterate_channel(start, params, bath, 40)
print("  n      d        |k|    distance to xi")
for n, st in traj:
    if n % 5 == 0:
        print(f"{n:3d}  {st.d:.6f}  {abs(st.k):.6f}  {st.distance_to(bath):.2e}")

# the bath qubits remember the system: look at the whole register
report = simulate_dense(start.to_matrix(), params, bath, 6)
print("\ndistance of each qubit to xi after 6 collisions (system first):")
print(np.array2string(qubit_deviations(report, bath), precision=4))
print("bath-qubit fidelities with xi:", np.round(report.fidelities[1:], 4))
print(f"lower bound cos(phi) = {math.cos(params.phi):.4f}")
