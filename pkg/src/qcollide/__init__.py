"""Collision-model thermalization of qubits: channels, many-qubit simulation,
multipartite entanglement and permutation-induced irreversibility."""

__version__ = "0.1.0"
