"""
Averaging away a two-qubit coupling
===================================

Static plus rotating local fields turn every two-qubit Pauli term into an
oscillating one.  When the four harmonics satisfy the tuple conditions the
cycle average of all fifteen terms vanishes.
"""
import numpy as np

from cdd2q.control import (FrequencyTuple, decoupling_residual, uc_local_same_fields,
                           uc_state_protection, validate_tuple)
from cdd2q.tensor import pauli_two_qubit

labels = "IXYZ"
pairs = [(k, l) for k in range(4) for l in range(4) if (k, l) != (0, 0)]

# the smallest valid tuple
ft = FrequencyTuple(1, 2, 4, 8, tc=0.5)
print("violated conditions for (1,2,4,8):", validate_tuple(ft) or "none")
control = lambda t: uc_state_protection(t, ft)
for k, l in pairs:
    r = decoupling_residual(pauli_two_qubit(k, l), control, ft.tc)
    print(f"  {labels[k]}{labels[l]}  {r:.2e}")

# identical fields on both qubits only remove the local terms
same = lambda t: uc_local_same_fields(t, 1, 2, 0.5)
print("\nsame fields (1,2) on both qubits")
for k, l in [(1, 0), (0, 3), (1, 1), (2, 3), (3, 3)]:
    r = decoupling_residual(pauli_two_qubit(k, l), same, 0.5)
    print(f"  {labels[k]}{labels[l]}  {r:.4f}")

# a tuple that breaks the conditions leaves a remainder
bad = FrequencyTuple(1, 2, 4, 5, tc=0.5)
print("\n(1,2,4,5) violates:", "; ".join(validate_tuple(bad)))
r = decoupling_residual(pauli_two_qubit(3, 3), lambda t: uc_state_protection(t, bad, strict=False), 0.5)
print(f"  ZZ residual {r:.6f}  (compare (1 + sqrt 5) / 8 = {(1 + np.sqrt(5)) / 8:.6f})")
