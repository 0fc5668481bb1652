"""Pinching, quantum complexity, and the projection-system lattice.

Walks through the basic operator algebra: what pinching a matrix onto a
measurement basis does, how far a matrix sits from its pinched version
(quantum complexity), and how measurement systems order into a lattice.
"""

import numpy as np

from qmdl import (
    ProjSystem,
    classify,
    computational_basis,
    consistent,
    finer,
    join,
    meet,
    q_project,
    system_from_unitary,
)

np.set_printoptions(precision=3, suppress=True)

cb = computational_basis(2)

print("== Pinching the Pauli matrices onto the computational basis ==")
paulis = {
    "Z": np.diag([1.0, -1.0]).astype(complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]]),
}
for name, t in paulis.items():
    cls = classify(t, cb)
    print(f"{name}: pinched =\n{q_project(t, cb).real}")
    print(f"   complexity nu = {cls.nu:.3f}  ->  {cls.tag}")

print()
print("== The lattice of measurement systems ==")
fine = computational_basis(4)
coarse = ProjSystem([np.diag([1.0, 1, 0, 0]), np.diag([0.0, 0, 1, 1])])
print("fine (rank-1 basis) refines coarse (two blocks):", finer(fine, coarse))
print("they commute, so join/meet exist:", consistent([fine, coarse]))
print("join has", len(join([fine, coarse]).system), "projectors (the fine system)")
print("meet has", len(meet([fine, coarse]).system), "projectors (the coarse system)")

hadamard = system_from_unitary(np.array([[1, 1], [1, -1]]) / np.sqrt(2))
print()
print("rotated basis vs computational basis commute?", consistent([cb, hadamard]))
print("(no common refinement exists for incompatible measurements)")
