"""Two-qubit Clifford group enumeration and native-gate compilation.

The 11520-element group is enumerated as local pairs times 20
entangling class representatives. Every element compiles to single
qubit layers plus 0 to 3 CZ gates; each element also carries an exact
symplectic tableau used for fast sequence inversion.
"""

import numpy as np

from paramcz import (clifford_group, clifford_invert, clifford_sample,
                     compile_to_native)

group = clifford_group()
print(f"group order: {len(group.unitaries)}")
print(f"single-qubit Cliffords: {len(group.c1)}")

counts = np.zeros(4, dtype=int)
for idx in range(len(group.unitaries)):
    counts[compile_to_native(group.element(idx)).n_cz] += 1
print(f"CZ count histogram: {counts.tolist()}")
print(f"average CZ per Clifford: {np.dot(counts, np.arange(4)) / counts.sum():.2f}")

rng = np.random.default_rng(0)
c = clifford_sample(rng)
seq = compile_to_native(c)
print(f"\nrandom element #{c.index}: {len(seq.layers)} native layers, "
      f"{seq.n_cz} CZ")
print(f"tableau: {c.tableau}")
inv = clifford_invert(c)
print(f"inverse is element #{inv.index}; product is the identity: "
      f"{c.compose(inv) == group.identity}")

label = group.conjugacy_class_sizes()
sizes = np.bincount(label)
print(f"\nconjugacy classes: {len(sizes)}, sizes {sorted(sizes.tolist())}")
