"""Exact two-qubit Clifford group machinery.

The 11520-element group is enumerated canonically as

    U = (L_i (x) L_j) . E_e

with L running over the 24 single-qubit Cliffords and E over 20 class
representatives (identity, 9 single-CZ, 9 double-CZ, SWAP), giving the
index (i*24 + j)*20 + e.  Elements carry an exact symplectic tableau
(conjugation images of the generators X1, Z1, X2, Z2 as Pauli vectors
over GF(2) with an i^e phase exponent) plus a cached unitary.

Qubit 1 is the first tensor factor (the fixed transmon in the gate
context), qubit 2 the second.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

_I2 = np.eye(2, dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
_S = np.array([[1, 0], [0, 1j]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.diag([1.0 + 0j, -1.0])
CZ4 = np.diag([1.0 + 0j, 1.0, 1.0, -1.0])
GROUP_ORDER = 11520

# Base (phase-free) Pauli words X^x1 Z^z1 (x) X^x2 Z^z2 indexed by the
# GF(2) vector (x1, z1, x2, z2).
_V16 = [(x1, z1, x2, z2) for x1 in (0, 1) for z1 in (0, 1)
        for x2 in (0, 1) for z2 in (0, 1)]


def _base_pauli(v):
    x1, z1, x2, z2 = v
    p1 = (np.linalg.matrix_power(_X, x1) @ np.linalg.matrix_power(_Z, z1))
    p2 = (np.linalg.matrix_power(_X, x2) @ np.linalg.matrix_power(_Z, z2))
    return np.kron(p1, p2)


_BASE16 = np.array([_base_pauli(v) for v in _V16])


class CliffordError(ValueError):
    """Invalid Clifford construction or lookup."""


def _phase_key(u, decimals=9):
    """Hashable key for a unitary modulo global phase.

    Normalizes by the first entry above threshold (stable under
    perturbation, unlike an argmax over near-ties), rounds, and clears
    negative zeros.
    """
    flat = np.asarray(u, dtype=complex).ravel()
    idx = int(np.argmax(np.abs(flat) > 1e-8))
    z = flat[idx]
    norm = flat * (abs(z) / z)
    re = np.round(norm.real, decimals) + 0.0
    im = np.round(norm.imag, decimals) + 0.0
    return (re + 1j * im).tobytes()


def _closure_1q(generators):
    """Deterministic BFS closure of single-qubit unitaries modulo phase."""
    elems = [np.eye(2, dtype=complex)]
    seen = {_phase_key(elems[0])}
    frontier = [0]
    while frontier:
        nxt = []
        for i in frontier:
            for g in generators:
                u = g @ elems[i]
                k = _phase_key(u)
                if k not in seen:
                    seen.add(k)
                    nxt.append(len(elems))
                    elems.append(u)
        frontier = nxt
    return elems


# ---------------------------------------------------------------------------
# Exact Pauli algebra on (GF(2)^4 vector, phase exponent mod 4)

def pauli_multiply(v1, e1, v2, e2):
    """Product of i^e1*P(v1) and i^e2*P(v2) in the same representation."""
    x11, z11, x12, z12 = v1
    x21, z21, x22, z22 = v2
    # moving Z factors of the first word past X factors of the second
    e = (e1 + e2 + 2 * (z11 * x21 + z12 * x22)) % 4
    v = (x11 ^ x21, z11 ^ z21, x12 ^ x22, z12 ^ z22)
    return v, e


def conjugate_pauli(tableau, v, e):
    """Image of i^e*P(v) under the Clifford with the given tableau."""
    out_v, out_e = (0, 0, 0, 0), e
    for bit, (gv, ge) in zip(v, tableau):
        if bit:
            out_v, out_e = pauli_multiply(out_v, out_e, gv, ge)
    return out_v, out_e


def compose_tableaus(a, b):
    """Tableau of the product a.b (apply b first)."""
    return tuple(conjugate_pauli(a, gv, ge) for gv, ge in b)


def tableau_from_unitary(u):
    """Extract the generator-image tableau from a 4x4 Clifford unitary."""
    tab = []
    for v in ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)):
        m = u @ _base_pauli(v) @ u.conj().T
        coeffs = np.einsum("kij,ij->k", _BASE16.conj(), m) / 4.0
        k = int(np.argmax(np.abs(coeffs)))
        c = coeffs[k]
        if abs(abs(c) - 1.0) > 1e-8:
            raise CliffordError("matrix does not normalize the Pauli group")
        e = int(np.round(np.angle(c) / (np.pi / 2.0))) % 4
        tab.append((_V16[k], e))
    return tuple(tab)


def is_symplectic(tableau) -> bool:
    """Check the GF(2) symplectic condition M^T L M = L on the tableau."""
    m = np.array([t[0] for t in tableau], dtype=np.int64).T % 2
    lam = np.zeros((4, 4), dtype=np.int64)
    for q in (0, 2):
        lam[q, q + 1] = lam[q + 1, q] = 1
    return bool(np.array_equal((m.T @ lam @ m) % 2, lam))


# ---------------------------------------------------------------------------
# Group enumeration

class CliffordGroup:
    """Canonical enumeration of the two-qubit Clifford group."""

    def __init__(self):
        self.c1 = _closure_1q([_H, _S])
        if len(self.c1) != 24:
            raise CliffordError(f"single-qubit closure has {len(self.c1)} elements")
        self._c1_index = {_phase_key(u): i for i, u in enumerate(self.c1)}
        axis = _S @ _H  # cycles X -> Z -> Y
        s1 = [_I2, axis, axis @ axis]
        swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0],
                         [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
        self._e_reps = [np.eye(4, dtype=complex)]
        self._e_layers = [[]]
        hh = np.kron(_H, _H)
        for a in range(3):
            for b in range(3):
                self._e_reps.append(CZ4 @ np.kron(s1[a], s1[b]))
                self._e_layers.append([("1q", s1[a], s1[b]), ("cz",)])
        for a in range(3):
            for b in range(3):
                self._e_reps.append(CZ4 @ hh @ CZ4 @ np.kron(s1[a], s1[b]))
                self._e_layers.append([("1q", s1[a], s1[b]), ("cz",),
                                       ("1q", _H, _H), ("cz",)])
        self._e_reps.append(swap)
        self._e_layers.append([("1q", _I2, _H), ("cz",), ("1q", _H, _H),
                               ("cz",), ("1q", _H, _H), ("cz",), ("1q", _I2, _H)])
        self.unitaries = np.empty((GROUP_ORDER, 4, 4), dtype=complex)
        self._index = {}
        for i in range(24):
            for j in range(24):
                loc = np.kron(self.c1[i], self.c1[j])
                for e in range(20):
                    idx = (i * 24 + j) * 20 + e
                    u = loc @ self._e_reps[e]
                    self.unitaries[idx] = u
                    self._index[_phase_key(u)] = idx
        if len(self._index) != GROUP_ORDER:
            raise CliffordError("enumeration produced duplicate elements")
        self._tableaus = None
        self._classes = None

    # -- lookups ----------------------------------------------------------

    def element(self, index: int) -> "CliffordElement":
        if not (0 <= index < GROUP_ORDER):
            raise CliffordError(f"index {index} out of range")
        return CliffordElement(self, int(index))

    def index_of_unitary(self, u) -> int:
        key = _phase_key(u)
        if key not in self._index:
            raise CliffordError("unitary is not a two-qubit Clifford")
        return self._index[key]

    def from_unitary(self, u) -> "CliffordElement":
        return self.element(self.index_of_unitary(u))

    def c1_index(self, u2x2) -> int:
        key = _phase_key(u2x2)
        if key not in self._c1_index:
            raise CliffordError("matrix is not a single-qubit Clifford")
        return self._c1_index[key]

    @property
    def cz(self) -> "CliffordElement":
        return self.from_unitary(CZ4)

    @property
    def identity(self) -> "CliffordElement":
        return self.element(0)

    def tableau(self, index: int):
        if self._tableaus is None:
            self._tableaus = [tableau_from_unitary(self.unitaries[k])
                              for k in range(GROUP_ORDER)]
        return self._tableaus[index]

    def conjugacy_class_sizes(self):
        """Conjugacy classes as {class id: (size, member indices frozen)}.

        Computed by orbit closure under conjugation by the group generators
        (local H and S on each qubit, and CZ).
        """
        if self._classes is None:
            gens = [np.kron(_H, _I2), np.kron(_S, _I2),
                    np.kron(_I2, _H), np.kron(_I2, _S), CZ4]
            label = np.full(GROUP_ORDER, -1, dtype=np.int64)
            nclass = 0
            for start in range(GROUP_ORDER):
                if label[start] >= 0:
                    continue
                stack = [start]
                label[start] = nclass
                while stack:
                    k = stack.pop()
                    u = self.unitaries[k]
                    for g in gens:
                        m = self.index_of_unitary(g @ u @ g.conj().T)
                        if label[m] < 0:
                            label[m] = nclass
                            stack.append(m)
                nclass += 1
            self._classes = label
        return self._classes


_GROUP = None


def clifford_group() -> CliffordGroup:
    """Process-wide singleton (enumeration costs a second or two)."""
    global _GROUP
    if _GROUP is None:
        _GROUP = CliffordGroup()
    return _GROUP


@dataclass(frozen=True)
class CliffordElement:
    """One group element: canonical index, exact tableau, cached unitary."""

    group: CliffordGroup
    index: int

    @property
    def unitary(self) -> np.ndarray:
        return self.group.unitaries[self.index]

    @property
    def tableau(self):
        return self.group.tableau(self.index)

    def compose(self, other: "CliffordElement") -> "CliffordElement":
        """self . other (apply ``other`` first)."""
        idx = self.group.index_of_unitary(self.unitary @ other.unitary)
        return CliffordElement(self.group, idx)

    def inverse(self) -> "CliffordElement":
        return self.group.from_unitary(self.unitary.conj().T)

    def __eq__(self, other):
        return isinstance(other, CliffordElement) and other.index == self.index

    def __hash__(self):
        return hash(("clifford", self.index))


def clifford_sample(rng) -> CliffordElement:
    """Uniform group element from a seeded Generator (or integer seed)."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return clifford_group().element(int(rng.integers(GROUP_ORDER)))


def clifford_compose(a: CliffordElement, b: CliffordElement) -> CliffordElement:
    return a.compose(b)


def clifford_invert(a: CliffordElement) -> CliffordElement:
    return a.inverse()


# ---------------------------------------------------------------------------
# Native compilation

@dataclass(frozen=True)
class NativeSequence:
    """Time-ordered native layers: ("1q", i, j) pairs of single-qubit
    Clifford indices, and ("cz",)."""

    layers: tuple

    @property
    def n_cz(self) -> int:
        return sum(1 for layer in self.layers if layer[0] == "cz")

    def unitary(self, group: CliffordGroup | None = None) -> np.ndarray:
        group = group or clifford_group()
        u = np.eye(4, dtype=complex)
        for layer in self.layers:
            if layer[0] == "cz":
                u = CZ4 @ u
            else:
                u = np.kron(group.c1[layer[1]], group.c1[layer[2]]) @ u
        return u


def compile_to_native(c: CliffordElement) -> NativeSequence:
    """Compile to single-qubit layers and 0 to 3 CZ instances.

    The recomposed sequence equals the element's unitary up to global
    phase; the identity element compiles to the empty sequence.
    """
    g = c.group
    i, rest = divmod(c.index, 24 * 20)
    j, e = divmod(rest, 20)
    template = g._e_layers[e]
    mats = []
    for layer in template:
        if layer[0] == "cz":
            mats.append(("cz",))
        else:
            mats.append(("1q", layer[1], layer[2]))
    final = ("1q", g.c1[i], g.c1[j])
    if mats and mats[-1][0] == "1q":
        last = mats.pop()
        final = ("1q", g.c1[i] @ last[1], g.c1[j] @ last[2])
    mats.append(final)
    layers = []
    for layer in mats:
        if layer[0] == "cz":
            layers.append(("cz",))
        else:
            a, b = g.c1_index(layer[1]), g.c1_index(layer[2])
            if (a, b) == (0, 0) and (layers or len(mats) == 1):
                continue
            layers.append(("1q", a, b))
    return NativeSequence(tuple(layers))


def decompose_with_cz(c: CliffordElement) -> CliffordElement:
    """Element r with c = r . CZ (CZ applied first), for interleaving."""
    return c.compose(c.group.cz)
