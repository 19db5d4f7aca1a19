"""Dense operator algebra over the ``2**(n+1)``-dimensional spin space.

Basis convention: basis index ``b`` has bit ``i`` (counting spin 0, the
observer, as the most significant bit) equal to 0 for |0> = alpha (m=+1/2)
and 1 for |1> = beta. Operators are plain complex ``numpy`` arrays.
"""

from __future__ import annotations

from functools import reduce

import numpy as np

from .spin_system import SpinSystem, check_label

PAULI_HALF = {
    "x": np.array([[0, 0.5], [0.5, 0]], dtype=complex),
    "y": np.array([[0, -0.5j], [0.5j, 0]], dtype=complex),
    "z": np.array([[0.5, 0], [0, -0.5]], dtype=complex),
}
LEVELS = {
    "alpha": np.diag([1.0, 0.0]).astype(complex),
    "beta": np.diag([0.0, 1.0]).astype(complex),
}
LEVELS["0"] = LEVELS["a"] = LEVELS["alpha"]
LEVELS["1"] = LEVELS["b"] = LEVELS["beta"]
# Observer raising operator I+ = Ix + iIy = |0><1|.
RAISING = np.array([[0, 1], [0, 0]], dtype=complex)


def _check_index(i: int, nspins: int):
    if not 0 <= i < nspins:
        raise IndexError(f"spin index {i} out of range for {nspins} spins")


def embed(single: np.ndarray, i: int, nspins: int) -> np.ndarray:
    """Place a 2x2 operator at slot ``i`` of an ``nspins``-fold tensor product."""
    _check_index(i, nspins)
    eye = np.eye(2, dtype=complex)
    return reduce(np.kron, [single if k == i else eye for k in range(nspins)])


def spin_operator(i: int, axis: str, nspins: int) -> np.ndarray:
    """I_{i,axis} = sigma_axis / 2 acting on spin ``i``."""
    try:
        return embed(PAULI_HALF[axis], i, nspins)
    except KeyError:
        raise ValueError(f"axis must be one of x, y, z, got {axis!r}") from None


def projector(i: int, level: str, nspins: int) -> np.ndarray:
    """Projector onto |0> (``alpha``) or |1> (``beta``) of spin ``i``."""
    try:
        return embed(LEVELS[level], i, nspins)
    except KeyError:
        raise ValueError(f"level must be alpha or beta, got {level!r}") from None


def bits(index: int, nspins: int) -> tuple[int, ...]:
    """Bit of each spin (observer first) in basis state ``index``."""
    return tuple((index >> (nspins - 1 - i)) & 1 for i in range(nspins))


def bit_table(nspins: int) -> np.ndarray:
    """``(2**nspins, nspins)`` array of spin bits for every basis state."""
    idx = np.arange(2**nspins)[:, None]
    shifts = nspins - 1 - np.arange(nspins)[None, :]
    return (idx >> shifts) & 1


def register_projector(label: str, nspins: int) -> np.ndarray:
    """E_0 (x) |label><label| on the computational spins, as a full operator."""
    diag = np.ones(2**nspins)
    table = bit_table(nspins)
    for k, b in enumerate(label, start=1):
        diag *= table[:, k] == int(b)
    return np.diag(diag).astype(complex)


def thermal_equilibrium(system: SpinSystem) -> np.ndarray:
    """High-temperature deviation density matrix, weights gamma_rel (observer = 1)."""
    n = system.nspins
    w = system.gammas / system.gammas[0]
    signs = 0.5 - bit_table(n)
    return np.diag(signs @ w).astype(complex)


def lpps_state(system: SpinSystem, label: str) -> np.ndarray:
    """Labeled pseudo-pure state I_0z * prod_i I_i^{label_i}."""
    check_label(system, label)
    n = system.nspins
    return spin_operator(0, "z", n) @ register_projector(label, n)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def conjugate(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """u rho u^dagger."""
    return u @ rho @ u.conj().T
