"""(Sub-)stochastic matrices as arrows n -> m between bit-vector spaces.

A matrix of type n -> m is a 2^m x 2^n array with entries in [0, 1]; rows
and columns are ordered by descending binary value of the corresponding
bit vector (all-ones first).  Sequential composition is matrix product,
parallel composition is the Kronecker product, and a small family of
constant arrows (identity, wire swap, duplicator, terminator, point
masses, diagonal gates) generates all the wiring this package needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidArity, InvalidMatrix, SizeOverflow, TypeMismatch

MAX_PORTS = 20
CLASS_TOL = 1e-9


class MatrixClass(Enum):
    STOCHASTIC = "Stochastic"
    SUB_STOCHASTIC = "SubStochastic"
    NEITHER = "Neither"


@dataclass(frozen=True)
class StochMatrix:
    """An n -> m arrow: 2^m rows, 2^n columns, descending binary order."""

    in_ports: int
    out_ports: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        if self.in_ports < 0 or self.out_ports < 0:
            raise InvalidArity("port counts must be nonnegative")
        if self.in_ports > MAX_PORTS or self.out_ports > MAX_PORTS:
            raise SizeOverflow(
                f"matrix of type {self.in_ports}->{self.out_ports} exceeds the "
                f"{MAX_PORTS}-port cap"
            )
        arr = np.asarray(self.entries, dtype=float)
        expected = (1 << self.out_ports, 1 << self.in_ports)
        if arr.shape != expected:
            raise InvalidMatrix(f"expected shape {expected}, got {arr.shape}")
        if np.any(arr < -1e-9) or np.any(arr > 1.0 + 1e-9):
            raise InvalidMatrix("entries must lie in [0, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    def classify(self, tol: float = CLASS_TOL) -> MatrixClass:
        sums = self.entries.sum(axis=0)
        if np.all(np.abs(sums - 1.0) <= tol):
            return MatrixClass.STOCHASTIC
        if np.all(sums <= 1.0 + tol):
            return MatrixClass.SUB_STOCHASTIC
        return MatrixClass.NEITHER

    def is_stochastic(self, tol: float = CLASS_TOL) -> bool:
        return self.classify(tol) is MatrixClass.STOCHASTIC

    def entry(self, out_bits: Sequence[int], in_bits: Sequence[int]) -> float:
        return float(self.entries[bits_index(out_bits), bits_index(in_bits)])

    def then(self, other: "StochMatrix") -> "StochMatrix":
        return compose(self, other)

    def __matmul__(self, other: "StochMatrix") -> "StochMatrix":
        return tensor(self, other)

    def allclose(self, other: "StochMatrix", tol: float = 1e-12) -> bool:
        return (
            self.in_ports == other.in_ports
            and self.out_ports == other.out_ports
            and bool(np.max(np.abs(self.entries - other.entries), initial=0.0) <= tol)
        )


def bits_index(bits: Sequence[int]) -> int:
    """Descending-binary row/column index of a bit vector."""
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return (1 << len(bits)) - 1 - value


def classify(m: StochMatrix, tol: float = CLASS_TOL) -> MatrixClass:
    return m.classify(tol)


def compose(p: StochMatrix, q: StochMatrix) -> StochMatrix:
    """Sequential composition p;q (apply p first)."""
    if p.out_ports != q.in_ports:
        raise TypeMismatch(
            f"cannot compose {p.in_ports}->{p.out_ports} with {q.in_ports}->{q.out_ports}"
        )
    return StochMatrix(p.in_ports, q.out_ports, q.entries @ p.entries)


def tensor(p: StochMatrix, q: StochMatrix) -> StochMatrix:
    """Parallel composition: Kronecker product.

    Because the descending-binary index of a concatenated bit vector is
    built positionally just like the ascending one, np.kron applies
    directly.
    """
    n = p.in_ports + q.in_ports
    m = p.out_ports + q.out_ports
    if n > MAX_PORTS or m > MAX_PORTS:
        raise SizeOverflow(f"tensor of type {n}->{m} exceeds the {MAX_PORTS}-port cap")
    return StochMatrix(n, m, np.kron(p.entries, q.entries))


def tensor_all(mats: Iterable[StochMatrix]) -> StochMatrix:
    out = identity(0)
    for m in mats:
        out = tensor(out, m)
    return out


# -- constant arrows ----------------------------------------------------

@lru_cache(maxsize=None)
def identity(n: int) -> StochMatrix:
    if n < 0:
        raise InvalidArity("identity arity must be >= 0")
    if n == 0:
        return StochMatrix(0, 0, np.ones((1, 1)))
    if n == 1:
        return StochMatrix(1, 1, np.eye(2))
    return tensor(identity(n - 1), identity(1))


@lru_cache(maxsize=None)
def duplicator(n: int = 1) -> StochMatrix:
    """Share n wires: the arrow 1 -> 2 with both outputs equal to the
    input, extended to blocks recursively."""
    if n < 0:
        raise InvalidArity("duplicator arity must be >= 0")
    if n == 0:
        return identity(0)
    if n == 1:
        return StochMatrix(1, 2, np.array([[1, 0], [0, 0], [0, 0], [0, 1]], dtype=float))
    prev = duplicator(n - 1)
    step = tensor(prev, duplicator(1))
    shuffle = tensor_all([identity(n - 1), block_swap(n - 1, 1), identity(1)])
    return compose(step, shuffle)


@lru_cache(maxsize=None)
def terminator(n: int = 1) -> StochMatrix:
    """Discard n wires (marginalize them out)."""
    if n < 0:
        raise InvalidArity("terminator arity must be >= 0")
    if n == 0:
        return identity(0)
    if n == 1:
        return StochMatrix(1, 0, np.ones((1, 2)))
    return tensor(terminator(n - 1), terminator(1))


@lru_cache(maxsize=None)
def block_swap(n: int, m: int) -> StochMatrix:
    """Move a block of n wires past a block of m wires: n+m -> m+n."""
    if n < 0 or m < 0:
        raise InvalidArity("swap arities must be >= 0")
    if n == 0 or m == 0:
        return identity(n + m)
    if n == 1 and m == 1:
        e = np.zeros((4, 4))
        for x1 in (0, 1):
            for x2 in (0, 1):
                e[bits_index((x2, x1)), bits_index((x1, x2))] = 1.0
        return StochMatrix(2, 2, e)
    if m == 1:
        # sigma_{n,1} = (id (x) sigma_{n-1,1}) ; (sigma_{1,1} (x) id_{n-1})
        first = tensor(identity(1), block_swap(n - 1, 1))
        second = tensor(block_swap(1, 1), identity(n - 1))
        return compose(first, second)
    # sigma_{n,m} = (sigma_{n,m-1} (x) id) ; (id_{m-1} (x) sigma_{n,1})
    first = tensor(block_swap(n, m - 1), identity(1))
    second = tensor(identity(m - 1), block_swap(n, 1))
    return compose(first, second)


def point(b: int) -> StochMatrix:
    """Point mass 0 -> 1 on bit value b."""
    if b not in (0, 1):
        raise InvalidArity("point bit must be 0 or 1")
    col = np.array([[1.0], [0.0]]) if b == 1 else np.array([[0.0], [1.0]])
    return StochMatrix(0, 1, col)


def zero(k: int = 1) -> StochMatrix:
    """The k -> k all-zero matrix."""
    if k < 1:
        raise InvalidArity("zero arity must be >= 1")
    return StochMatrix(k, k, np.zeros((1 << k, 1 << k)))


def diagonal(values: Sequence[float]) -> StochMatrix:
    vals = np.asarray(values, dtype=float)
    size = vals.shape[0]
    k = size.bit_length() - 1
    if 1 << k != size:
        raise InvalidArity(f"diagonal length must be a power of two, got {size}")
    return StochMatrix(k, k, np.diag(vals))


def exclude_all(k: int, b: int) -> StochMatrix:
    """Diagonal gate k -> k that zeroes exactly the all-b bit vector:
    conditions on 'not all k wires equal b' (unnormalized)."""
    if k < 1:
        raise InvalidArity("exclude_all needs k >= 1")
    if b not in (0, 1):
        raise InvalidArity("bit must be 0 or 1")
    vals = np.ones(1 << k)
    vals[bits_index((b,) * k)] = 0.0
    return diagonal(vals)


def permutation(perm: Sequence[int]) -> StochMatrix:
    """Arrow k -> k routing input wire perm[i] to output position i."""
    k = len(perm)
    if sorted(perm) != list(range(k)):
        raise InvalidArity(f"not a permutation of 0..{k - 1}: {perm}")
    e = np.zeros((1 << k, 1 << k))
    for col in range(1 << k):
        value = (1 << k) - 1 - col
        in_bits = [(value >> (k - 1 - i)) & 1 for i in range(k)]
        out_bits = [in_bits[perm[i]] for i in range(k)]
        e[bits_index(out_bits), col] = 1.0
    return StochMatrix(k, k, e)


def column_vector(mass: Sequence[float]) -> StochMatrix:
    """A 0 -> m arrow from an explicit 2^m mass vector."""
    arr = np.asarray(mass, dtype=float).reshape(-1, 1)
    m = arr.shape[0].bit_length() - 1
    if 1 << m != arr.shape[0]:
        raise InvalidArity(f"vector length must be a power of two, got {arr.shape[0]}")
    return StochMatrix(0, m, arr)
