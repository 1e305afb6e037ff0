"""Exact arithmetic and linear algebra over prime fields F_q.

Everything here is integer-exact: elements are residues mod a prime q,
matrix inversion is Gauss-Jordan with modular inverses, and the
Vandermonde constructor fixes the share-evaluation convention used by
the threshold schemes (the secret coefficient multiplies x^(degree-1)
and sits in column 0).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np


class ZeroInverse(ValueError):
    """Raised when inverting the zero element."""


class DuplicatePoints(ValueError):
    """Raised when evaluation points are not pairwise distinct."""


class SingularMatrix(ValueError):
    """Raised when a matrix over F_q has no inverse."""


class ShapeMismatch(ValueError):
    """Raised when matrix shapes or moduli are not conformable."""


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    """Primality by trial division; intended range is n <= 2**16."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def _check_modulus(q: int) -> int:
    q = int(q)
    if not is_prime(q):
        raise ValueError(f"modulus {q} is not prime")
    return q


@dataclass(frozen=True)
class FqElement:
    """A residue in the prime field F_q. Values are reduced mod q on construction."""

    value: int
    modulus: int

    def __post_init__(self):
        q = _check_modulus(self.modulus)
        object.__setattr__(self, "modulus", q)
        object.__setattr__(self, "value", int(self.value) % q)

    def _coerce(self, other) -> "FqElement":
        if isinstance(other, FqElement):
            if other.modulus != self.modulus:
                raise ShapeMismatch(
                    f"mixed moduli {self.modulus} and {other.modulus}"
                )
            return other
        return FqElement(int(other), self.modulus)

    def __add__(self, other):
        o = self._coerce(other)
        return FqElement(self.value + o.value, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return FqElement(self.value - o.value, self.modulus)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return FqElement(self.value * o.value, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FqElement(-self.value, self.modulus)

    def __pow__(self, exp: int):
        return FqElement(pow(self.value, int(exp), self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * field_inv(self._coerce(other))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"F{self.modulus}({self.value})"


def field_inv(x: FqElement) -> FqElement:
    """Multiplicative inverse via Fermat's little theorem."""
    if x.value == 0:
        raise ZeroInverse(f"0 has no inverse mod {x.modulus}")
    return FqElement(pow(x.value, x.modulus - 2, x.modulus), x.modulus)


def _as_int_array(rows: Iterable[Iterable], q: int) -> np.ndarray:
    data = np.array([[int(v) % q for v in row] for row in rows], dtype=np.int64)
    if data.ndim != 2 or data.size == 0:
        raise ShapeMismatch("matrix needs a nonempty 2-D layout")
    return data


@dataclass(frozen=True)
class FqMatrix:
    """A dense matrix with entries in one prime field F_q.

    `data` is a read-only int64 array of residues in [0, q).
    """

    rows: int
    cols: int
    modulus: int
    data: np.ndarray

    def __post_init__(self):
        q = _check_modulus(self.modulus)
        arr = np.asarray(self.data, dtype=np.int64) % q
        if arr.shape != (self.rows, self.cols):
            raise ShapeMismatch(
                f"data shape {arr.shape} != ({self.rows}, {self.cols})"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "modulus", q)
        object.__setattr__(self, "data", arr)

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], q: int) -> "FqMatrix":
        data = _as_int_array(rows, q)
        return cls(data.shape[0], data.shape[1], q, data)

    @classmethod
    def identity(cls, n: int, q: int) -> "FqMatrix":
        return cls(n, n, q, np.eye(n, dtype=np.int64))

    @classmethod
    def column(cls, values: Sequence, q: int) -> "FqMatrix":
        return cls.from_rows([[v] for v in values], q)

    @property
    def entries(self) -> tuple[FqElement, ...]:
        """Row-major entries as field elements."""
        return tuple(
            FqElement(int(v), self.modulus) for v in self.data.reshape(-1)
        )

    def entry(self, i: int, j: int) -> FqElement:
        return FqElement(int(self.data[i, j]), self.modulus)

    def row_subset(self, indices: Sequence[int]) -> "FqMatrix":
        return FqMatrix.from_rows(self.data[list(indices)], self.modulus)

    def __matmul__(self, other: "FqMatrix") -> "FqMatrix":
        return mat_mul(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, FqMatrix)
            and self.modulus == other.modulus
            and self.data.shape == other.data.shape
            and bool(np.array_equal(self.data, other.data))
        )


def vandermonde(
    points: Sequence[FqElement], degree: int, secret_column: str = "lead"
) -> FqMatrix:
    """Evaluation matrix for polynomials with coefficient vector (s, a_1..a_{degree-1}).

    With the default "lead" convention p(x) = s*x^(degree-1) + sum_i a_{i+1}*x^i,
    so row k is (x_k^(degree-1), 1, x_k, ..., x_k^(degree-2)).  The "constant"
    convention is classic Shamir: p(x) = s + a_1*x + ..., row k = (1, x_k, ...).
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    if not points:
        raise ValueError("need at least one evaluation point")
    q = points[0].modulus
    if any(p.modulus != q for p in points):
        raise ShapeMismatch("points carry mixed moduli")
    vals = [p.value for p in points]
    if len(set(vals)) != len(vals):
        raise DuplicatePoints(f"points {vals} are not pairwise distinct")
    rows = []
    for x in vals:
        powers = [pow(x, i, q) for i in range(degree)]
        if secret_column == "lead":
            rows.append([powers[degree - 1]] + powers[: degree - 1])
        elif secret_column == "constant":
            rows.append(powers)
        else:
            raise ValueError(f"unknown secret_column convention {secret_column!r}")
    return FqMatrix.from_rows(rows, q)


def mat_mul(a: FqMatrix, b: FqMatrix) -> FqMatrix:
    if a.modulus != b.modulus:
        raise ShapeMismatch("moduli differ")
    if a.cols != b.rows:
        raise ShapeMismatch(f"({a.rows}x{a.cols}) @ ({b.rows}x{b.cols})")
    prod = (a.data @ b.data) % a.modulus
    return FqMatrix(a.rows, b.cols, a.modulus, prod)


def mat_inverse(m: FqMatrix) -> FqMatrix:
    """Gauss-Jordan inverse with exact modular pivots."""
    if m.rows != m.cols:
        raise ShapeMismatch("only square matrices are invertible")
    n, q = m.rows, m.modulus
    aug = np.hstack([m.data.copy(), np.eye(n, dtype=np.int64)])
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r, col] % q != 0), None)
        if pivot is None:
            raise SingularMatrix(f"no pivot in column {col}")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        inv = pow(int(aug[col, col]), q - 2, q)
        aug[col] = (aug[col] * inv) % q
        for r in range(n):
            if r != col and aug[r, col] != 0:
                aug[r] = (aug[r] - aug[r, col] * aug[col]) % q
    return FqMatrix(n, n, q, aug[:, n:])


def solve(a: FqMatrix, rhs: Sequence) -> tuple[FqElement, ...]:
    """Exact solution of a x = rhs for invertible a."""
    if len(rhs) != a.rows:
        raise ShapeMismatch(f"rhs length {len(rhs)} != {a.rows}")
    col = FqMatrix.column(rhs, a.modulus)
    sol = mat_mul(mat_inverse(a), col)
    return tuple(FqElement(int(v), a.modulus) for v in sol.data[:, 0])
