"""Sparse operators with exact Gaussian-rational or double-precision entries.

Exact entries live in sympy's ``QQ_I`` domain.  ``DomainMatrix`` has no
Kronecker product or complex conjugation, and anti-linear maps need a
conjugation flag carried alongside the matrix, so the small row-dict
format below is used throughout instead.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Dict, Iterable, Mapping, Tuple

import numpy as np
from sympy import QQ, QQ_I

Rows = Dict[int, Dict[int, object]]


def to_exact(x) -> object:
    """Coerce ints, Fractions, Gaussian-integer complexes or QQ_I values into QQ_I."""
    if isinstance(x, type(QQ_I(0))):
        return x
    if isinstance(x, (int, Fraction)):
        return QQ_I(QQ(Fraction(x).numerator, Fraction(x).denominator), 0)
    if isinstance(x, complex):
        re, im = Fraction(x.real), Fraction(x.imag)
        if re.denominator > 2**20 or im.denominator > 2**20:
            raise ValueError(f"{x!r} is not a short rational; refuse to round in exact mode")
        return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))
    if isinstance(x, float):
        return to_exact(complex(x, 0.0))
    if isinstance(x, tuple) and len(x) == 2:
        re, im = Fraction(x[0]), Fraction(x[1])
        return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))
    return QQ_I.convert(x)


def to_complex(x) -> complex:
    if isinstance(x, type(QQ_I(0))):
        return complex(float(x.x), float(x.y))
    return complex(x)


def to_plain(x):
    """QQ_I -> Fraction when real, else complex; numeric values pass through."""
    if isinstance(x, type(QQ_I(0))):
        if not x.y:
            return Fraction(int(x.x.numerator), int(x.x.denominator))
        return to_complex(x)
    return x


def conj_scalar(x, exact: bool):
    if exact:
        return QQ_I(x.x, -x.y)
    return x.conjugate()


def coerce(x, exact: bool):
    return to_exact(x) if exact else to_complex(x)


class Op:
    """Sparse (rows x cols) matrix; ``exact`` selects QQ_I or complex entries."""

    __slots__ = ("shape", "rows", "exact")

    def __init__(self, shape: Tuple[int, int], rows: Rows | None = None, exact: bool = True):
        self.shape = (int(shape[0]), int(shape[1]))
        self.exact = exact
        self.rows: Rows = {}
        if rows:
            for i, row in rows.items():
                clean = {j: coerce(v, exact) for j, v in row.items()}
                clean = {j: v for j, v in clean.items() if v}
                if clean:
                    self.rows[i] = clean

    # constructors -------------------------------------------------------
    @classmethod
    def zeros(cls, n: int, m: int | None = None, exact: bool = True) -> "Op":
        return cls((n, n if m is None else m), None, exact)

    @classmethod
    def identity(cls, n: int, exact: bool = True) -> "Op":
        return cls.diag([1] * n, exact)

    @classmethod
    def diag(cls, values: Iterable, exact: bool = True) -> "Op":
        values = list(values)
        return cls((len(values), len(values)), {i: {i: v} for i, v in enumerate(values)}, exact)

    @classmethod
    def from_entries(cls, shape, entries: Mapping[Tuple[int, int], object], exact: bool = True) -> "Op":
        rows: Rows = {}
        for (i, j), v in entries.items():
            rows.setdefault(i, {})[j] = v
        return cls(shape, rows, exact)

    @classmethod
    def from_numpy(cls, a: np.ndarray) -> "Op":
        a = np.asarray(a, dtype=complex)
        rows: Rows = {}
        for i, j in zip(*np.nonzero(a)):
            rows.setdefault(int(i), {})[int(j)] = complex(a[i, j])
        return cls(a.shape, rows, exact=False)

    def _fresh(self, shape, rows: Rows) -> "Op":
        out = Op.__new__(Op)
        out.shape, out.exact = shape, self.exact
        out.rows = {i: r for i, r in rows.items() if r}
        return out

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "Op"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.exact != other.exact:
            raise ValueError("cannot mix exact and numeric operators")

    def __add__(self, other: "Op") -> "Op":
        self._check(other)
        rows = {i: dict(r) for i, r in self.rows.items()}
        for i, r in other.rows.items():
            tgt = rows.setdefault(i, {})
            for j, v in r.items():
                s = tgt.get(j)
                s = v if s is None else s + v
                if s:
                    tgt[j] = s
                else:
                    tgt.pop(j, None)
        return self._fresh(self.shape, rows)

    def __neg__(self) -> "Op":
        return self._fresh(self.shape, {i: {j: -v for j, v in r.items()} for i, r in self.rows.items()})

    def __sub__(self, other: "Op") -> "Op":
        return self + (-other)

    def scale(self, s) -> "Op":
        s = coerce(s, self.exact)
        if not s:
            return Op.zeros(*self.shape, exact=self.exact)
        return self._fresh(self.shape, {i: {j: s * v for j, v in r.items()} for i, r in self.rows.items()})

    def __rmul__(self, s) -> "Op":
        if isinstance(s, Number) or isinstance(s, type(QQ_I(0))):
            return self.scale(s)
        return NotImplemented

    def __matmul__(self, other: "Op") -> "Op":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot compose {self.shape} with {other.shape}")
        if self.exact != other.exact:
            raise ValueError("cannot mix exact and numeric operators")
        rows: Rows = {}
        for i, r in self.rows.items():
            acc: Dict[int, object] = {}
            for k, a in r.items():
                rk = other.rows.get(k)
                if not rk:
                    continue
                for j, b in rk.items():
                    s = acc.get(j)
                    acc[j] = a * b if s is None else s + a * b
            acc = {j: v for j, v in acc.items() if v}
            if acc:
                rows[i] = acc
        return self._fresh((self.shape[0], other.shape[1]), rows)

    def apply(self, vec: Mapping[int, object]) -> Dict[int, object]:
        vec = {k: coerce(v, self.exact) for k, v in vec.items()}
        out: Dict[int, object] = {}
        for i, r in self.rows.items():
            s = None
            for j, a in r.items():
                x = vec.get(j)
                if x is None:
                    continue
                s = a * x if s is None else s + a * x
            if s:
                out[i] = s
        return out

    def conj(self) -> "Op":
        return self._fresh(
            self.shape,
            {i: {j: conj_scalar(v, self.exact) for j, v in r.items()} for i, r in self.rows.items()},
        )

    @property
    def T(self) -> "Op":
        rows: Rows = {}
        for i, r in self.rows.items():
            for j, v in r.items():
                rows.setdefault(j, {})[i] = v
        return self._fresh((self.shape[1], self.shape[0]), rows)

    @property
    def H(self) -> "Op":
        return self.T.conj()

    def kron(self, other: "Op") -> "Op":
        if self.exact != other.exact:
            raise ValueError("cannot mix exact and numeric operators")
        m, n = other.shape
        rows: Rows = {}
        for i, r in self.rows.items():
            for k, s in other.rows.items():
                rows[i * m + k] = {j * n + l: a * b for j, a in r.items() for l, b in s.items()}
        return self._fresh((self.shape[0] * m, self.shape[1] * n), rows)

    def commutator(self, other: "Op", anti: bool = False) -> "Op":
        return self @ other + other @ self if anti else self @ other - other @ self

    # inspection ---------------------------------------------------------
    def is_zero(self, tol: float = 0.0) -> bool:
        if self.exact or tol == 0.0:
            return not self.rows
        return self.max_abs() <= tol

    def max_abs(self) -> float:
        return max((abs(to_complex(v)) for r in self.rows.values() for v in r.values()), default=0.0)

    def equals(self, other: "Op", tol: float = 0.0) -> bool:
        return (self - other).is_zero(tol)

    def __eq__(self, other) -> bool:  # exact structural equality
        return isinstance(other, Op) and self.shape == other.shape and self.equals(other)

    __hash__ = None

    def entry(self, i: int, j: int):
        v = self.rows.get(i, {}).get(j)
        return v if v is not None else coerce(0, self.exact)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows.values())

    def to_numpy(self) -> np.ndarray:
        a = np.zeros(self.shape, dtype=complex)
        for i, r in self.rows.items():
            for j, v in r.items():
                a[i, j] = to_complex(v)
        return a

    def numeric(self) -> "Op":
        if not self.exact:
            return self
        out = self._fresh(self.shape, {i: {j: to_complex(v) for j, v in r.items()} for i, r in self.rows.items()})
        out.exact = False
        return out

    def __repr__(self) -> str:
        kind = "exact" if self.exact else "numeric"
        return f"Op({self.shape[0]}x{self.shape[1]}, {kind}, nnz={self.nnz()})"


class SemiLinear:
    """x -> M x (linear) or x -> M conj(x) (anti-linear)."""

    __slots__ = ("mat", "anti")

    def __init__(self, mat: Op, anti: bool):
        self.mat, self.anti = mat, anti

    def __matmul__(self, other):
        if isinstance(other, SemiLinear):
            inner = other.mat.conj() if self.anti else other.mat
            return SemiLinear(self.mat @ inner, self.anti ^ other.anti)
        if isinstance(other, Op):  # other is linear
            inner = other.conj() if self.anti else other
            return SemiLinear(self.mat @ inner, self.anti)
        return NotImplemented

    def __rmatmul__(self, other):
        if isinstance(other, Op):
            return SemiLinear(other @ self.mat, self.anti)
        return NotImplemented

    def apply(self, vec: Mapping[int, object]) -> Dict[int, object]:
        if self.anti:
            exact = self.mat.exact
            vec = {k: conj_scalar(coerce(v, exact), exact) for k, v in vec.items()}
        return self.mat.apply(vec)

    def power(self, k: int) -> "SemiLinear":
        out = SemiLinear(Op.identity(self.mat.shape[0], self.mat.exact), False)
        for _ in range(k):
            out = self @ out
        return out

    def kron(self, other: "SemiLinear") -> "SemiLinear":
        if self.anti != other.anti:
            raise ValueError("tensor product of a linear and an anti-linear map is not defined")
        return SemiLinear(self.mat.kron(other.mat), self.anti)

    def equals(self, other: "SemiLinear", tol: float = 0.0) -> bool:
        return self.anti == other.anti and self.mat.equals(other.mat, tol)

    def __repr__(self) -> str:
        return f"SemiLinear({'anti' if self.anti else 'linear'}, {self.mat!r})"
