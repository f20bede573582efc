"""Exact linear algebra over prime fields and the rationals.

Field elements are plain Python values: residues are ``int`` in ``[0, p)``
and rationals are :class:`fractions.Fraction`.  A field descriptor
(:class:`PrimeField` or :class:`RationalField`) canonicalizes values and
supplies inverses; every routine here takes one explicitly.

Matrices are stored row-major as tuples of tuples.  Subspaces are always
kept in reduced row-echelon form, which makes them canonical: two
:class:`Subspace` objects are equal exactly when they span the same space.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The prime field F_p."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def order(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return self.p

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            return x.numerator * self.inv(x.denominator % self.p) % self.p
        return int(x) % self.p

    def reduce(self, x: int) -> int:
        return x % self.p

    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return pow(a, -1, self.p)

    def elements(self) -> range:
        return range(self.p)

    def units(self) -> range:
        return range(1, self.p)

    def __repr__(self) -> str:
        return f"GF({self.p})"


@dataclass(frozen=True)
class RationalField:
    """The rational numbers, with exact Fraction arithmetic."""

    @property
    def order(self):
        return None

    @property
    def characteristic(self) -> int:
        return 0

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def reduce(self, x):
        return x

    def inv(self, a) -> Fraction:
        if a == 0:
            raise ZeroDivisionError("division by zero in Q")
        return 1 / Fraction(a)

    def __repr__(self) -> str:
        return "QQ"


Field = Union[PrimeField, RationalField]
QQ = RationalField()


# ---------------------------------------------------------------------------
# row reduction core (list based, used by everything else)


def rref_rows(field: Field, rows: Iterable[Sequence], ncols: int):
    """Row-reduce ``rows`` and return ``(pivot_columns, nonzero_rref_rows)``.

    The input is not modified.  Rows of the result are lists.
    """
    red = field.reduce
    inv = field.inv
    work = [list(r) for r in rows]
    for r in work:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
    pivots: list[int] = []
    top = 0
    nrows = len(work)
    for c in range(ncols):
        if top == nrows:
            break
        piv = -1
        for i in range(top, nrows):
            if work[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        work[top], work[piv] = work[piv], work[top]
        prow = work[top]
        s = inv(prow[c])
        if s != 1:
            prow = [red(x * s) for x in prow]
            work[top] = prow
        for i in range(nrows):
            if i != top:
                f = work[i][c]
                if f:
                    work[i] = [red(x - f * y) for x, y in zip(work[i], prow)]
        pivots.append(c)
        top += 1
    return pivots, work[:top]


def rank_rows(field: Field, rows: Sequence[Sequence], ncols: int) -> int:
    """Rank only; forward elimination without back substitution."""
    red = field.reduce
    inv = field.inv
    work = [list(r) for r in rows]
    rank = 0
    nrows = len(work)
    for c in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for i in range(rank, nrows):
            if work[i][c]:
                piv = i
                break
        if piv < 0:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        prow = work[rank]
        s = inv(prow[c])
        for i in range(rank + 1, nrows):
            f = work[i][c]
            if f:
                f = red(f * s)
                work[i] = [red(x - f * y) for x, y in zip(work[i], prow)]
        rank += 1
    return rank


def kernel_rows(field: Field, rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis (as rows) of the right kernel ``{x : M x = 0}``.

    The returned basis is already in reduced row-echelon form.
    """
    pivots, red_rows = rref_rows(field, rows, ncols)
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for i, pc in enumerate(pivots):
            x[pc] = field.reduce(-red_rows[i][f])
        basis.append(x)
    # Vectors built from free columns in increasing order are RREF only up
    # to ordering of the pivot structure, so normalize once more.
    return rref_rows(field, basis, ncols)[1]


def mat_vec(field: Field, rows: Sequence[Sequence], x: Sequence) -> list:
    red = field.reduce
    return [red(sum(a * b for a, b in zip(r, x))) for r in rows]


def mat_mul_rows(field: Field, a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    """``a @ b.T``: entry (i, j) is the pairing of row a_i with row b_j."""
    red = field.reduce
    return [[red(sum(x * y for x, y in zip(ra, rb))) for rb in b] for ra in a]


# ---------------------------------------------------------------------------
# immutable value types


@dataclass(frozen=True)
class Mat:
    """Dense matrix over an exact field."""

    field: Field
    rows: tuple
    ncols: int

    @classmethod
    def of(cls, field: Field, entries: Sequence[Sequence], ncols: int | None = None) -> "Mat":
        rows = tuple(tuple(field(x) for x in r) for r in entries)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged matrix")
        return cls(field, rows, ncols)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Mat":
        return cls(field, tuple((0,) * ncols for _ in range(nrows)), ncols)

    @classmethod
    def identity(cls, field: Field, n: int) -> "Mat":
        return cls(field, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)), n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def transpose(self) -> "Mat":
        cols = tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols))
        return Mat(self.field, cols, len(self.rows))

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        prod = mat_mul_rows(self.field, self.rows, other.transpose().rows)
        return Mat(self.field, tuple(tuple(r) for r in prod), other.ncols)

    def apply(self, x: Sequence) -> tuple:
        return tuple(mat_vec(self.field, self.rows, x))

    def rank(self) -> int:
        return rank_rows(self.field, self.rows, self.ncols)

    def __str__(self) -> str:
        if not self.rows:
            return f"<{0}x{self.ncols} matrix>"
        width = max(len(str(x)) for r in self.rows for x in r) if self.ncols else 1
        return "\n".join("[" + " ".join(str(x).rjust(width) for x in r) + "]" for r in self.rows)


def rref(m: Mat) -> tuple[int, Mat]:
    """Reduced row-echelon form; zero rows are kept at the bottom."""
    pivots, red = rref_rows(m.field, m.rows, m.ncols)
    rank = len(pivots)
    full = [tuple(r) for r in red] + [(0,) * m.ncols] * (m.nrows - rank)
    return rank, Mat(m.field, tuple(full), m.ncols)


@dataclass(frozen=True)
class Subspace:
    """A subspace of field^ambient_dim, stored by its RREF basis."""

    field: Field
    ambient_dim: int
    basis: tuple

    @classmethod
    def span(cls, field: Field, ambient_dim: int, vectors: Iterable[Sequence]) -> "Subspace":
        vecs = [[field(x) for x in v] for v in vectors]
        _, red = rref_rows(field, vecs, ambient_dim)
        return cls(field, ambient_dim, tuple(tuple(r) for r in red))

    @classmethod
    def _from_rref(cls, field: Field, ambient_dim: int, rows) -> "Subspace":
        return cls(field, ambient_dim, tuple(tuple(r) for r in rows))

    @classmethod
    def zero(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, ())

    @classmethod
    def full(cls, field: Field, ambient_dim: int) -> "Subspace":
        return cls(field, ambient_dim, Mat.identity(field, ambient_dim).rows)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def matrix(self) -> Mat:
        return Mat(self.field, self.basis, self.ambient_dim)

    def contains(self, v: Sequence) -> bool:
        v = [self.field(x) for x in v]
        return rank_rows(self.field, list(self.basis) + [v], self.ambient_dim) == self.dim

    def issubspace(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return rank_rows(self.field, list(other.basis) + list(self.basis), self.ambient_dim) == other.dim

    def __add__(self, other: "Subspace") -> "Subspace":
        _check_ambient(self, other)
        _, red = rref_rows(self.field, list(self.basis) + list(other.basis), self.ambient_dim)
        return Subspace._from_rref(self.field, self.ambient_dim, red)

    def annihilator(self) -> "Subspace":
        """``{y : <x, y> = 0 for all x in self}`` under the standard pairing."""
        return Subspace._from_rref(
            self.field, self.ambient_dim, kernel_rows(self.field, self.basis, self.ambient_dim)
        )

    def coordinates(self, v: Sequence) -> tuple:
        """Coefficients of ``v`` in the RREF basis (v must lie in the span)."""
        piv = [next(i for i, x in enumerate(row) if x) for row in self.basis]
        coeffs = tuple(self.field(v[c]) for c in piv)
        recon = [self.field.reduce(sum(c * row[j] for c, row in zip(coeffs, self.basis)))
                 for j in range(self.ambient_dim)]
        if recon != [self.field(x) for x in v]:
            raise ValueError("vector not in subspace")
        return coeffs

    def __str__(self) -> str:
        return f"Subspace(dim={self.dim} in {self.field}^{self.ambient_dim})"


def _check_ambient(a: Subspace, b: Subspace) -> None:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient dimension mismatch: {a.ambient_dim} != {b.ambient_dim}")
    if a.field != b.field:
        raise ValueError("field mismatch")


def kernel(m: Mat) -> Subspace:
    """Right kernel ``{x : m x = 0}``."""
    return Subspace._from_rref(m.field, m.ncols, kernel_rows(m.field, m.rows, m.ncols))


def intersect(a: Subspace, b: Subspace) -> Subspace:
    """Intersection computed as the annihilator of the sum of annihilators."""
    _check_ambient(a, b)
    stacked = list(a.annihilator().basis) + list(b.annihilator().basis)
    return Subspace._from_rref(a.field, a.ambient_dim, kernel_rows(a.field, stacked, a.ambient_dim))


def gaussian_binomial(n: int, k: int, q: int) -> int:
    """The q-binomial coefficient [n choose k]_q, i.e. #Gr(k, n)(F_q)."""
    if not (0 <= k <= n):
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k}")
    if q < 2:
        raise ValueError(f"need q >= 2, got {q}")
    num = 1
    den = 1
    for i in range(1, k + 1):
        num *= q ** (n - k + i) - 1
        den *= q ** i - 1
    return num // den
