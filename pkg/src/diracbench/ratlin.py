"""Exact rational linear algebra.

Everything here works over ``fractions.Fraction``; there is no floating point
and no tolerance anywhere.  Vectors are plain tuples of Fractions, matrices
are immutable :class:`Mat` objects acting on column vectors, and subspaces
are stored by their reduced row-echelon basis so that equality of subspaces
is equality of canonical forms.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vec = tuple  # tuple[Fraction, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s:
            raise ValueError("empty rational")
        num, sep, den = s.partition("/")
        try:
            n = int(num)
            d = int(den) if sep else 1
        except ValueError:
            raise ValueError(f"malformed rational {x!r}") from None
        if d == 0:
            raise ValueError(f"zero denominator in {x!r}")
        return Fraction(n, d)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def fmt(q: Fraction) -> str:
    q = to_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vec(*entries) -> Vec:
    if len(entries) == 1 and not isinstance(entries[0], (int, str, Fraction)):
        entries = tuple(entries[0])
    return tuple(to_fraction(e) for e in entries)


def zero_vec(n: int) -> Vec:
    return (ZERO,) * n


def unit_vec(n: int, i: int) -> Vec:
    return tuple(ONE if k == i else ZERO for k in range(n))


def vadd(x: Vec, y: Vec) -> Vec:
    if len(x) != len(y):
        raise ValueError(f"length mismatch {len(x)} vs {len(y)}")
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vec, y: Vec) -> Vec:
    if len(x) != len(y):
        raise ValueError(f"length mismatch {len(x)} vs {len(y)}")
    return tuple(a - b for a, b in zip(x, y))


def vscale(c, x: Vec) -> Vec:
    c = to_fraction(c)
    return tuple(c * a for a in x)


def dot(x: Vec, y: Vec) -> Fraction:
    if len(x) != len(y):
        raise ValueError(f"length mismatch {len(x)} vs {len(y)}")
    return sum((a * b for a, b in zip(x, y)), ZERO)


def is_zero_vec(x: Vec) -> bool:
    return all(a == 0 for a in x)


def lincomb(coeffs: Sequence, vectors: Sequence[Vec], n: int) -> Vec:
    out = [ZERO] * n
    for c, v in zip(coeffs, vectors):
        if c:
            for k, a in enumerate(v):
                if a:
                    out[k] += c * a
    return tuple(out)


class Mat:
    """Immutable rational matrix.  ``M @ v`` applies M to a column vector."""

    __slots__ = ("rows", "nrows", "ncols", "_hash")

    def __init__(self, rows: Iterable[Iterable], ncols: int | None = None):
        rows = tuple(tuple(to_fraction(a) for a in r) for r in rows)
        if rows:
            widths = {len(r) for r in rows}
            if len(widths) != 1:
                raise ValueError("ragged matrix")
            (w,) = widths
            if ncols is not None and ncols != w:
                raise ValueError(f"expected {ncols} columns, got {w}")
            ncols = w
        elif ncols is None:
            ncols = 0
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = ncols
        self._hash = None

    @classmethod
    def _raw(cls, rows: tuple, nrows: int, ncols: int) -> "Mat":
        m = object.__new__(cls)
        m.rows = rows
        m.nrows = nrows
        m.ncols = ncols
        m._hash = None
        return m

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Mat":
        return cls._raw(tuple((ZERO,) * ncols for _ in range(nrows)), nrows, ncols)

    @classmethod
    def identity(cls, n: int) -> "Mat":
        return cls._raw(tuple(unit_vec(n, i) for i in range(n)), n, n)

    @classmethod
    def diag(cls, entries: Sequence) -> "Mat":
        d = [to_fraction(e) for e in entries]
        n = len(d)
        return cls._raw(
            tuple(tuple(d[i] if i == j else ZERO for j in range(n)) for i in range(n)), n, n
        )

    @classmethod
    def from_columns(cls, columns: Sequence[Vec], nrows: int | None = None) -> "Mat":
        columns = [tuple(to_fraction(a) for a in c) for c in columns]
        if not columns:
            if nrows is None:
                raise ValueError("need nrows for an empty column list")
            return cls.zeros(nrows, 0)
        n = len(columns[0])
        return cls._raw(
            tuple(tuple(c[i] for c in columns) for i in range(n)), n, len(columns)
        )

    @classmethod
    def from_rows(cls, rows: Sequence[Vec], ncols: int) -> "Mat":
        return cls(rows, ncols=ncols)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["Mat"]]) -> "Mat":
        rows = []
        for brow in blocks:
            h = brow[0].nrows
            if any(b.nrows != h for b in brow):
                raise ValueError("block row height mismatch")
            for i in range(h):
                rows.append(sum((b.rows[i] for b in brow), ()))
        ncols = sum(b.ncols for b in blocks[0])
        return cls(rows, ncols=ncols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> Fraction:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> Vec:
        return self.rows[i]

    def col(self, j: int) -> Vec:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vec]:
        return [self.col(j) for j in range(self.ncols)]

    @property
    def T(self) -> "Mat":
        return Mat._raw(
            tuple(tuple(r[j] for r in self.rows) for j in range(self.ncols)),
            self.ncols,
            self.nrows,
        )

    def _check_same(self, other: "Mat"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._raw(
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.nrows,
            self.ncols,
        )

    def __sub__(self, other: "Mat") -> "Mat":
        self._check_same(other)
        return Mat._raw(
            tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.rows, other.rows)),
            self.nrows,
            self.ncols,
        )

    def __neg__(self) -> "Mat":
        return Mat._raw(tuple(tuple(-a for a in r) for r in self.rows), self.nrows, self.ncols)

    def __mul__(self, c) -> "Mat":
        c = to_fraction(c)
        return Mat._raw(tuple(tuple(c * a for a in r) for r in self.rows), self.nrows, self.ncols)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, Mat):
            if self.ncols != other.nrows:
                raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
            cols = other.T.rows
            return Mat._raw(
                tuple(tuple(_dot_sparse(r, c) for c in cols) for r in self.rows),
                self.nrows,
                other.ncols,
            )
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError(f"cannot apply {self.shape} matrix to vector of length {len(v)}")
        return tuple(_dot_sparse(r, v) for r in self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Mat):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self) -> str:
        body = "; ".join(" ".join(fmt(a) for a in r) for r in self.rows)
        return f"Mat({self.nrows}x{self.ncols}: [{body}])"

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.rows for a in r)

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self.rows[i][j] == self.rows[j][i]
            for i in range(self.nrows)
            for j in range(i + 1, self.ncols)
        )

    def trace(self) -> Fraction:
        if not self.is_square():
            raise ValueError("trace of a non-square matrix")
        return sum((self.rows[i][i] for i in range(self.nrows)), ZERO)

    def rref(self) -> tuple["Mat", tuple[int, ...]]:
        """Reduced row-echelon form (zero rows dropped) and pivot columns."""
        rows, pivots = _rref_rows([list(r) for r in self.rows], self.ncols)
        return Mat._raw(tuple(tuple(r) for r in rows), len(rows), self.ncols), pivots

    def rank(self) -> int:
        return len(self.rref()[1])

    def nullspace(self) -> list[Vec]:
        """Basis of {x : M x = 0}, one vector per free column, in column order."""
        red, pivots = self.rref()
        n = self.ncols
        pivset = set(pivots)
        basis = []
        for free in range(n):
            if free in pivset:
                continue
            x = [ZERO] * n
            x[free] = ONE
            for r, p in zip(red.rows, pivots):
                x[p] = -r[free]
            basis.append(tuple(x))
        return basis

    def det(self) -> Fraction:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self.rows]
        n = self.nrows
        d = ONE
        for c in range(n):
            p = next((i for i in range(c, n) if a[i][c] != 0), None)
            if p is None:
                return ZERO
            if p != c:
                a[c], a[p] = a[p], a[c]
                d = -d
            d *= a[c][c]
            inv = ONE / a[c][c]
            for i in range(c + 1, n):
                f = a[i][c] * inv
                if f:
                    for j in range(c, n):
                        a[i][j] -= f * a[c][j]
        return d

    def is_invertible(self) -> bool:
        return self.is_square() and self.rank() == self.nrows

    def inverse(self) -> "Mat":
        if not self.is_square():
            raise ValueError("inverse of a non-square matrix")
        n = self.nrows
        aug = [list(r) + list(unit_vec(n, i)) for i, r in enumerate(self.rows)]
        red, pivots = _rref_rows(aug, 2 * n)
        if tuple(pivots[:n]) != tuple(range(n)) or len(red) < n:
            raise ZeroDivisionError("matrix is singular")
        return Mat([r[n:] for r in red[:n]], ncols=n)

    def solve(self, b: Vec) -> Vec | None:
        """Some solution x of M x = b (free variables set to 0), or None."""
        b = tuple(to_fraction(a) for a in b)
        if len(b) != self.nrows:
            raise ValueError("right-hand side has wrong length")
        aug = [list(r) + [bi] for r, bi in zip(self.rows, b)]
        red, pivots = _rref_rows(aug, self.ncols + 1)
        if pivots and pivots[-1] == self.ncols:
            return None
        x = [ZERO] * self.ncols
        for r, p in zip(red, pivots):
            x[p] = r[-1]
        return tuple(x)

    def solve_matrix(self, B: "Mat") -> "Mat | None":
        cols = []
        for c in B.columns():
            x = self.solve(c)
            if x is None:
                return None
            cols.append(x)
        return Mat.from_columns(cols, nrows=self.ncols)

    def hstack(self, other: "Mat") -> "Mat":
        return Mat.block([[self, other]])

    def vstack(self, other: "Mat") -> "Mat":
        return Mat.block([[self], [other]])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Mat":
        return Mat([[self.rows[i][j] for j in cols] for i in rows], ncols=len(cols))

    def to_json(self) -> list[list[str]]:
        return [[fmt(a) for a in r] for r in self.rows]

    @classmethod
    def from_json(cls, data, ncols: int | None = None) -> "Mat":
        return cls(data, ncols=ncols)


def _dot_sparse(r: Vec, c: Vec) -> Fraction:
    s = ZERO
    for a, b in zip(r, c):
        if a and b:
            s += a * b
    return s


def _rref_rows(a: list[list[Fraction]], ncols: int):
    """In-place Gauss-Jordan on a list of rows; returns (nonzero rows, pivots)."""
    pivots = []
    r = 0
    nrows = len(a)
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = ONE / a[r][c]
        if inv != 1:
            a[r] = [x * inv for x in a[r]]
        pr = a[r]
        for i in range(nrows):
            if i != r:
                f = a[i][c]
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], pr)]
        pivots.append(c)
        r += 1
    return a[:r], tuple(pivots)


def outer(x: Vec, y: Vec) -> Mat:
    return Mat([[a * b for b in y] for a in x], ncols=len(y))


# ---------------------------------------------------------------- subspaces


@dataclass(frozen=True)
class Subspace:
    """A subspace of Q^n, stored by its unique RREF basis."""

    ambient_dim: int
    basis: Mat

    def __post_init__(self):
        if self.basis.ncols != self.ambient_dim:
            raise ValueError("basis width differs from ambient dimension")
        red, _ = self.basis.rref()
        if red != self.basis:
            raise ValueError("Subspace basis must be in reduced row-echelon form; use span()")

    @property
    def dim(self) -> int:
        return self.basis.nrows

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, a in enumerate(r) if a) for r in self.basis.rows)

    def vectors(self) -> list[Vec]:
        return list(self.basis.rows)

    def contains(self, v: Vec) -> bool:
        v = tuple(v)
        if len(v) != self.ambient_dim:
            raise ValueError("vector has wrong length")
        # subtract the pivot-coordinate combination; remainder must vanish
        rem = list(v)
        for r, p in zip(self.basis.rows, self.pivots):
            c = rem[p]
            if c:
                rem = [x - c * y for x, y in zip(rem, r)]
        return all(x == 0 for x in rem)

    def coordinates(self, v: Vec) -> Vec:
        """Coordinates of v in the canonical basis (v must lie in the subspace)."""
        if not self.contains(v):
            raise ValueError("vector is not in the subspace")
        return tuple(v[p] for p in self.pivots)

    def coordinate_map(self) -> Mat:
        """dim x ambient selection matrix giving canonical coordinates on the subspace."""
        return Mat(
            [unit_vec(self.ambient_dim, p) for p in self.pivots], ncols=self.ambient_dim
        )

    def inclusion(self) -> Mat:
        """ambient x dim matrix whose columns are the canonical basis."""
        return Mat.from_columns(self.vectors(), nrows=self.ambient_dim)

    def __le__(self, other: "Subspace") -> bool:
        _check_ambient(self, other)
        return all(other.contains(v) for v in self.vectors())

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __and__(self, other: "Subspace") -> "Subspace":
        return intersect(self, other)

    def __repr__(self) -> str:
        vs = ", ".join("(" + ",".join(fmt(a) for a in v) + ")" for v in self.vectors())
        return f"Subspace(Q^{self.ambient_dim}: span{{{vs}}})"

    def to_json(self) -> list[list[str]]:
        return self.basis.to_json()


def _check_ambient(a: Subspace, b: Subspace):
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(f"ambient mismatch {a.ambient_dim} vs {b.ambient_dim}")


def span(ambient_dim: int, vectors: Iterable[Sequence]) -> Subspace:
    rows = [tuple(to_fraction(a) for a in v) for v in vectors]
    for r in rows:
        if len(r) != ambient_dim:
            raise ValueError(f"vector of length {len(r)} in Q^{ambient_dim}")
    red, _ = Mat(rows, ncols=ambient_dim).rref() if rows else (Mat.zeros(0, ambient_dim), ())
    return Subspace(ambient_dim, red)


def zero_space(n: int) -> Subspace:
    return Subspace(n, Mat.zeros(0, n))


def full_space(n: int) -> Subspace:
    return Subspace(n, Mat.identity(n))


def subspace_sum(s1: Subspace, s2: Subspace) -> Subspace:
    _check_ambient(s1, s2)
    return span(s1.ambient_dim, s1.vectors() + s2.vectors())


def annihilator(s: Subspace) -> Subspace:
    """{mu in (Q^n)* : mu(x) = 0 for x in s}, in dual coordinates."""
    if s.dim == 0:
        return full_space(s.ambient_dim)
    return span(s.ambient_dim, s.basis.nullspace())


def intersect(s1: Subspace, s2: Subspace) -> Subspace:
    _check_ambient(s1, s2)
    return annihilator(subspace_sum(annihilator(s1), annihilator(s2)))


def orth_complement(s: Subspace, form: "SymBilinearForm") -> Subspace:
    if form.dim != s.ambient_dim:
        raise ValueError("form and subspace live in different dimensions")
    if s.dim == 0:
        return full_space(s.ambient_dim)
    # x is orthogonal to s iff (basis . gram) x = 0
    return span(s.ambient_dim, (s.basis @ form.gram).nullspace())


def image(f: Mat, s: Subspace) -> Subspace:
    if f.ncols != s.ambient_dim:
        raise ValueError("map domain does not match subspace ambient")
    return span(f.nrows, [f @ v for v in s.vectors()])


def preimage(f: Mat, s: Subspace) -> Subspace:
    if f.nrows != s.ambient_dim:
        raise ValueError("map codomain does not match subspace ambient")
    ann = annihilator(s)
    if ann.dim == 0:
        return full_space(f.ncols)
    return span(f.ncols, (ann.basis @ f).nullspace())


def kernel(f: Mat) -> Subspace:
    return span(f.ncols, f.nullspace())


def column_space(f: Mat) -> Subspace:
    return span(f.nrows, f.columns())


def are_complementary(s1: Subspace, s2: Subspace) -> bool:
    _check_ambient(s1, s2)
    return s1.dim + s2.dim == s1.ambient_dim and intersect(s1, s2).dim == 0


def projection_along(onto: Subspace, along: Subspace) -> Mat:
    """The projection of Q^n onto `onto` with kernel `along` (they must be complementary)."""
    if not are_complementary(onto, along):
        raise ValueError("subspaces are not complementary")
    n = onto.ambient_dim
    basis = Mat.from_columns(onto.vectors() + along.vectors(), nrows=n)
    inv = basis.inverse()
    keep = Mat.diag([1] * onto.dim + [0] * along.dim)
    return basis @ keep @ inv


# ------------------------------------------------------- symmetric 2-tensors


@dataclass(frozen=True)
class _SymTensor:
    gram: Mat

    def __post_init__(self):
        if not self.gram.is_symmetric():
            raise ValueError(f"{type(self).__name__} gram must be square and symmetric")

    @property
    def dim(self) -> int:
        return self.gram.nrows

    def __call__(self, x: Vec, y: Vec) -> Fraction:
        return dot(tuple(x), self.gram @ tuple(y))

    def is_nondegenerate(self) -> bool:
        return self.gram.is_invertible()

    def is_zero(self) -> bool:
        return self.gram.is_zero()

    def kernel(self) -> Subspace:
        return kernel(self.gram)


class SymBilinearForm(_SymTensor):
    """A symmetric form on V: <x, y> = x^T gram y."""

    @classmethod
    def zero(cls, n: int) -> "SymBilinearForm":
        return cls(Mat.zeros(n, n))

    def __neg__(self) -> "SymBilinearForm":
        return SymBilinearForm(-self.gram)

    def dual(self) -> "SymBivector":
        """The element of S^2 V dual to a nondegenerate form."""
        return SymBivector(self.gram.inverse())


class SymBivector(_SymTensor):
    """An element of S^2 V, i.e. a symmetric form on V*; sharp(mu) = gram mu."""

    @classmethod
    def zero(cls, n: int) -> "SymBivector":
        return cls(Mat.zeros(n, n))

    def sharp(self, mu: Vec) -> Vec:
        return self.gram @ tuple(mu)

    def __neg__(self) -> "SymBivector":
        return SymBivector(-self.gram)

    def dual(self) -> SymBilinearForm:
        return SymBilinearForm(self.gram.inverse())


def pushforward(f: Mat, beta: SymBivector) -> SymBivector:
    """f(beta) = F . gram . F^T for a linear map F: V -> W."""
    if f.ncols != beta.dim:
        raise ValueError(f"map with {f.ncols} columns cannot push forward a {beta.dim}-dim bivector")
    return SymBivector(f @ beta.gram @ f.T)


# --------------------------------------------------------------- quotients


@dataclass(frozen=True)
class QuotientSpace:
    """V/U in the coordinates of the non-pivot columns of U's RREF basis."""

    ambient_dim: int
    kernel: Subspace
    projection: Mat
    section: Mat

    @property
    def dim(self) -> int:
        return self.ambient_dim - self.kernel.dim


def quotient(ambient_dim: int, kern: Subspace) -> QuotientSpace:
    if kern.ambient_dim != ambient_dim:
        raise ValueError("kernel lives in a different ambient space")
    pivots = kern.pivots
    free = [j for j in range(ambient_dim) if j not in set(pivots)]
    # reduce e_j modulo the kernel, then read off the free coordinates
    proj_cols = []
    for j in range(ambient_dim):
        x = list(unit_vec(ambient_dim, j))
        for r, p in zip(kern.basis.rows, pivots):
            c = x[p]
            if c:
                x = [a - c * b for a, b in zip(x, r)]
        proj_cols.append(tuple(x[k] for k in free))
    projection = Mat.from_columns(proj_cols, nrows=len(free))
    section = Mat.from_columns([unit_vec(ambient_dim, k) for k in free], nrows=ambient_dim)
    return QuotientSpace(ambient_dim, kern, projection, section)


# ------------------------------------------------------------- coisotropy


def coisotropy_witness(u: Subspace, beta: SymBivector) -> tuple[Vec, Vec] | None:
    """A pair (mu, nu) in ann(u) with beta(mu, nu) != 0, or None if u is coisotropic."""
    if u.ambient_dim != beta.dim:
        raise ValueError("dimension mismatch")
    ann = annihilator(u).vectors()
    for i, mu in enumerate(ann):
        for nu in ann[i:]:
            if beta(mu, nu) != 0:
                return (mu, nu)
    return None


def is_coisotropic(u: Subspace, beta: SymBivector, route: str = "both") -> bool:
    """Whether beta vanishes on ann(u).

    ``route="quotient"`` tests pr_{V/U}(beta) = 0, ``route="sharp"`` tests
    beta^sharp(ann U) within U; the default computes both and insists they agree.
    """
    if u.ambient_dim != beta.dim:
        raise ValueError("dimension mismatch")
    by_quotient = pushforward(quotient(u.ambient_dim, u).projection, beta).is_zero()
    if route == "quotient":
        return by_quotient
    by_sharp = all(u.contains(beta.sharp(mu)) for mu in annihilator(u).vectors())
    if route == "sharp":
        return by_sharp
    if by_quotient != by_sharp:
        raise AssertionError("coisotropy routes disagree")
    return by_quotient
