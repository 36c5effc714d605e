"""Lie algebras given by structure constants, over Q.

The basis of an n-dimensional algebra is e_0..e_{n-1} and
``[e_i, e_j] = sum_k c[i][j][k] e_k``.  The coadjoint convention is
<[x, mu], y> = -<mu, [x, y]>, so ``coadjoint(x) = -adjoint(x)^T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .ratlin import (
    ZERO,
    Mat,
    Subspace,
    SymBilinearForm,
    Vec,
    fmt,
    quotient,
    span,
    to_fraction,
    unit_vec,
    zero_vec,
)


class LieAlgebraError(ValueError):
    pass


class LieAlgebra:
    """Dense structure constants plus cached adjoint matrices of basis vectors."""

    __slots__ = ("dim", "labels", "sc", "_ad_basis", "_hash")

    def __init__(self, dim: int, sc, labels: Sequence[str] | None = None):
        self.dim = dim
        self.labels = tuple(labels) if labels is not None else tuple(f"e{i}" for i in range(dim))
        if len(self.labels) != dim:
            raise LieAlgebraError("wrong number of labels")
        sc = tuple(tuple(tuple(to_fraction(a) for a in sc[i][j]) for j in range(dim)) for i in range(dim))
        for i in range(dim):
            for j in range(dim):
                if len(sc[i][j]) != dim:
                    raise LieAlgebraError("structure constants have the wrong shape")
                if any(a != -b for a, b in zip(sc[i][j], sc[j][i])):
                    raise LieAlgebraError(f"structure constants not antisymmetric at ({i},{j})")
        self.sc = sc
        self._hash = None
        # ad(e_i)[k][j] = c[i][j][k]
        self._ad_basis = tuple(
            Mat([[sc[i][j][k] for j in range(dim)] for k in range(dim)], ncols=dim)
            for i in range(dim)
        )

    @classmethod
    def from_brackets(
        cls, dim: int, brackets: Mapping[tuple[int, int], Sequence], labels=None
    ) -> "LieAlgebra":
        """Build from a partial table {(i, j): [e_i, e_j]}; the rest is completed by antisymmetry."""
        table = [[None] * dim for _ in range(dim)]
        for (i, j), v in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim):
                raise LieAlgebraError(f"bracket index ({i},{j}) out of range")
            v = tuple(to_fraction(a) for a in v)
            if len(v) != dim:
                raise LieAlgebraError("bracket value has wrong length")
            if i == j:
                if any(v):
                    raise LieAlgebraError(f"[e{i},e{i}] must vanish")
                continue
            neg = tuple(-a for a in v)
            for (a, b), w in (((i, j), v), ((j, i), neg)):
                if table[a][b] is not None and table[a][b] != w:
                    raise LieAlgebraError(f"inconsistent brackets for ({a},{b})")
                table[a][b] = w
        sc = [[table[i][j] or zero_vec(dim) for j in range(dim)] for i in range(dim)]
        return cls(dim, sc, labels)

    @classmethod
    def from_records(cls, dim: int, records: Sequence[Mapping], labels=None) -> "LieAlgebra":
        """Build from records {i, j, k, coeff} with i < j."""
        acc: dict[tuple[int, int], list] = {}
        for r in records:
            i, j, k = int(r["i"]), int(r["j"]), int(r["k"])
            if not i < j:
                raise LieAlgebraError(f"record needs i < j, got ({i},{j})")
            if not 0 <= k < dim or j >= dim:
                raise LieAlgebraError("record index out of range")
            v = acc.setdefault((i, j), [ZERO] * dim)
            v[k] += to_fraction(r["coeff"])
        return cls.from_brackets(dim, acc, labels)

    @classmethod
    def from_adjoint(cls, ads: Sequence[Mat], labels=None) -> "LieAlgebra":
        """Build from the matrices ad(e_i)."""
        n = len(ads)
        sc = [[[ads[i][k, j] for k in range(n)] for j in range(n)] for i in range(n)]
        return cls(n, sc, labels)

    def to_records(self) -> list[dict]:
        out = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                for k, c in enumerate(self.sc[i][j]):
                    if c:
                        out.append({"i": i, "j": j, "k": k, "coeff": fmt(c)})
        return out

    def basis(self) -> list[Vec]:
        return [unit_vec(self.dim, i) for i in range(self.dim)]

    def _check(self, x) -> Vec:
        x = tuple(x)
        if len(x) != self.dim:
            raise LieAlgebraError(f"vector of length {len(x)} in a {self.dim}-dim algebra")
        return x

    def adjoint(self, x) -> Mat:
        x = self._check(x)
        m = Mat.zeros(self.dim, self.dim)
        for c, a in zip(x, self._ad_basis):
            if c:
                m = m + a * c
        return m

    def coadjoint(self, x) -> Mat:
        return -self.adjoint(x).T

    def bracket(self, x, y) -> Vec:
        return self.adjoint(x) @ self._check(y)

    def is_abelian(self) -> bool:
        return all(not any(v) for row in self.sc for v in row)

    def __eq__(self, other) -> bool:
        return isinstance(other, LieAlgebra) and self.dim == other.dim and self.sc == other.sc

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, self.sc))
        return self._hash

    def __repr__(self) -> str:
        return f"LieAlgebra(dim={self.dim}, labels={self.labels})"


def abelian(n: int, labels=None) -> LieAlgebra:
    return LieAlgebra(n, [[zero_vec(n)] * n for _ in range(n)], labels)


def sl2() -> LieAlgebra:
    """sl2 in the basis (e, f, H) with [H,e]=2e, [H,f]=-2f, [e,f]=H."""
    return LieAlgebra.from_brackets(
        3, {(2, 0): (2, 0, 0), (2, 1): (0, -2, 0), (0, 1): (0, 0, 1)}, labels=("e", "f", "H")
    )


@dataclass(frozen=True)
class JacobiReport:
    ok: bool
    first_failing_triple: tuple[int, int, int] | None = None
    value: Vec | None = None


def check_jacobi(L: LieAlgebra) -> JacobiReport:
    n = L.dim
    e = L.basis()
    for i in range(n):
        for j in range(i + 1, n):
            eij = L.sc[i][j]
            for k in range(j + 1, n):
                s = L.bracket(eij, e[k])
                s = tuple(a + b for a, b in zip(s, L.bracket(L.sc[j][k], e[i])))
                s = tuple(a + b for a, b in zip(s, L.bracket(L.sc[k][i], e[j])))
                if any(s):
                    return JacobiReport(False, (i, j, k), s)
    return JacobiReport(True)


def subalgebra_witness(L: LieAlgebra, S: Subspace, ideal: bool = False):
    """A pair of basis indices/vectors whose bracket leaves S, or None."""
    if S.ambient_dim != L.dim:
        raise LieAlgebraError("subspace lives in a different dimension")
    left = L.basis() if ideal else S.vectors()
    for a, x in enumerate(left):
        ad = L.adjoint(x)
        for b, y in enumerate(S.vectors()):
            z = ad @ y
            if not S.contains(z):
                return (x, y, z)
    return None


def is_subalgebra(L: LieAlgebra, S: Subspace, ideal: bool = False) -> bool:
    return subalgebra_witness(L, S, ideal) is None


@dataclass(frozen=True)
class LieMorphism:
    source: LieAlgebra
    target: LieAlgebra
    matrix: Mat

    def __post_init__(self):
        if self.matrix.shape != (self.target.dim, self.source.dim):
            raise LieAlgebraError(
                f"morphism matrix {self.matrix.shape} does not fit {self.source.dim} -> {self.target.dim}"
            )

    def __call__(self, x) -> Vec:
        return self.matrix @ tuple(x)


def morphism_witness(f: LieMorphism):
    """First basis pair (i, j) where f fails to preserve brackets, or None."""
    src, tgt, m = f.source, f.target, f.matrix
    cols = m.columns()
    for i in range(src.dim):
        for j in range(i + 1, src.dim):
            lhs = m @ src.sc[i][j]
            rhs = tgt.bracket(cols[i], cols[j])
            if lhs != rhs:
                return (i, j)
    return None


def check_morphism(f: LieMorphism) -> bool:
    return morphism_witness(f) is None


def is_automorphism(L: LieAlgebra, A: Mat) -> bool:
    return A.is_invertible() and check_morphism(LieMorphism(L, L, A))


@dataclass(frozen=True)
class MatrixRep:
    algebra: LieAlgebra
    rep_dim: int
    images: tuple[Mat, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.algebra.dim:
            raise LieAlgebraError("need one image per basis vector")
        for m in self.images:
            if m.shape != (self.rep_dim, self.rep_dim):
                raise LieAlgebraError("rep image has the wrong size")

    def __call__(self, x) -> Mat:
        x = self.algebra._check(x)
        m = Mat.zeros(self.rep_dim, self.rep_dim)
        for c, a in zip(x, self.images):
            if c:
                m = m + a * c
        return m

    def flat_matrix(self) -> Mat:
        """(rep_dim^2 x dim) matrix sending coordinates to the flattened image."""
        cols = [sum(im.rows, ()) for im in self.images]
        return Mat.from_columns(cols, nrows=self.rep_dim * self.rep_dim)


@dataclass(frozen=True)
class RepReport:
    homomorphism: bool
    faithful: bool
    failing_pair: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.homomorphism and self.faithful


def check_rep(r: MatrixRep) -> RepReport:
    L = r.algebra
    bad = None
    for i in range(L.dim):
        for j in range(i + 1, L.dim):
            a, b = r.images[i], r.images[j]
            if r(L.sc[i][j]) != a @ b - b @ a:
                bad = (i, j)
                break
        if bad:
            break
    faithful = L.dim == 0 or r.flat_matrix().rank() == L.dim
    return RepReport(bad is None, faithful, bad)


def sl2_defining_rep() -> MatrixRep:
    return MatrixRep(
        sl2(),
        2,
        (Mat([[0, 1], [0, 0]]), Mat([[0, 0], [1, 0]]), Mat([[1, 0], [0, -1]])),
    )


def killing_form(L: LieAlgebra) -> SymBilinearForm:
    ads = [L.adjoint(x) for x in L.basis()]
    n = L.dim
    return SymBilinearForm(Mat([[(ads[i] @ ads[j]).trace() for j in range(n)] for i in range(n)], ncols=n))


def trace_form(r: MatrixRep) -> SymBilinearForm:
    n = r.algebra.dim
    ims = r.images
    return SymBilinearForm(Mat([[(ims[i] @ ims[j]).trace() for j in range(n)] for i in range(n)], ncols=n))


def form_invariance_witness(L: LieAlgebra, gram: Mat):
    """First (i, j, k) with <[e_i,e_j],e_k> + <e_j,[e_i,e_k]> != 0, or None.

    Equivalently ad(e_i)^T G + G ad(e_i) = 0 for every i.
    """
    for i in range(L.dim):
        ad = L.adjoint(unit_vec(L.dim, i))
        m = ad.T @ gram + gram @ ad
        if not m.is_zero():
            j, k = next((j, k) for j in range(L.dim) for k in range(L.dim) if m[j, k])
            return (i, j, k)
    return None


def direct_sum(L1: LieAlgebra, L2: LieAlgebra) -> LieAlgebra:
    n1, n = L1.dim, L1.dim + L2.dim
    sc = [[zero_vec(n)] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            sc[i][j] = L1.sc[i][j] + zero_vec(L2.dim)
    for i in range(L2.dim):
        for j in range(L2.dim):
            sc[n1 + i][n1 + j] = zero_vec(n1) + L2.sc[i][j]
    labels = tuple(f"{a}_1" for a in L1.labels) + tuple(f"{a}_2" for a in L2.labels)
    return LieAlgebra(n, sc, labels)


@dataclass(frozen=True)
class MetrizedLieAlgebra:
    algebra: LieAlgebra
    metric: SymBilinearForm

    def __post_init__(self):
        if self.metric.dim != self.algebra.dim:
            raise LieAlgebraError("metric dimension differs from algebra dimension")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def validate(self):
        from .checks import Checks

        c = Checks()
        c.add("metric nondegenerate", self.metric.is_nondegenerate(), self.metric.kernel())
        w = form_invariance_witness(self.algebra, self.metric.gram)
        c.add("metric ad-invariant", w is None, w)
        j = check_jacobi(self.algebra)
        c.add("jacobi", j.ok, j.first_failing_triple)
        return c

    def perp(self, S: Subspace) -> Subspace:
        from .ratlin import orth_complement

        return orth_complement(S, self.metric)

    def is_lagrangian(self, S: Subspace) -> bool:
        return self.perp(S) == S


def opposite(M: MetrizedLieAlgebra) -> MetrizedLieAlgebra:
    return MetrizedLieAlgebra(M.algebra, -M.metric)


def metrized_direct_sum(M1: MetrizedLieAlgebra, M2: MetrizedLieAlgebra) -> MetrizedLieAlgebra:
    z12 = Mat.zeros(M1.dim, M2.dim)
    gram = Mat.block([[M1.metric.gram, z12], [z12.T, M2.metric.gram]])
    return MetrizedLieAlgebra(direct_sum(M1.algebra, M2.algebra), SymBilinearForm(gram))


@dataclass(frozen=True)
class Subquotient:
    """The Lie algebra c/i for an ideal i of a subalgebra c of L.

    ``projection`` maps ambient vectors of c to quotient coordinates;
    ``lift`` maps quotient coordinates back to ambient representatives.
    """

    algebra: LieAlgebra
    projection: Mat
    lift: Mat
    c: Subspace
    i: Subspace


def subquotient(L: LieAlgebra, c: Subspace, i: Subspace, labels=None) -> Subquotient:
    w = subalgebra_witness(L, c)
    if w is not None:
        raise LieAlgebraError(f"not a subalgebra: bracket {w[2]} leaves the subspace")
    if not i <= c:
        raise LieAlgebraError("the ideal is not contained in the subalgebra")
    for x in c.vectors():
        ad = L.adjoint(x)
        for y in i.vectors():
            if not i.contains(ad @ y):
                raise LieAlgebraError(f"not an ideal: [{x}, {y}] leaves it")
    coords = c.coordinate_map()
    incl = c.inclusion()
    i_c = span(c.dim, [coords @ v for v in i.vectors()])
    qs = quotient(c.dim, i_c)
    proj = qs.projection @ coords
    lift = incl @ qs.section
    m = qs.dim
    lifts = lift.columns()
    sc = [[proj @ L.bracket(lifts[a], lifts[b]) for b in range(m)] for a in range(m)]
    return Subquotient(LieAlgebra(m, sc, labels), proj, lift, c, i)
