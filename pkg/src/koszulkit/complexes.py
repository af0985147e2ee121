"""Bounded chain complexes over an additive closure and their homotopy category.

Complexes are cohomologically indexed (d^i: X^i -> X^{i+1}) with finitely
many nonzero terms.  The homotopy category is realized through explicit
linear algebra: chain-map spaces and null-homotopy spaces are assembled as
exact linear systems, so Hom groups, homotopy classes and minimal models
are all computed, never approximated.

Sign conventions (the underlying theory never fixes them):
  * shift:  X[n]^i = X^{i+n},  d_{X[n]} = (-1)^n d_X
  * cone:   cone(f)^i = X^{i+1} + Y^i with differential [[-d_X, 0], [f, d_Y]]
  * a termwise-split inclusion A >-> M with quotient B yields the
    distinguished triangle A -> M -> B -> A[1] whose connecting map is
    minus the off-diagonal block of d_M.

Distinguished triangles carry explicit certificates: every constructor
stores data whose verification consists of exact identities only (chain
conditions, cone comparisons with explicit homotopy inverses, transports
along witnessed homotopy equivalences).
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import Matrix
from .orlov import (
    AddMorphism,
    AddObject,
    ZERO_OBJECT,
    hom_basis,
    hom_dim_add,
)


class ComplexError(Exception):
    pass


class TriangleError(Exception):
    pass


class FillError(Exception):
    pass


# ------------------------------------------------------------------ complex


class Complex:
    """Bounded complex; ``terms[i]`` nonzero objects, ``diffs[i]`` nonzero d^i."""

    __slots__ = ("pres", "terms", "diffs")

    def __init__(self, pres, terms, diffs, check=True):
        self.pres = pres
        self.terms = {i: t for i, t in terms.items() if not t.is_zero}
        self.diffs = {}
        for i, d in diffs.items():
            if d is None or d.is_zero():
                continue
            if i not in self.terms or (i + 1) not in self.terms:
                raise ComplexError(f"differential d^{i} attached to a zero term")
            self.diffs[i] = d
        if check:
            for i, d in self.diffs.items():
                if d.source != self.terms[i] or d.target != self.terms[i + 1]:
                    raise ComplexError(f"differential d^{i} has wrong endpoints")
            for i in self.diffs:
                if i + 1 in self.diffs:
                    if not self.diffs[i + 1].compose(self.diffs[i]).is_zero():
                        raise ComplexError(f"d^{i+1} o d^{i} != 0")

    @staticmethod
    def zero(pres) -> "Complex":
        return Complex(pres, {}, {})

    @staticmethod
    def single(pres, x: AddObject, degree: int = 0) -> "Complex":
        return Complex(pres, {degree: x}, {})

    def term(self, i) -> AddObject:
        return self.terms.get(i, ZERO_OBJECT)

    def d(self, i) -> AddMorphism:
        if i in self.diffs:
            return self.diffs[i]
        return AddMorphism.zero(self.pres, self.term(i), self.term(i + 1))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self):
        return sorted(self.terms)

    def __eq__(self, other):
        return (isinstance(other, Complex) and self.pres is other.pres
                and self.terms == other.terms and self.diffs == other.diffs)

    def __repr__(self):
        if self.is_zero:
            return "Complex(0)"
        parts = [f"{i}:{'+'.join(self.term(i))}" for i in self.degrees()]
        return f"Complex({', '.join(parts)})"

    def shift(self, n: int) -> "Complex":
        terms = {i - n: t for i, t in self.terms.items()}
        sign = self.pres.field.one if n % 2 == 0 else self.pres.field.neg(self.pres.field.one)
        diffs = {i - n: d.scale(sign) for i, d in self.diffs.items()}
        return Complex(self.pres, terms, diffs, check=False)

    def support(self) -> frozenset:
        pts = set()
        for i, t in self.terms.items():
            for s in t:
                pts.add((i, self.pres.degree[s]))
        return frozenset(pts)


def shift(x: Complex, n: int) -> Complex:
    return x.shift(n)


def support(x: Complex) -> frozenset:
    return x.support()


def direct_sum(x: Complex, y: Complex):
    """x + y with the four canonical chain maps (ix, iy, px, py)."""
    pres = x.pres
    terms, diffs = {}, {}
    for i in set(x.terms) | set(y.terms):
        terms[i] = x.term(i).concat(y.term(i))
    for i in sorted(terms):
        if i + 1 not in terms:
            continue
        xs, ys = x.term(i), y.term(i)
        xt, yt = x.term(i + 1), y.term(i + 1)
        dx, dy = x.d(i), y.d(i)
        blocks = []
        for r in range(len(xt) + len(yt)):
            row = []
            for c in range(len(xs) + len(ys)):
                if r < len(xt) and c < len(xs):
                    row.append(dx.blocks[r][c])
                elif r >= len(xt) and c >= len(xs):
                    row.append(dy.blocks[r - len(xt)][c - len(xs)])
                else:
                    row.append(None)
            blocks.append(tuple(row))
        m = AddMorphism(pres, terms[i], terms[i + 1], tuple(blocks))
        if not m.is_zero():
            diffs[i] = m
    z = Complex(pres, terms, diffs, check=False)
    ix = {i: _inclusion(pres, x.term(i), z.term(i), 0) for i in x.terms}
    iy = {i: _inclusion(pres, y.term(i), z.term(i), len(x.term(i))) for i in y.terms}
    px = {i: _projection(pres, z.term(i), x.term(i), 0) for i in x.terms}
    py = {i: _projection(pres, z.term(i), y.term(i), len(x.term(i))) for i in y.terms}
    return (z,
            ChainMap(x, z, ix, check=False), ChainMap(y, z, iy, check=False),
            ChainMap(z, x, px, check=False), ChainMap(z, y, py, check=False))


def _inclusion(pres, sub: AddObject, whole: AddObject, offset: int) -> AddMorphism:
    blocks = []
    for i in range(len(whole)):
        row = []
        for j in range(len(sub)):
            if i == offset + j:
                row.append(_unit_coords(pres, sub[j]))
            else:
                row.append(None)
        blocks.append(tuple(row))
    return AddMorphism(pres, sub, whole, tuple(blocks))


def _projection(pres, whole: AddObject, quot: AddObject, offset: int) -> AddMorphism:
    blocks = []
    for i in range(len(quot)):
        row = []
        for j in range(len(whole)):
            if j == offset + i:
                row.append(_unit_coords(pres, quot[i]))
            else:
                row.append(None)
        blocks.append(tuple(row))
    return AddMorphism(pres, whole, quot, tuple(blocks))


def _unit_coords(pres, s):
    from .orlov import identity_label

    labels = pres.hom_labels(s, s)
    unit = identity_label(s)
    return tuple(pres.field.one if lab == unit else pres.field.zero for lab in labels)


def select_summands(pres, x: AddObject, positions) -> AddObject:
    return AddObject(tuple(x[p] for p in positions))


def restrict_blocks(m: AddMorphism, row_positions, col_positions) -> AddMorphism:
    src = select_summands(m.pres, m.source, col_positions)
    tgt = select_summands(m.pres, m.target, row_positions)
    blocks = tuple(
        tuple(m.blocks[r][c] for c in col_positions) for r in row_positions)
    return AddMorphism(m.pres, src, tgt, blocks)


# ---------------------------------------------------------------- chain maps


class ChainMap:
    __slots__ = ("source", "target", "comps")

    def __init__(self, source: Complex, target: Complex, comps, check=True):
        self.source = source
        self.target = target
        self.comps = {i: m for i, m in comps.items() if m is not None and not m.is_zero()}
        if check:
            for i, m in self.comps.items():
                if m.source != source.term(i) or m.target != target.term(i):
                    raise ComplexError(f"component {i} has wrong endpoints")
            for i in set(self.comps) | set(source.diffs):
                lhs = target.d(i).compose(self.component(i))
                rhs = self.component(i + 1).compose(source.d(i))
                if lhs != rhs:
                    raise ComplexError(f"not a chain map at degree {i}")

    @staticmethod
    def zero(source: Complex, target: Complex) -> "ChainMap":
        return ChainMap(source, target, {}, check=False)

    @staticmethod
    def identity(x: Complex) -> "ChainMap":
        return ChainMap(x, x, {i: AddMorphism.identity(x.pres, t) for i, t in x.terms.items()},
                        check=False)

    def component(self, i) -> AddMorphism:
        if i in self.comps:
            return self.comps[i]
        return AddMorphism.zero(self.source.pres, self.source.term(i), self.target.term(i))

    def is_zero(self) -> bool:
        return not self.comps

    def __eq__(self, other):
        return (isinstance(other, ChainMap) and self.source == other.source
                and self.target == other.target and self.comps == other.comps)

    def __repr__(self):
        return f"ChainMap({self.source!r} -> {self.target!r})"

    def compose(self, other: "ChainMap") -> "ChainMap":
        if other.target != self.source:
            raise ComplexError("compose: middle complexes differ")
        comps = {}
        for i in set(self.comps) & set(other.comps):
            comps[i] = self.comps[i].compose(other.comps[i])
        return ChainMap(other.source, self.target, comps, check=False)

    def add(self, other: "ChainMap") -> "ChainMap":
        comps = {}
        for i in set(self.comps) | set(other.comps):
            comps[i] = self.component(i).add(other.component(i))
        return ChainMap(self.source, self.target, comps, check=False)

    def sub(self, other: "ChainMap") -> "ChainMap":
        return self.add(other.scale(-1))

    def scale(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target,
                        {i: m.scale(c) for i, m in self.comps.items()}, check=False)

    def shift(self, n: int) -> "ChainMap":
        return ChainMap(self.source.shift(n), self.target.shift(n),
                        {i - n: m for i, m in self.comps.items()}, check=False)

    def verify(self) -> bool:
        for i in set(self.comps) | set(self.source.diffs):
            if self.target.d(i).compose(self.component(i)) != \
                    self.component(i + 1).compose(self.source.d(i)):
                return False
        return True


class Homotopy:
    """Degree -1 collection h^i: X^i -> Y^{i-1}."""

    __slots__ = ("source", "target", "comps")

    def __init__(self, source: Complex, target: Complex, comps):
        self.source = source
        self.target = target
        self.comps = {i: m for i, m in comps.items() if m is not None and not m.is_zero()}

    @staticmethod
    def zero(source, target) -> "Homotopy":
        return Homotopy(source, target, {})

    def component(self, i) -> AddMorphism:
        if i in self.comps:
            return self.comps[i]
        return AddMorphism.zero(self.source.pres, self.source.term(i), self.target.term(i - 1))

    def boundary(self) -> ChainMap:
        """delta(h) = d_Y o h + h o d_X, always a chain map."""
        comps = {}
        degs = set()
        for i in self.comps:
            degs.update((i, i - 1))
        for i in degs:
            m = self.target.d(i - 1).compose(self.component(i)).add(
                self.component(i + 1).compose(self.source.d(i)))
            comps[i] = m
        return ChainMap(self.source, self.target, comps, check=False)

    def add(self, other: "Homotopy") -> "Homotopy":
        comps = {}
        for i in set(self.comps) | set(other.comps):
            comps[i] = self.component(i).add(other.component(i))
        return Homotopy(self.source, self.target, comps)

    def scale(self, c) -> "Homotopy":
        return Homotopy(self.source, self.target,
                        {i: m.scale(c) for i, m in self.comps.items()})

    def conjugate(self, pre: ChainMap, post: ChainMap) -> "Homotopy":
        """post o h o pre as a homotopy pre.source -> post.target."""
        comps = {}
        for i in self.comps:
            comps[i] = post.component(i - 1).compose(self.comps[i]).compose(pre.component(i))
        return Homotopy(pre.source, post.target, comps)


# -------------------------------------------------------------- hom spaces


class HomSpace:
    """Hom_{K^b}(X, Y[k]) presented by explicit linear algebra.

    ``dimension`` is dim(chain maps) - dim(null-homotopic chain maps);
    ``basis`` carries chain-map representatives of a basis of the quotient.
    """

    def __init__(self, x: Complex, y: Complex, k: int = 0):
        self.x = x
        self.y = y
        self.k = k
        self.ys = y.shift(k)
        pres = x.pres
        fld = pres.field

        self.unknown_degs = [
            i for i in sorted(set(x.terms) & set(self.ys.terms))
            if hom_dim_add(pres, x.term(i), self.ys.term(i)) > 0
        ]
        self.offsets = {}
        pos = 0
        for i in self.unknown_degs:
            self.offsets[i] = pos
            pos += hom_dim_add(pres, x.term(i), self.ys.term(i))
        self.total = pos

        cons_degs = [
            i for i in sorted(x.terms)
            if (i + 1) in self.ys.terms and hom_dim_add(pres, x.term(i), self.ys.term(i + 1)) > 0
        ]
        crow = {}
        rpos = 0
        for i in cons_degs:
            crow[i] = rpos
            rpos += hom_dim_add(pres, x.term(i), self.ys.term(i + 1))
        cons = Matrix.zeros(fld, rpos, self.total)
        col = 0
        for i in self.unknown_degs:
            basis, _ = hom_basis(pres, x.term(i), self.ys.term(i))
            for b in basis:
                if i in crow:
                    vec = self.ys.d(i).compose(b).to_vector()
                    for r, v in enumerate(vec):
                        if v:
                            cons.data[crow[i] + r][col] = v
                if (i - 1) in crow:
                    vec = b.compose(x.d(i - 1)).to_vector()
                    for r, v in enumerate(vec):
                        if v:
                            cons.data[crow[i - 1] + r][col] = fld.neg(v)
                col += 1
        self._chain_kernel = cons.kernel_basis()

        # homotopy unknowns h^i: X^i -> Y[k]^{i-1}
        self.h_degs = [
            i for i in sorted(x.terms)
            if (i - 1) in self.ys.terms and hom_dim_add(pres, x.term(i), self.ys.term(i - 1)) > 0
        ]
        self.h_offsets = {}
        pos = 0
        for i in self.h_degs:
            self.h_offsets[i] = pos
            pos += hom_dim_add(pres, x.term(i), self.ys.term(i - 1))
        self.h_total = pos
        delta = Matrix.zeros(fld, self.total, self.h_total)
        col = 0
        for i in self.h_degs:
            basis, _ = hom_basis(pres, x.term(i), self.ys.term(i - 1))
            for b in basis:
                if i in self.offsets:
                    vec = self.ys.d(i - 1).compose(b).to_vector()
                    for r, v in enumerate(vec):
                        if v:
                            delta.data[self.offsets[i] + r][col] = v
                if (i - 1) in self.offsets:
                    vec = b.compose(x.d(i - 1)).to_vector()
                    for r, v in enumerate(vec):
                        if v:
                            delta.data[self.offsets[i - 1] + r][col] = v
                col += 1
        self._delta = delta

        nullity = self._chain_kernel.cols
        self._delta_rank = delta.rank()
        self.dimension = nullity - self._delta_rank

        self._basis_vectors = []
        if self.dimension:
            stacked = delta.hstack(self._chain_kernel)
            _, pivots, _ = stacked.rref()
            for p in pivots:
                if p >= delta.cols:
                    self._basis_vectors.append(self._chain_kernel.col(p - delta.cols))
        self.basis = [self._vector_to_map(v) for v in self._basis_vectors]

    # ------------------------------------------------------------ plumbing

    def _vector_to_map(self, vec) -> ChainMap:
        comps = {}
        for i in self.unknown_degs:
            off = self.offsets[i]
            dim = hom_dim_add(self.x.pres, self.x.term(i), self.ys.term(i))
            comps[i] = AddMorphism.from_vector(
                self.x.pres, self.x.term(i), self.ys.term(i), vec[off:off + dim])
        return ChainMap(self.x, self.ys, comps, check=False)

    def map_to_vector(self, f: ChainMap):
        fld = self.x.pres.field
        vec = [fld.zero] * self.total
        for i, m in f.comps.items():
            if i not in self.offsets:
                if not m.is_zero():
                    raise ComplexError("map has a component outside the hom window")
                continue
            off = self.offsets[i]
            for r, v in enumerate(m.to_vector()):
                vec[off + r] = v
        return vec

    def _vector_to_homotopy(self, vec) -> Homotopy:
        comps = {}
        for i in self.h_degs:
            off = self.h_offsets[i]
            dim = hom_dim_add(self.x.pres, self.x.term(i), self.ys.term(i - 1))
            comps[i] = AddMorphism.from_vector(
                self.x.pres, self.x.term(i), self.ys.term(i - 1), vec[off:off + dim])
        return Homotopy(self.x, self.ys, comps)

    def null_homotopy(self, f: ChainMap):
        """A homotopy h with f = delta(h), or None."""
        sol = self._delta.solve(self.map_to_vector(f))
        if sol is None:
            return None
        return self._vector_to_homotopy(sol)

    def express(self, f: ChainMap):
        """Coordinates of the class of f in ``basis``, or None if outside."""
        fld = self.x.pres.field
        if not self._basis_vectors:
            return [] if self.null_homotopy(f) is not None else None
        bmat = Matrix(fld, self.total, len(self._basis_vectors),
                      [[v[r] for v in self._basis_vectors] for r in range(self.total)])
        sol = bmat.hstack(self._delta).solve(self.map_to_vector(f))
        if sol is None:
            return None
        return sol[:len(self._basis_vectors)]


def hom_space(x: Complex, y: Complex, k: int = 0) -> HomSpace:
    return HomSpace(x, y, k)


def is_null_homotopic(f: ChainMap):
    return HomSpace(f.source, f.target, 0).null_homotopy(f)


class HomClass:
    """A morphism of the homotopy category: a chain-map representative."""

    __slots__ = ("rep",)

    def __init__(self, rep: ChainMap):
        self.rep = rep

    @property
    def source(self):
        return self.rep.source

    @property
    def target(self):
        return self.rep.target

    @staticmethod
    def zero(x, y) -> "HomClass":
        return HomClass(ChainMap.zero(x, y))

    @staticmethod
    def identity(x) -> "HomClass":
        return HomClass(ChainMap.identity(x))

    def is_zero(self) -> bool:
        return self.rep.is_zero() or is_null_homotopic(self.rep) is not None

    def __eq__(self, other):
        if not isinstance(other, HomClass):
            return NotImplemented
        if self.source != other.source or self.target != other.target:
            return False
        return self.rep.sub(other.rep).is_zero() or \
            is_null_homotopic(self.rep.sub(other.rep)) is not None

    def __repr__(self):
        return f"HomClass({self.rep!r})"

    def compose(self, other: "HomClass") -> "HomClass":
        return HomClass(self.rep.compose(other.rep))

    def add(self, other: "HomClass") -> "HomClass":
        return HomClass(self.rep.add(other.rep))

    def sub(self, other: "HomClass") -> "HomClass":
        return HomClass(self.rep.sub(other.rep))

    def scale(self, c) -> "HomClass":
        return HomClass(self.rep.scale(c))

    def shift(self, n) -> "HomClass":
        return HomClass(self.rep.shift(n))

    def inverse(self):
        """Two-sided inverse in K^b, or None: a joint linear solve."""
        return _invert_hom_class(self)


def _invert_hom_class(f: HomClass):
    x, y = f.source, f.target
    sp_back = HomSpace(y, x, 0)
    sp_yy = HomSpace(y, y, 0)
    sp_xx = HomSpace(x, x, 0)
    fld = x.pres.field
    # unknowns: g (chain maps y->x), h1 (homotopies on y), h2 (on x)
    cols = []
    nb = sp_back._chain_kernel.cols
    for cidx in range(nb):
        g = sp_back._vector_to_map(sp_back._chain_kernel.col(cidx))
        top = sp_yy.map_to_vector(f.rep.compose(g))
        bot = sp_xx.map_to_vector(g.compose(f.rep))
        cols.append(top + bot)
    for cidx in range(sp_yy._delta.cols):
        top = [sp_yy._delta.data[r][cidx] for r in range(sp_yy.total)]
        cols.append([fld.neg(v) for v in top] + [fld.zero] * sp_xx.total)
    for cidx in range(sp_xx._delta.cols):
        bot = [sp_xx._delta.data[r][cidx] for r in range(sp_xx.total)]
        cols.append([fld.zero] * sp_yy.total + [fld.neg(v) for v in bot])
    nrows = sp_yy.total + sp_xx.total
    mat = Matrix(fld, nrows, len(cols),
                 [[cols[c][r] for c in range(len(cols))] for r in range(nrows)])
    rhs = sp_yy.map_to_vector(ChainMap.identity(y)) + sp_xx.map_to_vector(ChainMap.identity(x))
    sol = mat.solve(rhs)
    if sol is None:
        return None
    gvec = [fld.zero] * sp_back.total
    for cidx in range(nb):
        c = sol[cidx]
        if c:
            col = sp_back._chain_kernel.col(cidx)
            gvec = [fld.add(a, fld.mul(c, b)) for a, b in zip(gvec, col)]
    return HomClass(sp_back._vector_to_map(gvec))


# ------------------------------------------------------------------- cones


def cone(f: ChainMap):
    """The cone Z with its canonical maps (Z, inc: Y->Z, proj: Z->X[1])."""
    x, y = f.source, f.target
    pres = x.pres
    fld = pres.field
    xs = x.shift(1)
    terms, diffs = {}, {}
    for i in set(xs.terms) | set(y.terms):
        terms[i] = xs.term(i).concat(y.term(i))
    for i in sorted(terms):
        if i + 1 not in terms:
            continue
        a, b = xs.term(i), y.term(i)
        at, bt = xs.term(i + 1), y.term(i + 1)
        dxs = xs.d(i)            # already carries the shift sign: -d_X
        dy = y.d(i)
        fcomp = f.component(i + 1)
        blocks = []
        for r in range(len(at) + len(bt)):
            row = []
            for c in range(len(a) + len(b)):
                if r < len(at) and c < len(a):
                    row.append(dxs.blocks[r][c])
                elif r >= len(at) and c < len(a):
                    row.append(fcomp.blocks[r - len(at)][c])
                elif r >= len(at) and c >= len(a):
                    row.append(dy.blocks[r - len(at)][c - len(a)])
                else:
                    row.append(None)
            blocks.append(tuple(row))
        m = AddMorphism(pres, terms[i], terms[i + 1], tuple(blocks))
        if not m.is_zero():
            diffs[i] = m
    z = Complex(pres, terms, diffs, check=False)
    inc = ChainMap(y, z, {i: _inclusion(pres, y.term(i), z.term(i), len(xs.term(i)))
                          for i in y.terms}, check=False)
    proj = ChainMap(z, xs, {i: _projection(pres, z.term(i), xs.term(i), 0)
                            for i in xs.terms}, check=False)
    return z, inc, proj


# --------------------------------------------------------------- triangles


@dataclass
class ChainIso:
    """Homotopy equivalence with explicit exactness witnesses.

    bwd o fwd differs from id by delta(h_src) (None means exact equality),
    and symmetrically for h_tgt.
    """

    fwd: ChainMap
    bwd: ChainMap
    h_src: Homotopy | None = None
    h_tgt: Homotopy | None = None

    @staticmethod
    def exact(fwd: ChainMap, bwd: ChainMap) -> "ChainIso":
        return ChainIso(fwd, bwd)

    @staticmethod
    def identity(x: Complex) -> "ChainIso":
        i = ChainMap.identity(x)
        return ChainIso(i, i)

    def inverse(self) -> "ChainIso":
        return ChainIso(self.bwd, self.fwd, self.h_tgt, self.h_src)

    def verify(self) -> bool:
        src, tgt = self.fwd.source, self.fwd.target
        if not (self.fwd.verify() and self.bwd.verify()):
            return False
        lhs = ChainMap.identity(src).sub(self.bwd.compose(self.fwd))
        ok1 = lhs.is_zero() if self.h_src is None else lhs == self.h_src.boundary()
        rhs = ChainMap.identity(tgt).sub(self.fwd.compose(self.bwd))
        ok2 = rhs.is_zero() if self.h_tgt is None else rhs == self.h_tgt.boundary()
        return ok1 and ok2


@dataclass
class _ConeWitness:
    pass


@dataclass
class _SplitWitness:
    sel_sub: dict     # degree -> positions of the subcomplex summands in M
    sel_quot: dict    # degree -> the complementary positions


@dataclass
class _RotateWitness:
    base: "Triangle"


@dataclass
class _ShiftWitness:
    base: "Triangle"
    n: int


@dataclass
class _TransportWitness:
    base: "Triangle"
    iso_x: ChainIso
    iso_y: ChainIso
    iso_z: ChainIso
    sq_f: Homotopy | None
    sq_g: Homotopy | None
    sq_h: Homotopy | None


class Triangle:
    """X -> Y -> Z -> X[1] with a distinguishedness certificate."""

    def __init__(self, x, y, z, f, g, h, witness):
        self.X, self.Y, self.Z = x, y, z
        self.f, self.g, self.h = f, g, h
        self.witness = witness

    def __repr__(self):
        return f"Triangle({self.X!r} -> {self.Y!r} -> {self.Z!r})"

    def maps(self):
        return self.f, self.g, self.h

    # ------------------------------------------------------------ builders

    @staticmethod
    def from_cone(f: ChainMap) -> "Triangle":
        z, inc, proj = cone(f)
        return Triangle(f.source, f.target, z, f, inc, proj, _ConeWitness())

    @staticmethod
    def from_termwise_split(m: Complex, sel_sub: dict, sel_quot: dict) -> "Triangle":
        pres = m.pres
        sub_terms, quot_terms = {}, {}
        for i in m.terms:
            ssel = sel_sub.get(i, ())
            qsel = sel_quot.get(i, ())
            if sorted(tuple(ssel) + tuple(qsel)) != list(range(len(m.term(i)))):
                raise TriangleError(f"split selections do not partition degree {i}")
            sub_terms[i] = select_summands(pres, m.term(i), ssel)
            quot_terms[i] = select_summands(pres, m.term(i), qsel)
        sub_diffs, quot_diffs, conn = {}, {}, {}
        for i, d in m.diffs.items():
            s0, s1 = sel_sub.get(i, ()), sel_sub.get(i + 1, ())
            q0, q1 = sel_quot.get(i, ()), sel_quot.get(i + 1, ())
            if not restrict_blocks(d, q1, s0).is_zero():
                raise TriangleError(f"differential maps the subcomplex outside itself at {i}")
            sub_diffs[i] = restrict_blocks(d, s1, s0)
            quot_diffs[i] = restrict_blocks(d, q1, q0)
            t = restrict_blocks(d, s1, q0)
            if not t.is_zero():
                conn[i] = t
        a_cx = Complex(pres, sub_terms, sub_diffs, check=False)
        b_cx = Complex(pres, quot_terms, quot_diffs, check=False)
        incl = ChainMap(a_cx, m, {
            i: _selection_inclusion(pres, a_cx.term(i), m.term(i), sel_sub.get(i, ()))
            for i in a_cx.terms}, check=False)
        proj = ChainMap(m, b_cx, {
            i: _selection_projection(pres, m.term(i), b_cx.term(i), sel_quot.get(i, ()))
            for i in b_cx.terms}, check=False)
        a1 = a_cx.shift(1)
        e = ChainMap(b_cx, a1, {
            i: AddMorphism(pres, b_cx.term(i), a1.term(i), conn[i].scale(-1).blocks)
            for i in conn}, check=False)
        return Triangle(a_cx, m, b_cx, incl, proj, e,
                        _SplitWitness(dict(sel_sub), dict(sel_quot)))

    def rotate(self) -> "Triangle":
        return Triangle(self.Y, self.Z, self.X.shift(1),
                        self.g, self.h, self.f.shift(1).scale(-1), _RotateWitness(self))

    def shift(self, n: int) -> "Triangle":
        sign = 1 if n % 2 == 0 else -1
        return Triangle(self.X.shift(n), self.Y.shift(n), self.Z.shift(n),
                        self.f.shift(n), self.g.shift(n), self.h.shift(n).scale(sign),
                        _ShiftWitness(self, n))

    @staticmethod
    def transport(base: "Triangle", iso_x: ChainIso | None,
                  iso_y: ChainIso | None, iso_z: ChainIso | None) -> "Triangle":
        iso_x = iso_x or ChainIso.identity(base.X)
        iso_y = iso_y or ChainIso.identity(base.Y)
        iso_z = iso_z or ChainIso.identity(base.Z)
        f2 = iso_y.fwd.compose(base.f).compose(iso_x.bwd)
        g2 = iso_z.fwd.compose(base.g).compose(iso_y.bwd)
        h2 = iso_x.fwd.shift(1).compose(base.h).compose(iso_z.bwd)
        # witnesses: f2 o fwd_x - fwd_y o f = -fwd_y f delta(h_src_x) etc.
        sq_f = _square_witness(iso_y.fwd.compose(base.f), iso_x)
        sq_g = _square_witness(iso_z.fwd.compose(base.g), iso_y)
        sq_h = _square_witness(iso_x.fwd.shift(1).compose(base.h), iso_z)
        return Triangle(iso_x.fwd.target, iso_y.fwd.target, iso_z.fwd.target,
                        f2, g2, h2,
                        _TransportWitness(base, iso_x, iso_y, iso_z, sq_f, sq_g, sq_h))

    # ---------------------------------------------------------- verification

    def verify(self) -> list:
        issues = []
        for name, m in (("f", self.f), ("g", self.g), ("h", self.h)):
            if not m.verify():
                issues.append(f"map {name} is not a chain map")
        w = self.witness
        if isinstance(w, _ConeWitness):
            z, inc, proj = cone(self.f)
            if self.Z != z or self.g != inc or self.h != proj:
                issues.append("cone witness: triangle is not the canonical cone triangle")
        elif isinstance(w, _SplitWitness):
            issues.extend(self._verify_split(w))
        elif isinstance(w, _RotateWitness):
            issues.extend(w.base.verify())
            expect = w.base.rotate()
            if (self.X, self.Y, self.Z) != (expect.X, expect.Y, expect.Z) or \
                    (self.f, self.g, self.h) != (expect.f, expect.g, expect.h):
                issues.append("rotation witness: maps do not match the rotated base")
        elif isinstance(w, _ShiftWitness):
            issues.extend(w.base.verify())
            expect = w.base.shift(w.n)
            if (self.f, self.g, self.h) != (expect.f, expect.g, expect.h):
                issues.append("shift witness: maps do not match the shifted base")
        elif isinstance(w, _TransportWitness):
            issues.extend(w.base.verify())
            for name, iso in (("X", w.iso_x), ("Y", w.iso_y), ("Z", w.iso_z)):
                if not iso.verify():
                    issues.append(f"transport witness: iso at {name} fails")
            checks = (
                (self.f.compose(w.iso_x.fwd), w.iso_y.fwd.compose(w.base.f), w.sq_f),
                (self.g.compose(w.iso_y.fwd), w.iso_z.fwd.compose(w.base.g), w.sq_g),
                (self.h.compose(w.iso_z.fwd), w.iso_x.fwd.shift(1).compose(w.base.h), w.sq_h),
            )
            for idx, (lhs, rhs, hom) in enumerate(checks):
                diff = lhs.sub(rhs)
                if hom is None:
                    if not diff.is_zero():
                        issues.append(f"transport witness: square {idx} not exact")
                elif diff != hom.boundary():
                    issues.append(f"transport witness: square {idx} homotopy wrong")
        else:
            issues.append("unknown witness")
        return issues

    def _verify_split(self, w: _SplitWitness) -> list:
        issues = []
        m = self.Y
        pres = m.pres
        # the stored maps must be the canonical selection maps
        for i in self.X.terms:
            if self.f.component(i) != _selection_inclusion(
                    pres, self.X.term(i), m.term(i), w.sel_sub.get(i, ())):
                issues.append(f"split witness: inclusion differs at {i}")
        for i in self.Z.terms:
            if self.g.component(i) != _selection_projection(
                    pres, m.term(i), self.Z.term(i), w.sel_quot.get(i, ())):
                issues.append(f"split witness: projection differs at {i}")
        for i, d in m.diffs.items():
            if not restrict_blocks(d, w.sel_quot.get(i + 1, ()), w.sel_sub.get(i, ())).is_zero():
                issues.append(f"split witness: subcomplex not preserved at {i}")
            expected = restrict_blocks(d, w.sel_sub.get(i + 1, ()), w.sel_quot.get(i, ())).scale(-1)
            got = self.h.component(i)
            if got.blocks != expected.blocks:
                issues.append(f"split witness: connecting map differs at {i}")
        if issues:
            return issues

        # explicit comparison with cone(f): C^k = A^{k+1} + M^k
        a_cx, b_cx = self.X, self.Z
        c_cx, inc_m, proj_a1 = cone(self.f)
        na = {k: len(a_cx.term(k + 1)) for k in c_cx.terms}

        def c_split(k):
            return list(range(na[k])), list(range(na[k], len(c_cx.term(k))))

        phi_comps, psi_comps, hh_comps, h3_comps = {}, {}, {}, {}
        for k in c_cx.terms:
            # phi: C -> B kills A[1] and projects M onto the quotient part
            bk = b_cx.term(k)
            blocks = []
            for r, brow in enumerate(w.sel_quot.get(k, ())):
                row = [None] * na[k]
                for c in range(len(m.term(k))):
                    row.append(_unit_coords(pres, bk[r]) if c == brow else None)
                blocks.append(tuple(row))
            phi_comps[k] = AddMorphism(pres, c_cx.term(k), bk, tuple(blocks))
        for k in b_cx.terms:
            # psi: B -> C is (e, inclusion)
            ek = self.h.component(k)
            jb = _selection_inclusion(pres, b_cx.term(k), m.term(k), w.sel_quot.get(k, ()))
            blocks = []
            for r in range(na[k]):
                blocks.append(tuple(ek.blocks[r]))
            for r in range(len(m.term(k))):
                blocks.append(tuple(jb.blocks[r]))
            psi_comps[k] = AddMorphism(pres, b_cx.term(k), c_cx.term(k), tuple(blocks))
        for k in c_cx.terms:
            # H: C^k -> C^{k-1}: A-part of M into the A[1]-slot
            if k - 1 not in c_cx.terms:
                continue
            src, tgt = c_cx.term(k), c_cx.term(k - 1)
            asel = w.sel_sub.get(k, ())
            blocks = [[None] * len(src) for _ in range(len(tgt))]
            for out_pos, m_pos in enumerate(asel):
                blocks[out_pos][na[k] + m_pos] = _unit_coords(pres, src[na[k] + m_pos])
            hh_comps[k] = AddMorphism(pres, src, tgt,
                                      tuple(tuple(rw) for rw in blocks))
        a1 = a_cx.shift(1)
        for k in c_cx.terms:
            # h3: C^k -> A[1]^{k-1} = A^k picks the A-part of M
            if k - 1 not in a1.terms:
                continue
            src = c_cx.term(k)
            tgt = a1.term(k - 1)
            asel = w.sel_sub.get(k, ())
            blocks = [[None] * len(src) for _ in range(len(tgt))]
            for out_pos, m_pos in enumerate(asel):
                blocks[out_pos][na[k] + m_pos] = _unit_coords(pres, src[na[k] + m_pos])
            h3_comps[k] = AddMorphism(pres, src, tgt, tuple(tuple(rw) for rw in blocks))

        phi = ChainMap(c_cx, b_cx, phi_comps, check=False)
        psi = ChainMap(b_cx, c_cx, psi_comps, check=False)
        if not phi.verify():
            issues.append("split witness: phi is not a chain map")
        if not psi.verify():
            issues.append("split witness: psi is not a chain map")
        if not phi.compose(psi).sub(ChainMap.identity(b_cx)).is_zero():
            issues.append("split witness: phi o psi != id")
        hh = Homotopy(c_cx, c_cx, hh_comps)
        if ChainMap.identity(c_cx).sub(psi.compose(phi)) != hh.boundary():
            issues.append("split witness: psi o phi homotopy fails")
        if not phi.compose(inc_m).sub(self.g).is_zero():
            issues.append("split witness: phi o inc != projection")
        h3 = Homotopy(c_cx, a1, h3_comps)
        if proj_a1.sub(self.h.compose(phi)) != h3.boundary():
            issues.append("split witness: third-map comparison homotopy fails")
        return issues


def _selection_inclusion(pres, sub: AddObject, whole: AddObject, positions) -> AddMorphism:
    blocks = [[None] * len(sub) for _ in range(len(whole))]
    for j, p in enumerate(positions):
        blocks[p][j] = _unit_coords(pres, sub[j])
    return AddMorphism(pres, sub, whole, tuple(tuple(r) for r in blocks))


def _selection_projection(pres, whole: AddObject, quot: AddObject, positions) -> AddMorphism:
    blocks = [[None] * len(whole) for _ in range(len(quot))]
    for i, p in enumerate(positions):
        blocks[i][p] = _unit_coords(pres, quot[i])
    return AddMorphism(pres, whole, quot, tuple(tuple(r) for r in blocks))


def _square_witness(tail: ChainMap, iso: ChainIso):
    """Homotopy witness for (tail o bwd) o fwd - tail, from the iso witness."""
    if iso.h_src is None:
        return None
    return iso.h_src.conjugate(ChainMap.identity(iso.fwd.source), tail).scale(-1)


# ------------------------------------------------------------ minimal model


def minimal_model(x: Complex):
    """Strip invertible differential blocks; returns (X_min, iso X ~ X_min).

    The iso satisfies fwd o bwd = id exactly on the minimal side and
    id - bwd o fwd = delta(h) with the accumulated homotopy on the source.
    """
    pres = x.pres
    fld = pres.field
    cur = x
    fwd = ChainMap.identity(x)
    bwd = ChainMap.identity(x)
    hom = Homotopy.zero(x, x)

    while True:
        pivot = _find_pivot(cur)
        if pivot is None:
            break
        i, r, c = pivot
        d = cur.d(i)
        src, tgt = cur.term(i), cur.term(i + 1)
        phi = d.blocks[r][c][_unit_index(pres, src[c])]
        phi_inv = fld.inv(phi)
        cols_keep = [j for j in range(len(src)) if j != c]
        rows_keep = [j for j in range(len(tgt)) if j != r]
        beta = restrict_blocks(d, [r], cols_keep)        # A' -> B
        gamma = restrict_blocks(d, rows_keep, [c])       # A -> B'
        delta_blk = restrict_blocks(d, rows_keep, cols_keep)
        corr = gamma.compose(beta).scale(fld.neg(phi_inv))
        new_d_i = delta_blk.add(corr)

        new_terms = dict(cur.terms)
        new_terms[i] = select_summands(pres, src, cols_keep)
        new_terms[i + 1] = select_summands(pres, tgt, rows_keep)
        new_diffs = dict(cur.diffs)
        if new_d_i.is_zero():
            new_diffs.pop(i, None)
        else:
            new_diffs[i] = new_d_i
        if i - 1 in cur.diffs:
            nd = restrict_blocks(cur.d(i - 1), cols_keep, range(len(cur.term(i - 1))))
            if nd.is_zero():
                new_diffs.pop(i - 1, None)
            else:
                new_diffs[i - 1] = nd
        if i + 1 in cur.diffs:
            nd = restrict_blocks(cur.d(i + 1), range(len(cur.term(i + 2))), rows_keep)
            if nd.is_zero():
                new_diffs.pop(i + 1, None)
            else:
                new_diffs[i + 1] = nd
        nxt = Complex(pres, new_terms, new_diffs, check=False)

        # projection pi: cur -> nxt and inclusion io: nxt -> cur
        pi_comps = {k: AddMorphism.identity(pres, t) for k, t in nxt.terms.items()}
        pi_comps[i] = _selection_projection(pres, src, nxt.term(i), cols_keep)
        pi_i1 = _selection_projection(pres, tgt, nxt.term(i + 1), rows_keep)
        corr_m = gamma.scale(fld.neg(phi_inv))           # -gamma phi^-1 : B -> B'
        pi_comps[i + 1] = pi_i1.add(_embed_single_cols(pres, tgt, nxt.term(i + 1), [r], corr_m))
        io_comps = {k: AddMorphism.identity(pres, t) for k, t in nxt.terms.items()}
        io_i = _selection_inclusion(pres, nxt.term(i), src, cols_keep)
        corr_i = beta.scale(fld.neg(phi_inv))            # -phi^-1 beta : A' -> A
        io_comps[i] = io_i.add(_embed_single_rows(pres, nxt.term(i), src, [c], corr_i))
        io_comps[i + 1] = _selection_inclusion(pres, nxt.term(i + 1), tgt, rows_keep)
        pi = ChainMap(cur, nxt, pi_comps, check=False)
        io = ChainMap(nxt, cur, io_comps, check=False)

        hstep = Homotopy(cur, cur, {
            i + 1: AddMorphism.single(pres, tgt, src, c, r,
                                      tuple(phi_inv if k == _unit_index(pres, src[c]) else fld.zero
                                            for k in range(pres.hom_dim(tgt[r], src[c]))))
        })
        hom = hom.add(hstep.conjugate(fwd, bwd))
        fwd = pi.compose(fwd)
        bwd = bwd.compose(io)
        cur = nxt

    return cur, ChainIso(fwd, bwd, h_src=hom if hom.comps else None, h_tgt=None)


def _unit_index(pres, s):
    from .orlov import identity_label

    return pres.hom_labels(s, s).index(identity_label(s))


def _find_pivot(x: Complex):
    pres = x.pres
    for i in sorted(x.diffs):
        d = x.diffs[i]
        for r, row in enumerate(d.blocks):
            for c, blk in enumerate(row):
                if blk is None:
                    continue
                if d.source[c] == d.target[r] and blk[_unit_index(pres, d.source[c])]:
                    return (i, r, c)
    return None


def _embed_single_cols(pres, big_src: AddObject, tgt: AddObject, src_positions, small: AddMorphism):
    """Morphism big_src -> tgt that is ``small`` on the listed source columns."""
    blocks = [[None] * len(big_src) for _ in range(len(tgt))]
    for jj, p in enumerate(src_positions):
        for rr in range(len(tgt)):
            blocks[rr][p] = small.blocks[rr][jj]
    return AddMorphism(pres, big_src, tgt, tuple(tuple(r) for r in blocks))


def _embed_single_rows(pres, src: AddObject, big_tgt: AddObject, tgt_positions, small: AddMorphism):
    """Morphism src -> big_tgt that is ``small`` into the listed target rows."""
    blocks = [[None] * len(src) for _ in range(len(big_tgt))]
    for ii, p in enumerate(tgt_positions):
        for cc in range(len(src)):
            blocks[p][cc] = small.blocks[ii][cc]
    return AddMorphism(pres, src, big_tgt, tuple(tuple(r) for r in blocks))


# ------------------------------------------------- homogeneous cokernels


@dataclass
class HomogeneousCokernel:
    quotient: AddObject
    q: AddMorphism            # B -> Q
    u: AddMorphism            # Q_perp + Q -> B, iso
    u_inv: AddMorphism
    perp: AddObject


def homogeneous_cokernel(f: AddMorphism) -> HomogeneousCokernel:
    """Universal same-degree quotient q: B -> Q with q o f = 0.

    Requires the target homogeneous; built from the kernels of the pairing
    Hom(B, S) -> Hom(A, S) for each indecomposable S of that degree.
    """
    pres = f.pres
    fld = pres.field
    b = f.target
    degs = set(b.degrees(pres))
    if len(degs) > 1:
        raise ComplexError("homogeneous_cokernel: target is not homogeneous")
    if not b.summands:
        return HomogeneousCokernel(ZERO_OBJECT, AddMorphism.zero(pres, b, ZERO_OBJECT),
                                   AddMorphism.zero(pres, ZERO_OBJECT, b),
                                   AddMorphism.zero(pres, b, ZERO_OBJECT), ZERO_OBJECT)

    order = sorted(set(b.summands))
    q_rows, perp_rows = [], []
    q_ids, perp_ids = [], []
    for s in order:
        basis_bs, dim_bs = hom_basis(pres, b, AddObject((s,)))
        if dim_bs == 0:
            continue
        basis_as, dim_as = hom_basis(pres, f.source, AddObject((s,)))
        cols = []
        for g in basis_bs:
            comp = g.compose(f)
            cols.append(comp.to_vector())
        pairing = Matrix(fld, dim_as, dim_bs,
                         [[cols[c][r] for c in range(dim_bs)] for r in range(dim_as)])
        ker = pairing.kernel_basis() if dim_as else Matrix.identity(fld, dim_bs)
        kvecs = [ker.col(j) for j in range(ker.cols)]
        # complete the kernel rows to a basis of Hom(B, S)
        kmat = Matrix(fld, dim_bs, len(kvecs), [[v[r] for v in kvecs] for r in range(dim_bs)])
        full = kmat.hstack(Matrix.identity(fld, dim_bs))
        _, pivots, _ = full.rref()
        extra = [p - len(kvecs) for p in pivots if p >= len(kvecs)]
        for v in kvecs:
            q_rows.append((s, v, basis_bs))
            q_ids.append(s)
        for e in extra:
            v = [fld.one if r == e else fld.zero for r in range(dim_bs)]
            perp_rows.append((s, v, basis_bs))
            perp_ids.append(s)

    quotient = AddObject(tuple(q_ids))
    perp = AddObject(tuple(perp_ids))

    def assemble(rows, tgt):
        blocks = []
        for (s, vec, basis_bs) in rows:
            m = AddMorphism.zero(pres, b, AddObject((s,)))
            for cf, bas in zip(vec, basis_bs):
                if cf:
                    m = m.add(bas.scale(cf))
            blocks.append(m.blocks[0])
        return AddMorphism(pres, b, tgt, tuple(blocks))

    q = assemble(q_rows, quotient)
    stacked = assemble(perp_rows + q_rows, perp.concat(quotient))
    u_inv = stacked                                     # B -> Q_perp + Q
    u = _invert_iso(u_inv)
    return HomogeneousCokernel(quotient, q, u, u_inv, perp)


def _invert_iso(m: AddMorphism) -> AddMorphism:
    """Inverse of an iso between same-length homogeneous objects by rows."""
    from .orlov import invert_endomorphism

    pres = m.pres
    if sorted(m.source.summands) != sorted(m.target.summands):
        raise ComplexError("cannot invert: summand multisets differ")
    perm = _match_permutation(m.source, m.target)
    # write m = e o p where p permutes source into target order
    pm = AddMorphism(pres, m.source, m.target, tuple(
        tuple(_unit_coords(pres, m.source[j]) if perm[j] == i else None
              for j in range(len(m.source)))
        for i in range(len(m.target))))
    pinv = AddMorphism(pres, m.target, m.source, tuple(
        tuple(_unit_coords(pres, m.target[j]) if perm[i] == j else None
              for j in range(len(m.target)))
        for i in range(len(m.source))))
    endo = m.compose(pinv)
    endo_inv = invert_endomorphism(endo)
    if endo_inv is None:
        raise ComplexError("morphism is not invertible")
    out = pinv.compose(endo_inv)
    if m.compose(out) != AddMorphism.identity(pres, m.target) or \
            out.compose(m) != AddMorphism.identity(pres, m.source):
        raise ComplexError("inverse verification failed")
    return out


def _match_permutation(src: AddObject, tgt: AddObject):
    used = [False] * len(tgt)
    perm = {}
    for j, s in enumerate(src):
        for i, t in enumerate(tgt):
            if not used[i] and s == t:
                used[i] = True
                perm[j] = i
                break
    return perm


def coker_idempotent(f: AddMorphism) -> AddMorphism:
    """Idempotent theta on the homogeneous target with g theta = g iff g f = 0."""
    hc = homogeneous_cokernel(f)
    pres = f.pres
    inc_q = _inclusion(pres, hc.quotient, hc.perp.concat(hc.quotient), len(hc.perp))
    return hc.u.compose(inc_q).compose(hc.q)


# ------------------------------------------------------------ top extraction


LEX = "lexicographic order on (homological degree, generator degree)"


def lex_max(points):
    return max(points)


@dataclass
class TopExtraction:
    P: Complex
    Y: Complex
    delta: ChainMap          # Y[-1] -> P, cone(delta) = X up to reordering
    triangle: Triangle       # P -> X -> Y -> P[1]
    reorder: ChainMap        # cone(delta) -> X, a permutation of summands
    reorder_inv: ChainMap


def _reorder_maps(x: Complex, cone_cx: Complex, sel_quot, sel_sub):
    """Permutation isos cone(delta) <-> x: quotient slots first, then top."""
    pres = x.pres
    fwd_comps, bwd_comps = {}, {}
    for k in x.terms:
        order = list(sel_quot.get(k, ())) + list(sel_sub.get(k, ()))
        src = cone_cx.term(k)
        tgt = x.term(k)
        fwd = [[None] * len(src) for _ in range(len(tgt))]
        bwd = [[None] * len(tgt) for _ in range(len(src))]
        for slot, xpos in enumerate(order):
            fwd[xpos][slot] = _unit_coords(pres, src[slot])
            bwd[slot][xpos] = _unit_coords(pres, src[slot])
        fwd_comps[k] = AddMorphism(pres, src, tgt, tuple(tuple(r) for r in fwd))
        bwd_comps[k] = AddMorphism(pres, tgt, src, tuple(tuple(r) for r in bwd))
    return (ChainMap(cone_cx, x, fwd_comps, check=False),
            ChainMap(x, cone_cx, bwd_comps, check=False))


def top_extraction(x: Complex, sigma=None) -> TopExtraction:
    """Split off the lex-largest support stratum as a one-term complex."""
    pres = x.pres
    supp = x.support()
    if sigma is not None:
        sigma = frozenset(sigma)
        if not supp <= sigma:
            raise ComplexError("support is not contained in the given region")
    else:
        sigma = supp
    if not sigma or not supp:
        sel_sub = {i: () for i in x.terms}
        sel_quot = {i: tuple(range(len(x.term(i)))) for i in x.terms}
        tri = Triangle.from_termwise_split(x, sel_sub, sel_quot)
        delta = ChainMap.zero(tri.Z.shift(-1), tri.X)
        cone_cx, _, _ = cone(delta)
        fwd, bwd = _reorder_maps(x, cone_cx, sel_quot, sel_sub)
        return TopExtraction(tri.X, tri.Z, delta, tri, fwd, bwd)
    i, j = lex_max(sigma)
    if x.term(i + 1) != ZERO_OBJECT:
        raise ComplexError("support exceeds the top stratum of the region")
    top_pos = tuple(p for p, s in enumerate(x.term(i)) if pres.degree[s] == j)
    sel_sub = {k: (top_pos if k == i else ()) for k in x.terms}
    sel_quot = {k: tuple(p for p in range(len(x.term(k))) if k != i or p not in top_pos)
                for k in x.terms}
    tri = Triangle.from_termwise_split(x, sel_sub, sel_quot)
    p_cx, y_cx = tri.X, tri.Z
    delta_comps = {}
    if i - 1 in x.diffs:
        blk = restrict_blocks(x.d(i - 1), top_pos, sel_quot[i - 1])
        if not blk.is_zero():
            ys = y_cx.shift(-1)
            delta_comps[i] = AddMorphism(pres, ys.term(i), p_cx.term(i), blk.blocks)
    delta = ChainMap(y_cx.shift(-1), p_cx, delta_comps, check=False)
    cone_cx, _, _ = cone(delta)
    fwd, bwd = _reorder_maps(x, cone_cx, sel_quot, sel_sub)
    return TopExtraction(p_cx, y_cx, delta, tri, fwd, bwd)


# -------------------------------------------------------- square completion


def complete_square(f: ChainMap, i2: ChainMap, p: ChainMap, q: ChainMap, h: Homotopy | None = None):
    """Cone functoriality: r = [[p[1], 0], [h, q]]: cone(f) -> cone(i2).

    Requires q o f homotopic to i2 o p; the homotopy is solved if absent.
    Returns (r, homotopy used).
    """
    if h is None:
        diff = q.compose(f).sub(i2.compose(p))
        h = is_null_homotopic(diff)
        if h is None:
            raise FillError("square does not commute up to homotopy")
    zf, inc_f, proj_f = cone(f)
    zi, inc_i, proj_i = cone(i2)
    pres = f.source.pres
    p1 = p.shift(1)
    comps = {}
    for k in zf.terms:
        src = zf.term(k)
        tgt = zi.term(k)
        nsa = len(f.source.shift(1).term(k))
        nta = len(i2.source.shift(1).term(k))
        blocks = [[None] * len(src) for _ in range(len(tgt))]
        pm = p1.component(k)
        hm = h.component(k + 1)   # X^{k+1} -> Y'^{k}
        qm = q.component(k)
        for r in range(len(tgt)):
            for c in range(len(src)):
                if r < nta and c < nsa:
                    blocks[r][c] = pm.blocks[r][c]
                elif r >= nta and c < nsa:
                    blocks[r][c] = hm.blocks[r - nta][c]
                elif r >= nta and c >= nsa:
                    blocks[r][c] = qm.blocks[r - nta][c - nsa]
        m = AddMorphism(pres, src, tgt, tuple(tuple(rw) for rw in blocks))
        if not m.is_zero():
            comps[k] = m
    r = ChainMap(zf, zi, comps)
    return r, h


# --------------------------------------------------------------- unique fill


@dataclass
class FillReport:
    q: HomClass | None
    homogeneous_dimension: int
    unique: bool


def unique_fill(t1: Triangle, t2: Triangle, p: HomClass, r: HomClass) -> FillReport:
    """Solve for q: X -> X' completing a morphism of extraction triangles.

    Returns the fill together with the dimension of the space of homogeneous
    fills modulo null-homotopy; the hypotheses of the uniqueness lemma hold
    exactly when that dimension is 0.
    """
    x, x2 = t1.Y, t2.Y
    f1, g1 = t1.f, t1.g
    f2, g2 = t2.f, t2.g
    pres = x.pres
    fld = pres.field
    sp_q = HomSpace(x, x2, 0)
    sp_pf = HomSpace(t1.X, x2, 0)      # P -> X'
    sp_gy = HomSpace(x, t2.Z, 0)       # X -> Y'

    cols = []
    nq = sp_q._chain_kernel.cols
    for cidx in range(nq):
        qc = sp_q._vector_to_map(sp_q._chain_kernel.col(cidx))
        top = sp_pf.map_to_vector(qc.compose(f1.rep if isinstance(f1, HomClass) else f1))
        bot = sp_gy.map_to_vector((g2.rep if isinstance(g2, HomClass) else g2).compose(qc))
        cols.append(top + bot)
    for cidx in range(sp_pf._delta.cols):
        top = [fld.neg(sp_pf._delta.data[rr][cidx]) for rr in range(sp_pf.total)]
        cols.append(top + [fld.zero] * sp_gy.total)
    for cidx in range(sp_gy._delta.cols):
        bot = [fld.neg(sp_gy._delta.data[rr][cidx]) for rr in range(sp_gy.total)]
        cols.append([fld.zero] * sp_pf.total + bot)
    nrows = sp_pf.total + sp_gy.total
    mat = Matrix(fld, nrows, len(cols),
                 [[cols[c][rr] for c in range(len(cols))] for rr in range(nrows)])
    rhs = sp_pf.map_to_vector(f2.compose(p.rep)) + sp_gy.map_to_vector(r.rep.compose(g1))

    # homogeneous solution space, projected to q modulo null-homotopies
    kern = mat.kernel_basis()
    qpart_cols = []
    for jj in range(kern.cols):
        col = kern.col(jj)
        gvec = [fld.zero] * sp_q.total
        for cidx in range(nq):
            cval = col[cidx]
            if cval:
                base = sp_q._chain_kernel.col(cidx)
                gvec = [fld.add(a, fld.mul(cval, b)) for a, b in zip(gvec, base)]
        qpart_cols.append(gvec)
    if qpart_cols:
        qmat = Matrix(fld, sp_q.total, len(qpart_cols),
                      [[v[rr] for v in qpart_cols] for rr in range(sp_q.total)])
        joint = sp_q._delta.hstack(qmat)
        hdim = joint.rank() - sp_q._delta_rank
    else:
        hdim = 0

    sol = mat.solve(rhs)
    if sol is None:
        return FillReport(None, hdim, hdim == 0)
    gvec = [fld.zero] * sp_q.total
    for cidx in range(nq):
        cval = sol[cidx]
        if cval:
            base = sp_q._chain_kernel.col(cidx)
            gvec = [fld.add(a, fld.mul(cval, b)) for a, b in zip(gvec, base)]
    return FillReport(HomClass(sp_q._vector_to_map(gvec)), hdim, hdim == 0)
