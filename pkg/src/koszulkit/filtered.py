"""Finite decreasing filtrations over the additive closure.

A filtered object is a sequence of objects with split inclusions carrying
explicit retraction witnesses, constant below some index and zero above
another.  The module realizes the reindexing functor, the constant
embedding, the canonical morphism into the reindexed object, the split
decomposition into the parts above and below the cut, the Hom-space
comparisons along the canonical morphism, and the termwise triangle for
complexes of filtered objects.  Everything is verified exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import Matrix
from .orlov import AddMorphism, AddObject, ZERO_OBJECT, hom_basis, hom_dim_add, split_idempotent


class FilteredError(Exception):
    pass


class FilteredObject:
    """Sequence X_i with split inclusions e_i: X_i -> X_{i-1}.

    ``terms`` covers lo..hi; X_i = X_lo with identity inclusions for
    i <= lo and X_i = 0 for i > hi.  ``incl``/``retr`` hold e_i and a
    retraction r_i with r_i e_i = id for lo < i <= hi.
    """

    def __init__(self, pres, lo, hi, terms, incl, retr, check=True):
        self.pres = pres
        self.lo = lo
        self.hi = hi
        self.terms = dict(terms)
        self.incl = dict(incl)
        self.retr = dict(retr)
        if check:
            self.validate()

    def validate(self):
        if self.lo > self.hi + 1:
            raise FilteredError("empty window")
        for i in range(self.lo, self.hi + 1):
            if i not in self.terms:
                raise FilteredError(f"missing term at {i}")
        for i in range(self.lo + 1, self.hi + 1):
            e = self.incl.get(i)
            r = self.retr.get(i)
            if e is None or r is None:
                raise FilteredError(f"missing inclusion or retraction at {i}")
            if e.source != self.terms[i] or e.target != self.terms[i - 1]:
                raise FilteredError(f"inclusion at {i} has wrong endpoints")
            if r.compose(e) != AddMorphism.identity(self.pres, self.terms[i]):
                raise FilteredError(f"retraction fails at {i}")

    @staticmethod
    def zero(pres) -> "FilteredObject":
        return FilteredObject(pres, 0, 0, {0: ZERO_OBJECT}, {}, {}, check=False)

    def term(self, i) -> AddObject:
        if i > self.hi:
            return ZERO_OBJECT
        if i < self.lo:
            return self.terms[self.lo]
        return self.terms[i]

    def incl_map(self, i) -> AddMorphism:
        """e_i: X_i -> X_{i-1}; identity below lo, zero above hi."""
        if i <= self.lo:
            return AddMorphism.identity(self.pres, self.term(i))
        if i > self.hi:
            return AddMorphism.zero(self.pres, ZERO_OBJECT, self.term(i - 1))
        return self.incl[i]

    def retr_map(self, i) -> AddMorphism:
        if i <= self.lo:
            return AddMorphism.identity(self.pres, self.term(i))
        if i > self.hi:
            return AddMorphism.zero(self.pres, self.term(i - 1), ZERO_OBJECT)
        return self.retr[i]

    @property
    def is_zero(self):
        return all(self.term(i).is_zero for i in range(self.lo, self.hi + 1))

    def __eq__(self, other):
        if not isinstance(other, FilteredObject):
            return NotImplemented
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        for i in range(lo, hi + 1):
            if self.term(i) != other.term(i):
                return False
            if i > lo and self.incl_map(i) != other.incl_map(i):
                return False
        return True

    def __repr__(self):
        parts = [f"{i}:{'+'.join(self.term(i)) or '0'}" for i in range(self.lo, self.hi + 1)]
        return f"FilteredObject({', '.join(parts)})"

    def is_ge(self, n) -> bool:
        """Constant with identity inclusions at and below n."""
        for i in range(min(n, self.lo), n + 1):
            if self.term(i) != self.term(n):
                return False
        for i in range(self.lo + 1, n + 1):
            if self.incl_map(i) != AddMorphism.identity(self.pres, self.term(i)):
                return False
        return True

    def is_le(self, n) -> bool:
        return all(self.term(i).is_zero for i in range(n + 1, self.hi + 1))


class FilteredMorphism:
    """Componentwise morphism commuting with the inclusions."""

    def __init__(self, source: FilteredObject, target: FilteredObject, comps,
                 check=True):
        self.source = source
        self.target = target
        self.lo = min(source.lo, target.lo)
        self.hi = max(source.hi, target.hi)
        self.comps = {}
        for i in range(self.lo, self.hi + 1):
            m = comps.get(i)
            if m is None:
                m = AddMorphism.zero(source.pres, source.term(i), target.term(i))
            self.comps[i] = m
        if check:
            self.validate()

    def validate(self):
        for i in range(self.lo, self.hi + 1):
            m = self.comps[i]
            if m.source != self.source.term(i) or m.target != self.target.term(i):
                raise FilteredError(f"component at {i} has wrong endpoints")
        for i in range(self.lo + 1, self.hi + 2):
            lhs = self.component(i - 1).compose(self.source.incl_map(i))
            rhs = self.target.incl_map(i).compose(self.component(i))
            if lhs != rhs:
                raise FilteredError(f"morphism does not respect inclusions at {i}")

    def component(self, i) -> AddMorphism:
        if i > self.hi:
            return AddMorphism.zero(self.source.pres, self.source.term(i),
                                    self.target.term(i))
        if i < self.lo:
            return self.comps[self.lo]
        return self.comps[i]

    @staticmethod
    def zero(source, target) -> "FilteredMorphism":
        return FilteredMorphism(source, target, {}, check=False)

    @staticmethod
    def identity(x: FilteredObject) -> "FilteredMorphism":
        return FilteredMorphism(x, x, {
            i: AddMorphism.identity(x.pres, x.term(i))
            for i in range(x.lo, x.hi + 1)}, check=False)

    def __eq__(self, other):
        if not isinstance(other, FilteredMorphism):
            return NotImplemented
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return all(self.component(i) == other.component(i) for i in range(lo, hi + 1))

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.comps.values())

    def compose(self, other: "FilteredMorphism") -> "FilteredMorphism":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return FilteredMorphism(other.source, self.target, {
            i: self.component(i).compose(other.component(i)) for i in range(lo, hi + 1)},
            check=False)

    def add(self, other: "FilteredMorphism") -> "FilteredMorphism":
        lo = min(self.lo, other.lo)
        hi = max(self.hi, other.hi)
        return FilteredMorphism(self.source, self.target, {
            i: self.component(i).add(other.component(i)) for i in range(lo, hi + 1)},
            check=False)

    def scale(self, c) -> "FilteredMorphism":
        return FilteredMorphism(self.source, self.target,
                                {i: m.scale(c) for i, m in self.comps.items()}, check=False)


# ----------------------------------------------------------- basic functors


def s_shift(x: FilteredObject, n: int = 1) -> FilteredObject:
    """Reindex: s(X)_i = X_{i-1} (n-fold)."""
    terms = {i + n: x.term(i) for i in range(x.lo, x.hi + 1)}
    incl = {i + n: x.incl[i] for i in x.incl}
    retr = {i + n: x.retr[i] for i in x.retr}
    return FilteredObject(x.pres, x.lo + n, x.hi + n, terms, incl, retr, check=False)


def s_shift_morphism(f: FilteredMorphism, n: int = 1) -> FilteredMorphism:
    return FilteredMorphism(s_shift(f.source, n), s_shift(f.target, n),
                            {i + n: m for i, m in f.comps.items()}, check=False)


def j_embed(pres, a: AddObject) -> FilteredObject:
    """Constant at and below index 0, zero above."""
    return FilteredObject(pres, 0, 0, {0: a}, {}, {}, check=False)


def alpha(x: FilteredObject) -> FilteredMorphism:
    """The canonical morphism X -> s(X) with components e_i."""
    sx = s_shift(x)
    comps = {}
    for i in range(min(x.lo, sx.lo), max(x.hi, sx.hi) + 1):
        comps[i] = x.incl_map(i)
    return FilteredMorphism(x, sx, comps)


# ------------------------------------------------------------- hom spaces


class FilteredHomSpace:
    def __init__(self, x: FilteredObject, y: FilteredObject):
        self.x = x
        self.y = y
        pres = x.pres
        fld = pres.field
        lo = min(x.lo, y.lo)
        hi = max(x.hi, y.hi)
        self.window = (lo, hi)
        degs = list(range(lo, hi + 1))
        self.offsets = {}
        pos = 0
        for i in degs:
            self.offsets[i] = pos
            pos += hom_dim_add(pres, x.term(i), y.term(i))
        total = pos
        rows = 0
        rowoff = {}
        for i in range(lo + 1, hi + 1):
            rowoff[i] = rows
            rows += hom_dim_add(pres, x.term(i), y.term(i - 1))
        mat = Matrix.zeros(fld, rows, total)
        col = 0
        for i in degs:
            basis, _ = hom_basis(pres, x.term(i), y.term(i))
            for b in basis:
                if i + 1 in rowoff:
                    vec = b.compose(x.incl_map(i + 1)).to_vector()
                    for r, v in enumerate(vec):
                        if v:
                            mat.data[rowoff[i + 1] + r][col] = v
                if i in rowoff:
                    vec = y.incl_map(i).compose(b).to_vector()
                    for r, v in enumerate(vec):
                        if v:
                            mat.data[rowoff[i] + r][col] = fld.sub(mat.data[rowoff[i] + r][col], v)
                col += 1
        self._kernel = mat.kernel_basis()
        self.dimension = self._kernel.cols
        self.basis = [self._vec_to_morphism(self._kernel.col(j))
                      for j in range(self.dimension)]

    def _vec_to_morphism(self, vec) -> FilteredMorphism:
        pres = self.x.pres
        comps = {}
        for i in range(self.window[0], self.window[1] + 1):
            off = self.offsets[i]
            dim = hom_dim_add(pres, self.x.term(i), self.y.term(i))
            comps[i] = AddMorphism.from_vector(pres, self.x.term(i), self.y.term(i),
                                               vec[off:off + dim])
        return FilteredMorphism(self.x, self.y, comps, check=False)

    def coordinates(self, f: FilteredMorphism):
        pres = self.x.pres
        vec = []
        for i in range(self.window[0], self.window[1] + 1):
            vec.extend(f.component(i).to_vector())
        cols = []
        for j in range(self.dimension):
            cols.append(self._kernel.col(j))
        if not cols:
            return [] if all(not v for v in vec) else None
        m = Matrix(pres.field, len(vec), len(cols),
                   [[cols[c][r] for c in range(len(cols))] for r in range(len(vec))])
        return m.solve(vec)


def filt_hom_space(x: FilteredObject, y: FilteredObject) -> FilteredHomSpace:
    return FilteredHomSpace(x, y)


def filt_hom_report(x: FilteredObject, y: FilteredObject) -> dict:
    """For x constant below index 1 and y vanishing above 0: Hom(x, y) = 0
    and the canonical morphism induces bijections
    Hom(y, x) = Hom(y, s^-1 x) = Hom(s y, x)."""
    if not x.is_ge(1):
        raise FilteredError("first object is not constant at and below 1")
    if not y.is_le(0):
        raise FilteredError("second object does not vanish above 0")
    pres = x.pres
    fld = pres.field
    forward = filt_hom_space(x, y).dimension

    sm1x = s_shift(x, -1)
    sp_a = filt_hom_space(y, sm1x)
    sp_b = filt_hom_space(y, x)
    al = alpha(sm1x)          # s^-1 x -> x
    cols = []
    for b in sp_a.basis:
        img = al.compose(b)
        coords = sp_b.coordinates(img)
        if coords is None:
            raise FilteredError("composition escaped the hom space")
        cols.append(coords)
    rank_a = 0
    if cols:
        mat = Matrix(fld, sp_b.dimension, len(cols),
                     [[cols[c][r] for c in range(len(cols))] for r in range(sp_b.dimension)])
        rank_a = mat.rank()

    sy = s_shift(y)
    sp_c = filt_hom_space(sy, x)
    ay = alpha(y)             # y -> s y
    cols2 = []
    for b in sp_c.basis:
        img = b.compose(ay)
        coords = sp_b.coordinates(img)
        if coords is None:
            raise FilteredError("composition escaped the hom space")
        cols2.append(coords)
    rank_c = 0
    if cols2:
        mat2 = Matrix(fld, sp_b.dimension, len(cols2),
                      [[cols2[c][r] for c in range(len(cols2))] for r in range(sp_b.dimension)])
        rank_c = mat2.rank()

    ok = (forward == 0
          and sp_a.dimension == sp_b.dimension == sp_c.dimension
          and rank_a == sp_a.dimension and rank_c == sp_c.dimension)
    return {
        "hom_forward": forward,
        "dims": {"y_to_sm1x": sp_a.dimension, "y_to_x": sp_b.dimension,
                 "sy_to_x": sp_c.dimension},
        "alpha_post_rank": rank_a,
        "alpha_pre_rank": rank_c,
        "ok": ok,
    }


# -------------------------------------------------------- split decomposition


@dataclass
class FilteredSplit:
    above: FilteredObject      # constant at and below 1
    below: FilteredObject      # zero above 0
    phi: FilteredMorphism      # above + below -> x
    psi: FilteredMorphism


def filtered_direct_sum(a: FilteredObject, b: FilteredObject) -> FilteredObject:
    pres = a.pres
    lo = min(a.lo, b.lo)
    hi = max(a.hi, b.hi)
    terms = {i: a.term(i).concat(b.term(i)) for i in range(lo, hi + 1)}
    incl, retr = {}, {}
    for i in range(lo + 1, hi + 1):
        ea, eb = a.incl_map(i), b.incl_map(i)
        ra, rb = a.retr_map(i), b.retr_map(i)
        incl[i] = _block_diag(pres, ea, eb)
        retr[i] = _block_diag(pres, ra, rb)
    return FilteredObject(pres, lo, hi, terms, incl, retr, check=False)


def _block_diag(pres, m1: AddMorphism, m2: AddMorphism) -> AddMorphism:
    src = m1.source.concat(m2.source)
    tgt = m1.target.concat(m2.target)
    blocks = []
    for r in range(len(tgt)):
        row = []
        for c in range(len(src)):
            if r < len(m1.target) and c < len(m1.source):
                row.append(m1.blocks[r][c])
            elif r >= len(m1.target) and c >= len(m1.source):
                row.append(m2.blocks[r - len(m1.target)][c - len(m1.source)])
            else:
                row.append(None)
        blocks.append(tuple(row))
    return AddMorphism(pres, src, tgt, tuple(blocks))


def split_decompose(x: FilteredObject) -> FilteredSplit:
    """Downward induction: above index 0 everything goes to the constant
    part; below, complements of the incoming inclusion are split off by
    splitting the idempotent e r and accumulated into the vanishing part."""
    pres = x.pres
    n_low = min(x.lo, 0)

    a_terms, b_terms = {}, {}
    phi_cols = {}              # i -> (phi_i : A_i + B_i -> X_i, psi_i)
    top = max(x.hi, 1)
    a_const = x.term(1)
    for i in range(top, 0, -1):
        a_terms[i] = x.term(i)
        b_terms[i] = ZERO_OBJECT
        phi_cols[i] = (AddMorphism.identity(pres, x.term(i)),
                       AddMorphism.identity(pres, x.term(i)))
    for i in range(0, n_low - 1, -1):
        phi_next, psi_next = phi_cols[i + 1]
        e = x.incl_map(i + 1)
        r = x.retr_map(i + 1)
        ebar = e.compose(r)
        ident = AddMorphism.identity(pres, x.term(i))
        y_i, p_i, inc_i = split_idempotent(ident.sub(ebar))
        a_terms[i] = a_terms[i + 1]
        b_terms[i] = b_terms[i + 1].concat(y_i)
        # phi_i columns: e phi_{i+1} on A_{i+1} + B_{i+1}, then inc on Y_i
        upper = e.compose(phi_next)
        phi_i = _concat_cols(pres, upper, inc_i, x.term(i))
        # psi_i rows: psi_{i+1} r on top, p_i below
        psi_i = _concat_rows(pres, psi_next.compose(r), p_i, x.term(i))
        if psi_i.compose(phi_i) != AddMorphism.identity(pres, phi_i.source):
            raise FilteredError("split decomposition lost exactness (psi phi)")
        if phi_i.compose(psi_i) != ident:
            raise FilteredError("split decomposition lost exactness (phi psi)")
        phi_cols[i] = (phi_i, psi_i)

    a_incl, a_retr = {}, {}
    for i in range(2, top + 1):
        a_incl[i] = x.incl_map(i)
        a_retr[i] = x.retr_map(i)
    above = FilteredObject(pres, 1, top, {i: a_terms[i] for i in range(1, top + 1)},
                           a_incl, a_retr)

    b_incl, b_retr = {}, {}
    for i in range(n_low + 1, 1):
        small, big = b_terms[i], b_terms[i - 1]
        b_incl[i] = _coordinate_inclusion(pres, small, big)
        b_retr[i] = _coordinate_projection(pres, big, small)
    below = FilteredObject(pres, n_low, 0, {i: b_terms[i] for i in range(n_low, 1)},
                           b_incl, b_retr)

    total = filtered_direct_sum(above, below)
    phi_comps, psi_comps = {}, {}
    for i in range(n_low, top + 1):
        if i >= 1:
            phi_comps[i], psi_comps[i] = phi_cols[i]
        else:
            phi_i, psi_i = phi_cols[i]
            phi_comps[i], psi_comps[i] = phi_i, psi_i
    phi = FilteredMorphism(total, x, phi_comps)
    psi = FilteredMorphism(x, total, psi_comps)
    # eqn shape: the inclusions become diagonal through the identification
    for i in range(n_low + 1, top + 1):
        lhs = psi_comps[i - 1].compose(x.incl_map(i)).compose(phi_comps[i])
        if lhs != total.incl_map(i):
            raise FilteredError(f"decomposed inclusion is not diagonal at {i}")
    return FilteredSplit(above, below, phi, psi)


def _concat_cols(pres, m1: AddMorphism, m2: AddMorphism, tgt: AddObject) -> AddMorphism:
    src = m1.source.concat(m2.source)
    blocks = []
    for r in range(len(tgt)):
        row = list(m1.blocks[r]) + list(m2.blocks[r])
        blocks.append(tuple(row))
    return AddMorphism(pres, src, tgt, tuple(blocks))


def _concat_rows(pres, m1: AddMorphism, m2: AddMorphism, src: AddObject) -> AddMorphism:
    tgt = m1.target.concat(m2.target)
    blocks = [m1.blocks[r] for r in range(len(m1.target))]
    blocks += [m2.blocks[r] for r in range(len(m2.target))]
    return AddMorphism(pres, src, tgt, tuple(blocks))


def _coordinate_inclusion(pres, small: AddObject, big: AddObject) -> AddMorphism:
    from .complexes import _selection_inclusion

    return _selection_inclusion(pres, small, big, tuple(range(len(small))))


def _coordinate_projection(pres, big: AddObject, small: AddObject) -> AddMorphism:
    from .complexes import _selection_projection

    return _selection_projection(pres, big, small, tuple(range(len(small))))


# --------------------------------------------------------- filtered complexes


class FilteredComplex:
    """Bounded complex of filtered objects with d^2 = 0."""

    def __init__(self, pres, terms, diffs, check=True):
        self.pres = pres
        self.terms = {k: t for k, t in terms.items() if not t.is_zero}
        self.diffs = {k: d for k, d in diffs.items()
                      if k in self.terms and k + 1 in self.terms and not d.is_zero()}
        if check:
            for k, d in self.diffs.items():
                if d.source != self.terms[k] or d.target != self.terms[k + 1]:
                    raise FilteredError(f"differential at {k} has wrong endpoints")
                d.validate()
            for k in self.diffs:
                if k + 1 in self.diffs:
                    if not self.diffs[k + 1].compose(self.diffs[k]).is_zero():
                        raise FilteredError(f"d^2 != 0 at {k}")

    def term(self, k) -> FilteredObject:
        return self.terms.get(k, FilteredObject.zero(self.pres))

    def d(self, k) -> FilteredMorphism:
        if k in self.diffs:
            return self.diffs[k]
        return FilteredMorphism.zero(self.term(k), self.term(k + 1))

    @property
    def is_zero(self):
        return not self.terms


@dataclass
class FilteredTriangle:
    above: FilteredComplex
    total: FilteredComplex
    below: FilteredComplex
    incl: dict            # k -> FilteredMorphism above^k -> total^k (via phi)
    proj: dict
    delta: dict           # k -> FilteredMorphism below^k -> above^{k+1}
    conjugated: FilteredComplex

    def verify(self) -> list:
        issues = []
        for k, d in self.conjugated.diffs.items():
            for i in range(d.lo, d.hi + 1):
                comp = d.component(i)
                na = len(self.above.term(k).term(i))
                nb_rows = len(self.above.term(k + 1).term(i))
                for rr in range(nb_rows, len(comp.target)):
                    for cc in range(na):
                        if comp.blocks[rr][cc] is not None:
                            issues.append(f"lower-left block nonzero at k={k}, i={i}")
        return issues


def filt_triangle(fx: FilteredComplex) -> FilteredTriangle:
    """Termwise split decomposition of a filtered complex.

    The conjugated differential is upper triangular (the part constant
    below 1 admits no morphisms to the part vanishing above 0), giving
    complexes of both kinds and the termwise-split triangle data.
    """
    pres = fx.pres
    splits = {k: split_decompose(t) for k, t in fx.terms.items()}
    conj_terms = {k: filtered_direct_sum(s.above, s.below) for k, s in splits.items()}
    conj_diffs = {}
    a_terms, b_terms = {}, {}
    a_diffs, b_diffs = {}, {}
    delta = {}
    for k, s in splits.items():
        a_terms[k] = s.above
        b_terms[k] = s.below
    for k, dmat in fx.diffs.items():
        conj = splits[k + 1].psi.compose(dmat).compose(splits[k].phi)
        conj_diffs[k] = conj
        a_comp, b_comp, t_comp, z_comp = {}, {}, {}, {}
        for i in range(conj.lo, conj.hi + 1):
            comp = conj.component(i)
            na_src = len(splits[k].above.term(i))
            na_tgt = len(splits[k + 1].above.term(i))
            from .complexes import restrict_blocks

            rows_a = list(range(na_tgt))
            rows_b = list(range(na_tgt, len(comp.target)))
            cols_a = list(range(na_src))
            cols_b = list(range(na_src, len(comp.source)))
            if not restrict_blocks(comp, rows_b, cols_a).is_zero():
                raise FilteredError(f"forbidden lower-left block at k={k}, i={i}")
            a_comp[i] = restrict_blocks(comp, rows_a, cols_a)
            b_comp[i] = restrict_blocks(comp, rows_b, cols_b)
            t_comp[i] = restrict_blocks(comp, rows_a, cols_b)
        a_diffs[k] = FilteredMorphism(splits[k].above, splits[k + 1].above, a_comp)
        b_diffs[k] = FilteredMorphism(splits[k].below, splits[k + 1].below, b_comp)
        tmor = FilteredMorphism(splits[k].below, splits[k + 1].above, t_comp, check=False)
        if not tmor.is_zero():
            delta[k] = tmor.scale(-1)
    above = FilteredComplex(pres, a_terms, a_diffs)
    below = FilteredComplex(pres, b_terms, b_diffs)
    conjugated = FilteredComplex(pres, conj_terms, conj_diffs, check=False)
    incl = {}
    proj = {}
    for k, s in splits.items():
        na = None
        comps_i = {}
        comps_p = {}
        for i in range(s.phi.lo, s.phi.hi + 1):
            a_t = s.above.term(i)
            tot = conj_terms[k].term(i)
            comps_i[i] = _coordinate_inclusion(pres, a_t, tot)
            b_t = s.below.term(i)
            comps_p[i] = _selection_projection_cols(pres, tot, b_t, len(a_t))
        incl[k] = s.phi.compose(FilteredMorphism(s.above, conj_terms[k], comps_i, check=False))
        proj[k] = FilteredMorphism(conj_terms[k], s.below, comps_p, check=False).compose(s.psi)
    return FilteredTriangle(above, fx, below, incl, proj, delta, conjugated)


def _selection_projection_cols(pres, big: AddObject, small: AddObject, offset: int):
    from .complexes import _selection_projection

    return _selection_projection(pres, big, small,
                                 tuple(range(offset, offset + len(small))))
