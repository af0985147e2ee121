"""The diagonal t-structure on the bounded homotopy category.

The two aisles are cut out by support: the lower aisle consists of objects
whose minimal representative is supported on {(i, j) : i <= -j}, the upper
aisle on {(i, j) : i >= -j}.  Truncation is constructive: in a minimal
complex no differential block can cross from the lower region into the
complement (such a block would join summands with non-increasing degrees,
hence be an isomorphism between equal indecomposables, contradicting
minimality), so the termwise degree split is a subcomplex inclusion and
yields the truncation triangle directly as a termwise-split triangle.

The heart is a split finite-length abelian category; its simple objects
are the indecomposables placed in homological degree minus their degree,
and the weight filtration of a heart object is read off its antidiagonal
normal form term by term.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    ChainIso,
    ChainMap,
    Complex,
    HomClass,
    Triangle,
    hom_space,
    is_null_homotopic,
    minimal_model,
)
from .orlov import AddMorphism, AddObject, identity_label


class TStructureError(Exception):
    pass


class HeartAssertionError(TStructureError):
    """Raised with a certificate when a claimed heart object fails to
    normalize onto the antidiagonal; this would falsify the engine."""


def in_lower(point) -> bool:
    i, j = point
    return i <= -j


def in_upper(point) -> bool:
    i, j = point
    return i >= -j


def on_antidiagonal(point) -> bool:
    i, j = point
    return i == -j


@dataclass
class AisleReport:
    in_lower: bool
    in_upper: bool

    @property
    def in_heart(self):
        return self.in_lower and self.in_upper

    def to_data(self):
        return {"in_lower": self.in_lower, "in_upper": self.in_upper,
                "in_heart": self.in_heart}


def aisle_membership(x: Complex) -> AisleReport:
    m, _ = minimal_model(x)
    supp = m.support()
    return AisleReport(all(in_lower(p) for p in supp), all(in_upper(p) for p in supp))


@dataclass
class Truncation:
    lower: Complex        # in the lower aisle
    upper: Complex        # upper[1] lies in the upper aisle
    triangle: Triangle    # lower -> X -> upper -> lower[1]


def truncate(x: Complex) -> Truncation:
    """Split off the lower-aisle part of the minimal model of x."""
    m, iso = minimal_model(x)
    pres = x.pres
    sel_sub, sel_quot = {}, {}
    for i, t in m.terms.items():
        sub, quot = [], []
        for p, s in enumerate(t):
            (sub if pres.degree[s] <= -i else quot).append(p)
        sel_sub[i] = tuple(sub)
        sel_quot[i] = tuple(quot)
    base = Triangle.from_termwise_split(m, sel_sub, sel_quot)
    tri = Triangle.transport(base, None, iso.inverse(), None)
    return Truncation(base.X, base.Z, tri)


def truncate_le(x: Complex, n: int) -> Complex:
    """tau_{<= n}: conjugate the basic truncation with the shift."""
    return truncate(x.shift(n)).lower.shift(-n)


def truncate_ge(x: Complex, n: int) -> Complex:
    """tau_{>= n}."""
    return truncate(x.shift(n - 1)).upper.shift(-(n - 1))


def truncation_window(x: Complex):
    """Exact bounds (lo, hi): t-cohomology can only live in degrees [lo, hi].

    Equivalently tau_{<= n} x = x for n >= hi and tau_{>= n} x = x for
    n <= lo; both read off the minimal support as extremes of i + j.
    """
    m_min, _ = minimal_model(x)
    supp = m_min.support()
    if not supp:
        return (0, 0)
    return (min(i + j for i, j in supp), max(i + j for i, j in supp))


# ------------------------------------------------------------ heart objects


@dataclass
class HeartObject:
    """An object of the heart in antidiagonal minimal normal form."""

    normal_form: Complex
    origin: Complex | None = None
    origin_iso: ChainIso | None = None

    @property
    def pres(self):
        return self.normal_form.pres

    @property
    def is_zero(self):
        return self.normal_form.is_zero

    def weights(self):
        return sorted({-i for i in self.normal_form.terms})

    def __eq__(self, other):
        return isinstance(other, HeartObject) and self.normal_form == other.normal_form

    def __repr__(self):
        return f"HeartObject({self.normal_form!r})"


def heart_object(x: Complex) -> HeartObject:
    m, iso = minimal_model(x)
    bad = [p for p in m.support() if not on_antidiagonal(p)]
    if bad:
        raise HeartAssertionError(
            f"minimal model is not antidiagonal; offending points {sorted(bad)}")
    return HeartObject(m, origin=x, origin_iso=iso)


def simple_object(pres, indec_id: str) -> HeartObject:
    deg = pres.degree[indec_id]
    return HeartObject(Complex.single(pres, AddObject((indec_id,)), -deg))


def heart_simples(pres) -> list:
    """One simple per indecomposable: the generator placed in degree -deg."""
    return [simple_object(pres, iid) for iid in pres.ids]


def t_cohomology(x: Complex, n: int) -> HeartObject:
    """H^n = (tau_{>= n} tau_{<= n} x)[n], in heart normal form."""
    lo, hi = truncation_window(x)
    if x.is_zero or n < lo or n > hi:
        return HeartObject(Complex.zero(x.pres))
    y = truncate_le(x, n)
    z = truncate_ge(y, n)
    return heart_object(z.shift(n))


def weight_filtration(m: HeartObject) -> dict:
    """Graded pieces k -> semisimple HeartObject, read off the normal form."""
    out = {}
    for i, t in m.normal_form.terms.items():
        out[-i] = HeartObject(Complex.single(m.pres, t, i))
    return out


def weight_subobjects(m: HeartObject) -> dict:
    """The filtration itself: k -> (subcomplex with weights <= k, inclusion)."""
    nf = m.normal_form
    out = {}
    for k in m.weights():
        terms = {i: t for i, t in nf.terms.items() if -i <= k}
        diffs = {i: d for i, d in nf.diffs.items() if i in terms and i + 1 in terms}
        sub = Complex(nf.pres, terms, diffs, check=False)
        inc = ChainMap(sub, nf, {i: AddMorphism.identity(nf.pres, t)
                                 for i, t in sub.terms.items()}, check=False)
        out[k] = (sub, inc)
    return out


def composition_factors(m: HeartObject) -> dict:
    """Multiset of simple constituents: indecomposable id -> multiplicity."""
    out = {}
    for t in m.normal_form.terms.values():
        for s in t:
            out[s] = out.get(s, 0) + 1
    return out


def is_pure(m: HeartObject) -> bool:
    return len(m.weights()) <= 1


def is_semisimple_normal_form(m: HeartObject) -> bool:
    return not m.normal_form.diffs


# ------------------------------------------------- cone through a simple


@dataclass
class SimpleConeResult:
    quotient: Complex
    triangle: Triangle


def cone_through_simple(f: HomClass, check_upper=True) -> SimpleConeResult:
    """Excise a simple mapping nonzero into an upper-aisle object.

    f must be a nonzero class S[deg S] -> X with X in the upper aisle; the
    recipe identifies the image of the generator as a direct summand of
    the degree -deg S term, removes it, and reroutes the differentials.
    """
    src = f.source
    pres = src.pres
    if len(src.terms) != 1:
        raise TStructureError("source is not a shifted indecomposable")
    (slot, term), = src.terms.items()
    if len(term) != 1:
        raise TStructureError("source is not indecomposable")
    s = term[0]
    p = pres.degree[s]
    if slot != -p:
        raise TStructureError("source is not placed in degree -deg S")

    mx, iso = minimal_model(f.target)
    if check_upper and not all(in_upper(q) for q in mx.support()):
        raise TStructureError("target is not in the upper aisle")
    fr = iso.fwd.compose(f.rep)
    if fr.is_zero() or is_null_homotopic(fr) is not None:
        raise TStructureError("morphism class is zero")

    comp = fr.component(slot)
    tgt = mx.term(slot)
    lam = []
    for pos, t in enumerate(tgt):
        if t == s and comp.blocks[pos][0] is not None:
            unit = pres.hom_labels(s, s).index(identity_label(s))
            lam.append((pos, comp.blocks[pos][0][unit]))
        elif comp.blocks[pos][0] is not None:
            raise TStructureError("component hits a forbidden summand")
    lam = [(pos, v) for pos, v in lam if v]
    if not lam:
        raise TStructureError("morphism class is zero on the isotypic part")
    pivot, pval = lam[-1]

    # automorphism U of the slot term with U o component = pivot inclusion:
    # U = P^{-1} where P is the identity with the pivot column replaced by
    # the component vector
    fld = pres.field
    u_fwd = AddMorphism.identity(pres, tgt)
    rows = [list(r) for r in u_fwd.blocks]
    for pos, v in lam:
        coords = tuple(v if k == pres.hom_labels(s, s).index(identity_label(s))
                       else fld.zero for k in range(pres.hom_dim(s, s)))
        rows[pos][pivot] = coords
    p_mat = AddMorphism(pres, tgt, tgt, tuple(tuple(r) for r in rows))
    from .orlov import invert_endomorphism

    u = invert_endomorphism(p_mat)
    uinv = p_mat

    terms = dict(mx.terms)
    diffs = {}
    for i, d in mx.diffs.items():
        if i == slot:
            diffs[i] = d.compose(uinv)
        elif i + 1 == slot:
            diffs[i] = u.compose(d)
        else:
            diffs[i] = d
    conj = Complex(pres, terms, diffs)
    conj_iso = ChainIso(
        ChainMap(mx, conj, {slot: u, **{i: AddMorphism.identity(pres, t)
                                        for i, t in mx.terms.items() if i != slot}},
                 check=False),
        ChainMap(conj, mx, {slot: uinv, **{i: AddMorphism.identity(pres, t)
                                           for i, t in mx.terms.items() if i != slot}},
                 check=False))

    sel_sub = {i: ((pivot,) if i == slot else ()) for i in conj.terms}
    sel_quot = {i: tuple(q for q in range(len(conj.term(i))) if i != slot or q != pivot)
                for i in conj.terms}
    base = Triangle.from_termwise_split(conj, sel_sub, sel_quot)

    mid_iso = compose_iso(iso.inverse(), conj_iso.inverse())   # conj -> mx -> X
    tri = Triangle.transport(base, None, mid_iso, None)
    return SimpleConeResult(base.Z, tri)


def compose_iso(second: ChainIso, first: ChainIso) -> ChainIso:
    """second o first as a witnessed homotopy equivalence."""
    fwd = second.fwd.compose(first.fwd)
    bwd = first.bwd.compose(second.bwd)
    h_src = first.h_src
    if second.h_src is not None:
        extra = second.h_src.conjugate(first.fwd, first.bwd)
        h_src = extra if h_src is None else h_src.add(extra)
    h_tgt = second.h_tgt
    if first.h_tgt is not None:
        extra = first.h_tgt.conjugate(second.bwd, second.fwd)
        h_tgt = extra if h_tgt is None else h_tgt.add(extra)
    if h_src is not None and not h_src.comps:
        h_src = None
    if h_tgt is not None and not h_tgt.comps:
        h_tgt = None
    return ChainIso(fwd, bwd, h_src, h_tgt)


# -------------------------------------------------------- vanishing report


def mixed_vanishing_report(pres, window=(-8, 8)) -> dict:
    """Hom dimensions between heart simples across a shift window.

    A cell may only be nonzero when the target degree equals the source
    degree minus the shift; the report lists all nonzero cells and flags
    any violation.
    """
    simples = heart_simples(pres)
    cells = []
    ok = True
    for s_obj, s_id in zip(simples, pres.ids):
        for t_obj, t_id in zip(simples, pres.ids):
            for k in range(window[0], window[1] + 1):
                dim = hom_space(s_obj.normal_form, t_obj.normal_form, k).dimension
                if dim:
                    allowed = pres.degree[t_id] == pres.degree[s_id] - k
                    ok = ok and allowed
                    cells.append({"source": s_id, "target": t_id, "shift": k,
                                  "dim": dim, "allowed": allowed})
    return {"window": list(window), "nonzero": cells, "vanishing_ok": ok}
