import pytest

from koszulkit.filtered import (
    FilteredComplex,
    FilteredError,
    FilteredMorphism,
    FilteredObject,
    alpha,
    filt_hom_report,
    filt_hom_space,
    filt_triangle,
    j_embed,
    s_shift,
    s_shift_morphism,
    split_decompose,
)
from koszulkit.fixtures import load_fixture
from koszulkit.orlov import AddMorphism, ZERO_OBJECT, obj
from koszulkit.randgen import rand_add_morphism, rand_filtered, rng_for


@pytest.fixture(scope="module")
def a2():
    return load_fixture("FIX_A2")


@pytest.fixture(scope="module")
def a3():
    return load_fixture("FIX_A3")


# ---------------------------------------------------------------- plumbing

def test_j_of_zero(a2):
    assert j_embed(a2, ZERO_OBJECT).is_zero


def test_s_of_j_index_bookkeeping(a2):
    a = obj("a", "b")
    x = s_shift(j_embed(a2, a))
    assert x.term(1) == a
    assert x.term(0) == a and x.term(5) == ZERO_OBJECT


def test_alpha_of_j_is_identity_below_zero(a2):
    a = obj("a")
    x = j_embed(a2, a)
    al = alpha(x)
    for i in (0, -1, -3):
        assert al.component(i) == AddMorphism.identity(a2, a)
    assert al.component(1).is_zero()


def test_s_shift_membership(a2):
    rng = rng_for(1, "filt")
    x = rand_filtered(a2, rng)
    n = 3
    assert s_shift(x, n).is_le(x.hi + n)
    y = j_embed(a2, obj("a"))
    assert y.is_ge(0) and y.is_le(0)
    assert s_shift(y, n).is_ge(n) and s_shift(y, n).is_le(n)


def test_alpha_compatibility_with_s(a2):
    # the canonical morphism at X equals the reindexed one at s^-1 X
    rng = rng_for(2, "alphas")
    for _ in range(8):
        x = rand_filtered(a2, rng)
        lhs = alpha(x)
        rhs = s_shift_morphism(alpha(s_shift(x, -1)), 1)
        assert lhs == rhs


# --------------------------------------------------------- split decompose

def test_split_decompose_pure_below(a2):
    x = j_embed(a2, obj("a", "b"))
    sp = split_decompose(x)
    assert sp.above.is_zero
    assert sp.below == x


def test_split_decompose_pure_above(a2):
    x = s_shift(j_embed(a2, obj("a")), 1)
    sp = split_decompose(x)
    assert sp.below.is_zero
    assert sp.above.term(1) == obj("a")


def test_split_decompose_mixed_example(a2):
    # X_1 = a included into X_0 = a + b
    terms = {1: obj("a"), 0: obj("a", "b")}
    from koszulkit.complexes import _selection_inclusion, _selection_projection

    incl = {1: _selection_inclusion(a2, obj("a"), obj("a", "b"), (0,))}
    retr = {1: _selection_projection(a2, obj("a", "b"), obj("a"), (0,))}
    x = FilteredObject(a2, 0, 1, terms, incl, retr)
    sp = split_decompose(x)
    assert sp.above.term(1) == obj("a") and sp.above.is_ge(1)
    assert sp.below.is_le(0)
    assert sorted(sp.below.term(0).summands) == ["b"]
    # direct-sum iso verified exactly
    assert sp.phi.compose(sp.psi) == FilteredMorphism.identity(x)


def test_split_decompose_randomized(a3):
    rng = rng_for(3, "split")
    for _ in range(25):
        x = rand_filtered(a3, rng)
        sp = split_decompose(x)
        assert sp.above.is_ge(1)
        assert sp.below.is_le(0)
        assert sp.phi.compose(sp.psi) == FilteredMorphism.identity(x)
        assert sp.psi.compose(sp.phi) == FilteredMorphism.identity(sp.phi.source)


# ------------------------------------------------------------- hom report

def test_filt_hom_report_disjoint(a2):
    x = s_shift(j_embed(a2, obj("a")), 1)   # constant a at and below 1
    y = j_embed(a2, obj("a"))
    rep = filt_hom_report(x, y)
    # Hom(x, y) = 0 is the lemma; the alpha comparisons here have dim 1
    assert rep["ok"]


def test_filt_hom_report_one_dimensional(a2):
    # maps j(b) -> s(j(a)) come from Hom(b, a): dimension 1 on both sides
    x = s_shift(j_embed(a2, obj("a")), 1)
    y = j_embed(a2, obj("b"))
    rep = filt_hom_report(x, y)
    assert rep["ok"]
    assert rep["dims"] == {"y_to_sm1x": 1, "y_to_x": 1, "sy_to_x": 1}
    assert rep["hom_forward"] == 0


def test_filt_hom_report_zero_case(a2):
    x = s_shift(j_embed(a2, obj("b")), 1)
    y = j_embed(a2, obj("a"))
    rep = filt_hom_report(x, y)
    assert rep["ok"]
    assert rep["dims"]["y_to_x"] == 0


def test_filt_hom_report_membership_errors(a2):
    y = j_embed(a2, obj("a"))
    with pytest.raises(FilteredError):
        filt_hom_report(y, y)


def test_filt_hom_report_randomized_dimensions(a3):
    rng = rng_for(4, "fhom")
    for _ in range(10):
        above = rand_filtered(a3, rng)
        sp = split_decompose(above)
        x, y = sp.above, sp.below
        if x.is_zero or y.is_zero:
            continue
        rep = filt_hom_report(x, y)
        assert rep["ok"], rep


def test_j_full_faithful(a2):
    # Hom between j-images equals Hom in the additive closure
    from koszulkit.orlov import hom_dim_add

    for src, tgt in ((obj("a"), obj("b")), (obj("b"), obj("a")),
                     (obj("a", "b"), obj("a"))):
        dim = filt_hom_space(j_embed(a2, src), j_embed(a2, tgt)).dimension
        assert dim == hom_dim_add(a2, src, tgt)
    # and composition matches
    rng = rng_for(5, "jcomp")
    x, y, z = obj("b"), obj("a", "b"), obj("a")
    for _ in range(5):
        f = rand_add_morphism(a2, x, y, rng)
        g = rand_add_morphism(a2, y, z, rng)
        jf = FilteredMorphism(j_embed(a2, x), j_embed(a2, y), {0: f})
        jg = FilteredMorphism(j_embed(a2, y), j_embed(a2, z), {0: g})
        assert jg.compose(jf).component(0) == g.compose(f)
        assert jg.compose(jf).component(-2) == g.compose(f)


def test_heart_window_objects_are_j_images(a2):
    # an object constant on [0] with identity inclusions is a j image
    x = j_embed(a2, obj("a", "b"))
    assert x.is_ge(0) and x.is_le(0)
    assert x == j_embed(a2, x.term(0))


# ------------------------------------------------------------ filt triangle

def make_filtered_complex(pres, rng, width=2):
    terms = {}
    for k in range(width):
        terms[k] = rand_filtered(pres, rng, depth=2)
    diffs = {}
    for k in range(width - 1):
        sp = filt_hom_space(terms[k], terms[k + 1])
        if sp.dimension == 0:
            continue
        m = FilteredMorphism.zero(terms[k], terms[k + 1])
        for b in sp.basis:
            c = rng.randint(-2, 2)
            if c:
                m = m.add(b.scale(c))
        # enforce d^2 = 0 by only using two-term complexes
        if not m.is_zero():
            diffs[k] = m
    return FilteredComplex(pres, terms, diffs)


def test_filt_triangle_pure_below(a2):
    x = FilteredComplex(a2, {0: j_embed(a2, obj("a", "b"))}, {})
    tri = filt_triangle(x)
    assert tri.above.is_zero
    assert tri.verify() == []


def test_filt_triangle_zero(a2):
    tri = filt_triangle(FilteredComplex(a2, {}, {}))
    assert tri.above.is_zero and tri.below.is_zero
    assert tri.verify() == []


def test_filt_triangle_two_term_mixed(a2):
    rng = rng_for(6, "ftri")
    produced = 0
    for _ in range(12):
        fx = make_filtered_complex(a2, rng)
        tri = filt_triangle(fx)
        assert tri.verify() == []
        # inclusion and projection are chain maps; the connecting block is
        # recovered from the conjugated differential exactly
        for k, d in tri.above.diffs.items():
            lhs = tri.incl[k + 1].compose(d)
            rhs = fx.d(k).compose(tri.incl[k])
            assert lhs == rhs
        for k, d in tri.below.diffs.items():
            lhs = d.compose(tri.proj[k])
            rhs = tri.proj[k + 1].compose(fx.d(k))
            assert lhs == rhs
        produced += 1
    assert produced == 12


def test_filt_triangle_heart_window_terms(a2):
    # complexes with terms in the intersection stay there after splitting
    x = FilteredComplex(a2, {0: j_embed(a2, obj("a")), 1: j_embed(a2, obj("b"))}, {})
    tri = filt_triangle(x)
    assert tri.above.is_zero
    for k in tri.below.terms:
        t = tri.below.term(k)
        assert t.is_ge(0) and t.is_le(0)
