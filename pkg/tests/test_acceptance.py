"""Acceptance gate: every criterion at its stated tolerance (all exact).

Each test prints one PASS/FAIL line; run with `pytest -s` to see them.
"""

from koszulkit.complexes import (
    ChainMap,
    Complex,
    HomClass,
    Triangle,
    cone,
    hom_space,
)
from koszulkit.filtered import FilteredMorphism, filt_hom_report, filt_triangle, split_decompose
from koszulkit.fixtures import load_fixture
from koszulkit.functors import (
    HomogeneousFunctor,
    NatTrans,
    extend_nat_trans,
    nat_trans_uniqueness_probe,
)
from koszulkit.infext import (
    InfMorphism,
    adjunction_data,
    inf_compose,
    inf_invert,
    inf_les_check,
    iota_triangle,
)
from koszulkit.koszul import (
    double_dual_check,
    koszul_dual,
    koszulescence_surrogate,
    koszulity_check,
    q_functor,
    q_ses_triangle,
    roundtrip_check,
)
from koszulkit.orlov import AddMorphism, obj, validate_presentation
from koszulkit.randgen import (
    conjugate_complex,
    rand_chain_map,
    rand_complex,
    rand_filtered,
    rand_heart_complex,
    rng_for,
)
from koszulkit.tstructure import (
    aisle_membership,
    heart_object,
    heart_simples,
    is_pure,
    is_semisimple_normal_form,
    mixed_vanishing_report,
    simple_object,
    truncate,
    weight_filtration,
)

from oracle_hom import brute_force_hom_dim

SEED = 20240809
WINDOW = (-5, 5)

PT = load_fixture("FIX_PT")
A2 = load_fixture("FIX_A2")
A3 = load_fixture("FIX_A3")
ZC = load_fixture("FIX_ZC")
BAD = load_fixture("FIX_BAD")
FIXTURES = {"FIX_PT": PT, "FIX_A2": A2, "FIX_A3": A3}


def report(num, name, ok):
    print(f"ACCEPTANCE {num} [{name}]: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} ({name}) failed"


def test_criterion_1_orlov_axiom_gate():
    ok = all(validate_presentation(p).ok for p in (PT, A2, A3))
    bad = validate_presentation(BAD)
    ok = ok and not bad.ok and any(
        f.kind == "hom_degree_violation" and f.witness == ("a", "b")
        for f in bad.findings)
    report(1, "orlov-axiom-gate", ok)


def test_criterion_2_hom_oracle_equivalence():
    ok = True
    cells = 0
    for pres in (A2, A3):
        for s in pres.ids:
            for t in pres.ids:
                snf = simple_object(pres, s).normal_form
                tnf = simple_object(pres, t).normal_form
                for k in range(-5, 6):
                    engine = hom_space(snf, tnf, k).dimension
                    oracle = brute_force_hom_dim(snf, tnf, k)
                    cells += 1
                    ok = ok and engine == oracle
    ok = ok and cells == (4 + 9) * 11
    report(2, "hom-oracle-equivalence", ok)


def test_criterion_3_tstructure_suite():
    ok = True
    lowers, uppers = [], []
    for name, pres in FIXTURES.items():
        rng = rng_for(SEED, "tstruct", name)
        for _ in range(200):
            x = rand_complex(pres, rng, amplitude=4, max_summands=3)
            tr = truncate(x)
            issues = tr.triangle.verify()
            ok = ok and not issues
            ok = ok and aisle_membership(tr.lower).in_lower
            ok = ok and aisle_membership(tr.upper.shift(1)).in_upper
            lowers.append(tr.lower)
            uppers.append(tr.upper)
    rng = rng_for(SEED, "tstruct-cross")
    for _ in range(60):
        a_part = rng.choice(lowers)
        b_part = rng.choice(uppers)
        if a_part.pres is not b_part.pres:
            continue
        ok = ok and hom_space(a_part, b_part, 0).dimension == 0
    report(3, "tstructure-suite", ok)


def test_criterion_4_heart_structure():
    ok = True
    for name, pres in FIXTURES.items():
        expected = [Complex.single(pres, obj(iid), -pres.degree[iid])
                    for iid in pres.ids]
        got = [s.normal_form for s in heart_simples(pres)]
        ok = ok and got == expected
        rng = rng_for(SEED, "heart", name)
        for _ in range(40):
            raw = rand_heart_complex(pres, rng)
            x, _, _ = conjugate_complex(raw, rng)
            h = heart_object(x)
            ok = ok and all(i == -j for (i, j) in h.normal_form.support())
            wf = weight_filtration(h)
            for k, piece in wf.items():
                ok = ok and piece.normal_form == Complex.single(
                    pres, h.normal_form.term(-k), -k)
                ok = ok and is_semisimple_normal_form(piece)
            if is_pure(h):
                ok = ok and is_semisimple_normal_form(h)
        for w in {pres.degree[i] for i in pres.ids}:
            pure = rand_heart_complex(pres, rng_for(SEED, "pure", name, w),
                                      width=(-w, -w))
            hp = heart_object(pure)
            ok = ok and is_pure(hp) and is_semisimple_normal_form(hp)
    report(4, "heart-structure", ok)


def test_criterion_5_koszul_suite():
    ok = all(koszulity_check(p, WINDOW, seed=SEED)["ok"] for p in FIXTURES.values())
    rep = mixed_vanishing_report(A3, WINDOW)
    cells = {(c["source"], c["target"], c["shift"]): c["dim"] for c in rep["nonzero"]}
    expected = {}
    for s in A3.ids:
        for t in A3.ids:
            for k in range(WINDOW[0], WINDOW[1] + 1):
                d = brute_force_hom_dim(simple_object(A3, s).normal_form,
                                        simple_object(A3, t).normal_form, k)
                if d:
                    expected[(s, t, k)] = d
    ok = ok and cells == expected
    ok = ok and cells == {("a", "a", 0): 1, ("b", "b", 0): 1, ("c", "c", 0): 1,
                          ("b", "a", 1): 1, ("c", "b", 1): 1, ("c", "a", 2): 1}
    ok = ok and koszulescence_surrogate(A3, WINDOW)["ok"]
    zc = koszulescence_surrogate(ZC, WINDOW)
    ok = ok and not zc["ok"] and zc["failures"] == [
        {"source": "c", "target": "a", "shift": 2, "dim": 1, "spanned": 0}]
    report(5, "koszul-suite", ok)


def test_criterion_6_duality_roundtrip():
    ok = all(roundtrip_check(p, WINDOW)["ok"] for p in FIXTURES.values())
    dual = koszul_dual(A2, WINDOW)
    d = dual.presentation
    dims_orig = sorted(A2.hom_dim(s, t) for s in A2.ids for t in A2.ids)
    dims_dual = sorted(d.hom_dim(s, t) for s in d.ids for t in d.ids)
    ok = ok and dims_orig == dims_dual
    for p in FIXTURES.values():
        rep = double_dual_check(p, WINDOW)
        ok = ok and rep["ok"] and rep["matching"] is not None
    report(6, "duality-roundtrip", ok)


def test_criterion_7_q_functor():
    ok = True
    for name, pres in FIXTURES.items():
        rng = rng_for(SEED, "qf", name)
        for _ in range(25):
            h = heart_object(rand_heart_complex(pres, rng))
            out = q_functor(h)   # constructor re-verifies d^2 = 0
            ok = ok and out["complex"] == h.normal_form
    # short exact sequences of heart objects map to certified triangles
    e = None
    z, _, _ = cone(ChainMap(Complex.single(A2, obj("b"), 0),
                            Complex.single(A2, obj("a"), 0),
                            {0: AddMorphism.single(A2, obj("b"), obj("a"), 0, 0, (1,))}))
    e = heart_object(z).normal_form
    incl = ChainMap(simple_object(A2, "a").normal_form, e,
                    {0: AddMorphism.identity(A2, obj("a"))})
    proj = ChainMap(e, simple_object(A2, "b").normal_form,
                    {-1: AddMorphism.identity(A2, obj("b"))})
    tri = q_ses_triangle(incl, proj)
    ok = ok and tri.verify() == []
    # sums of simples give split sequences over every fixture
    for name, pres in FIXTURES.items():
        for iid in pres.ids:
            s_nf = simple_object(pres, iid).normal_form
            from koszulkit.complexes import direct_sum

            tot, ia, ib, pa, pb = direct_sum(s_nf, s_nf)
            tri2 = q_ses_triangle(ia, pb)
            ok = ok and tri2.verify() == []
    report(7, "q-functor", ok)


def test_criterion_8_infinitesimal_extension():
    ok = True
    rng = rng_for(SEED, "infext")

    def rand_inf(x, y):
        return InfMorphism(HomClass(rand_chain_map(x, y, rng)),
                           HomClass(rand_chain_map(x, y.shift(-1), rng)))

    pool = [rand_complex(A2, rng, amplitude=2) for _ in range(8)]
    triples = 0
    while triples < 500:
        w, x, y, z = (rng.choice(pool) for _ in range(4))
        f = rand_inf(w, x)
        g = rand_inf(x, y)
        h = rand_inf(y, z)
        lhs = inf_compose(h, inf_compose(g, f))
        rhs = inf_compose(inf_compose(h, g), f)
        ok = ok and lhs.f0.rep == rhs.f0.rep and lhs.finf.rep == rhs.finf.rep
        # square-zero ideal on the infinitesimal parts of this triple
        finf = InfMorphism.upsilon(f.finf)
        ginf = InfMorphism.upsilon(InfMorphism(g.f0, g.finf).finf)
        prod = inf_compose(ginf, finf)
        ok = ok and prod.f0.rep.is_zero() and prod.finf.rep.is_zero()
        triples += 1
    ok = ok and triples == 500

    for _ in range(30):
        x = rng.choice(pool)
        phi = HomClass(rand_chain_map(x, x.shift(-1), rng))
        f = InfMorphism(HomClass.identity(x), phi)
        g = inf_invert(f)
        ok = ok and g is not None and g.finf == phi.scale(-1)

    count = 0
    for name, pres in FIXTURES.items():
        rng2 = rng_for(SEED, "adj", name)
        n = 17 if name != "FIX_PT" else 16
        for _ in range(n):
            x = rand_complex(pres, rng2, amplitude=2, max_summands=2)
            ok = ok and adjunction_data(x)["ok"]
            count += 1
    ok = ok and count == 50

    a_obj = Complex.single(A2, obj("a"), 0)
    for _ in range(4):
        x = rng.choice(pool)
        y = rng.choice(pool)
        f = rand_chain_map(x, y, rng)
        tri = iota_triangle(Triangle.from_cone(f))
        les = inf_les_check(a_obj, tri, window=(-2, 2))
        ok = ok and les["ok"]
    report(8, "infinitesimal-extension", ok)


def test_criterion_9_filtered_suite():
    ok = True
    decompositions = 0
    for name, pres in FIXTURES.items():
        rng = rng_for(SEED, "filt", name)
        quota = 34 if name != "FIX_PT" else 32
        for _ in range(quota):
            x = rand_filtered(pres, rng)
            sp = split_decompose(x)
            ok = ok and sp.phi.compose(sp.psi) == FilteredMorphism.identity(x)
            ok = ok and sp.above.is_ge(1) and sp.below.is_le(0)
            decompositions += 1
            if not sp.above.is_zero and not sp.below.is_zero:
                rep = filt_hom_report(sp.above, sp.below)
                ok = ok and rep["ok"]
                ok = ok and rep["dims"]["y_to_sm1x"] == rep["dims"]["y_to_x"] \
                    == rep["dims"]["sy_to_x"]
    ok = ok and decompositions == 100
    from koszulkit.randgen import rand_filtered_complex

    rng = rng_for(SEED, "ftri")
    for _ in range(10):
        fx = rand_filtered_complex(A2, rng)
        tri = filt_triangle(fx)
        ok = ok and tri.verify() == []
        for k, d in tri.above.diffs.items():
            ok = ok and tri.incl[k + 1].compose(d) == fx.d(k).compose(tri.incl[k])
    report(9, "filtered-suite", ok)


def test_criterion_10_functor_suite():
    ok = True
    for name, pres in FIXTURES.items():
        ident = HomogeneousFunctor.identity(pres)
        theta = NatTrans(ident, ident, {
            iid: AddMorphism.identity(pres, obj(iid)).scale(2) for iid in pres.ids})
        rng = rng_for(SEED, "functor", name)
        for _ in range(3):
            x = rand_complex(pres, rng, amplitude=3)
            ext = extend_nat_trans(theta, x)
            ok = ok and ext.rep.verify()
            inv = extend_nat_trans(theta.inverse(), x)
            ok = ok and inv.compose(ext) == HomClass.identity(x)
        probe_obj = rand_complex(pres, rng, amplitude=3)
        rep = nat_trans_uniqueness_probe(theta, probe_obj, orders=20, seed=SEED)
        ok = ok and rep["ok"] and rep["orders"] >= 20
    # a non-scalar transformation between distinct functors on FIX_A2
    scal = HomogeneousFunctor.identity(A2)
    hom_map = dict(scal.hom_map)
    hom_map["alpha"] = hom_map["alpha"].scale(2)
    f2 = HomogeneousFunctor(A2, A2, scal.obj_map, hom_map)
    theta2 = NatTrans(f2, HomogeneousFunctor.identity(A2), {
        "a": AddMorphism.identity(A2, obj("a")),
        "b": AddMorphism.identity(A2, obj("b")).scale(2)})
    rng = rng_for(SEED, "functor-a2")
    x = rand_complex(A2, rng, amplitude=3)
    rep = nat_trans_uniqueness_probe(theta2, x, orders=20, seed=SEED + 1)
    ok = ok and rep["ok"]
    ext = extend_nat_trans(theta2, x)
    inv = extend_nat_trans(theta2.inverse(), x)
    ok = ok and ext.compose(inv) == HomClass.identity(x)
    report(10, "functor-suite", ok)
