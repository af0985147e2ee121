import json
import random

import pytest

from koszulkit.fixtures import load_fixture
from koszulkit.orlov import (
    AddMorphism,
    AddObject,
    CompositionError,
    MalformedPresentation,
    OrlovPresentation,
    ZERO_OBJECT,
    compose,
    hom_basis,
    invert_endomorphism,
    obj,
    split_idempotent,
    validate_presentation,
)


@pytest.fixture(scope="module")
def a2():
    return load_fixture("FIX_A2")


@pytest.fixture(scope="module")
def a3():
    return load_fixture("FIX_A3")


def morphism_b_to_a(pres, coeff=1):
    return AddMorphism.single(pres, obj("b"), obj("a"), 0, 0, (pres.field.of(coeff),))


def rand_morphism(pres, x, y, rng):
    basis, _ = hom_basis(pres, x, y)
    out = AddMorphism.zero(pres, x, y)
    for b in basis:
        c = rng.randint(-3, 3)
        if c:
            out = out.add(b.scale(c))
    return out


# -------------------------------------------------------------- validation

def test_fixture_a2_is_valid(a2):
    assert validate_presentation(a2).ok


def test_fixture_pt_and_a3_are_valid(a3):
    assert validate_presentation(load_fixture("FIX_PT")).ok
    assert validate_presentation(a3).ok


def test_fix_bad_reports_degree_violation_with_witness():
    report = validate_presentation(load_fixture("FIX_BAD"))
    assert not report.ok
    kinds = {(f.kind, f.witness) for f in report.findings}
    assert ("hom_degree_violation", ("a", "b")) in kinds


def test_planted_non_associative_constant_reports_triple():
    from koszulkit.fixtures import fixture_text

    data = json.loads(fixture_text("FIX_A3"))
    data["compose"] = [
        {"left": "alpha", "right": "beta", "result": [{"label": "gamma", "coeff": "1"}]},
        {"left": "gamma", "right": "1@c", "result": [{"label": "gamma", "coeff": "2"}]},
    ]
    with pytest.raises(MalformedPresentation):
        # contradicting a unit law is caught at resolution time
        OrlovPresentation.from_data(data)
    # a genuine associativity defect needs a longer composable chain
    data2 = {
        "characteristic": 0,
        "indecomposables": [
            {"id": "a", "degree": 0}, {"id": "b", "degree": 1},
            {"id": "c", "degree": 2}, {"id": "d", "degree": 3},
        ],
        "hom": [
            {"src": "b", "tgt": "a", "basis": ["f"]},
            {"src": "c", "tgt": "b", "basis": ["g"]},
            {"src": "d", "tgt": "c", "basis": ["h"]},
            {"src": "c", "tgt": "a", "basis": ["gf"]},
            {"src": "d", "tgt": "b", "basis": ["hg"]},
            {"src": "d", "tgt": "a", "basis": ["hgf"]},
        ],
        "compose": [
            {"left": "f", "right": "g", "result": [{"label": "gf", "coeff": "1"}]},
            {"left": "g", "right": "h", "result": [{"label": "hg", "coeff": "1"}]},
            {"left": "gf", "right": "h", "result": [{"label": "hgf", "coeff": "1"}]},
            {"left": "f", "right": "hg", "result": [{"label": "hgf", "coeff": "2"}]},
        ],
    }
    report = validate_presentation(data2)
    assert any(f.kind == "associativity" and f.witness == ("f", "g", "h")
               for f in report.findings)


def test_malformed_shape_reported_distinctly():
    report = validate_presentation({"characteristic": 0})
    assert [f.kind for f in report.findings] == ["malformed"]


def test_end_not_scalar_finding():
    data = {
        "characteristic": 0,
        "indecomposables": [{"id": "a", "degree": 0}],
        "hom": [{"src": "a", "tgt": "a", "basis": ["1@a", "nil"]}],
        "compose": [],
    }
    report = validate_presentation(data)
    assert any(f.kind == "end_not_scalar" and f.witness == ("a",) for f in report.findings)


# -------------------------------------------------------------- composition

def test_compose_unit_law(a2):
    f = morphism_b_to_a(a2)
    assert compose(AddMorphism.identity(a2, obj("a")), f) == f
    assert compose(f, AddMorphism.identity(a2, obj("b"))) == f


def test_compose_structure_constant(a3):
    alpha = AddMorphism.single(a3, obj("b"), obj("a"), 0, 0, (1,))
    beta = AddMorphism.single(a3, obj("c"), obj("b"), 0, 0, (1,))
    gamma = AddMorphism.single(a3, obj("c"), obj("a"), 0, 0, (1,))
    assert compose(alpha, beta) == gamma


def test_compose_with_zero_is_zero(a2):
    f = morphism_b_to_a(a2)
    z = AddMorphism.zero(a2, obj("a"), obj("b"))
    assert compose(f, z).is_zero()


def test_compose_is_bilinear_randomized(a3):
    rng = random.Random(2)
    x, y, z = obj("c", "c"), obj("b", "c"), obj("a", "b")
    for _ in range(25):
        f1, f2 = rand_morphism(a3, x, y, rng), rand_morphism(a3, x, y, rng)
        g = rand_morphism(a3, y, z, rng)
        lhs = compose(g, f1.add(f2))
        rhs = compose(g, f1).add(compose(g, f2))
        assert lhs == rhs
        assert compose(g.scale(3), f1) == compose(g, f1).scale(3)


@pytest.mark.parametrize("fixture,objects", [
    ("FIX_PT", (("s", "s"), ("s",), ("s", "s"), ("s",))),
    ("FIX_A2", (("b", "b"), ("a", "b"), ("a", "b"), ("a", "a"))),
    ("FIX_A3", (("c", "c"), ("b", "c"), ("a", "b"), ("a", "a", "b"))),
])
def test_compose_associative_randomized(fixture, objects):
    pres = load_fixture(fixture)
    rng = random.Random(4)
    w, x, y, z = (AddObject(t) for t in objects)
    for _ in range(1000):
        f = rand_morphism(pres, w, x, rng)
        g = rand_morphism(pres, x, y, rng)
        h = rand_morphism(pres, y, z, rng)
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)


def test_radical_is_nilpotent_on_fixture(a3):
    # strictly degree-decreasing basis maps compose to zero past the span
    basis_ba, _ = hom_basis(a3, obj("b"), obj("a"))
    basis_cb, _ = hom_basis(a3, obj("c"), obj("b"))
    chain = compose(basis_ba[0], basis_cb[0])
    assert not chain.is_zero()
    # there is no further strictly decreasing arrow out of degree 0
    for s in a3.ids:
        for t in a3.ids:
            if s != t and a3.degree[s] <= a3.degree[t]:
                assert a3.hom_dim(s, t) == 0


# -------------------------------------------------------------- hom bases

def test_hom_basis_dimensions(a2):
    _, dim = hom_basis(a2, obj("a", "b"), obj("a"))
    assert dim == 2  # identity block and the alpha block
    _, dim0 = hom_basis(a2, obj("a"), obj("b"))
    assert dim0 == 0
    basis, dim_end = hom_basis(a2, obj("a", "b"), obj("a", "b"))
    ident = AddMorphism.identity(a2, obj("a", "b"))
    assert compose(ident, ident) == ident
    assert dim_end == 3


def test_vector_round_trip(a3):
    rng = random.Random(9)
    x, y = obj("c", "b"), obj("b", "a")
    m = rand_morphism(a3, x, y, rng)
    vec = m.to_vector()
    assert AddMorphism.from_vector(a3, x, y, vec) == m


# -------------------------------------------------------- idempotents

def test_split_identity_idempotent(a2):
    x = obj("a", "b")
    e = AddMorphism.identity(a2, x)
    z, p, i = split_idempotent(e)
    assert z == x
    assert compose(i, p) == e
    assert compose(p, i) == AddMorphism.identity(a2, z)


def test_split_zero_idempotent(a2):
    x = obj("a", "b")
    z, p, i = split_idempotent(AddMorphism.zero(a2, x, x))
    assert z == ZERO_OBJECT


def test_split_conjugated_rank_one_projector(a2):
    rng = random.Random(21)
    x = obj("a", "a")
    for _ in range(20):
        u = rand_morphism(a2, x, x, rng)
        while invert_endomorphism(u) is None:
            u = rand_morphism(a2, x, x, rng)
        uinv = invert_endomorphism(u)
        e0 = AddMorphism.single(a2, x, x, 0, 0, (1,))  # projector onto first copy
        e = compose(compose(u, e0), uinv)
        z, p, i = split_idempotent(e)
        assert z == obj("a")
        assert compose(i, p) == e
        assert compose(p, i) == AddMorphism.identity(a2, z)


def test_split_rejects_non_idempotent(a2):
    x = obj("a", "b")
    bad = AddMorphism.identity(a2, x).scale(2)
    with pytest.raises(CompositionError):
        split_idempotent(bad)


def test_krull_schmidt_multiplicities_from_orthogonal_family(a3):
    # conjugate the standard complete orthogonal family on a + a + b and
    # check the recovered multiplicities are conjugation independent
    rng = random.Random(33)
    x = obj("a", "a", "b")
    u = rand_morphism(a3, x, x, rng)
    while invert_endomorphism(u) is None:
        u = rand_morphism(a3, x, x, rng)
    uinv = invert_endomorphism(u)
    pieces = []
    for k in range(3):
        ek = AddMorphism.single(a3, x, x, k, k,
                                tuple(a3.field.one for _ in range(1)))
        e = compose(compose(u, ek), uinv)
        z, _, _ = split_idempotent(e)
        pieces.extend(z.summands)
    assert sorted(pieces) == ["a", "a", "b"]


def test_mixed_characteristic_is_a_hard_error():
    from koszulkit.fixtures import fixture_text
    from koszulkit.linalg import FieldMismatch, Matrix

    p0 = load_fixture("FIX_A2")
    data = json.loads(fixture_text("FIX_A2"))
    data["characteristic"] = 5
    p5 = OrlovPresentation.from_data(data)
    assert p0.field != p5.field
    m0 = Matrix.identity(p0.field, 2)
    m5 = Matrix.identity(p5.field, 2)
    with pytest.raises(FieldMismatch):
        m0.mul(m5)
