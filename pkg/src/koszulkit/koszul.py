"""Koszulity checks and the duality between heart and generator category.

Everything is windowed: Ext tables are Hom groups between shifted heart
simples inside a finite shift range, Yoneda products compose chain-map
representatives, and the Koszulescence surrogate only certifies the
computable necessary condition that the windowed Yoneda algebra is
generated in degree one.  Reports never claim more than the window shows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import (
    ChainIso,
    ChainMap,
    Complex,
    HomClass,
    HomSpace,
    Triangle,
    direct_sum,
    hom_space,
    _invert_iso,
)
from .linalg import Matrix
from .orlov import AddMorphism, OrlovPresentation, hom_basis, validate_presentation
from .randgen import rand_heart_complex, rng_for
from .tstructure import (
    HeartObject,
    heart_object,
    simple_object,
    weight_filtration,
)


class KoszulError(Exception):
    pass


DEFAULT_WINDOW = (-8, 8)


def express_in(space: HomSpace, reps, f: ChainMap):
    """Coordinates of the class of f against chosen representatives."""
    fld = space.x.pres.field
    if not reps:
        return [] if (f.is_zero() or space.null_homotopy(f) is not None) else None
    cols = [space.map_to_vector(r) for r in reps]
    bmat = Matrix(fld, space.total, len(cols),
                  [[cols[c][r] for c in range(len(cols))] for r in range(space.total)])
    sol = bmat.hstack(space._delta).solve(space.map_to_vector(f))
    if sol is None:
        return None
    return sol[:len(reps)]


# ------------------------------------------------------------------ tables


@dataclass
class ExtTable:
    pres: OrlovPresentation
    window: tuple
    simples: dict                 # id -> HeartObject
    spaces: dict = field(default_factory=dict)   # (s, t, i) -> HomSpace

    def space(self, s, t, i) -> HomSpace:
        key = (s, t, i)
        if key not in self.spaces:
            self.spaces[key] = hom_space(self.simples[s].normal_form,
                                         self.simples[t].normal_form, i)
        return self.spaces[key]

    def dim(self, s, t, i) -> int:
        return self.space(s, t, i).dimension

    def basis(self, s, t, i):
        return self.space(s, t, i).basis

    def yoneda(self, s, t, u, i, j):
        """Coordinate tensor of Ext^j(t,u) x Ext^i(s,t) -> Ext^{i+j}(s,u)."""
        target = self.space(s, u, i + j)
        out = []
        for y in self.basis(t, u, j):
            row = []
            for x in self.basis(s, t, i):
                comp = y.shift(i).compose(x)
                coords = target.express(comp)
                if coords is None:
                    raise KoszulError("Yoneda product failed to land in the window table")
                row.append(coords)
            out.append(row)
        return out

    def to_data(self):
        entries = []
        for s in self.pres.ids:
            for t in self.pres.ids:
                for i in range(self.window[0], self.window[1] + 1):
                    d = self.dim(s, t, i)
                    if d:
                        entries.append({"source": s, "target": t, "shift": i, "dim": d})
        return {"window": list(self.window), "entries": entries}


def ext_table(pres: OrlovPresentation, window=DEFAULT_WINDOW) -> ExtTable:
    simples = {iid: simple_object(pres, iid) for iid in pres.ids}
    table = ExtTable(pres, tuple(window), simples)
    for s in pres.ids:
        for t in pres.ids:
            for i in range(window[0], window[1] + 1):
                table.dim(s, t, i)
    return table


# ---------------------------------------------------------------- koszulity


def koszulity_check(pres: OrlovPresentation, window=DEFAULT_WINDOW, seed=0,
                    samples=12) -> dict:
    """Weight-diagonal vanishing plus the randomized two-sided checks.

    Verifies that Ext^i(S, T) vanishes unless wt T = wt S - i, that
    weight-separated objects have no Homs in either direction, and that a
    heart object missing an interior weight splits at that weight.
    """
    table = ext_table(pres, window)
    violations = []
    for s in pres.ids:
        for t in pres.ids:
            for i in range(window[0], window[1] + 1):
                d = table.dim(s, t, i)
                if d and pres.degree[t] != pres.degree[s] - i:
                    violations.append({"source": s, "target": t, "shift": i, "dim": d})

    rng = rng_for(seed, "koszulity", pres.name)
    degs = sorted({pres.degree[i] for i in pres.ids})
    separated_checked = 0
    separated_failures = []
    if len(degs) > 1:
        for _ in range(samples):
            cut = rng.choice(degs[:-1])
            low = rand_heart_complex(pres, rng, max_weight=cut)
            high = rand_heart_complex(pres, rng, min_weight=cut + 1)
            if low.is_zero or high.is_zero:
                continue
            # a shift [k] raises all weights by k, so k <= kp keeps the
            # separation: weights(x) <= cut + k < cut + 1 + kp <= weights(y)
            k = rng.randint(0, 2)
            kp = k + rng.randint(0, 2)
            x = low.shift(k)
            y = high.shift(kp)
            separated_checked += 1
            if hom_space(x, y, 0).dimension or hom_space(y, x, 0).dimension:
                separated_failures.append({"cut": cut, "shifts": [k, kp]})

    split_checked = 0
    split_failures = []
    for _ in range(samples if degs else 0):
        w = rng.choice(degs)
        x = rand_heart_complex(pres, rng, missing_weights={w})
        h = heart_object(x)
        split_checked += 1
        lower = {k: v for k, v in h.normal_form.terms.items() if -k <= w - 1}
        upper = {k: v for k, v in h.normal_form.terms.items() if -k >= w + 1}
        if set(h.normal_form.terms) != set(lower) | set(upper):
            split_failures.append({"weight": w, "reason": "weight w present"})
            continue
        crossing = [i for i in h.normal_form.diffs if (i in upper and i + 1 in lower)]
        if crossing:
            split_failures.append({"weight": w, "crossing": crossing})

    return {
        "window": list(window),
        "diagonal_violations": violations,
        "separated_pairs_checked": separated_checked,
        "separated_failures": separated_failures,
        "missing_weight_splits_checked": split_checked,
        "split_failures": split_failures,
        "ok": not (violations or separated_failures or split_failures),
    }


def koszulescence_surrogate(pres: OrlovPresentation, window=DEFAULT_WINDOW) -> dict:
    """Degree-one generation of the windowed Yoneda algebra.

    Necessary condition only: every Ext^i (i >= 2) between simples must be
    spanned by products Ext^1 o Ext^{i-1}.  A failure carries the witness
    cell and the spanned dimension.
    """
    table = ext_table(pres, window)
    fld = pres.field
    failures = []
    checked = 0
    for s in pres.ids:
        for u in pres.ids:
            for i in range(2, window[1] + 1):
                dim = table.dim(s, u, i)
                if dim == 0:
                    continue
                checked += 1
                vectors = []
                for t in pres.ids:
                    if table.dim(s, t, i - 1) == 0 or table.dim(t, u, 1) == 0:
                        continue
                    tensor = table.yoneda(s, t, u, i - 1, 1)
                    for row in tensor:
                        vectors.extend(row)
                if vectors:
                    mat = Matrix(fld, dim, len(vectors),
                                 [[vectors[c][r] for c in range(len(vectors))]
                                  for r in range(dim)])
                    spanned = mat.rank()
                else:
                    spanned = 0
                if spanned < dim:
                    failures.append({"source": s, "target": u, "shift": i,
                                     "dim": dim, "spanned": spanned})
    return {"window": list(window), "cells_checked": checked,
            "failures": failures, "ok": not failures,
            "note": "necessary condition only: degree-one generation inside the window"}


# ------------------------------------------------------------- dual objects


@dataclass
class DualPresentation:
    presentation: OrlovPresentation
    provenance: dict            # dual id -> source id
    objects: dict               # dual id -> HeartObject
    reps: dict                  # (dual src, dual tgt) -> list of ChainMap


def _presentation_from_heart_objects(pres, objects, name) -> DualPresentation:
    """Read off a finite presentation from Hom spaces between complexes.

    ``objects`` maps new ids to (Complex, degree, provenance id); End
    spaces must be one-dimensional and use the identity as basis.
    """
    ids = list(objects)
    indecs = [{"id": nid, "degree": objects[nid][1]} for nid in ids]
    hom_entries = []
    reps = {}
    for src in ids:
        for tgt in ids:
            nf_s = objects[src][0]
            nf_t = objects[tgt][0]
            sp = hom_space(nf_s, nf_t, 0)
            if src == tgt:
                if sp.dimension != 1:
                    raise KoszulError(
                        f"End({src}) has dimension {sp.dimension}; not an Orlov object")
                reps[(src, tgt)] = [ChainMap.identity(nf_s)]
                hom_entries.append({"src": src, "tgt": tgt, "basis": [f"1@{src}"]})
            elif sp.dimension:
                reps[(src, tgt)] = list(sp.basis)
                hom_entries.append({
                    "src": src, "tgt": tgt,
                    "basis": [f"q{k}@{src}->{tgt}" for k in range(sp.dimension)]})
            else:
                reps[(src, tgt)] = []
    label_of = {}
    for entry in hom_entries:
        for k, lab in enumerate(entry["basis"]):
            label_of[(entry["src"], entry["tgt"], k)] = lab
    compose_entries = []
    for mid in ids:
        for src in ids:
            if not reps[(src, mid)]:
                continue
            for tgt in ids:
                if not reps[(mid, tgt)]:
                    continue
                sp_out = hom_space(objects[src][0], objects[tgt][0], 0)
                for gi, g in enumerate(reps[(mid, tgt)]):
                    for fi, f in enumerate(reps[(src, mid)]):
                        if mid in (src, tgt):
                            continue     # unit laws are implicit
                        coords = express_in(sp_out, reps[(src, tgt)], g.compose(f))
                        if coords is None:
                            raise KoszulError("composite escapes the computed hom basis")
                        result = [
                            {"label": label_of[(src, tgt, k)], "coeff": pres.field.format(c)}
                            for k, c in enumerate(coords) if c
                        ]
                        if result:
                            compose_entries.append({
                                "left": label_of[(mid, tgt, gi)],
                                "right": label_of[(src, mid, fi)],
                                "result": result})
    dual = OrlovPresentation(pres.characteristic, indecs, hom_entries,
                             compose_entries, name=name)
    return DualPresentation(dual, {nid: objects[nid][2] for nid in ids},
                            {nid: objects[nid][0] for nid in ids}, reps)


def orl_of_kos(pres: OrlovPresentation, window=DEFAULT_WINDOW) -> DualPresentation:
    """Pure weight-0 objects of the heart's derived category: each simple
    re-shifted by minus its weight, recovering a presentation of the
    generator category inside the homotopy category."""
    objects = {}
    for iid in pres.ids:
        shifted = simple_object(pres, iid).normal_form.shift(-pres.degree[iid])
        objects[iid] = (shifted, pres.degree[iid], iid)
    return _presentation_from_heart_objects(pres, objects, name=f"Orl(Kos({pres.name}))")


def roundtrip_check(pres: OrlovPresentation, window=DEFAULT_WINDOW) -> dict:
    """Compare the reconstructed presentation against the original.

    Dimension tables must agree on the nose; structure constants must agree
    through the change of basis sending each reconstructed basis class to
    its chain-map representative's degree-0 block.
    """
    dual = orl_of_kos(pres, window)
    d = dual.presentation
    mismatches = []

    for iid in pres.ids:
        if d.degree[iid] != pres.degree[iid]:
            mismatches.append({"kind": "degree", "object": iid})
    for s in pres.ids:
        for t in pres.ids:
            if pres.hom_dim(s, t) != d.hom_dim(s, t):
                mismatches.append({"kind": "dimension", "pair": [s, t],
                                   "original": pres.hom_dim(s, t),
                                   "reconstructed": d.hom_dim(s, t)})
    if mismatches:
        return {"ok": False, "mismatches": mismatches}

    # change of basis: the degree-0 block coordinates of each representative
    cob = {}
    for s in pres.ids:
        for t in pres.ids:
            cols = []
            for rep in dual.reps[(s, t)]:
                comp = rep.component(0)
                block = comp.blocks[0][0] if comp.blocks else None
                dim = pres.hom_dim(s, t)
                cols.append(tuple(block) if block is not None
                            else (pres.field.zero,) * dim)
            cob[(s, t)] = cols

    for (g, f), result in sorted(d.comp.items()):
        if g.startswith("1@") or f.startswith("1@"):
            continue
        fs, ft = d.label_pair[f]
        gs, gt = d.label_pair[g]
        fvec = cob[(fs, ft)][d.label_index[f]]
        gvec = cob[(gs, gt)][d.label_index[g]]
        via_p = pres.compose_coords(fs, ft, gt, gvec, fvec)
        if via_p is None:
            via_p = (pres.field.zero,) * pres.hom_dim(fs, gt)
        out_labels = d.hom_labels(fs, gt)
        got = [pres.field.zero] * pres.hom_dim(fs, gt)
        for lab, c in result.items():
            base = cob[(fs, gt)][out_labels.index(lab)]
            got = [pres.field.add(a, pres.field.mul(c, b)) for a, b in zip(got, base)]
        if tuple(got) != tuple(via_p):
            mismatches.append({"kind": "structure_constant", "left": g, "right": f})
            break

    return {"ok": not mismatches, "mismatches": mismatches}


# ------------------------------------------------------------------ Q data


def q_functor(m: HeartObject) -> dict:
    """Normal-form read-off: terms are the weight-graded pieces re-shifted,
    differentials are the connecting extension classes; d^2 = 0 inherited."""
    nf = m.normal_form
    pieces = weight_filtration(m)
    classes = {}
    for i, d in nf.diffs.items():
        k = -i
        gr_k = pieces[k].normal_form
        gr_prev = pieces[k - 1].normal_form
        comp = ChainMap(gr_k, gr_prev.shift(1), {i: d}, check=False)
        classes[k] = HomClass(comp)
    complex_out = Complex(nf.pres, dict(nf.terms), dict(nf.diffs))
    return {"complex": complex_out, "boundary_classes": classes}


def q_ses_triangle(incl: ChainMap, proj: ChainMap) -> Triangle:
    """Image of a short exact sequence of heart objects: a split triangle.

    Takes chain maps A -> E -> B between antidiagonal normal forms with
    proj o incl = 0; finds degreewise sections, conjugates E into literal
    direct-sum form and returns the termwise-split triangle carrying the
    original inclusion and projection.
    """
    a_cx, e_cx, b_cx = incl.source, incl.target, proj.target
    if proj.source != e_cx:
        raise KoszulError("ses maps are not composable")
    pres = e_cx.pres
    if not proj.compose(incl).is_zero():
        raise KoszulError("proj o incl != 0")
    w_comps = {}
    for k in e_cx.terms:
        ak, bk, ek = a_cx.term(k), b_cx.term(k), e_cx.term(k)
        if sorted(ak.summands + bk.summands) != sorted(ek.summands):
            raise KoszulError(f"terms at degree {k} are not extension-compatible")
        pk = proj.component(k)
        basis, dim = hom_basis(pres, bk, ek)
        target_dim = len(AddMorphism.identity(pres, bk).to_vector())
        cols = [pk.compose(cand).to_vector() for cand in basis]
        mat = Matrix(pres.field, target_dim, dim,
                     [[cols[c][r] for c in range(dim)] for r in range(target_dim)])
        sol = mat.solve(AddMorphism.identity(pres, bk).to_vector())
        if sol is None:
            raise KoszulError(f"projection admits no section at degree {k}")
        section = AddMorphism.zero(pres, bk, ek)
        for c, cand in zip(sol, basis):
            if c:
                section = section.add(cand.scale(c))
        ik = incl.component(k)
        blocks = tuple(
            tuple((ik.blocks[r] + section.blocks[r])[c] for c in range(len(ak) + len(bk)))
            for r in range(len(ek)))
        w_comps[k] = AddMorphism(pres, ak.concat(bk), ek, blocks)

    w_inv = {k: _invert_iso(w) for k, w in w_comps.items()}
    terms = {k: a_cx.term(k).concat(b_cx.term(k)) for k in e_cx.terms}
    diffs = {}
    for i, dmat in e_cx.diffs.items():
        diffs[i] = w_inv[i + 1].compose(dmat).compose(w_comps[i])
    e_split = Complex(pres, terms, diffs)
    sel_sub = {k: tuple(range(len(a_cx.term(k)))) for k in e_split.terms}
    sel_quot = {k: tuple(range(len(a_cx.term(k)), len(e_split.term(k))))
                for k in e_split.terms}
    base = Triangle.from_termwise_split(e_split, sel_sub, sel_quot)
    w_map = ChainMap(e_split, e_cx, w_comps, check=False)
    w_map_inv = ChainMap(e_cx, e_split, w_inv, check=False)
    return Triangle.transport(base, None, ChainIso.exact(w_map, w_map_inv), None)


# ----------------------------------------------------------- injectives


@dataclass
class DetectedInjective:
    socle: str
    heart: HeartObject
    degree: int
    length: int


def injective_detect(pres: OrlovPresentation, window=DEFAULT_WINDOW,
                     length_bound=6, assume_koszul=False) -> dict:
    """Injective envelopes of the heart simples by universal extensions.

    Iteratively extends each simple by the full first-extension space of
    every simple until all such spaces vanish or the length bound is hit;
    in the latter case the result is reported incomplete rather than fatal.
    Requires the weight-diagonal vanishing to hold (checked unless the
    caller has already verified it).
    """
    if not assume_koszul and not koszulity_check(pres, window)["ok"]:
        raise KoszulError("koszulity check failed; injective search not run")
    simples = {iid: simple_object(pres, iid) for iid in pres.ids}
    found = []
    incomplete = []
    for seed in pres.ids:
        current = simples[seed].normal_form
        complete = False
        for _ in range(64):
            ext_reps = []
            for m_id in pres.ids:
                sp = hom_space(simples[m_id].normal_form, current, 1)
                for rep in sp.basis:
                    ext_reps.append((m_id, rep))
            if not ext_reps:
                complete = True
                break
            current = _universal_extension(pres, current, ext_reps)
            length = sum(len(t) for t in current.terms.values())
            if length > length_bound:
                break
        length = sum(len(t) for t in current.terms.values())
        entry = DetectedInjective(seed, heart_object(current), -pres.degree[seed], length)
        found.append(entry)
        if not complete:
            incomplete.append(seed)
    return {
        "injectives": found,
        "complete": not incomplete,
        "incomplete_seeds": incomplete,
        "expected_count": len(pres.ids),
        "found_count": len(found),
    }


def _universal_extension(pres, j_cx: Complex, ext_reps) -> Complex:
    """Extension of the sum of sources by j realizing every listed class."""
    u_cx = Complex.zero(pres)
    shifted = []
    for m_id, rep in ext_reps:
        src = rep.source
        u_cx, *_ = direct_sum(u_cx, src)
        shifted.append(rep)
    terms = {}
    for k in set(u_cx.terms) | set(j_cx.terms):
        terms[k] = u_cx.term(k).concat(j_cx.term(k))
    diffs = {}
    for k in sorted(terms):
        if k + 1 not in terms:
            continue
        usrc, jsrc = u_cx.term(k), j_cx.term(k)
        utgt, jtgt = u_cx.term(k + 1), j_cx.term(k + 1)
        blocks = [[None] * (len(usrc) + len(jsrc)) for _ in range(len(utgt) + len(jtgt))]
        dj = j_cx.d(k)
        for r in range(len(jtgt)):
            for c in range(len(jsrc)):
                blocks[len(utgt) + r][len(usrc) + c] = dj.blocks[r][c]
        offset = 0
        for m_id, rep in ext_reps:
            src = rep.source
            width = len(src.term(k))
            comp = rep.component(k)     # src^k -> j[1]^k = j^{k+1}
            for r in range(len(jtgt)):
                for c in range(width):
                    blocks[len(utgt) + r][offset + c] = comp.blocks[r][c]
            offset += width
        m = AddMorphism(pres, terms[k], terms[k + 1],
                        tuple(tuple(rw) for rw in blocks))
        if not m.is_zero():
            diffs[k] = m
    return Complex(pres, terms, diffs)


def koszul_dual(pres: OrlovPresentation, window=DEFAULT_WINDOW,
                length_bound=6) -> DualPresentation:
    """The generator category of detected injectives, as a presentation.

    Gated on the koszulity check and the degree-one-generation surrogate.
    """
    if not validate_presentation(pres).ok:
        raise KoszulError("input presentation fails validation")
    if not koszulity_check(pres, window).get("ok"):
        raise KoszulError("koszulity check failed; dual not computed")
    if not koszulescence_surrogate(pres, window).get("ok"):
        raise KoszulError("degree-one-generation surrogate failed; dual not computed")
    report = injective_detect(pres, window, length_bound, assume_koszul=True)
    if not report["complete"]:
        raise KoszulError(f"injective search incomplete for {report['incomplete_seeds']}")
    objects = {}
    for inj in report["injectives"]:
        objects[f"J_{inj.socle}"] = (inj.heart.normal_form, inj.degree, inj.socle)
    dual = _presentation_from_heart_objects(pres, objects, name=f"dual({pres.name})")
    vr = validate_presentation(dual.presentation)
    if not vr.ok:
        raise KoszulError(f"dual presentation fails the axioms: {vr.to_data()}")
    return dual


def ext1_matrix(pres: OrlovPresentation) -> dict:
    out = {}
    for s in pres.ids:
        for t in pres.ids:
            d = hom_space(simple_object(pres, s).normal_form,
                          simple_object(pres, t).normal_form, 1).dimension
            if d:
                out[(s, t)] = d
    return out


def double_dual_check(pres: OrlovPresentation, window=DEFAULT_WINDOW,
                      length_bound=6) -> dict:
    """Match the first-extension matrix of the dual heart against the
    original through some bijection of simples; the matching found is
    reported, not asserted as a canonical direction."""
    dual = koszul_dual(pres, window, length_bound)
    d = dual.presentation
    m1 = ext1_matrix(pres)
    m2 = ext1_matrix(d)

    def matches(assign, transpose):
        for (s2, t2), dim in m2.items():
            key = (assign[t2], assign[s2]) if transpose else (assign[s2], assign[t2])
            if m1.get(key, 0) != dim:
                return False
        for (s1, t1), dim in m1.items():
            inv = {v: k for k, v in assign.items()}
            key = (inv[t1], inv[s1]) if transpose else (inv[s1], inv[t1])
            if m2.get(key, 0) != dim:
                return False
        return True

    candidates = []
    prov = dict(dual.provenance)
    for transpose in (False, True):
        if matches(prov, transpose):
            candidates.append((prov, transpose, "provenance"))
            break
    if not candidates:
        from itertools import permutations

        for perm in permutations(pres.ids):
            assign = {d_id: p_id for d_id, p_id in zip(d.ids, perm)}
            for transpose in (False, True):
                if matches(assign, transpose):
                    candidates.append((assign, transpose, "searched"))
                    break
            if candidates:
                break

    fmt1 = {f"{s}->{t}": v for (s, t), v in sorted(m1.items())}
    fmt2 = {f"{s}->{t}": v for (s, t), v in sorted(m2.items())}
    if not candidates:
        return {"ok": False, "ext1_original": fmt1, "ext1_dual": fmt2,
                "matching": None}
    assign, transpose, how = candidates[0]
    return {"ok": True, "ext1_original": fmt1, "ext1_dual": fmt2,
            "matching": {k: assign[k] for k in sorted(assign)},
            "orientation": "reversed" if transpose else "direct",
            "matching_source": how}
