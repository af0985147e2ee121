"""Finite presentations of graded additive categories and their additive closure.

A presentation lists finitely many indecomposables with integer degrees,
explicit bases of every Hom space, and composition structure constants.
Objects of the additive closure are ordered lists of indecomposables;
morphisms are block grids of coordinate vectors.  The degree axioms checked
by :func:`validate_presentation` force every nonzero morphism between
non-isomorphic indecomposables to lower the degree strictly, so the
radical is nilpotent and idempotents split by an explicit triangular
reduction (:func:`split_idempotent`).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .linalg import Field, Matrix


class PresentationError(Exception):
    pass


class MalformedPresentation(PresentationError):
    pass


class CompositionError(PresentationError):
    pass


def identity_label(indec_id: str) -> str:
    return f"1@{indec_id}"


class OrlovPresentation:
    """Resolved presentation; immutable after construction.

    ``hom`` maps (src, tgt) pairs to ordered basis label tuples, ``comp``
    maps (later label, earlier label) to {result label: coefficient}.
    Unit compositions are filled in automatically; missing entries mean 0.
    """

    def __init__(self, characteristic, indecomposables, hom, compose, name="anonymous"):
        self.name = name
        self.field = Field(characteristic)
        self.characteristic = characteristic

        self.ids = []
        self.degree = {}
        for entry in indecomposables:
            iid, deg = entry["id"], entry["degree"]
            if iid in self.degree:
                raise MalformedPresentation(f"duplicate indecomposable id {iid!r}")
            self.ids.append(iid)
            self.degree[iid] = int(deg)
        self.ids = tuple(self.ids)

        self.pairs = {}
        self.label_pair = {}
        for entry in hom:
            src, tgt, basis = entry["src"], entry["tgt"], tuple(entry["basis"])
            if src not in self.degree or tgt not in self.degree:
                raise MalformedPresentation(f"hom space references unknown object ({src},{tgt})")
            if (src, tgt) in self.pairs:
                raise MalformedPresentation(f"duplicate hom entry for ({src},{tgt})")
            self.pairs[(src, tgt)] = basis
            for lab in basis:
                if lab in self.label_pair:
                    raise MalformedPresentation(f"duplicate basis label {lab!r}")
                self.label_pair[lab] = (src, tgt)
        # every End space carries the implicit identity basis label
        for iid in self.ids:
            unit = identity_label(iid)
            if (iid, iid) not in self.pairs:
                self.pairs[(iid, iid)] = (unit,)
                self.label_pair[unit] = (iid, iid)
            elif unit not in self.pairs[(iid, iid)]:
                raise MalformedPresentation(f"End({iid}) is missing its identity label {unit!r}")
        self.label_index = {
            lab: i for basis in self.pairs.values() for i, lab in enumerate(basis)
        }

        self.comp = {}
        for entry in compose:
            g, f = entry["left"], entry["right"]
            if g not in self.label_pair or f not in self.label_pair:
                raise MalformedPresentation(f"compose entry uses unknown label ({g},{f})")
            (fs, ft), (gs, gt) = self.label_pair[f], self.label_pair[g]
            if ft != gs:
                raise MalformedPresentation(f"compose entry ({g},{f}) is not composable")
            result = {}
            for term in entry["result"]:
                lab, coeff = term["label"], self.field.parse(str(term["coeff"]))
                if lab not in self.label_pair:
                    raise MalformedPresentation(f"compose result uses unknown label {lab!r}")
                if self.label_pair[lab] != (fs, gt):
                    raise MalformedPresentation(
                        f"compose result {lab!r} lands in the wrong hom space")
                result[lab] = coeff
            key = (g, f)
            if key in self.comp:
                raise MalformedPresentation(f"duplicate compose entry {key}")
            self.comp[key] = result
        for lab, (src, tgt) in self.label_pair.items():
            for key in ((identity_label(tgt), lab), (lab, identity_label(src))):
                if key in self.comp and self.comp[key] != {lab: self.field.one}:
                    raise MalformedPresentation(f"compose entry {key} contradicts the unit law")
                self.comp[key] = {lab: self.field.one}

    # -------------------------------------------------------------- lookups

    def hom_labels(self, src: str, tgt: str):
        return self.pairs.get((src, tgt), ())

    def hom_dim(self, src: str, tgt: str) -> int:
        return len(self.hom_labels(src, tgt))

    def compose_labels(self, g: str, f: str) -> dict:
        return self.comp.get((g, f), {})

    def compose_coords(self, src, mid, tgt, gcoords, fcoords):
        """Coordinates of (g o f) given coordinates in the two hom bases."""
        glabels = self.hom_labels(mid, tgt)
        flabels = self.hom_labels(src, mid)
        out_labels = self.hom_labels(src, tgt)
        out = {lab: self.field.zero for lab in out_labels}
        fld = self.field
        any_nonzero = False
        for gc, gl in zip(gcoords, glabels):
            if not gc:
                continue
            for fc, fl in zip(fcoords, flabels):
                if not fc:
                    continue
                for rl, rc in self.compose_labels(gl, fl).items():
                    out[rl] = fld.add(out[rl], fld.mul(fld.mul(gc, fc), rc))
                    any_nonzero = True
        if not any_nonzero:
            return None
        vec = tuple(out[lab] for lab in out_labels)
        return vec if any(vec) else None

    def to_data(self) -> dict:
        hom = [
            {"src": s, "tgt": t, "basis": list(basis)}
            for (s, t), basis in sorted(self.pairs.items())
        ]
        compose = []
        for (g, f), result in sorted(self.comp.items()):
            if g.startswith("1@") or f.startswith("1@"):
                continue
            compose.append({
                "left": g,
                "right": f,
                "result": [
                    {"label": lab, "coeff": self.field.format(c)}
                    for lab, c in sorted(result.items()) if c
                ],
            })
        return {
            "characteristic": self.characteristic,
            "indecomposables": [{"id": i, "degree": self.degree[i]} for i in self.ids],
            "hom": hom,
            "compose": compose,
        }

    @classmethod
    def from_data(cls, data: dict, name="anonymous") -> "OrlovPresentation":
        for key in ("characteristic", "indecomposables", "hom"):
            if key not in data:
                raise MalformedPresentation(f"missing top-level key {key!r}")
        return cls(
            data["characteristic"], data["indecomposables"], data["hom"],
            data.get("compose", []), name=name,
        )

    @classmethod
    def from_file(cls, path) -> "OrlovPresentation":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return cls.from_data(data, name=str(path))


# ------------------------------------------------------------------ objects


@dataclass(frozen=True)
class AddObject:
    """Formal direct sum: an ordered tuple of indecomposable ids."""

    summands: tuple

    def __len__(self):
        return len(self.summands)

    def __iter__(self):
        return iter(self.summands)

    def __getitem__(self, i):
        return self.summands[i]

    @property
    def is_zero(self):
        return not self.summands

    def degrees(self, pres: OrlovPresentation):
        return tuple(pres.degree[s] for s in self.summands)

    def is_homogeneous(self, pres: OrlovPresentation):
        degs = set(self.degrees(pres))
        return len(degs) <= 1

    def concat(self, other: "AddObject") -> "AddObject":
        return AddObject(self.summands + other.summands)

    def multiset(self):
        out = {}
        for s in self.summands:
            out[s] = out.get(s, 0) + 1
        return out

    def same_up_to_permutation(self, other: "AddObject") -> bool:
        return sorted(self.summands) == sorted(other.summands)


ZERO_OBJECT = AddObject(())


def obj(*ids) -> AddObject:
    return AddObject(tuple(ids))


class AddMorphism:
    """Block morphism between additive-closure objects.

    ``blocks[i][j]`` holds the coordinates of the (target summand i,
    source summand j) component in the presentation basis of
    Hom(source[j], target[i]); None encodes the zero block.
    """

    __slots__ = ("pres", "source", "target", "blocks")

    def __init__(self, pres, source: AddObject, target: AddObject, blocks):
        self.pres = pres
        self.source = source
        self.target = target
        self.blocks = blocks

    # -------------------------------------------------------- constructors

    @staticmethod
    def zero(pres, source: AddObject, target: AddObject) -> "AddMorphism":
        blocks = tuple(tuple(None for _ in source) for _ in target)
        return AddMorphism(pres, source, target, blocks)

    @staticmethod
    def identity(pres, x: AddObject) -> "AddMorphism":
        blocks = []
        for i, ti in enumerate(x):
            row = []
            for j, sj in enumerate(x):
                if i == j:
                    basis = pres.hom_labels(sj, ti)
                    unit = identity_label(sj)
                    row.append(tuple(
                        pres.field.one if lab == unit else pres.field.zero for lab in basis))
                else:
                    row.append(None)
            blocks.append(tuple(row))
        return AddMorphism(pres, x, x, tuple(blocks))

    @staticmethod
    def single(pres, source: AddObject, target: AddObject, i, j, coords) -> "AddMorphism":
        """Morphism with a single nonzero block at (target i, source j)."""
        coords = tuple(coords)
        blocks = tuple(
            tuple(coords if (r == i and c == j and any(coords)) else None
                  for c in range(len(source)))
            for r in range(len(target))
        )
        return AddMorphism(pres, source, target, blocks)

    @staticmethod
    def from_blocks(pres, source, target, blocks) -> "AddMorphism":
        norm = []
        for i in range(len(target)):
            row = []
            for j in range(len(source)):
                b = blocks[i][j]
                if b is not None:
                    b = tuple(b)
                    dim = pres.hom_dim(source[j], target[i])
                    if len(b) != dim:
                        raise MalformedPresentation(
                            f"block ({i},{j}) has {len(b)} coords, expected {dim}")
                    if not any(b):
                        b = None
                row.append(b)
            norm.append(tuple(row))
        return AddMorphism(pres, source, target, tuple(norm))

    # ------------------------------------------------------------- algebra

    def block(self, i, j):
        return self.blocks[i][j]

    def is_zero(self) -> bool:
        return all(b is None for row in self.blocks for b in row)

    def __eq__(self, other):
        if not isinstance(other, AddMorphism):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.blocks == other.blocks)

    def __repr__(self):
        return f"AddMorphism({'+'.join(self.source) or '0'} -> {'+'.join(self.target) or '0'})"

    def add(self, other: "AddMorphism") -> "AddMorphism":
        if self.source != other.source or self.target != other.target:
            raise CompositionError("add: object mismatch")
        fld = self.pres.field
        blocks = []
        for ra, rb in zip(self.blocks, other.blocks):
            row = []
            for a, b in zip(ra, rb):
                if a is None:
                    row.append(b)
                elif b is None:
                    row.append(a)
                else:
                    s = tuple(fld.add(x, y) for x, y in zip(a, b))
                    row.append(s if any(s) else None)
            blocks.append(tuple(row))
        return AddMorphism(self.pres, self.source, self.target, tuple(blocks))

    def scale(self, c) -> "AddMorphism":
        fld = self.pres.field
        c = fld.of(c)
        if not c:
            return AddMorphism.zero(self.pres, self.source, self.target)
        blocks = tuple(
            tuple(None if b is None else tuple(fld.mul(c, x) for x in b) for b in row)
            for row in self.blocks
        )
        return AddMorphism(self.pres, self.source, self.target, blocks)

    def sub(self, other: "AddMorphism") -> "AddMorphism":
        return self.add(other.scale(-1))

    def compose(self, other: "AddMorphism") -> "AddMorphism":
        """self o other (apply ``other`` first)."""
        if other.target != self.source:
            raise CompositionError("compose: object mismatch")
        pres = self.pres
        fld = pres.field
        src, mid, tgt = other.source, self.source, self.target
        blocks = []
        for i in range(len(tgt)):
            row = []
            for j in range(len(src)):
                acc = None
                for k in range(len(mid)):
                    g = self.blocks[i][k]
                    f = other.blocks[k][j]
                    if g is None or f is None:
                        continue
                    term = pres.compose_coords(src[j], mid[k], tgt[i], g, f)
                    if term is None:
                        continue
                    acc = term if acc is None else tuple(
                        fld.add(x, y) for x, y in zip(acc, term))
                if acc is not None and not any(acc):
                    acc = None
                row.append(acc)
            blocks.append(tuple(row))
        return AddMorphism(pres, src, tgt, tuple(blocks))

    # ------------------------------------------------------- flat vectors

    def to_vector(self):
        """Flatten to the coordinate order of :func:`hom_basis`."""
        pres = self.pres
        out = []
        for i, ti in enumerate(self.target):
            for j, sj in enumerate(self.source):
                dim = pres.hom_dim(sj, ti)
                b = self.blocks[i][j]
                out.extend(b if b is not None else (pres.field.zero,) * dim)
        return out

    @staticmethod
    def from_vector(pres, source: AddObject, target: AddObject, vec) -> "AddMorphism":
        pos = 0
        blocks = []
        for ti in target:
            row = []
            for sj in source:
                dim = pres.hom_dim(sj, ti)
                coords = tuple(vec[pos:pos + dim])
                pos += dim
                row.append(coords if any(coords) else None)
            blocks.append(tuple(row))
        return AddMorphism(pres, source, target, tuple(blocks))


def hom_dim_add(pres, x: AddObject, y: AddObject) -> int:
    return sum(pres.hom_dim(sj, ti) for ti in y for sj in x)


def hom_basis(pres, x: AddObject, y: AddObject):
    """Elementary single-block basis of Hom_add(x, y), with its dimension."""
    basis = []
    for i, ti in enumerate(y):
        for j, sj in enumerate(x):
            labels = pres.hom_labels(sj, ti)
            for k in range(len(labels)):
                coords = tuple(
                    pres.field.one if m == k else pres.field.zero for m in range(len(labels)))
                basis.append(AddMorphism.single(pres, x, y, i, j, coords))
    return basis, len(basis)


def compose(g: AddMorphism, f: AddMorphism) -> AddMorphism:
    return g.compose(f)


# ----------------------------------------------------------------- validate


@dataclass
class Finding:
    kind: str
    witness: tuple
    detail: str

    def to_data(self):
        return {"kind": self.kind, "witness": list(self.witness), "detail": self.detail}


@dataclass
class ValidationReport:
    findings: list

    @property
    def ok(self):
        return not self.findings

    def to_data(self):
        return {"ok": self.ok, "findings": [f.to_data() for f in self.findings]}


def validate_presentation(source) -> ValidationReport:
    """Check the degree axioms and composition coherence of a presentation.

    Accepts either raw JSON-style data or a resolved presentation.  Shape
    problems are reported as ``malformed`` findings, distinct from axiom
    violations, which carry an explicit witness.
    """
    findings = []
    if isinstance(source, OrlovPresentation):
        pres = source
    else:
        try:
            pres = OrlovPresentation.from_data(source)
        except MalformedPresentation as exc:
            return ValidationReport([Finding("malformed", (), str(exc))])

    fld = pres.field
    for iid in pres.ids:
        basis = pres.hom_labels(iid, iid)
        if len(basis) != 1:
            findings.append(Finding(
                "end_not_scalar", (iid,),
                f"End({iid}) has dimension {len(basis)}, expected 1"))
    for (src, tgt), basis in sorted(pres.pairs.items()):
        if src != tgt and basis and pres.degree[src] <= pres.degree[tgt]:
            findings.append(Finding(
                "hom_degree_violation", (src, tgt),
                f"Hom({src},{tgt}) nonzero but deg {src} = {pres.degree[src]} <= "
                f"deg {tgt} = {pres.degree[tgt]}"))

    labels = sorted(pres.label_pair)
    by_source = {}
    for lab in labels:
        by_source.setdefault(pres.label_pair[lab][0], []).append(lab)

    def as_coords(lab):
        src, tgt = pres.label_pair[lab]
        basis = pres.hom_labels(src, tgt)
        return tuple(fld.one if b == lab else fld.zero for b in basis)

    def comp2(g, f):
        src = pres.label_pair[f][0]
        tgt = pres.label_pair[g][1]
        out = {lab: fld.zero for lab in pres.hom_labels(src, tgt)}
        for rl, rc in pres.compose_labels(g, f).items():
            out[rl] = fld.add(out[rl], rc)
        return out

    def comp_lin(g, fdict, src):
        tgt = pres.label_pair[g][1]
        out = {lab: fld.zero for lab in pres.hom_labels(src, tgt)}
        for fl, fc in fdict.items():
            if not fc:
                continue
            for rl, rc in pres.compose_labels(g, fl).items():
                out[rl] = fld.add(out[rl], fld.mul(fc, rc))
        return out

    def comp_lin_right(gdict, f, tgt):
        src = pres.label_pair[f][0]
        out = {lab: fld.zero for lab in pres.hom_labels(src, tgt)}
        for gl, gc in gdict.items():
            if not gc:
                continue
            for rl, rc in pres.compose_labels(gl, f).items():
                out[rl] = fld.add(out[rl], fld.mul(gc, rc))
        return out

    for f in labels:
        fs, ft = pres.label_pair[f]
        for g in by_source.get(ft, ()):
            gs, gt = pres.label_pair[g]
            for h in by_source.get(gt, ()):
                left = comp_lin(h, comp2(g, f), fs)       # h o (g o f)
                right = comp_lin_right(comp2(h, g), f, pres.label_pair[h][1])
                if left != right:
                    findings.append(Finding(
                        "associativity", (h, g, f),
                        "h o (g o f) != (h o g) o f on basis triple"))

    for lab in labels:
        src, tgt = pres.label_pair[lab]
        if comp2(identity_label(tgt), lab) != dict(zip(pres.hom_labels(src, tgt), as_coords(lab))):
            findings.append(Finding("unit_law", (lab,), "left unit law fails"))
        if comp2(lab, identity_label(src)) != dict(zip(pres.hom_labels(src, tgt), as_coords(lab))):
            findings.append(Finding("unit_law", (lab,), "right unit law fails"))

    return ValidationReport(findings)


# --------------------------------------------------------------- idempotents


def isotypic_part(m: AddMorphism) -> AddMorphism:
    """Keep only blocks between equal indecomposables (scalar blocks)."""
    blocks = tuple(
        tuple(b if m.source[j] == m.target[i] else None for j, b in enumerate(row))
        for i, row in enumerate(m.blocks)
    )
    return AddMorphism(m.pres, m.source, m.target, blocks)


def radical_part(m: AddMorphism) -> AddMorphism:
    return m.sub(isotypic_part(m))


def invert_endomorphism(m: AddMorphism):
    """Inverse of an endomorphism of an additive-closure object, or None.

    Splits m = D + N with D the isotypic diagonal and N in the radical;
    m is invertible iff every isotypic block of D is, and then the inverse
    is the terminating geometric series D^-1 sum (-N D^-1)^k.
    """
    if m.source != m.target:
        raise CompositionError("invert: not an endomorphism")
    pres, x = m.pres, m.source
    fld = pres.field
    d = isotypic_part(m)
    # invert the isotypic diagonal classwise (blocks are scalars on the unit)
    positions = {}
    for i, s in enumerate(x):
        positions.setdefault(s, []).append(i)
    dinv = AddMorphism.zero(pres, x, x)
    inv_blocks = [list(row) for row in dinv.blocks]
    for s, pos in positions.items():
        unit_idx = pres.hom_labels(s, s).index(identity_label(s))
        mat = Matrix.from_rows(fld, [
            [(d.blocks[i][j][unit_idx] if d.blocks[i][j] is not None else fld.zero)
             for j in pos] for i in pos
        ])
        if mat.rank() != len(pos):
            return None
        aug = mat.hstack(Matrix.identity(fld, len(pos)))
        r, _, _ = aug.rref()
        inv = [row[len(pos):] for row in r.data]
        basis_len = pres.hom_dim(s, s)
        for a, i in enumerate(pos):
            for b, j in enumerate(pos):
                c = inv[a][b]
                if c:
                    coords = tuple(
                        c if k == unit_idx else fld.zero for k in range(basis_len))
                    inv_blocks[i][j] = coords
    dinv = AddMorphism(pres, x, x, tuple(tuple(r) for r in inv_blocks))
    n = radical_part(m)
    # (D + N)^-1 = D^-1 (1 + N D^-1)^-1; N D^-1 is nilpotent
    z = n.compose(dinv).scale(-1)
    acc = AddMorphism.identity(pres, x)
    power = AddMorphism.identity(pres, x)
    for _ in range(len(x) + 1):
        power = power.compose(z)
        if power.is_zero():
            break
        acc = acc.add(power)
    else:
        if not power.is_zero():
            raise CompositionError("radical series failed to terminate")
    return dinv.compose(acc)


def split_idempotent(e: AddMorphism):
    """Split e = i o p with p o i = id, for an exact idempotent e.

    Returns (z, p, i): the image object as a sub-multiset of summands and
    the projection/inclusion pair.  Follows the triangular reduction: the
    isotypic diagonal of e is an exact idempotent of a product of matrix
    algebras, gets diagonalized there, and the remaining radical part is
    removed by conjugating with the invertible element
    g = E e' + (1-E)(1-e'), which is unipotent modulo the radical.
    """
    if e.source != e.target:
        raise CompositionError("split_idempotent: not an endomorphism")
    if e.compose(e) != e:
        raise CompositionError("split_idempotent: morphism is not idempotent")
    pres, x = e.pres, e.source
    fld = pres.field
    ident = AddMorphism.identity(pres, x)

    positions = {}
    for i, s in enumerate(x):
        positions.setdefault(s, []).append(i)

    # diagonalize the isotypic part classwise: P^-1 d P = [[1,0],[0,0]]
    d = isotypic_part(e)
    conj_blocks = [[None] * len(x) for _ in range(len(x))]
    keep = []
    for s, pos in sorted(positions.items()):
        unit_idx = pres.hom_labels(s, s).index(identity_label(s))
        rows = [
            [(d.blocks[i][j][unit_idx] if d.blocks[i][j] is not None else fld.zero)
             for j in pos] for i in pos
        ]
        mat = Matrix.from_rows(fld, rows)
        n = len(pos)
        # image basis: pivot columns of e; kernel basis completes it
        _, pivots, rank = mat.rref()
        img = [[mat.data[i][j] for j in pivots] for i in range(n)]
        ker = mat.kernel_basis()
        pmat = Matrix(fld, n, rank, img).hstack(ker) if rank else ker
        if pmat.cols != n or pmat.rank() != n:
            raise CompositionError("idempotent diagonal did not diagonalize")
        aug = pmat.hstack(Matrix.identity(fld, n))
        r, _, _ = aug.rref()
        pinv = [row[n:] for row in r.data]
        keep.extend(pos[:rank])
        basis_len = pres.hom_dim(s, s)
        for a, i in enumerate(pos):
            for b, j in enumerate(pos):
                c = pinv[a][b]
                if c:
                    conj_blocks[i][j] = tuple(
                        c if k == unit_idx else fld.zero for k in range(basis_len))
    u = AddMorphism(pres, x, x, tuple(tuple(r) for r in conj_blocks))
    uinv = invert_endomorphism(u)
    e1 = u.compose(e).compose(uinv)

    keep = sorted(keep)
    z = AddObject(tuple(x[i] for i in keep))
    # standard projector onto the kept positions
    eblocks = [[None] * len(x) for _ in range(len(x))]
    for i in keep:
        s = x[i]
        unit_idx = pres.hom_labels(s, s).index(identity_label(s))
        eblocks[i][i] = tuple(
            fld.one if k == unit_idx else fld.zero for k in range(pres.hom_dim(s, s)))
    std = AddMorphism(pres, x, x, tuple(tuple(r) for r in eblocks))

    g = std.compose(e1).add(ident.sub(std).compose(ident.sub(e1)))
    ginv = invert_endomorphism(g)
    if ginv is None:
        raise CompositionError("correction element not invertible")
    v = g.compose(u)
    vinv = uinv.compose(ginv)

    proj_rows = tuple(tuple(v.blocks[i][j] for j in range(len(x))) for i in keep)
    p = AddMorphism(pres, x, z, proj_rows)
    inc_rows = tuple(tuple(vinv.blocks[i][j] for j in keep) for i in range(len(x)))
    i_m = AddMorphism(pres, z, x, inc_rows)

    if i_m.compose(p) != e or p.compose(i_m) != AddMorphism.identity(pres, z):
        raise CompositionError("idempotent splitting failed verification")
    return z, p, i_m
