"""Exact dense linear algebra over the rationals or a prime field.

Scalars are plain ``fractions.Fraction`` values in characteristic 0 and
canonical residues (ints in ``[0, p)``) in characteristic ``p``.  Both are
already in canonical form after every arithmetic operation, so equality of
values is equality of scalars.  Matrices are small and dense; everything is
immutable after construction and all operations return fresh objects.
"""

from __future__ import annotations

from fractions import Fraction


class LinalgError(Exception):
    pass


class FieldMismatch(LinalgError):
    pass


class DimensionMismatch(LinalgError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Field:
    """Arithmetic context: characteristic 0 means Q, a prime p means F_p."""

    __slots__ = ("char",)

    def __init__(self, characteristic: int = 0):
        if characteristic != 0 and not _is_prime(characteristic):
            raise LinalgError(f"characteristic must be 0 or prime, got {characteristic}")
        self.char = characteristic

    def __eq__(self, other):
        return isinstance(other, Field) and self.char == other.char

    def __hash__(self):
        return hash(("Field", self.char))

    def __repr__(self):
        return f"Field({self.char})"

    @property
    def zero(self):
        return Fraction(0) if self.char == 0 else 0

    @property
    def one(self):
        return Fraction(1) if self.char == 0 else 1

    def of(self, value):
        """Coerce an int, Fraction or scalar string into a canonical element."""
        if isinstance(value, str):
            return self.parse(value)
        if self.char == 0:
            return Fraction(value)
        if isinstance(value, Fraction):
            if value.denominator % self.char == 0:
                raise LinalgError(f"denominator not invertible mod {self.char}")
            return value.numerator * pow(value.denominator, -1, self.char) % self.char
        return int(value) % self.char

    def parse(self, text: str):
        text = text.strip()
        if "/" in text:
            num, den = text.split("/")
            return self.of(Fraction(int(num), int(den)))
        return self.of(int(text))

    def format(self, x) -> str:
        """Serialize: "a/b" (b > 0, reduced) or "a" over Q; residue over F_p."""
        if self.char == 0:
            x = Fraction(x)
            if x.denominator == 1:
                return str(x.numerator)
            return f"{x.numerator}/{x.denominator}"
        return str(x % self.char)

    def add(self, a, b):
        return a + b if self.char == 0 else (a + b) % self.char

    def sub(self, a, b):
        return a - b if self.char == 0 else (a - b) % self.char

    def mul(self, a, b):
        return a * b if self.char == 0 else (a * b) % self.char

    def neg(self, a):
        return -a if self.char == 0 else (-a) % self.char

    def inv(self, a):
        if not a:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a) if self.char == 0 else pow(a, -1, self.char)

    def div(self, a, b):
        return self.mul(a, self.inv(b))


QQ = Field(0)


class Matrix:
    """Dense matrix over a Field; ``data`` is a row-major list of lists."""

    __slots__ = ("field", "rows", "cols", "data")

    def __init__(self, field: Field, rows: int, cols: int, data):
        if len(data) != rows or any(len(r) != cols for r in data):
            raise DimensionMismatch(f"bad shape for {rows}x{cols}")
        self.field = field
        self.rows = rows
        self.cols = cols
        self.data = data

    @staticmethod
    def zeros(field: Field, rows: int, cols: int) -> "Matrix":
        z = field.zero
        return Matrix(field, rows, cols, [[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(field: Field, n: int) -> "Matrix":
        m = Matrix.zeros(field, n, n)
        one = field.one
        for i in range(n):
            m.data[i][i] = one
        return m

    @staticmethod
    def from_rows(field: Field, rows) -> "Matrix":
        data = [[field.of(x) for x in row] for row in rows]
        ncols = len(data[0]) if data else 0
        return Matrix(field, len(data), ncols, data)

    @staticmethod
    def column(field: Field, entries) -> "Matrix":
        return Matrix(field, len(entries), 1, [[field.of(x)] for x in entries])

    def copy(self) -> "Matrix":
        return Matrix(self.field, self.rows, self.cols, [row[:] for row in self.data])

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.field == other.field
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format(x) for x in row) for row in self.data)
        return f"Matrix({self.rows}x{self.cols}: {body})"

    def is_zero(self) -> bool:
        return all(not x for row in self.data for x in row)

    def _check_field(self, other: "Matrix"):
        if self.field != other.field:
            raise FieldMismatch("mixing matrices over different fields")

    def add(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("add: shape mismatch")
        f = self.field
        return Matrix(
            f, self.rows, self.cols,
            [[f.add(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
        )

    def sub(self, other: "Matrix") -> "Matrix":
        return self.add(other.scale(self.field.neg(self.field.one)))

    def scale(self, c) -> "Matrix":
        f = self.field
        c = f.of(c)
        return Matrix(f, self.rows, self.cols, [[f.mul(c, x) for x in row] for row in self.data])

    def mul(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.cols != other.rows:
            raise DimensionMismatch("mul: inner dimension mismatch")
        f = self.field
        out = Matrix.zeros(f, self.rows, other.cols)
        for i in range(self.rows):
            arow = self.data[i]
            orow = out.data[i]
            for k in range(self.cols):
                a = arow[k]
                if not a:
                    continue
                brow = other.data[k]
                for j in range(other.cols):
                    b = brow[j]
                    if b:
                        orow[j] = f.add(orow[j], f.mul(a, b))
        return out

    def transpose(self) -> "Matrix":
        return Matrix(
            self.field, self.cols, self.rows,
            [[self.data[i][j] for i in range(self.rows)] for j in range(self.cols)],
        )

    def hstack(self, other: "Matrix") -> "Matrix":
        self._check_field(other)
        if self.rows != other.rows:
            raise DimensionMismatch("hstack: row mismatch")
        return Matrix(
            self.field, self.rows, self.cols + other.cols,
            [ra + rb for ra, rb in zip(self.data, other.data)],
        )

    def col(self, j: int):
        return [self.data[i][j] for i in range(self.rows)]

    def rref(self):
        """Reduced row echelon form; returns (R, pivot columns, rank)."""
        f = self.field
        m = [row[:] for row in self.data]
        pivots = []
        r = 0
        for c in range(self.cols):
            pr = None
            for i in range(r, self.rows):
                if m[i][c]:
                    pr = i
                    break
            if pr is None:
                continue
            m[r], m[pr] = m[pr], m[r]
            inv = f.inv(m[r][c])
            m[r] = [f.mul(inv, x) for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c]:
                    factor = m[i][c]
                    m[i] = [f.sub(a, f.mul(factor, b)) for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return Matrix(f, self.rows, self.cols, m), tuple(pivots), r

    def rank(self) -> int:
        return self.rref()[2]

    def kernel_basis(self) -> "Matrix":
        """Matrix whose columns form a basis of the right kernel."""
        f = self.field
        R, pivots, rank = self.rref()
        free = [c for c in range(self.cols) if c not in pivots]
        basis = Matrix.zeros(f, self.cols, len(free))
        for k, fc in enumerate(free):
            basis.data[fc][k] = f.one
            for r, pc in enumerate(pivots):
                v = R.data[r][fc]
                if v:
                    basis.data[pc][k] = f.neg(v)
        return basis

    def solve(self, b):
        """One exact solution x of self @ x = b, or None if inconsistent.

        b may be a flat list or a column Matrix; free variables are set to 0.
        """
        f = self.field
        if isinstance(b, Matrix):
            if b.cols != 1:
                raise DimensionMismatch("solve: b must be a column")
            bent = [row[0] for row in b.data]
        else:
            bent = [f.of(x) for x in b]
        if len(bent) != self.rows:
            raise DimensionMismatch("solve: length of b != rows")
        aug = Matrix(f, self.rows, self.cols + 1, [row[:] + [bv] for row, bv in zip(self.data, bent)])
        R, pivots, rank = aug.rref()
        if self.cols in pivots:
            return None
        x = [f.zero] * self.cols
        for r, pc in enumerate(pivots):
            x[pc] = R.data[r][self.cols]
        return x


def rref(m: Matrix):
    return m.rref()


def kernel_basis(m: Matrix) -> Matrix:
    return m.kernel_basis()


def solve(a: Matrix, b):
    return a.solve(b)
