"""Dense exact linear algebra over the rationals.

This is the single numeric substrate for the modular-symbol layer: operator
matrices, subspace bases, restrictions and traces.  Everything is exact; no
floating point appears anywhere in this module.
"""

from .rationals import QQ, ZERO, ONE, rational_from_string, rational_to_string

SERIAL_FORMAT_VERSION = 1


class NonInvariantSubspace(Exception):
    """Raised when an operator does not map the span of a basis into itself."""


class ExactMatrix:
    """Immutable dense matrix of arbitrary-precision rationals.

    Stored row-major.  Pivoting during elimination is deterministic (first
    nonzero entry in column order) so that serialized results are
    byte-for-byte reproducible.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows, cols, entries):
        self.rows = rows
        self.cols = cols
        if len(entries) != rows * cols:
            raise ValueError("entry count does not match dimensions")
        self._data = [QQ(x) for x in entries]

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_rows(cls, row_lists, cols=None):
        rows = len(row_lists)
        if cols is None:
            if rows == 0:
                raise ValueError("cols required for a matrix with no rows")
            cols = len(row_lists[0])
        flat = []
        for r in row_lists:
            if len(r) != cols:
                raise ValueError("ragged rows")
            flat.extend(r)
        return cls(rows, cols, flat)

    @classmethod
    def identity(cls, n):
        return cls(n, n, [ONE if i == j else ZERO for i in range(n) for j in range(n)])

    @classmethod
    def zero(cls, rows, cols):
        return cls(rows, cols, [ZERO] * (rows * cols))

    # -- basic access --------------------------------------------------------

    def __getitem__(self, rc):
        r, c = rc
        return self._data[r * self.cols + c]

    def row(self, r):
        return self._data[r * self.cols : (r + 1) * self.cols]

    def column(self, c):
        return self._data[c :: self.cols]

    def to_rows(self):
        return [self.row(r) for r in range(self.rows)]

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self._data == other._data
        )

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self._data)))

    def __repr__(self):
        return f"ExactMatrix({self.rows}x{self.cols})"

    # -- arithmetic ----------------------------------------------------------

    def multiply(self, other):
        if self.cols != other.rows:
            raise ValueError(f"dimension mismatch: {self.cols} vs {other.rows}")
        n, m, k = self.rows, other.cols, self.cols
        out = [ZERO] * (n * m)
        od = other._data
        for i in range(n):
            ri = self._data[i * k : (i + 1) * k]
            for t in range(k):
                a = ri[t]
                if a:
                    base = t * m
                    orow = od[base : base + m]
                    obase = i * m
                    for j in range(m):
                        b = orow[j]
                        if b:
                            out[obase + j] += a * b
        return ExactMatrix(n, m, out)

    def square(self):
        if self.rows != self.cols:
            raise ValueError("square() needs a square matrix")
        return self.multiply(self)

    def trace(self):
        if self.rows != self.cols:
            raise ValueError("trace needs a square matrix")
        return sum((self._data[i * self.cols + i] for i in range(self.rows)), ZERO)

    def add(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("dimension mismatch")
        return ExactMatrix(
            self.rows, self.cols, [a + b for a, b in zip(self._data, other._data)]
        )

    def scale(self, c):
        c = QQ(c)
        return ExactMatrix(self.rows, self.cols, [c * a for a in self._data])

    def stack(self, other):
        """Vertical stack: rows of self above rows of other."""
        if self.cols != other.cols:
            raise ValueError("dimension mismatch")
        return ExactMatrix(
            self.rows + other.rows, self.cols, self._data + other._data
        )

    def transpose(self):
        return ExactMatrix(
            self.cols,
            self.rows,
            [self._data[r * self.cols + c] for c in range(self.cols) for r in range(self.rows)],
        )

    # -- elimination ---------------------------------------------------------

    def rref(self):
        """Reduced row-echelon form.

        Returns (R, pivots) with pivots the strictly increasing list of
        pivot column indices.
        """
        m = [list(self.row(r)) for r in range(self.rows)]
        nrows, ncols = self.rows, self.cols
        pivots = []
        prow = 0
        for col in range(ncols):
            if prow >= nrows:
                break
            sel = None
            for r in range(prow, nrows):
                if m[r][col]:
                    sel = r
                    break
            if sel is None:
                continue
            m[prow], m[sel] = m[sel], m[prow]
            inv = 1 / m[prow][col]
            if inv != 1:
                m[prow] = [x * inv for x in m[prow]]
            for r in range(nrows):
                if r != prow and m[r][col]:
                    f = m[r][col]
                    rowp = m[prow]
                    rowr = m[r]
                    for c in range(col, ncols):
                        if rowp[c]:
                            rowr[c] -= f * rowp[c]
            pivots.append(col)
            prow += 1
        flat = [x for row in m for x in row]
        return ExactMatrix(nrows, ncols, flat), pivots

    def rank(self):
        return len(self.rref()[1])

    def kernel_basis(self):
        """Basis of the right kernel {v : Mv = 0}, as matrix columns.

        Each basis vector carries a 1 in its own free column, so kernel
        coordinates of any kernel vector can be read off at the free
        positions directly.
        """
        R, pivots = self.rref()
        free = [c for c in range(self.cols) if c not in set(pivots)]
        k = len(free)
        out = [ZERO] * (self.cols * k)
        for j, fc in enumerate(free):
            out[fc * k + j] = ONE
            for i, pc in enumerate(pivots):
                val = R[i, fc]
                if val:
                    out[pc * k + j] = -val
        return ExactMatrix(self.cols, k, out)

    def solve_columns(self, rhs):
        """Solve self * X = rhs for X; raises NonInvariantSubspace if any
        column of rhs is outside the column span of self."""
        if self.rows != rhs.rows:
            raise ValueError("dimension mismatch")
        aug = ExactMatrix(
            self.rows,
            self.cols + rhs.cols,
            [x for r in range(self.rows) for x in (self.row(r) + rhs.row(r))],
        )
        R, pivots = aug.rref()
        for c in pivots:
            if c >= self.cols:
                raise NonInvariantSubspace("right-hand side outside column span")
        # self has full column rank in every internal use; check and read off
        if pivots != list(range(self.cols)):
            raise ValueError("solve_columns requires full column rank")
        sol = [ZERO] * (self.cols * rhs.cols)
        for i in range(self.cols):
            for j in range(rhs.cols):
                sol[i * rhs.cols + j] = R[i, self.cols + j]
        return ExactMatrix(self.cols, rhs.cols, sol)

    # -- serialization -------------------------------------------------------

    def serialize(self):
        """Text form: version header, dimensions, then entries as decimal
        strings "num/den" (or "num" for integers), one row per line."""
        lines = [f"exactmatrix v{SERIAL_FORMAT_VERSION}", f"{self.rows} {self.cols}"]
        for r in range(self.rows):
            lines.append(" ".join(rational_to_string(x) for x in self.row(r)))
        return "\n".join(lines)

    @classmethod
    def deserialize(cls, text):
        lines = text.strip().splitlines()
        if not lines or not lines[0].startswith("exactmatrix v"):
            raise ValueError("missing format header")
        version = int(lines[0].split("v")[-1])
        if version != SERIAL_FORMAT_VERSION:
            raise ValueError(f"unsupported format version {version}")
        rows, cols = map(int, lines[1].split())
        entries = []
        for line in lines[2 : 2 + rows]:
            entries.extend(rational_from_string(tok) for tok in line.split())
        return cls(rows, cols, entries)


def restrict(op, basis):
    """Matrix of ``op`` on the column span of ``basis``, in basis coordinates.

    Raises :class:`NonInvariantSubspace` when op * basis leaves the span;
    for Hecke and Atkin-Lehner operators on the cuspidal subspace that is a
    hard internal-consistency failure.
    """
    if basis.cols == 0:
        return ExactMatrix.zero(0, 0)
    image = op.multiply(basis)
    return basis.solve_columns(image)
