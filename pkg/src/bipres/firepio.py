"""Line-oriented text formats (and JSON variants) for FI-Reps and results.

FI-Rep document::

    firep v1
    p <prime>
    sizes <a> <b> <c>
    d2
    <gx> <gy> ; <row>:<coeff> <row>:<coeff> ...      (c lines)
    d1
    <gx> <gy> ; <row>:<coeff> ...                    (b lines)

``a`` is the number of rows of d1, ``b`` its number of columns (and the
number of rows of d2) and ``c`` the number of columns of d2.  The row grades
of d2 are the column grades of d1.
"""

from __future__ import annotations

import json
import re
from typing import Sequence

import numpy as np

from .core import BigradedMatrix, Grade, ValidationError, PrimeField, SparseColumn
from .presentation import BettiTable, FIRep, HilbertFunction, Presentation

_INT = re.compile(r"[+-]?\d+\Z")


class ParseError(ValidationError):
    """Malformed or invalid document; `line` is 1-based (0 if not tied to a line)."""

    def __init__(self, message: str, line: int = 0):
        self.reason = message
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def _int(tok: str, line: int, what: str) -> int:
    if not _INT.match(tok):
        raise ParseError(f"expected integer {what}, got {tok!r}", line)
    return int(tok)


class _Lines:
    def __init__(self, text: str):
        if text.endswith("\n"):
            text = text[:-1]
        self.lines = text.split("\n") if text else []
        self.pos = 0

    def next(self, what: str) -> tuple[str, int]:
        if self.pos >= len(self.lines):
            raise ParseError(f"unexpected end of document, expected {what}", len(self.lines) + 1)
        self.pos += 1
        return self.lines[self.pos - 1], self.pos

    def done(self) -> None:
        if self.pos < len(self.lines):
            raise ParseError("unexpected trailing content", self.pos + 1)


def _header(lines: _Lines, tag: str) -> None:
    text, no = lines.next("header")
    if text.split() != [tag, "v1"]:
        raise ParseError("bad header", no)


def _field(lines: _Lines) -> PrimeField:
    text, no = lines.next("field line")
    tok = text.split()
    if len(tok) != 2 or tok[0] != "p" or not _INT.match(tok[1]):
        raise ParseError("bad header", no)
    try:
        return PrimeField(int(tok[1]))
    except ValidationError:
        raise ParseError("bad header", no) from None


def _grade_line(text: str, no: int) -> tuple[int, int]:
    tok = text.split()
    if len(tok) != 2:
        raise ParseError("expected '<gx> <gy>'", no)
    return _int(tok[0], no, "grade"), _int(tok[1], no, "grade")


def _column_line(text: str, no: int, num_rows: int, p: int) -> tuple[tuple[int, int], list[int], list[int]]:
    tok = text.split()
    if len(tok) < 3 or tok[2] != ";":
        raise ParseError("expected '<gx> <gy> ; <row>:<coeff> ...'", no)
    g = (_int(tok[0], no, "grade"), _int(tok[1], no, "grade"))
    rows: list[int] = []
    vals: list[int] = []
    for t in tok[3:]:
        parts = t.split(":")
        if len(parts) != 2:
            raise ParseError(f"bad entry {t!r}", no)
        r = _int(parts[0], no, "row index")
        c = _int(parts[1], no, "coefficient")
        if r < 0 or r >= num_rows:
            raise ParseError("row index out of range", no)
        if c <= 0 or c >= p:
            raise ParseError("coefficient out of field", no)
        if rows and r <= rows[-1]:
            raise ParseError("row indices must be strictly increasing", no)
        rows.append(r)
        vals.append(c)
    return g, rows, vals


def _column_text(g, rows, vals) -> str:
    ent = " ".join(f"{r}:{v}" for r, v in zip(rows, vals))
    return f"{int(g[0])} {int(g[1])} ;" + (f" {ent}" if ent else "")


def _block(lines: _Lines, label: str, count: int, num_rows: int, fld: PrimeField, row_grades=None):
    text, no = lines.next(f"'{label}'")
    if text.strip() != label:
        raise ParseError(f"expected block label '{label}'", no)
    grades: list[tuple[int, int]] = []
    indptr = [0]
    indices: list[int] = []
    data: list[int] = []
    for _ in range(count):
        text, no = lines.next(f"column of {label}")
        g, rows, vals = _column_line(text, no, num_rows, fld.p)
        if grades and (g[1], g[0]) < (grades[-1][1], grades[-1][0]):
            raise ParseError("grades not colex-sorted", no)
        if row_grades is not None:
            for r in rows:
                if row_grades[r][0] > g[0] or row_grades[r][1] > g[1]:
                    raise ParseError("entry violates grade homogeneity (row grade not <= column grade)", no)
        grades.append(g)
        indices.extend(rows)
        data.extend(vals)
        indptr.append(len(indices))
    return grades, indptr, indices, data


def parse_firep(text: str) -> FIRep:
    lines = _Lines(text)
    _header(lines, "firep")
    fld = _field(lines)
    line, no = lines.next("sizes line")
    tok = line.split()
    if len(tok) != 4 or tok[0] != "sizes" or not all(_INT.match(t) and int(t) >= 0 for t in tok[1:]):
        raise ParseError("bad header", no)
    a, b, c = (int(t) for t in tok[1:])
    # d2 comes first but its row grades are the d1 column grades further down
    d2_start = lines.pos
    lines.pos += 1 + c
    if lines.pos > len(lines.lines):
        raise ParseError("unexpected end of document, expected d2 block", len(lines.lines) + 1)
    g1, p1, i1, v1 = _block(lines, "d1", b, a, fld)
    lines.done()
    end = lines.pos
    lines.pos = d2_start
    g2, p2, i2, v2 = _block(lines, "d2", c, b, fld, row_grades=g1)
    lines.pos = end
    d1 = BigradedMatrix(a, p1, i1, v1, g1 if b else np.zeros((0, 2)), None, fld)
    d2 = BigradedMatrix(b, p2, i2, v2, g2 if c else np.zeros((0, 2)), g1 if b else np.zeros((0, 2)), fld)
    try:
        return FIRep(d2, d1)
    except ValidationError as exc:
        if "chain complex" in str(exc):
            raise ParseError("chain condition violated", d2_start + 1) from None
        raise ParseError(str(exc)) from None


def serialize_firep(fr: FIRep) -> str:
    a, b, c = fr.sizes
    out = ["firep v1", f"p {fr.field.p}", f"sizes {a} {b} {c}", "d2"]
    for j in range(c):
        col = fr.d2.column(j)
        out.append(_column_text(fr.d2.col_grades[j], col.rows, col.vals))
    out.append("d1")
    for j in range(b):
        col = fr.d1.column(j)
        out.append(_column_text(fr.d1.col_grades[j], col.rows, col.vals))
    return "\n".join(out) + "\n"


# ------------------------------------------------------------------ results


def _sorted_items(d: dict) -> list[tuple[Grade, int]]:
    return sorted((Grade(int(g[0]), int(g[1])), int(v)) for g, v in d.items())


def serialize_betti(bt: BettiTable, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(
            {name: [[g.x, g.y, v] for g, v in _sorted_items(bt[i])] for i, name in enumerate(("beta0", "beta1", "beta2"))},
            sort_keys=True,
        ) + "\n"
    out = ["betti v1"]
    for i in range(3):
        items = _sorted_items(bt[i])
        out.append(f"beta{i} {len(items)}")
        out.extend(f"{g.x} {g.y} {v}" for g, v in items)
    return "\n".join(out) + "\n"


def parse_betti(text: str) -> BettiTable:
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        return BettiTable(*({(int(x), int(y)): int(v) for x, y, v in obj[f"beta{i}"]} for i in range(3)))
    lines = _Lines(text)
    _header(lines, "betti")
    tables = []
    for i in range(3):
        line, no = lines.next(f"beta{i} section")
        tok = line.split()
        if len(tok) != 2 or tok[0] != f"beta{i}":
            raise ParseError(f"expected 'beta{i} <count>'", no)
        d: dict = {}
        for _ in range(_int(tok[1], no, "count")):
            line, no = lines.next("betti record")
            tok2 = line.split()
            if len(tok2) != 3:
                raise ParseError("expected '<x> <y> <count>'", no)
            x, y, v = (_int(t, no, "value") for t in tok2)
            if v <= 0:
                raise ParseError("betti counts must be positive", no)
            d[(x, y)] = v
        tables.append(d)
    lines.done()
    return BettiTable(*tables)


def serialize_presentation(P: Presentation, fmt: str = "text") -> str:
    kind = "minimal" if P.minimal else "semi-minimal"
    if fmt == "json":
        return json.dumps(
            {
                "p": P.field.p,
                "type": kind,
                "rows": P.row_grades.tolist(),
                "cols": [
                    {"grade": P.col_grades[j].tolist(), "entries": [[r, v] for r, v in P.column(j).entries()]}
                    for j in range(P.num_cols)
                ],
            },
            sort_keys=True,
        ) + "\n"
    out = ["presentation v1", f"p {P.field.p}", f"type {kind}", f"rows={P.num_rows} cols={P.num_cols}"]
    out.extend(f"{int(x)} {int(y)}" for x, y in P.row_grades)
    for j in range(P.num_cols):
        col = P.column(j)
        out.append(_column_text(P.col_grades[j], col.rows, col.vals))
    return "\n".join(out) + "\n"


def parse_presentation(text: str) -> Presentation:
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        cols = [SparseColumn([r for r, _ in c["entries"]], [v for _, v in c["entries"]]) for c in obj["cols"]]
        return Presentation.from_columns(
            len(obj["rows"]), cols, np.asarray([c["grade"] for c in obj["cols"]]).reshape(-1, 2),
            np.asarray(obj["rows"]).reshape(-1, 2), obj["p"], minimal=obj["type"] == "minimal",
        )
    lines = _Lines(text)
    _header(lines, "presentation")
    fld = _field(lines)
    line, no = lines.next("type line")
    tok = line.split()
    if len(tok) != 2 or tok[0] != "type" or tok[1] not in ("minimal", "semi-minimal"):
        raise ParseError("bad header", no)
    minimal = tok[1] == "minimal"
    line, no = lines.next("size line")
    m = re.fullmatch(r"rows=(\d+) cols=(\d+)", line.strip())
    if not m:
        raise ParseError("bad header", no)
    nr, nc = int(m.group(1)), int(m.group(2))
    rg = []
    for _ in range(nr):
        line, no = lines.next("row grade")
        rg.append(_grade_line(line, no))
    cg = []
    cols = []
    for _ in range(nc):
        line, no = lines.next("column")
        g, rows, vals = _column_line(line, no, nr, fld.p)
        cg.append(g)
        cols.append(SparseColumn(rows, vals))
    lines.done()
    try:
        return Presentation.from_columns(nr, cols, np.asarray(cg).reshape(-1, 2), np.asarray(rg).reshape(-1, 2), fld, minimal=minimal)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


def serialize_hilbert(hf: HilbertFunction, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(
            {"xs": hf.xs.tolist(), "ys": hf.ys.tolist(), "values": hf.values.tolist()}, sort_keys=True
        ) + "\n"
    out = ["hilbert v1", "xs" + "".join(f" {int(x)}" for x in hf.xs), "ys" + "".join(f" {int(y)}" for y in hf.ys)]
    out.extend(f"{g.x} {g.y} {v}" for g, v in hf.items())
    return "\n".join(out) + "\n"


def parse_hilbert(text: str) -> HilbertFunction:
    if text.lstrip().startswith("{"):
        obj = json.loads(text)
        return HilbertFunction(obj["xs"], obj["ys"], np.asarray(obj["values"]).reshape(len(obj["xs"]), len(obj["ys"])))
    lines = _Lines(text)
    _header(lines, "hilbert")
    axes = []
    for name in ("xs", "ys"):
        line, no = lines.next(f"{name} line")
        tok = line.split()
        if not tok or tok[0] != name:
            raise ParseError(f"expected '{name} ...'", no)
        axes.append([_int(t, no, "coordinate") for t in tok[1:]])
    xs, ys = axes
    vals = np.zeros((len(xs), len(ys)), dtype=np.int64)
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            line, no = lines.next("hilbert record")
            tok = line.split()
            if len(tok) != 3:
                raise ParseError("expected '<x> <y> <dim>'", no)
            a, b, v = (_int(t, no, "value") for t in tok)
            if (a, b) != (x, y) or v < 0:
                raise ParseError("hilbert record does not match grid", no)
            vals[i, j] = v
    lines.done()
    try:
        return HilbertFunction(xs, ys, vals)
    except ValidationError as exc:
        raise ParseError(str(exc)) from None


# ------------------------------------------------------------------ inputs


def _read_table(text: str) -> np.ndarray:
    rows = []
    for no, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tok = [t for t in re.split(r"[,\s]+", line) if t]
        try:
            rows.append([float(t) for t in tok])
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", no) from None
        if len(rows[-1]) != len(rows[0]):
            raise ParseError("rows have different lengths", no)
    if not rows:
        raise ParseError("no data")
    arr = np.asarray(rows, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ParseError("non-finite value")
    return arr


def read_point_cloud(text: str) -> np.ndarray:
    """n x k array from whitespace- or comma-separated rows ('#' starts a comment line)."""
    return _read_table(text)


def read_distance_matrix(text: str) -> np.ndarray:
    D = _read_table(text)
    if D.shape[0] != D.shape[1]:
        raise ParseError("distance matrix must be square")
    if np.any(np.diag(D) != 0):
        raise ParseError("distance matrix must have a zero diagonal")
    if not np.array_equal(D, D.T):
        raise ParseError("distance matrix must be symmetric")
    if np.any(D < 0):
        raise ParseError("distances must be nonnegative")
    return D


def write_point_cloud(points: Sequence[Sequence[float]]) -> str:
    return "".join(" ".join(repr(float(v)) for v in row) + "\n" for row in np.asarray(points, dtype=float))
