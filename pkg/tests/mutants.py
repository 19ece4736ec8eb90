"""Single-token corruptions of FI-Rep documents that are invalid by construction.

Each mutant changes exactly one whitespace-separated token.  Mutations that
could accidentally yield another valid document are either avoided or (for
the chain condition) kept only when a dense product confirms d1 d2 != 0.
"""

import numpy as np


def _doc_layout(lines):
    a, b, c = (int(t) for t in lines[2].split()[1:])
    p = int(lines[1].split()[1])
    d2_lines = list(range(4, 4 + c))
    d1_lines = list(range(5 + c, 5 + c + b))
    return p, a, b, c, d2_lines, d1_lines


def _replace(lines, i, t, new):
    tok = lines[i].split()
    tok[t] = new
    out = list(lines)
    out[i] = " ".join(tok)
    return out


def _dense(lines, idx, num_rows):
    D = np.zeros((num_rows, len(idx)), dtype=np.int64)
    for j, i in enumerate(idx):
        for ent in lines[i].split()[3:]:
            r, v = ent.split(":")
            D[int(r), j] = int(v)
    return D


def mutants(text, rng, per_kind=2):
    """List of (kind, mutated_text)."""
    lines = text.rstrip("\n").split("\n")
    p, a, b, c, d2l, d1l = _doc_layout(lines)
    out = []

    def emit(kind, new_lines):
        out.append((kind, "\n".join(new_lines) + "\n"))

    emit("header", _replace(lines, 0, 0, "frep"))
    emit("header", _replace(lines, 0, 1, "v2"))
    emit("header", _replace(lines, 1, 1, str(int(rng.choice([0, 1, 4, 6, 9, 15, 65536])))))
    emit("header", _replace(lines, 1, 1, "two"))
    emit("header", _replace(lines, 1, 0, "q"))
    emit("header", _replace(lines, 2, 1, "-1"))
    emit("header", _replace(lines, 2, 0, "size"))
    emit("count", _replace(lines, 2, 2, str(b + 1)))
    emit("count", _replace(lines, 2, 3, str(c + 1)))
    if b:
        emit("count", _replace(lines, 2, 2, str(b - 1)))
    if c:
        emit("count", _replace(lines, 2, 3, str(c - 1)))
    emit("label", _replace(lines, 3, 0, "d3"))
    emit("label", _replace(lines, 4 + c, 0, "d0"))

    blocks = [(d2l, b), (d1l, a)]
    for idx, num_rows in blocks:
        for _ in range(per_kind):
            if not idx:
                break
            i = int(rng.choice(idx))
            emit("grade", _replace(lines, i, int(rng.integers(0, 2)), str(rng.choice(["1.5", "x", "--2", ""])) or "?"))
            emit("syntax", _replace(lines, i, 2, rng.choice([",", ":", "；", "x"])))
        # colex violation: lower a column's y-grade below its predecessor's
        for pos in range(1, len(idx)):
            prev = [int(t) for t in lines[idx[pos - 1]].split()[:2]]
            emit("order", _replace(lines, idx[pos], 1, str(prev[1] - 1)))
            break
        with_entries = [i for i in idx if len(lines[i].split()) > 3]
        for _ in range(per_kind):
            if not with_entries:
                break
            i = int(rng.choice(with_entries))
            tok = lines[i].split()
            t = int(rng.integers(3, len(tok)))
            r, v = tok[t].split(":")
            emit("range", _replace(lines, i, t, f"{num_rows + int(rng.integers(0, 3))}:{v}"))
            emit("range", _replace(lines, i, t, f"-1:{v}"))
            emit("field", _replace(lines, i, t, f"{r}:0"))
            emit("field", _replace(lines, i, t, f"{r}:{p + int(rng.integers(0, 3))}"))
            emit("syntax", _replace(lines, i, t, f"{r}:"))
            emit("syntax", _replace(lines, i, t, f"{r}-{v}"))
            if len(tok) > 4:
                t2 = int(rng.integers(4, len(tok)))
                prev_r = tok[t2 - 1].split(":")[0]
                emit("order", _replace(lines, i, t2, f"{prev_r}:{tok[t2].split(':')[1]}"))

    # chain condition: move one entry of d2 to another row, keep if d1 d2 != 0
    d1 = _dense(lines, d1l, a)
    cand = [i for i in d2l if len(lines[i].split()) > 3]
    for _ in range(4 * per_kind):
        if not cand or b < 2 or a == 0:
            break
        i = int(rng.choice(cand))
        tok = lines[i].split()
        t = int(rng.integers(3, len(tok)))
        used = {int(e.split(":")[0]) for e in tok[3:]}
        lo = int(tok[t - 1].split(":")[0]) + 1 if t > 3 else 0
        hi = int(tok[t + 1].split(":")[0]) if t + 1 < len(tok) else b
        choices = [r for r in range(lo, hi) if r not in used]
        if not choices:
            continue
        new = _replace(lines, i, t, f"{int(rng.choice(choices))}:{tok[t].split(':')[1]}")
        # rows of d2 must stay homogeneous w.r.t. the d1 column grades; otherwise it is a different error, also fine
        d2 = _dense(new, d2l, b)
        if np.any(d1 @ d2 % p):
            emit("chain", new)
            break
    return out
