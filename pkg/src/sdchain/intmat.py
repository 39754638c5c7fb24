"""Exact integer matrices.

Blocks are numpy arrays of dtype ``object`` holding Python ints, so every
product is arbitrary precision. The Smith normal form here tracks the
unimodular transforms, which the contraction builder and the homology
witnesses both need.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def eye(n: int) -> np.ndarray:
    m = zeros(n, n)
    for i in range(n):
        m[i, i] = 1
    return m


def as_int_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce nested lists (or an array) to an object matrix of Python ints."""
    if isinstance(data, np.ndarray) and data.ndim == 2:
        out = zeros(*data.shape)
        for (i, j), v in np.ndenumerate(data):
            out[i, j] = int(v)
        return out
    rows_list = [list(r) for r in data]
    if rows is None:
        rows = len(rows_list)
    if cols is None:
        cols = len(rows_list[0]) if rows_list else 0
    out = zeros(rows, cols)
    if len(rows_list) != rows or any(len(r) != cols for r in rows_list):
        raise ValueError(f"matrix shape mismatch: expected {rows}x{cols}")
    for i, r in enumerate(rows_list):
        for j, v in enumerate(r):
            if isinstance(v, bool) or int(v) != v:
                raise ValueError(f"non-integer entry {v!r} at ({i}, {j})")
            out[i, j] = int(v)
    return out


def is_zero(m: np.ndarray) -> bool:
    return not any(v != 0 for v in m.flat)


def equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def to_lists(m: np.ndarray) -> list[list[int]]:
    return [[int(v) for v in row] for row in m]


def max_abs(m: np.ndarray) -> int:
    return max((abs(int(v)) for v in m.flat), default=0)


@dataclass
class Smith:
    """``U @ A @ V == D`` with ``D`` diagonal, ``diag[k] | diag[k+1]``.

    The inverses are kept because they give explicit cycle
    representatives for homology classes.
    """

    U: np.ndarray
    U_inv: np.ndarray
    V: np.ndarray
    V_inv: np.ndarray
    diag: list[int]

    @property
    def rank(self) -> int:
        return len(self.diag)


def _swap_rows(m, i, j):
    m[i], m[j] = m[j], m[i]


def _swap_cols(m, i, j):
    for row in m:
        row[i], row[j] = row[j], row[i]


def _add_row(m, src, dst, c):
    # row dst += c * row src
    rs, rd = m[src], m[dst]
    for k in range(len(rd)):
        if rs[k]:
            rd[k] += c * rs[k]


def _add_col(m, src, dst, c):
    # col dst += c * col src
    for row in m:
        if row[src]:
            row[dst] += c * row[src]


def smith(a: np.ndarray) -> Smith:
    rows, cols = a.shape
    A = [[int(v) for v in r] for r in a]
    U = [[int(i == j) for j in range(rows)] for i in range(rows)]
    Ui = [[int(i == j) for j in range(rows)] for i in range(rows)]
    V = [[int(i == j) for j in range(cols)] for i in range(cols)]
    Vi = [[int(i == j) for j in range(cols)] for i in range(cols)]
    diag: list[int] = []

    def row_op(src, dst, c):
        # A, U get row dst += c*row src; U_inv gets col src -= c*col dst
        _add_row(A, src, dst, c)
        _add_row(U, src, dst, c)
        _add_col(Ui, dst, src, -c)

    def row_swap(i, j):
        _swap_rows(A, i, j)
        _swap_rows(U, i, j)
        _swap_cols(Ui, i, j)

    def row_neg(i):
        A[i] = [-x for x in A[i]]
        U[i] = [-x for x in U[i]]
        for r in Ui:
            r[i] = -r[i]

    def col_op(src, dst, c):
        _add_col(A, src, dst, c)
        _add_col(V, src, dst, c)
        _add_row(Vi, dst, src, -c)

    def col_swap(i, j):
        _swap_cols(A, i, j)
        _swap_cols(V, i, j)
        _swap_rows(Vi, i, j)

    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            Ai = A[i]
            for j in range(t, cols):
                v = Ai[j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        if i != t:
            row_swap(i, t)
        if j != t:
            col_swap(j, t)
        while True:
            p = A[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // p
                    row_op(t, i, -q)
                    if A[i][t]:
                        dirty = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // p
                    col_op(t, j, -q)
                    if A[t][j]:
                        dirty = True
            if dirty:
                # move the smallest remainder in row/column t to the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
                _, i, j = min(cand)
                if i != t:
                    row_swap(i, t)
                if j != t:
                    col_swap(j, t)
                continue
            # divisibility: pivot must divide the remaining submatrix
            bad = None
            for i in range(t + 1, rows):
                for j in range(t + 1, cols):
                    if A[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(bad, t, 1)
        if A[t][t] < 0:
            row_neg(t)
        diag.append(A[t][t])
        t += 1
    return Smith(as_int_matrix(U, rows, rows), as_int_matrix(Ui, rows, rows), as_int_matrix(V, cols, cols),
                 as_int_matrix(Vi, cols, cols), diag)


def solve(a: np.ndarray, b: np.ndarray, snf: Smith | None = None) -> np.ndarray | None:
    """Integer solution ``x`` of ``a @ x == b`` (free part set to zero), or None."""
    rows, cols = a.shape
    if snf is None:
        snf = smith(a)
    ub = snf.U @ b
    y = zeros(cols, b.shape[1])
    for k, d in enumerate(snf.diag):
        for c in range(b.shape[1]):
            q, rem = divmod(int(ub[k, c]), d)
            if rem:
                return None
            y[k, c] = q
    for k in range(snf.rank, rows):
        for c in range(b.shape[1]):
            if ub[k, c] != 0:
                return None
    return snf.V @ y
