"""Exact linear algebra over QQ: sparse row reduction and small dense helpers.

Vectors are dicts mapping hashable, sortable coordinate keys to nonzero
rational coefficients.  RowSpace maintains a fully inter-reduced echelon
basis (RREF), so residuals are canonical and membership tests are exact.
"""

from __future__ import annotations

from math import gcd
from typing import Optional

from .rationals import QQ


def vec_add_scaled(target: dict, source: dict, scale) -> None:
    """target += scale * source, dropping zeros (in place)."""
    if scale == 0:
        return
    for k, v in source.items():
        acc = target.get(k)
        if acc is None:
            target[k] = scale * v
        else:
            acc = acc + scale * v
            if acc == 0:
                del target[k]
            else:
                target[k] = acc


def vec_scale(v: dict, scale) -> dict:
    return {k: scale * c for k, c in v.items()}


def vec_content_normalize(v: dict, key_order=None) -> dict:
    """Rescale to integer entries with content 1; leading entry positive.

    The leading entry is the one with the largest key (or key_order(key)).
    """
    if not v:
        return v
    den_lcm = 1
    for c in v.values():
        d = int(c.denominator)
        den_lcm = den_lcm * d // gcd(den_lcm, d)
    g = 0
    for c in v.values():
        g = gcd(g, abs(int(c.numerator) * (den_lcm // int(c.denominator))))
    scale = QQ(den_lcm, g) if g else QQ(1)
    lead = max(v, key=key_order) if key_order else max(v)
    if v[lead] * scale < 0:
        scale = -scale
    return {k: c * scale for k, c in v.items()}


class RowSpace:
    """Incremental RREF over QQ with optional combination tracking.

    Each inserted vector is reduced against the current basis; a nonzero
    residual becomes a new basis row (pivot = its largest key), and the new
    pivot is eliminated from all older rows.  With track=True, every basis
    row carries its expression over the *inserted* vectors, and add()
    returns that expression for dependent vectors (a kernel relation).
    """

    def __init__(self, track: bool = False, key_order=None):
        self.track = track
        self.key_order = key_order
        self.rows: list = []  # list of (vec, combo or None)
        self.pivot_of_row: list = []
        self.pivots: dict = {}  # pivot key -> row index
        self.n_inserted = 0

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: dict, combo: Optional[dict]):
        vec = dict(vec)
        while vec:
            hit = None
            for k in vec:
                if k in self.pivots:
                    hit = k
                    break
            if hit is None:
                break
            i = self.pivots[hit]
            c = vec[hit]
            row, row_combo = self.rows[i]
            vec_add_scaled(vec, row, -c)
            if combo is not None and row_combo is not None:
                vec_add_scaled(combo, row_combo, -c)
        return vec, combo

    def residual(self, vec: dict) -> dict:
        """Canonical residual of vec modulo the current span."""
        res, _ = self._reduce(vec, None)
        return res

    def contains(self, vec: dict) -> bool:
        return not self.residual(vec)

    def add(self, vec: dict):
        """Insert a vector.

        Returns (independent, data): data is the canonical residual for an
        independent vector, or (when tracking) the kernel relation
        {insertion index -> coeff} with coefficient 1 on this vector.
        """
        idx = self.n_inserted
        self.n_inserted += 1
        combo = {idx: QQ(1)} if self.track else None
        res, combo = self._reduce(vec, combo)
        if not res:
            return False, combo
        pivot = max(res, key=self.key_order) if self.key_order else max(res)
        inv = QQ(1) / res[pivot]
        res = vec_scale(res, inv)
        if combo is not None:
            combo = vec_scale(combo, inv)
        row_index = len(self.rows)
        # keep RREF: clear the new pivot from every existing row
        for i, (row, row_combo) in enumerate(self.rows):
            c = row.get(pivot)
            if c is not None:
                vec_add_scaled(row, res, -c)
                if row_combo is not None and combo is not None:
                    vec_add_scaled(row_combo, combo, -c)
        self.rows.append((res, combo))
        self.pivot_of_row.append(pivot)
        self.pivots[pivot] = row_index
        return True, res

    def express(self, vec: dict) -> Optional[dict]:
        """Coefficients {row index -> coeff} with vec = sum coeff*row, or
        None if vec is outside the span."""
        coeffs: dict = {}
        vec = dict(vec)
        while vec:
            hit = None
            for k in vec:
                if k in self.pivots:
                    hit = k
                    break
            if hit is None:
                return None
            i = self.pivots[hit]
            c = vec[hit]
            coeffs[i] = coeffs.get(i, QQ(0)) + c
            vec_add_scaled(vec, self.rows[i][0], -c)
        return {i: c for i, c in coeffs.items() if c != 0}

    def express_over_inserted(self, vec: dict) -> Optional[dict]:
        """Coefficients over the *inserted* vectors (requires track=True);
        None if vec is outside the span."""
        if not self.track:
            raise ValueError("tracking required")
        coeffs = self.express(vec)
        if coeffs is None:
            return None
        out: dict = {}
        for i, c in coeffs.items():
            vec_add_scaled(out, self.rows[i][1], c)
        return out

    def basis_vectors(self) -> list:
        return [row for row, _ in self.rows]


def kernel_relations(vectors: list, key_order=None) -> list:
    """Kernel of the 'rows as vectors' map: all relations sum c_i v_i = 0.

    Returns one relation per dependent vector, in discovery order; each is
    a dict {vector index -> coeff}, integer content 1.
    """
    space = RowSpace(track=True, key_order=key_order)
    relations = []
    for v in vectors:
        independent, data = space.add(v)
        if not independent:
            relations.append(vec_content_normalize(data))
    return relations


# ---------------------------------------------------------------------------
# small dense matrices over QQ (lists of lists)

def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[QQ(0)] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c == 0:
                continue
            bt = b[t]
            for j in range(m):
                if bt[j] != 0:
                    oi[j] += c * bt[j]
    return out


def mat_identity(n):
    return [[QQ(1) if i == j else QQ(0) for j in range(n)] for i in range(n)]


def mat_inv(a):
    """Inverse by Gauss-Jordan; raises ValueError if singular."""
    n = len(a)
    aug = [[QQ(x) for x in row] + [QQ(1) if i == j else QQ(0) for j in range(n)]
           for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise ValueError("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = QQ(1) / aug[col][col]
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                c = aug[r][col]
                aug[r] = [x - c * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def mat_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))
