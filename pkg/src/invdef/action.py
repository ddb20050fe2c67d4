"""Group actions on the polynomial ring and Reynolds operators.

A reductive group is described by three commuting layers of data acting
linearly on the variable span (column convention: x_j maps to
sum_i M[i][j] x_i):

  * finite_part    -- an explicit full list of invertible matrices;
  * torus_part     -- integer character-weight rows, one weight per variable;
  * connected_part -- derivation pairs (D_i, D'_i) for a Lie-algebra basis
                      and its dual with respect to an invariant form, so the
                      Casimir element acts as sum D_i . D'_i.

The Reynolds operator composes the finite group average, the projection on
torus weight zero, and the Casimir projection.  The Casimir projection of f
builds the Krylov space {f, cf, c^2 f, ...}, takes the minimal polynomial
p(u) = u^k q(u) of c on it, and returns q(c) f / q(0); by complete
reducibility this is the projection onto the invariant isotypic part.

The same machinery acts on rows and matrices of polynomials "twisted" by
representation matrices on their indices, which is how equivariant lifts
are projected without leaving the equation they solve.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

from .linalg import RowSpace, mat_inv, mat_mul, mat_identity, mat_eq
from .matrix import PolyMatrix
from .rationals import QQ
from .rationals import rat_from_string
from .ring import Polynomial, VariableSet, gm_weight, mono_weight


class ActionError(ValueError):
    """Invalid group data (failed load-time validation)."""


class NotStable:
    """Witness that a subspace is not stable under the group action."""

    def __init__(self, witness):
        self.witness = witness

    def __repr__(self):
        return f"NotStable({self.witness!r})"


def _to_qq_matrix(rows) -> tuple:
    return tuple(tuple(QQ(x) if not isinstance(x, str) else rat_from_string(x) for x in row) for row in rows)


def derivation_apply(f: Polynomial, matrix, ring: VariableSet) -> Polynomial:
    """Extend the linear map D(x_j) = sum_i M[i][j] x_i to P by Leibniz."""
    n = ring.nvars
    cols: List[List[tuple]] = [[] for _ in range(n)]
    for i in range(n):
        row = matrix[i]
        for j in range(n):
            if row[j]:
                cols[j].append((i, row[j]))
    out: dict = {}
    for m, c in f.terms.items():
        for j, e in enumerate(m):
            if not e or not cols[j]:
                continue
            base = c * e
            for i, mij in cols[j]:
                m2 = list(m)
                m2[j] -= 1
                m2[i] += 1
                k = tuple(m2)
                acc = out.get(k)
                if acc is None:
                    out[k] = base * mij
                else:
                    acc = acc + base * mij
                    if acc == 0:
                        del out[k]
                    else:
                        out[k] = acc
    return Polynomial(ring, out)


class GroupAction:
    """(G x G_m)-action data on a variable set, validated at load."""

    def __init__(
        self,
        ring: VariableSet,
        finite_part: Optional[Sequence] = None,
        torus_part: Optional[Sequence[Sequence[int]]] = None,
        connected_part: Optional[Sequence[Tuple]] = None,
        krylov_cap: int = 64,
        validate: bool = True,
    ):
        self.ring = ring
        n = ring.nvars
        if finite_part:
            self.finite_part = [_to_qq_matrix(m) for m in finite_part]
        else:
            self.finite_part = [tuple(tuple(QQ(1) if i == j else QQ(0) for j in range(n)) for i in range(n))]
        self.torus_part = [tuple(int(w) for w in row) for row in (torus_part or [])]
        self.connected_part = [
            (_to_qq_matrix(d), _to_qq_matrix(dprime)) for d, dprime in (connected_part or [])
        ]
        self.krylov_cap = krylov_cap
        self._finite_inverses = None
        if validate:
            self.validate()

    # -- validation -----------------------------------------------------
    def validate(self) -> None:
        n = self.ring.nvars
        wts = self.ring.gm_weights
        for mats, label in ((self.finite_part, "finite"), ):
            for m in mats:
                if len(m) != n or any(len(r) != n for r in m):
                    raise ActionError(f"{label} matrix is not {n}x{n}")
        ident = tuple(tuple(QQ(1) if i == j else QQ(0) for j in range(n)) for i in range(n))
        if ident not in self.finite_part:
            raise ActionError("finite part must contain the identity")
        if len(self.finite_part) <= 16:
            table = set(self.finite_part)
            for a in self.finite_part:
                for b in self.finite_part:
                    prod = tuple(tuple(x for x in row) for row in mat_mul(a, b))
                    if prod not in table:
                        raise ActionError("finite part is not closed under multiplication")
        for row in self.torus_part:
            if len(row) != n:
                raise ActionError("torus weight row has wrong length")
        # G commutes with G_m: every matrix must preserve the G_m-grading
        for m in self.finite_part + [d for pair in self.connected_part for d in pair]:
            for i in range(n):
                for j in range(n):
                    if m[i][j] != 0 and wts[i] != wts[j]:
                        raise ActionError(
                            "group data mixes G_m-weights "
                            f"(variables {self.ring.names[i]}, {self.ring.names[j]})"
                        )
        if self.connected_part:
            self._check_casimir_centrality()

    def _quadratic_basis(self):
        n = self.ring.nvars
        basis = []
        for i in range(n):
            e = [0] * n
            e[i] = 1
            basis.append(tuple(e))
        for i in range(n):
            for j in range(i, n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                basis.append(tuple(e))
        return [Polynomial(self.ring, {m: QQ(1)}) for m in basis]

    def _check_casimir_centrality(self) -> None:
        quad = self._quadratic_basis()
        all_derivs = [d for pair in self.connected_part for d in pair]
        for f in quad:
            cf = self.casimir(f)
            for d in all_derivs:
                left = self.casimir(derivation_apply(f, d, self.ring))
                right = derivation_apply(cf, d, self.ring)
                if left != right:
                    raise ActionError(
                        "Casimir element is not central on the degree-<=2 part; "
                        "check the Lie basis / dual basis pairing"
                    )
        if len(self.finite_part) > 1:
            for f in quad:
                avg_then_cas = self.casimir(self.finite_average(f))
                cas_then_avg = self.finite_average(self.casimir(f))
                if avg_then_cas != cas_then_avg:
                    raise ActionError(
                        "finite part does not commute with the Casimir projection"
                    )

    # -- elementary operators -------------------------------------------
    def finite_inverses(self):
        if self._finite_inverses is None:
            self._finite_inverses = [
                tuple(tuple(x for x in row) for row in mat_inv([list(r) for r in m]))
                for m in self.finite_part
            ]
        return self._finite_inverses

    def finite_apply(self, f: Polynomial, index: int) -> Polynomial:
        return f.apply_linear(self.finite_part[index])

    def finite_average(self, f: Polynomial) -> Polynomial:
        if len(self.finite_part) == 1:
            return f
        acc = Polynomial.zero(f.ring)
        for m in self.finite_part:
            acc = acc + f.apply_linear(self._extend_matrix(m, f.ring))
        return acc.scale(QQ(1, len(self.finite_part)))

    def torus_weight_of_mono(self, mono, row_index: int, ring: Optional[VariableSet] = None) -> int:
        return mono_weight(mono, self._extend_row(self.torus_part[row_index], ring or self.ring))

    def torus_project(self, f: Polynomial, targets: Optional[Sequence[int]] = None) -> Polynomial:
        """Keep terms whose torus weight equals targets (default all zero)."""
        if not self.torus_part:
            return f
        ring = f.ring
        targets = targets or [0] * len(self.torus_part)
        terms = f.terms
        for row, target in zip(self.torus_part, targets):
            ext = self._extend_row(row, ring)
            terms = {m: c for m, c in terms.items() if mono_weight(m, ext) == target}
        return Polynomial(ring, dict(terms))

    def derivation(self, f: Polynomial, matrix) -> Polynomial:
        return derivation_apply(f, self._extend_matrix(matrix, f.ring), f.ring)

    def casimir(self, f: Polynomial) -> Polynomial:
        acc = Polynomial.zero(f.ring)
        for d, dprime in self.connected_part:
            acc = acc + self.derivation(self.derivation(f, dprime), d)
        return acc

    # -- ring extension (combined rings P tensor S) ----------------------
    def _extend_matrix(self, m, ring: VariableSet):
        """View a matrix on the base variables inside a larger ring whose
        first variables are the base ones; extra variables are inert."""
        n0 = self.ring.nvars
        n = ring.nvars
        if n == n0:
            return m
        if ring.names[:n0] != self.ring.names:
            raise ActionError("ring extension must keep base variables first")
        zero = QQ(0)
        rows = []
        for i in range(n0):
            rows.append(tuple(m[i]) + (zero,) * (n - n0))
        for i in range(n0, n):
            rows.append((zero,) * n)
        return tuple(rows)

    def _extend_row(self, row, ring: VariableSet):
        n0 = self.ring.nvars
        n = ring.nvars
        if n == n0:
            return row
        if ring.names[:n0] != self.ring.names:
            raise ActionError("ring extension must keep base variables first")
        return tuple(row) + (0,) * (n - n0)

    def finite_matrix_in(self, index: int, ring: VariableSet):
        """Finite element's substitution matrix inside an extended ring
        (identity on the extra variables)."""
        n0 = self.ring.nvars
        n = ring.nvars
        m = self.finite_part[index]
        ext = [[QQ(0)] * n for _ in range(n)]
        for i in range(n0):
            for j in range(n0):
                ext[i][j] = m[i][j]
        for i in range(n0, n):
            ext[i][i] = QQ(1)
        return ext


def closure_from_generators(mats: Sequence, cap: int = 10**4) -> List:
    """Multiplicative closure of a generator list (with identity)."""
    mats = [_to_qq_matrix(m) for m in mats]
    n = len(mats[0])
    ident = tuple(tuple(QQ(1) if i == j else QQ(0) for j in range(n)) for i in range(n))
    seen = {ident}
    queue = [ident]
    for m in mats:
        if m not in seen:
            seen.add(m)
            queue.append(m)
    head = 0
    while head < len(queue):
        a = queue[head]
        head += 1
        for b in mats:
            prod = tuple(tuple(x for x in row) for row in mat_mul(a, b))
            if prod not in seen:
                if len(seen) >= cap:
                    raise ActionError(f"finite closure exceeds cap of {cap} elements")
                seen.add(prod)
                queue.append(prod)
    return queue


# ---------------------------------------------------------------------------
# representation matrices on finite-dimensional stable subspaces

class RepresentationMatrix:
    """rho-matrices of the action on a chosen basis of a stable subspace.

    Column convention throughout: D(b_j) = sum_i rho(D)[i][j] b_i.
    torus_weights[k][j] is the weight of basis vector j under torus row k.
    """

    def __init__(self, basis, rho_pairs, rho_finite, torus_weights):
        self.basis = list(basis)
        self.dim = len(self.basis)
        self.rho_pairs = rho_pairs  # [(rho(D_i), rho(D'_i))]
        self.rho_finite = rho_finite  # [rho(g)] matching action.finite_part
        self._rho_finite_inv = None
        self.torus_weights = torus_weights

    def rho_finite_inverse(self, index: int):
        if self._rho_finite_inv is None:
            self._rho_finite_inv = [mat_inv(m) for m in self.rho_finite]
        return self._rho_finite_inv[index]

    def weight_of(self, j: int, ring: VariableSet) -> int:
        """G_m-weight of basis vector j (basis vectors are weight vectors)."""
        b = self.basis[j]
        if isinstance(b, Polynomial):
            return gm_weight(b)
        w = None
        for comp in b.components:
            if comp.terms:
                w = gm_weight(comp)
                break
        return w


def _poly_coord(f: Polynomial) -> dict:
    return dict(f.terms)


def _span_space(basis, key_order=None) -> RowSpace:
    space = RowSpace(track=True, key_order=key_order)
    for b in basis:
        independent, _ = space.add(_poly_coord(b) if isinstance(b, Polynomial) else _elem_coord(b))
        if not independent:
            raise ValueError("basis is linearly dependent")
    return space


def _elem_coord(v) -> dict:
    out = {}
    for i, comp in enumerate(v.components):
        for m, c in comp.terms.items():
            out[(i, m)] = c
    return out


def rep_on_subspace(basis: Sequence[Polynomial], action: GroupAction):
    """Representation matrices on span(basis), or NotStable with witness.

    Basis vectors must be torus-weight vectors (the paper's bases are); a
    mixed-weight basis vector is reported as instability of the torus
    action.
    """
    space = _span_space(basis)
    ring = basis[0].ring

    def express(vec: Polynomial):
        return space.express_over_inserted(_poly_coord(vec))

    def column_matrix(images):
        dim = len(basis)
        mat = [[QQ(0)] * dim for _ in range(dim)]
        for j, img in enumerate(images):
            coeffs = express(img)
            if coeffs is None:
                return None, img
            for i, c in coeffs.items():
                mat[i][j] = c
        return mat, None

    rho_pairs = []
    for d, dprime in action.connected_part:
        md, witness = column_matrix([action.derivation(b, d) for b in basis])
        if md is None:
            return NotStable(witness)
        mdp, witness = column_matrix([action.derivation(b, dprime) for b in basis])
        if mdp is None:
            return NotStable(witness)
        rho_pairs.append((md, mdp))
    rho_finite = []
    for idx in range(len(action.finite_part)):
        mg, witness = column_matrix(
            [b.apply_linear(action._extend_matrix(action.finite_part[idx], ring)) for b in basis]
        )
        if mg is None:
            return NotStable(witness)
        rho_finite.append(mg)
    torus_weights = []
    for k, row in enumerate(action.torus_part):
        ext = action._extend_row(row, ring)
        wts = []
        for b in basis:
            ws = {mono_weight(m, ext) for m in b.terms}
            if len(ws) != 1:
                return NotStable(b)
            wts.append(ws.pop())
        torus_weights.append(wts)
    return RepresentationMatrix(basis, rho_pairs, rho_finite, list(map(list, zip(*torus_weights))) if torus_weights else [[] for _ in basis])


def g_closure(seed: Sequence[Polynomial], action: GroupAction, cap: int = 4096) -> List[Polynomial]:
    """Basis of the smallest G-stable subspace containing the seed.

    Saturates under all derivations, finite elements, and splitting into
    torus-weight components; terminates because the seed sits in a
    finite-dimensional graded piece.  The returned basis consists of
    G_m- and torus-weight-homogeneous vectors in canonical reduced form.
    """
    ring = seed[0].ring
    space = RowSpace()
    queue: List[Polynomial] = []

    def torus_split(f: Polynomial) -> List[Polynomial]:
        parts = [f]
        for row in action.torus_part:
            ext = action._extend_row(row, ring)
            nxt = []
            for p in parts:
                buckets: dict = {}
                for m, c in p.terms.items():
                    buckets.setdefault(mono_weight(m, ext), {})[m] = c
                nxt.extend(Polynomial(ring, t) for _, t in sorted(buckets.items()))
            parts = nxt
        return parts

    def push(f: Polynomial):
        for part in torus_split(f):
            if not part.terms:
                continue
            independent, _ = space.add(_poly_coord(part))
            if independent:
                if space.rank > cap:
                    raise ActionError(f"g_closure dimension exceeds cap {cap}")
                queue.append(part)

    for f in seed:
        push(f)
    head = 0
    all_derivs = [d for pair in action.connected_part for d in pair]
    while head < len(queue):
        f = queue[head]
        head += 1
        for d in all_derivs:
            push(action.derivation(f, d))
        for idx in range(len(action.finite_part)):
            if idx == 0 and len(action.finite_part) == 1:
                continue
            push(f.apply_linear(action._extend_matrix(action.finite_part[idx], ring)))

    # canonical homogeneous basis: bucket by (gm-weight, torus weights), RREF each
    buckets: dict = {}
    for f in queue:
        w = gm_weight(f)
        tws = tuple(
            mono_weight(next(iter(f.terms)), action._extend_row(row, ring))
            for row in action.torus_part
        )
        buckets.setdefault((w, tws), []).append(f)
    out: List[Polynomial] = []
    from .ring import canonicalize_generator

    for key in sorted(buckets):
        sub = RowSpace()
        for f in buckets[key]:
            sub.add(_poly_coord(f))
        for row in sub.basis_vectors():
            out.append(canonicalize_generator(Polynomial(ring, dict(row))))
    return out


# ---------------------------------------------------------------------------
# twisted actions on rows and matrices

def _scalar_left(rho, mat: PolyMatrix) -> PolyMatrix:
    """rho * entries for a dense rational rho."""
    ring = mat.ring
    rows = len(rho)
    out = []
    for i in range(rows):
        out_row = []
        for j in range(mat.cols):
            acc = Polynomial.zero(ring)
            for k in range(mat.rows):
                c = rho[i][k]
                if c:
                    acc = acc + mat.entries[k][j].scale(c)
            out_row.append(acc)
        out.append(out_row)
    return PolyMatrix(ring, out)


def _scalar_right(mat: PolyMatrix, rho) -> PolyMatrix:
    ring = mat.ring
    cols = len(rho[0])
    out = []
    for i in range(mat.rows):
        out_row = []
        for j in range(cols):
            acc = Polynomial.zero(ring)
            for k in range(mat.cols):
                c = rho[k][j]
                if c:
                    acc = acc + mat.entries[i][k].scale(c)
            out_row.append(acc)
        out.append(out_row)
    return PolyMatrix(ring, out)


class TwistedAction:
    """Combined action on a PolyMatrix with reps on row/column indices.

    reps = (rho_rows or None, rho_cols or None).  A 1 x n row of
    Hom(P tensor N, P) takes (None, rho_N); an n1 x n2 matrix of
    Hom(P tensor N2, P tensor N1) takes (rho_N1, rho_N2); a column vector
    of P tensor N1 takes (rho_N1, None).
    """

    def __init__(self, action: GroupAction, rho_rows, rho_cols):
        self.action = action
        self.rho_rows = rho_rows
        self.rho_cols = rho_cols

    def check_shape(self, mat: PolyMatrix) -> None:
        if self.rho_rows is not None and self.rho_rows.dim != mat.rows:
            raise ValueError("row representation does not match matrix shape")
        if self.rho_cols is not None and self.rho_cols.dim != mat.cols:
            raise ValueError("column representation does not match matrix shape")

    def derivation(self, mat: PolyMatrix, pair_index: int, use_dual: bool) -> PolyMatrix:
        d = self.action.connected_part[pair_index][1 if use_dual else 0]
        out = mat.map(lambda f: self.action.derivation(f, d))
        if self.rho_rows is not None:
            rho = self.rho_rows.rho_pairs[pair_index][1 if use_dual else 0]
            out = out + _scalar_left(rho, mat)
        if self.rho_cols is not None:
            rho = self.rho_cols.rho_pairs[pair_index][1 if use_dual else 0]
            out = out - _scalar_right(mat, rho)
        return out

    def casimir(self, mat: PolyMatrix) -> PolyMatrix:
        acc = PolyMatrix.zero(mat.ring, mat.rows, mat.cols)
        for i in range(len(self.action.connected_part)):
            acc = acc + self.derivation(self.derivation(mat, i, True), i, False)
        return acc

    def finite(self, mat: PolyMatrix, index: int) -> PolyMatrix:
        m = self.action.finite_matrix_in(index, mat.ring)
        out = mat.map(lambda f: f.apply_linear(m))
        if self.rho_rows is not None:
            out = _scalar_left(self.rho_rows.rho_finite[index], out)
        if self.rho_cols is not None:
            out = _scalar_right(out, self.rho_cols.rho_finite_inverse(index))
        return out

    def finite_average(self, mat: PolyMatrix) -> PolyMatrix:
        k = len(self.action.finite_part)
        if k == 1:
            return mat
        acc = PolyMatrix.zero(mat.ring, mat.rows, mat.cols)
        for idx in range(k):
            acc = acc + self.finite(mat, idx)
        return acc.scale(QQ(1, k))

    def torus_project(self, mat: PolyMatrix) -> PolyMatrix:
        if not self.action.torus_part:
            return mat
        ring = mat.ring
        out = []
        for i in range(mat.rows):
            out_row = []
            for j in range(mat.cols):
                f = mat.entries[i][j]
                terms = f.terms
                for k, row in enumerate(self.action.torus_part):
                    target = 0
                    if self.rho_cols is not None:
                        target += self.rho_cols.torus_weights[j][k]
                    if self.rho_rows is not None:
                        target -= self.rho_rows.torus_weights[i][k]
                    ext = self.action._extend_row(row, ring)
                    terms = {m: c for m, c in terms.items() if mono_weight(m, ext) == target}
                out_row.append(Polynomial(ring, dict(terms)))
            out.append(out_row)
        return PolyMatrix(ring, out)

    def is_invariant(self, mat: PolyMatrix) -> bool:
        if self.torus_project(mat) != mat:
            return False
        for idx in range(len(self.action.finite_part)):
            if self.finite(mat, idx) != mat:
                return False
        for i in range(len(self.action.connected_part)):
            if not self.derivation(mat, i, False).is_zero():
                return False
            if not self.derivation(mat, i, True).is_zero():
                return False
        return True


def _mat_coord(mat: PolyMatrix) -> dict:
    out = {}
    for i, row in enumerate(mat.entries):
        for j, f in enumerate(row):
            for m, c in f.terms.items():
                out[(i, j, m)] = c
    return out


def _krylov_project(start, apply_casimir, coord, zero, cap: int):
    """Projection onto the Casimir kernel via the minimal polynomial."""
    vectors = [start]
    space = RowSpace(track=True)
    independent, _ = space.add(coord(start))
    if not independent:
        return zero  # start == 0
    while True:
        nxt = apply_casimir(vectors[-1])
        independent, data = space.add(coord(nxt))
        if not independent:
            relation = data  # sum relation[i] * v_i = 0, last coeff nonzero
            break
        vectors.append(nxt)
        if len(vectors) > cap:
            raise ActionError(
                f"Krylov space exceeded cap {cap}: action is not rational "
                "on this element or the group data is inconsistent"
            )
    top = max(relation)
    coeffs = [relation.get(i, QQ(0)) for i in range(top + 1)]
    s = next(i for i, c in enumerate(coeffs) if c != 0)
    if s == 0:
        return zero  # minimal polynomial has nonzero constant term: no invariant part
    acc = zero
    for i in range(s, top + 1):
        c = coeffs[i]
        if c != 0:
            acc = acc + vectors[i - s].scale(c)
    return acc.scale(QQ(1) / coeffs[s])


def reynolds(f: Polynomial, action: GroupAction) -> Polynomial:
    """Invariant component of f: finite average, torus weight-0 part, then
    Casimir projection."""
    g = action.finite_average(f)
    g = action.torus_project(g)
    if not g.terms or not action.connected_part:
        return g
    zero = Polynomial.zero(g.ring)
    return _krylov_project(
        g, action.casimir, _poly_coord, zero, action.krylov_cap
    )


def reynolds_twisted(mat: PolyMatrix, reps, action: GroupAction) -> PolyMatrix:
    """Equivariant component of a row / matrix for the diagonal action."""
    rho_rows, rho_cols = reps
    tw = TwistedAction(action, rho_rows, rho_cols)
    tw.check_shape(mat)
    g = tw.finite_average(mat)
    g = tw.torus_project(g)
    if g.is_zero() or not action.connected_part:
        return g
    zero = PolyMatrix.zero(g.ring, g.rows, g.cols)
    return _krylov_project(g, tw.casimir, _mat_coord, zero, action.krylov_cap)


def is_equivariant(mat: PolyMatrix, reps, action: GroupAction) -> bool:
    rho_rows, rho_cols = reps
    tw = TwistedAction(action, rho_rows, rho_cols)
    tw.check_shape(mat)
    return tw.is_invariant(mat)


def is_invariant_poly(f: Polynomial, action: GroupAction) -> bool:
    if action.torus_project(f) != f:
        return False
    for idx in range(len(action.finite_part)):
        if f.apply_linear(action._extend_matrix(action.finite_part[idx], f.ring)) != f:
            return False
    for d, dprime in action.connected_part:
        if action.derivation(f, d).terms or action.derivation(f, dprime).terms:
            return False
    return True
