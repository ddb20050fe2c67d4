"""The equivariant deformation engine.

Pipeline: build the equivariant presentation (generator row A0, syzygy
matrix B0 with a G-stable column space), find a basis of equivariant
covariants, cut out the tangent space, then iterate the obstruction step.
Each order n maintains matrices U = A0+...+An, V = B0+...+Bn over the
combined ring P (tensor) S and an ideal K_n in the deformation variables
t_i such that every entry of U*V lies in K_n modulo t-degree > n, exactly.

The obstruction space is coker(mu) for mu(C, D) = C*B0 + A0*D; its module
Groebner basis is computed once, and the t-coefficients of the truncated
product are reduced against it: normal-form remainders yield the new base
ideal generators, and the lift of the reducible part (split back into C/D
cofactors by generator provenance) yields the corrections to U and V, made
equivariant by the twisted Reynolds operator.  Corrections only touch
t-degrees >= 2, so clearing proceeds strictly upward in degree and the
per-order invariant is re-established after finitely many passes.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .action import (
    GroupAction,
    NotStable,
    RepresentationMatrix,
    is_equivariant,
    is_invariant_poly,
    rep_on_subspace,
    reynolds_twisted,
)
from .linalg import RowSpace, kernel_relations, mat_identity
from .matrix import FreeModuleElement, PolyMatrix, matrix_mul
from .rationals import QQ
from .ring import (
    GREVLEX,
    Polynomial,
    VariableSet,
    canonicalize_generator,
    elimination_order,
    gm_weight,
    mono_weight,
    poly_print,
    tensor_vars,
)
from .groebner import (
    GroebnerBasis,
    ModuleGB,
    buchberger,
    ideal_equal,
    module_buchberger,
    _combo_add_scaled,
    _poly_to_raw,
)


class SpecValidationError(ValueError):
    """Problem data fails its contract (exit code 2 at the CLI)."""


class ResourceCapError(RuntimeError):
    """A configured search cap was exhausted (exit code 3 at the CLI)."""


class InternalInvariantError(AssertionError):
    """A per-order invariant failed to re-establish (exit code 5)."""


DEFAULT_MAX_ORDER = 24
DEFAULT_MAX_COVARIANT_DEGREE = 16


class ProblemSpec:
    """Validated input: ring, action, ideal generators, covariant counts."""

    def __init__(
        self,
        vars: VariableSet,
        action: GroupAction,
        ideal_gens: Sequence[Polynomial],
        n1_decomposition: Sequence[tuple],
        invariants: Optional[Sequence[Polynomial]] = None,
        max_order: Optional[int] = None,
        max_covariant_degree: int = DEFAULT_MAX_COVARIANT_DEGREE,
        positive_weight_only: bool = False,
        name: str = "problem",
    ):
        self.vars = vars
        self.action = action
        self.ideal_gens = list(ideal_gens)
        self.n1_decomposition = [tuple(entry) for entry in n1_decomposition]
        self.invariants = list(invariants or [])
        self.max_order = max_order
        self.max_covariant_degree = max_covariant_degree
        self.positive_weight_only = positive_weight_only
        self.name = name
        self.validate()

    @property
    def covariant_count(self) -> int:
        return sum(m * h for m, h, *_ in self.n1_decomposition)

    def validate(self) -> None:
        if not self.ideal_gens:
            raise SpecValidationError("ideal has no generators")
        for i, f in enumerate(self.ideal_gens):
            if not f.terms:
                raise SpecValidationError(f"ideal generator {i} is zero")
            if f.ring != self.vars:
                raise SpecValidationError(f"ideal generator {i} uses a different ring")
            if gm_weight(f) is None:
                raise SpecValidationError(
                    f"ideal generator {i} is not G_m-weight-homogeneous"
                )
        for entry in self.n1_decomposition:
            if len(entry) < 2 or entry[0] < 1 or entry[1] < 0:
                raise SpecValidationError("bad n1_decomposition entry")
        dims = [entry[2] for entry in self.n1_decomposition if len(entry) > 2]
        if len(dims) == len(self.n1_decomposition):
            total = sum(m * d for (m, _, d) in self.n1_decomposition)
            span = RowSpace()
            for f in self.ideal_gens:
                span.add(dict(f.terms))
            if total != span.rank:
                raise SpecValidationError(
                    f"decomposition dimensions sum to {total}, generator span is {span.rank}"
                )
        for i, f in enumerate(self.invariants):
            if not is_invariant_poly(f, self.action):
                raise SpecValidationError(f"declared invariant {i} is not G-invariant")
            if f.is_constant():
                raise SpecValidationError(f"declared invariant {i} has degree 0")


class Presentation:
    """A0, B0 with representation matrices and weight bookkeeping."""

    def __init__(self, spec: ProblemSpec, A0, B0, rho1, rho2, f_weights, r_weights, gb_I):
        self.spec = spec
        self.ring = spec.vars
        self.A0 = A0
        self.B0 = B0
        self.rho1 = rho1
        self.rho2 = rho2
        self.f_weights = f_weights
        self.r_weights = r_weights
        self.gb_I = gb_I
        self.n1 = A0.cols
        self.n2 = B0.cols
        self._mu_gb: Optional[ModuleGB] = None
        self._mu_labels: Optional[list] = None
        self._mu_cache: dict = {}

    # -- the obstruction module Im(mu)ic P^(1 x n2) ----------------------
    def _ensure_mu(self):
        if self._mu_gb is not None or self.n2 == 0:
            return
        ring = self.ring
        inputs = []
        labels = []
        groups = []
        gb_polys = self.gb_I.polys
        for j in range(self.n2):
            for gidx, g in enumerate(gb_polys):
                inputs.append({(j, m): c for m, c in g.terms.items()})
                labels.append(("ideal", j, gidx))
                groups.append("I")
        for i in range(self.n1):
            row = self.B0.entries[i]
            raw = {}
            for j in range(self.n2):
                for m, c in row[j].terms.items():
                    raw[(j, m)] = c
            if raw:
                inputs.append(raw)
                labels.append(("row", i))
                groups.append(None)
        self._mu_gb = module_buchberger(
            inputs, ring, self.n2, GREVLEX, track=True, input_groups=groups
        )
        self._mu_labels = labels

    def mu_reduce(self, vec: dict):
        """Reduce a row vector of P^(1 x n2) modulo Im(mu).

        Returns (remainder, C, D) with vec = remainder + C*B0 + A0*D,
        C a length-n1 list of W-polynomials and D an n1 x n2 grid.
        """
        self._ensure_mu()
        fingerprint = frozenset(vec.items())
        hitv = self._mu_cache.get(fingerprint)
        if hitv is not None:
            return hitv
        rem, cof = self._mu_gb.reduce_raw(vec, True)
        combo: Dict[int, dict] = {}
        for gi, qpoly in cof.items():
            for m, c in qpoly.items():
                _combo_add_scaled(combo, self._mu_gb.transforms[gi], m, c)
        ring = self.ring
        zero = Polynomial.zero(ring)
        C = [zero] * self.n1
        D = [[zero] * self.n2 for _ in range(self.n1)]
        trans_I = self.gb_I._mgb.transforms
        for idx, poly_raw in combo.items():
            label = self._mu_labels[idx]
            q = Polynomial(ring, poly_raw)
            if label[0] == "row":
                i = label[1]
                C[i] = C[i] + q
            else:
                _, j, gidx = label
                for k, t_raw in trans_I[gidx].items():
                    D[k][j] = D[k][j] + q * Polynomial(ring, t_raw)
        result = (rem, C, D)
        self._mu_cache[fingerprint] = result
        return result

    def check_invariants(self) -> None:
        if not matrix_mul(self.A0, self.B0).is_zero():
            raise InternalInvariantError("A0 * B0 != 0")
        action = self.spec.action
        if not is_equivariant(self.A0, (None, self.rho1), action):
            raise InternalInvariantError("A0 is not equivariant")
        if self.n2 and not is_equivariant(self.B0, (self.rho1, self.rho2), action):
            raise InternalInvariantError("B0 is not equivariant")


# ---------------------------------------------------------------------------
# column (P tensor N1) action helpers

def _column_apply_derivation(col: List[Polynomial], dmat, rho, action: GroupAction):
    ring = col[0].ring
    n = len(col)
    out = [action.derivation(col[i], dmat) for i in range(n)]
    for i in range(n):
        for j in range(n):
            c = rho[i][j]
            if c:
                out[i] = out[i] + col[j].scale(c)
    return out


def _column_apply_finite(col: List[Polynomial], idx: int, rho1: RepresentationMatrix, action: GroupAction):
    ring = col[0].ring
    mat = action._extend_matrix(action.finite_part[idx], ring)
    moved = [p.apply_linear(mat) for p in col]
    rho = rho1.rho_finite[idx]
    n = len(col)
    out = []
    for i in range(n):
        acc = Polynomial.zero(ring)
        for j in range(n):
            c = rho[i][j]
            if c:
                acc = acc + moved[j].scale(c)
        out.append(acc)
    return out


def _column_coord(col: List[Polynomial]) -> dict:
    out = {}
    for i, p in enumerate(col):
        for m, c in p.terms.items():
            out[(i, m)] = c
    return out


def _column_weight(col: List[Polynomial], f_weights) -> Optional[int]:
    w = None
    for i, p in enumerate(col):
        if not p.terms:
            continue
        wi = gm_weight(p)
        if wi is None:
            return None
        if w is None:
            w = wi + f_weights[i]
        elif w != wi + f_weights[i]:
            return None
    return w


def g_closure_columns(
    seed: List[List[Polynomial]],
    action: GroupAction,
    rho1: RepresentationMatrix,
    f_weights,
    cap: int = 4096,
) -> List[List[Polynomial]]:
    """G-stable closure of a set of columns of P tensor N1 (Nakayama-free).

    Saturates under derivations, finite elements, and splitting into
    torus-weight components; the returned columns are weight vectors in
    canonical reduced form, ordered by weight.
    """
    ring = seed[0][0].ring
    n = len(seed[0])
    space = RowSpace()
    queue: List[List[Polynomial]] = []

    def torus_key(i, mono, k):
        row = action._extend_row(action.torus_part[k], ring)
        return mono_weight(mono, row) + rho1.torus_weights[i][k]

    def torus_split(col):
        parts = [col]
        for k in range(len(action.torus_part)):
            nxt = []
            for part in parts:
                buckets: dict = {}
                for i, p in enumerate(part):
                    for m, c in p.terms.items():
                        buckets.setdefault(torus_key(i, m, k), {}).setdefault(i, {})[m] = c
                for _, comp in sorted(buckets.items()):
                    nxt.append(
                        [Polynomial(ring, comp.get(i, {})) for i in range(n)]
                    )
            parts = nxt
        return parts

    def push(col):
        for part in torus_split(col):
            if all(not p.terms for p in part):
                continue
            independent, _ = space.add(_column_coord(part))
            if independent:
                if space.rank > cap:
                    raise ResourceCapError(f"syzygy closure dimension exceeds {cap}")
                queue.append(part)

    for col in seed:
        push(col)
    head = 0
    pair_mats = [(d, rho) for (d, dp), (rho, rhop) in zip(action.connected_part, rho1.rho_pairs)] + [
        (dp, rhop) for (d, dp), (rho, rhop) in zip(action.connected_part, rho1.rho_pairs)
    ]
    while head < len(queue):
        col = queue[head]
        head += 1
        for dmat, rho in pair_mats:
            push(_column_apply_derivation(col, dmat, rho, action))
        for idx in range(len(action.finite_part)):
            if idx == 0 and len(action.finite_part) == 1:
                continue
            push(_column_apply_finite(col, idx, rho1, action))

    buckets: dict = {}
    for col in queue:
        w = _column_weight(col, f_weights)
        if w is None:
            raise InternalInvariantError("closure produced a non-homogeneous column")
        buckets.setdefault(w, []).append(col)
    out: List[List[Polynomial]] = []
    for w in sorted(buckets):
        sub = RowSpace()
        for col in buckets[w]:
            sub.add(_column_coord(col))
        for row in sub.basis_vectors():
            comps: List[dict] = [dict() for _ in range(n)]
            for (i, m), c in row.items():
                comps[i][m] = c
            col = [Polynomial(ring, t) for t in comps]
            scale = None
            # canonical content scaling across the whole column
            joined: dict = {}
            for i, p in enumerate(col):
                for m, c in p.terms.items():
                    joined[(i,) + m] = c
            from .linalg import vec_content_normalize

            normalized = vec_content_normalize(joined)
            comps = [dict() for _ in range(n)]
            for k, c in normalized.items():
                comps[k[0]][k[1:]] = c
            out.append([Polynomial(ring, t) for t in comps])
    return out


def rep_on_columns(
    cols: List[List[Polynomial]],
    action: GroupAction,
    rho1: RepresentationMatrix,
):
    """Representation matrices on the span of columns of P tensor N1."""
    ring = cols[0][0].ring
    space = RowSpace(track=True)
    for col in cols:
        independent, _ = space.add(_column_coord(col))
        if not independent:
            raise SpecValidationError("syzygy columns are linearly dependent")

    def express(col):
        return space.express_over_inserted(_column_coord(col))

    def column_matrix(images):
        dim = len(cols)
        mat = [[QQ(0)] * dim for _ in range(dim)]
        for j, img in enumerate(images):
            coeffs = express(img)
            if coeffs is None:
                return None, img
            for i, c in coeffs.items():
                mat[i][j] = c
        return mat, None

    rho_pairs = []
    for (d, dp), (rho, rhop) in zip(action.connected_part, rho1.rho_pairs):
        md, witness = column_matrix([_column_apply_derivation(c, d, rho, action) for c in cols])
        if md is None:
            return NotStable(witness)
        mdp, witness = column_matrix([_column_apply_derivation(c, dp, rhop, action) for c in cols])
        if mdp is None:
            return NotStable(witness)
        rho_pairs.append((md, mdp))
    rho_finite = []
    for idx in range(len(action.finite_part)):
        mg, witness = column_matrix([_column_apply_finite(c, idx, rho1, action) for c in cols])
        if mg is None:
            return NotStable(witness)
        rho_finite.append(mg)
    torus_weights = []
    for k in range(len(action.torus_part)):
        row = action._extend_row(action.torus_part[k], ring)
        wts = []
        for col in cols:
            ws = set()
            for i, p in enumerate(col):
                for m in p.terms:
                    ws.add(mono_weight(m, row) + rho1.torus_weights[i][k])
            if len(ws) != 1:
                return NotStable(col)
            wts.append(ws.pop())
        torus_weights.append(wts)
    basis = [FreeModuleElement(c) for c in cols]
    return RepresentationMatrix(
        basis,
        rho_pairs,
        rho_finite,
        list(map(list, zip(*torus_weights))) if torus_weights else [[] for _ in cols],
    )


# ---------------------------------------------------------------------------
# presentation

def _minimal_syzygy_generators(columns: List[List[Polynomial]], f_weights) -> List[List[Polynomial]]:
    """Minimal generators of the (graded) syzygy module among the columns.

    Graded Nakayama: a column of weight w is redundant iff it lies in the
    span of monomial multiples of kept columns of weight <= w.
    """
    if not columns:
        return []
    ring = columns[0][0].ring
    weighted = []
    for col in columns:
        w = _column_weight(col, f_weights)
        if w is None:
            raise InternalInvariantError("syzygy column is not weight-homogeneous")
        weighted.append((w, col))
    weighted.sort(key=lambda t: t[0])
    kept: List[Tuple[int, List[Polynomial]]] = []
    out = []
    from .ring import Monomial

    def monomials_of_weight_bounded(w):
        return monomials_of_weight(ring, w)

    grouped: dict = {}
    for w, col in weighted:
        grouped.setdefault(w, []).append(col)
    for w in sorted(grouped):
        space = RowSpace()
        for wk, col in kept:
            gap = w - wk
            if gap == 0:
                space.add(_column_coord(col))
                continue
            for mono in monomials_of_weight_bounded(gap):
                shifted = [p.mul_monomial(mono) for p in col]
                space.add(_column_coord(shifted))
        for col in grouped[w]:
            independent, _ = space.add(_column_coord(col))
            if independent:
                kept.append((w, col))
                out.append(col)
    return out


def monomials_of_weight(ring: VariableSet, w: int) -> List[tuple]:
    """All monomials of G_m-weight w (weights must be positive)."""
    weights = ring.gm_weights
    if any(x < 1 for x in weights):
        raise SpecValidationError("monomial enumeration requires positive weights")
    n = ring.nvars
    out: List[tuple] = []

    def rec(i: int, remaining: int, acc: list):
        if i == n:
            if remaining == 0:
                out.append(tuple(acc))
            return
        step = weights[i]
        max_e = remaining // step
        for e in range(max_e + 1):
            acc.append(e)
            rec(i + 1, remaining - e * step, acc)
            acc.pop()

    rec(0, w, [])
    out.sort(key=GREVLEX.key)
    return out


def build_presentation(spec: ProblemSpec) -> Presentation:
    """A0 from the generators in file order; B0 columns a G-stable basis of
    the syzygy module's generating space."""
    ring = spec.vars
    action = spec.action
    rho1 = rep_on_subspace(spec.ideal_gens, action)
    if isinstance(rho1, NotStable):
        raise SpecValidationError(
            f"ideal generators do not span a G-stable subspace; witness: {rho1.witness!r}"
        )
    f_weights = [gm_weight(f) for f in spec.ideal_gens]
    A0 = PolyMatrix.row_vector(ring, spec.ideal_gens)
    gb_I = buchberger(spec.ideal_gens, GREVLEX, track=True)

    from .groebner import syzygies as syzygy_matrix

    raw = syzygy_matrix(A0)
    n1 = len(spec.ideal_gens)
    columns = [[raw.entries[i][j] for i in range(n1)] for j in range(raw.cols)]
    columns = _minimal_syzygy_generators(columns, f_weights)
    if columns:
        columns = g_closure_columns(columns, action, rho1, f_weights)
        rho2 = rep_on_columns(columns, action, rho1)
        if isinstance(rho2, NotStable):
            raise InternalInvariantError("closed syzygy space is not stable")
        B0 = PolyMatrix(ring, [[columns[j][i] for j in range(len(columns))] for i in range(n1)])
        r_weights = [_column_weight(col, f_weights) for col in columns]
    else:
        rho2 = RepresentationMatrix([], [( [], [] ) for _ in action.connected_part],
                                    [[] for _ in action.finite_part], [])
        B0 = PolyMatrix(ring, [[] for _ in range(n1)])
        r_weights = []
    pres = Presentation(spec, A0, B0, rho1, rho2, f_weights, r_weights, gb_I)
    pres.check_invariants()
    return pres


# ---------------------------------------------------------------------------
# covariants and the tangent space

class CovariantBasis:
    def __init__(self, rows: List[PolyMatrix], deltas: List[int], top_weight: int):
        self.rows = rows
        self.deltas = deltas  # weight of the covariant as a map (entry_j - f_j weight)
        self.top_weight = top_weight

    def __len__(self):
        return len(self.rows)


def covariant_basis(spec: ProblemSpec, pres: Presentation) -> CovariantBasis:
    """A basis of Hom^G(N1, P/I): exactly D = sum m_j h(M_j) equivariant
    rows whose residues mod I are linearly independent."""
    D = spec.covariant_count
    action = spec.action
    ring = spec.vars
    gb_I = pres.gb_I
    rows: List[PolyMatrix] = []
    deltas: List[int] = []
    space = RowSpace()
    if D == 0:
        return CovariantBasis(rows, deltas, -1)
    for m in range(spec.max_covariant_degree + 1):
        for mono in monomials_of_weight(ring, m):
            p = Polynomial(ring, {mono: QQ(1)})
            for l in range(pres.n1):
                entries = [Polynomial.zero(ring)] * pres.n1
                entries = list(entries)
                entries[l] = p
                candidate = PolyMatrix.row_vector(ring, entries)
                projected = reynolds_twisted(candidate, (None, pres.rho1), action)
                if projected.is_zero():
                    continue
                coord = {}
                for j in range(pres.n1):
                    nf, _ = gb_I.normal_form(projected.entries[0][j], track=False)
                    for mm, c in nf.terms.items():
                        coord[(j, mm)] = c
                if not coord:
                    continue
                independent, _ = space.add(coord)
                if independent:
                    rows.append(projected)
                    deltas.append(m - pres.f_weights[l])
                    if len(rows) == D:
                        return CovariantBasis(rows, deltas, m)
    raise ResourceCapError(
        f"covariant search reached weight {spec.max_covariant_degree} with rank "
        f"{len(rows)} of {D}; check the Hilbert-function data and the action"
    )


class TangentBasis:
    def __init__(self, rows: List[PolyMatrix], t_weights: List[int]):
        self.rows = rows
        self.t_weights = t_weights

    @property
    def dimension(self) -> int:
        return len(self.rows)


def tangent_space(spec: ProblemSpec, pres: Presentation, cov: CovariantBasis) -> TangentBasis:
    """Kernel of v -> v*B0 (mod I) on the covariant space, computed per
    G_m-weight block by exact row reduction; rows are weight-homogeneous
    and deterministically ordered by (t-weight, discovery)."""
    gb_I = pres.gb_I
    ring = spec.vars
    groups: dict = {}
    for idx, (row, delta) in enumerate(zip(cov.rows, cov.deltas)):
        groups.setdefault(delta, []).append((idx, row))
    tangent: List[Tuple[int, int, PolyMatrix]] = []
    for delta in sorted(groups):
        members = groups[delta]
        images = []
        for _, row in members:
            prod = matrix_mul(row, pres.B0)
            coord = {}
            for j in range(pres.n2):
                nf, _ = gb_I.normal_form(prod.entries[0][j], track=False)
                for mm, c in nf.terms.items():
                    coord[(j, mm)] = c
            images.append(coord)
        relations = kernel_relations(images)
        for rel in relations:
            acc = PolyMatrix.zero(ring, 1, pres.n1)
            for local_idx, coeff in sorted(rel.items()):
                acc = acc + members[local_idx][1].scale(coeff)
            acc = _canonicalize_row(acc)
            tangent.append((-delta, len(tangent), acc))
    tangent.sort(key=lambda t: (t[0], t[1]))
    rows = [row for _, _, row in tangent]
    weights = [w for w, _, _ in tangent]
    return TangentBasis(rows, weights)


def _canonicalize_row(mat: PolyMatrix) -> PolyMatrix:
    from math import gcd

    den_lcm = 1
    num_gcd = 0
    for row in mat.entries:
        for p in row:
            for c in p.terms.values():
                d = int(c.denominator)
                den_lcm = den_lcm * d // gcd(den_lcm, d)
    for row in mat.entries:
        for p in row:
            for c in p.terms.values():
                num_gcd = gcd(num_gcd, abs(int(c.numerator) * (den_lcm // int(c.denominator))))
    if num_gcd == 0:
        return mat
    scale = QQ(den_lcm, num_gcd)
    lead = None
    for row in mat.entries:
        for p in row:
            if p.terms and lead is None:
                lead = p.leading(GREVLEX)[1]
    if lead is not None and lead * scale < 0:
        scale = -scale
    return mat.scale(scale)


# ---------------------------------------------------------------------------
# combined-ring helpers

def _embed_w(f: Polynomial, cr: VariableSet, d: int) -> Polynomial:
    pad = (0,) * d
    return Polynomial(cr, {m + pad: c for m, c in f.terms.items()})


def _embed_t(f: Polynomial, cr: VariableSet, nw: int) -> Polynomial:
    pad = (0,) * nw
    return Polynomial(cr, {pad + m: c for m, c in f.terms.items()})


def _embed_matrix(mat: PolyMatrix, cr: VariableSet, d: int) -> PolyMatrix:
    return PolyMatrix(cr, [[_embed_w(e, cr, d) for e in row] for row in mat.entries])


def _tdeg(m: tuple, nw: int) -> int:
    return sum(m[nw:])


def _t_part(f: Polynomial, nw: int, deg: int) -> Polynomial:
    return Polynomial(f.ring, {m: c for m, c in f.terms.items() if _tdeg(m, nw) == deg})


def _t_truncate(f: Polynomial, nw: int, deg: int) -> Polynomial:
    return Polynomial(f.ring, {m: c for m, c in f.terms.items() if _tdeg(m, nw) <= deg})


def _mul_trunc(a: Polynomial, b: Polynomial, nw: int, tmax: int) -> Polynomial:
    if not a.terms or not b.terms:
        return Polynomial.zero(a.ring)
    a_items = [(m, c, _tdeg(m, nw)) for m, c in a.terms.items()]
    b_items = [(m, c, _tdeg(m, nw)) for m, c in b.terms.items()]
    out: dict = {}
    for ma, ca, da in a_items:
        for mb, cb, db in b_items:
            if da + db > tmax:
                continue
            m = tuple(x + y for x, y in zip(ma, mb))
            acc = out.get(m)
            if acc is None:
                out[m] = ca * cb
            else:
                acc = acc + ca * cb
                if acc == 0:
                    del out[m]
                else:
                    out[m] = acc
    return Polynomial(a.ring, out)


def _matrix_mul_trunc(a: PolyMatrix, b: PolyMatrix, nw: int, tmax: int) -> PolyMatrix:
    bt = list(zip(*b.entries))
    out = []
    for i in range(a.rows):
        arow = a.entries[i]
        out_row = []
        for j in range(b.cols):
            acc = Polynomial.zero(a.ring)
            for x, y in zip(arow, bt[j]):
                if x.terms and y.terms:
                    acc = acc + _mul_trunc(x, y, nw, tmax)
            out_row.append(acc)
        out.append(out_row)
    return PolyMatrix(a.ring, out)


def _split_coefficients(f: Polynomial, nw: int, t_ring: VariableSet) -> Dict[tuple, Polynomial]:
    """Entry of P tensor S as {W-monomial -> coefficient in S}."""
    buckets: dict = {}
    for m, c in f.terms.items():
        buckets.setdefault(m[:nw], {})[m[nw:]] = c
    return {wm: Polynomial(t_ring, tt) for wm, tt in buckets.items()}


class TruncatedIdeal:
    """Reduced standard basis of (gens) + m^(bound+1) in the t-variables.

    Uses the anti-graded order (lowest total degree leads, grevlex-style
    tie-break), in which reduction can only move terms to higher t-degree;
    products are truncated at the bound, so the computation lives in the
    Artinian quotient S/m^(bound+1) and terminates.  Normal forms against
    the reduced basis are canonical, giving an exact membership test for
    (gens) + m^(bound+1).
    """

    @staticmethod
    def _key(m: tuple):
        return (-sum(m),) + tuple(-e for e in reversed(m))

    def __init__(self, t_ring: VariableSet, gens: Sequence[Polynomial], bound: int):
        self.ring = t_ring
        self.bound = bound
        key = self._key
        polys = []
        for g in gens:
            raw = {m: c for m, c in g.terms.items() if sum(m) <= bound}
            if raw:
                polys.append(raw)
        basis: List[dict] = []
        leads: List[tuple] = []

        def reduce_full(raw: dict) -> dict:
            todo = dict(raw)
            done: dict = {}
            while todo:
                t = max(todo, key=key)
                c = todo.pop(t)
                hit = -1
                for gi, lm in enumerate(leads):
                    if all(x <= y for x, y in zip(lm, t)):
                        hit = gi
                        break
                if hit < 0:
                    done[t] = c
                    continue
                lm = leads[hit]
                shift = tuple(x - y for x, y in zip(t, lm))
                g = basis[hit]
                factor = c / g[lm]
                for gm, gv in g.items():
                    if gm == lm:
                        continue
                    k2 = tuple(a + b for a, b in zip(gm, shift))
                    if sum(k2) > bound:
                        continue
                    acc = todo.get(k2)
                    if acc is None:
                        todo[k2] = -factor * gv
                    else:
                        acc = acc - factor * gv
                        if acc == 0:
                            del todo[k2]
                        else:
                            todo[k2] = acc
            return done

        def append(raw: dict):
            lead = max(raw, key=key)
            inv = QQ(1) / raw[lead]
            basis.append({m: c * inv for m, c in raw.items()})
            leads.append(lead)

        pending = list(polys)
        while pending:
            raw = reduce_full(pending.pop(0))
            if not raw:
                continue
            new_idx = len(basis)
            append(raw)
            lm_new = leads[new_idx]
            for gi in range(new_idx):
                lm = leads[gi]
                lcm = tuple(max(a, b) for a, b in zip(lm, lm_new))
                if sum(lcm) > bound:
                    continue
                s1 = tuple(a - b for a, b in zip(lcm, lm))
                s2 = tuple(a - b for a, b in zip(lcm, lm_new))
                svec: dict = {}
                for gm, gv in basis[gi].items():
                    k2 = tuple(a + b for a, b in zip(gm, s1))
                    if sum(k2) <= bound:
                        svec[k2] = gv
                for gm, gv in basis[new_idx].items():
                    k2 = tuple(a + b for a, b in zip(gm, s2))
                    if sum(k2) > bound:
                        continue
                    acc = svec.get(k2)
                    if acc is None:
                        svec[k2] = -gv
                    else:
                        acc = acc - gv
                        if acc == 0:
                            del svec[k2]
                        else:
                            svec[k2] = acc
                if svec:
                    pending.append(svec)
        # inter-reduce tails for canonical normal forms
        kept = []
        for i in range(len(basis)):
            li = leads[i]
            redundant = False
            for j in range(len(basis)):
                if j == i:
                    continue
                lj = leads[j]
                if all(x <= y for x, y in zip(lj, li)) and (lj != li or j < i):
                    redundant = True
                    break
            if not redundant:
                kept.append(i)
        kept.sort(key=lambda i: key(leads[i]), reverse=True)
        self.basis = [basis[i] for i in kept]
        self.leads = [leads[i] for i in kept]
        for i in range(len(self.basis)):
            others = [self.basis[k] for k in range(len(self.basis)) if k != i]
            other_leads = [self.leads[k] for k in range(len(self.basis)) if k != i]
            reduced = _trunc_reduce(self.basis[i], others, other_leads, key, bound)
            if self.leads[i] not in reduced:
                raise InternalInvariantError("truncated basis lost a lead term")
            self.basis[i] = reduced

    def nf_raw(self, raw: dict) -> dict:
        raw = {m: c for m, c in raw.items() if sum(m) <= self.bound}
        return _trunc_reduce(raw, self.basis, self.leads, self._key, self.bound)

    def nf(self, f: Polynomial) -> Polynomial:
        return Polynomial(self.ring, self.nf_raw(dict(f.terms)))

    def contains(self, f: Polynomial) -> bool:
        return not self.nf_raw(dict(f.terms))


def _trunc_reduce(raw: dict, basis: List[dict], leads: List[tuple], key, bound: int) -> dict:
    todo = dict(raw)
    done: dict = {}
    while todo:
        t = max(todo, key=key)
        c = todo.pop(t)
        hit = -1
        for gi, lm in enumerate(leads):
            if all(x <= y for x, y in zip(lm, t)):
                hit = gi
                break
        if hit < 0:
            done[t] = c
            continue
        lm = leads[hit]
        shift = tuple(x - y for x, y in zip(t, lm))
        g = basis[hit]
        factor = c / g[lm]
        for gm, gv in g.items():
            if gm == lm:
                continue
            k2 = tuple(a + b for a, b in zip(gm, shift))
            if sum(k2) > bound:
                continue
            acc = todo.get(k2)
            if acc is None:
                todo[k2] = -factor * gv
            else:
                acc = acc - factor * gv
                if acc == 0:
                    del todo[k2]
                else:
                    todo[k2] = acc
    return done


def _coeffwise_in_ideal(f: Polynomial, nw: int, t_ring: VariableSet, gbk: Optional[GroebnerBasis]) -> bool:
    """Entry lies in (K) * (P tensor S): every S-coefficient lies in (K)."""
    if not f.terms:
        return True
    if gbk is None:
        return False
    for _, coeff in _split_coefficients(f, nw, t_ring).items():
        if not gbk.contains(coeff):
            return False
    return True


def _reduce_coefficients(f: Polynomial, nw: int, t_ring: VariableSet, gbk: Optional[GroebnerBasis]) -> Polynomial:
    """Reduce each S-coefficient of an entry modulo the K-ideal."""
    if gbk is None or not f.terms:
        return f
    out: dict = {}
    for wm, coeff in _split_coefficients(f, nw, t_ring).items():
        nf, _ = gbk.normal_form(coeff, track=False)
        for tm, c in nf.terms.items():
            out[wm + tm] = c
    return Polynomial(f.ring, out)


def _reduce_coefficients_trunc(f: Polynomial, nw: int, trunc: Optional[TruncatedIdeal]) -> Polynomial:
    """Reduce each S-coefficient modulo (K) + m^(bound+1) (canonical NF)."""
    if not f.terms:
        return f
    out: dict = {}
    buckets: dict = {}
    for m, c in f.terms.items():
        buckets.setdefault(m[:nw], {})[m[nw:]] = c
    for wm, coeff_raw in buckets.items():
        nf = trunc.nf_raw(coeff_raw) if trunc is not None else coeff_raw
        for tm, c in nf.items():
            out[wm + tm] = c
    return Polynomial(f.ring, out)


# ---------------------------------------------------------------------------
# deformation state and iteration

class DeformationState:
    def __init__(self, spec, pres, tangent, t_ring, cr, A, B, k_gens, order):
        self.spec = spec
        self.pres = pres
        self.tangent = tangent
        self.t_ring = t_ring
        self.cr = cr
        self.nw = spec.vars.nvars
        self.A = A  # list of 1 x n1 matrices over cr, A[i] pure t-degree i
        self.B = B
        self.k_gens: List[Polynomial] = k_gens  # in t_ring, canonical
        self.order = order
        self.stopped = False

    def U(self) -> PolyMatrix:
        acc = self.A[0]
        for m in self.A[1:]:
            acc = acc + m
        return acc

    def V(self) -> PolyMatrix:
        acc = self.B[0]
        for m in self.B[1:]:
            acc = acc + m
        return acc

    def k_gb(self) -> Optional[GroebnerBasis]:
        if not self.k_gens:
            return None
        return buchberger(self.k_gens, GREVLEX)

    def check_invariants(self) -> None:
        """Per-order invariants: t-degree stratification, equivariance,
        weight homogeneity, and U*V = 0 mod K_n + (t-degree > n)."""
        nw = self.nw
        action = self.spec.action
        for i, mat in enumerate(self.A):
            for e in mat.entries[0]:
                if e.terms and _t_truncate(e, nw, i - 1).terms:
                    raise InternalInvariantError(f"A[{i}] has t-degree below {i}")
            if not is_equivariant(mat, (None, self.pres.rho1), action):
                raise InternalInvariantError(f"A[{i}] is not equivariant")
        for i, mat in enumerate(self.B):
            if self.pres.n2 and not is_equivariant(mat, (self.pres.rho1, self.pres.rho2), action):
                raise InternalInvariantError(f"B[{i}] is not equivariant")
        for g in self.k_gens:
            w = gm_weight(g)
            if w is None or w <= 0:
                raise InternalInvariantError("K generator not weight-homogeneous positive")
        trunc = TruncatedIdeal(self.t_ring, self.k_gens, self.order)
        prod = _matrix_mul_trunc(self.U(), self.V(), nw, self.order)
        for e in prod.entries[0]:
            if _reduce_coefficients_trunc(e, nw, trunc).terms:
                raise InternalInvariantError(
                    f"U*V not in K_n + m^{self.order + 1} at order {self.order}"
                )


def first_order(pres: Presentation, tangent: TangentBasis) -> DeformationState:
    """Order-1 state: A1 = sum t_i s_i, B1 the Reynolds of the lift."""
    spec = pres.spec
    d = tangent.dimension
    if d == 0:
        raise SpecValidationError("tangent space is zero; the point is rigid")
    t_names = tuple(f"t{i+1}" for i in range(d))
    t_ring = VariableSet(t_names, tangent.t_weights)
    cr = tensor_vars(spec.vars, t_ring)
    nw = spec.vars.nvars
    A0 = _embed_matrix(pres.A0, cr, d)
    B0 = _embed_matrix(pres.B0, cr, d)
    A1 = PolyMatrix.zero(cr, 1, pres.n1)
    X = PolyMatrix.zero(cr, pres.n1, pres.n2)
    for i, s_row in enumerate(tangent.rows):
        t_mono = tuple(1 if k == nw + i else 0 for k in range(cr.nvars))
        t_poly = Polynomial(cr, {t_mono: QQ(1)})
        A1 = A1 + _embed_matrix(s_row, cr, d).map(lambda f: f * t_poly)
        if pres.n2 == 0:
            continue
        sb = matrix_mul(s_row, pres.B0)
        cols = []
        for l in range(pres.n2):
            target = -sb.entries[0][l]
            if not target.terms:
                cols.append([Polynomial.zero(spec.vars)] * pres.n1)
                continue
            cof = pres.gb_I.express_over_inputs(target)
            if cof is None:
                raise InternalInvariantError(
                    "tangent row failed to lift: s_i * B0 is not in I"
                )
            cols.append(cof)
        Xi = PolyMatrix(
            spec.vars, [[cols[l][k] for l in range(pres.n2)] for k in range(pres.n1)]
        )
        X = X + _embed_matrix(Xi, cr, d).map(lambda f: f * t_poly)
    if pres.n2:
        B1 = reynolds_twisted(X, (pres.rho1, pres.rho2), spec.action)
        check = matrix_mul(A0, B1) + matrix_mul(A1, B0)
        if not check.is_zero():
            raise InternalInvariantError("A0*B1 + A1*B0 != 0 after Reynolds")
    else:
        B1 = PolyMatrix.zero(cr, pres.n1, 0)
    return DeformationState(
        spec, pres, tangent, t_ring, cr, [A0, A1], [B0, B1], [], 1
    )


def _extract_obstruction(state: DeformationState, O: PolyMatrix):
    """tau-split the truncated product, reduce each coefficient vector
    modulo Im(mu), and return (c-dict, lift matrices XC, XD over cr)."""
    pres = state.pres
    nw = state.nw
    cr = state.cr
    vtau: Dict[tuple, dict] = {}
    for l in range(pres.n2):
        entry = O.entries[0][l]
        for m, c in entry.terms.items():
            tau = m[nw:]
            wm = m[:nw]
            vtau.setdefault(tau, {})[(l, wm)] = c
    csm: Dict[tuple, dict] = {}
    XC = PolyMatrix.zero(cr, 1, pres.n1)
    XD = PolyMatrix.zero(cr, pres.n1, pres.n2)
    d = state.t_ring.nvars
    for tau in sorted(vtau, key=lambda t: (sum(t), t)):
        vec = vtau[tau]
        rem, C, D = pres.mu_reduce(vec)
        for (l, wm), coeff in rem.items():
            csm.setdefault((l, wm), {})[tau] = coeff
        t_poly = Polynomial(cr, {(0,) * nw + tau: QQ(1)})
        if any(p.terms for p in C):
            XC = XC + PolyMatrix.row_vector(
                cr, [_embed_w(p, cr, d) * t_poly for p in C]
            )
        if any(p.terms for row in D for p in row):
            XD = XD + PolyMatrix(
                cr, [[_embed_w(p, cr, d) * t_poly for p in row] for row in D]
            )
    return csm, XC, XD


def obstruction_step(state: DeformationState, log: Optional[Callable] = None) -> DeformationState:
    """Advance the deformation from order n to order n+1 (Newton-style)."""
    pres = state.pres
    spec = state.spec
    nw = state.nw
    n_next = state.order + 1
    if pres.n2 == 0:
        state.A.append(PolyMatrix.zero(state.cr, 1, pres.n1))
        state.B.append(PolyMatrix.zero(state.cr, pres.n1, 0))
        state.order = n_next
        return state

    # obstruction image and base-ideal update from the unreduced product
    O = -_matrix_mul_trunc(state.U(), state.V(), nw, n_next)
    csm, _, _ = _extract_obstruction(state, O)
    c_polys = []
    for sm in sorted(csm):
        poly = Polynomial(state.t_ring, dict(csm[sm]))
        if poly.terms:
            c_polys.append(poly)
    if c_polys:
        k_gb = buchberger(c_polys, GREVLEX)
        state.k_gens = [canonicalize_generator(p) for p in k_gb.polys]
    else:
        k_gb = None
        state.k_gens = []

    while len(state.A) <= n_next:
        state.A.append(PolyMatrix.zero(state.cr, 1, pres.n1))
        state.B.append(PolyMatrix.zero(state.cr, pres.n1, pres.n2))

    # clearing passes against (K) + m^(n+2), reduced with the local-order
    # standard basis: reduction never lowers t-degree and corrections only
    # touch degrees >= 2, so the lowest uncleared degree rises strictly
    trunc = TruncatedIdeal(state.t_ring, state.k_gens, n_next) if state.k_gens else None
    last_low = 1
    for _pass in range(n_next + 3):
        prod = -_matrix_mul_trunc(state.U(), state.V(), nw, n_next)
        prod = prod.map(lambda f: _reduce_coefficients_trunc(f, nw, trunc))
        if prod.is_zero():
            break
        low = min(
            _tdeg(m, nw)
            for e in prod.entries[0]
            for m in e.terms
        )
        if low <= last_low and _pass > 0:
            raise InternalInvariantError(
                f"obstruction clearing stalled at t-degree {low} (order {n_next})"
            )
        last_low = low
        residue, XC, XD = _extract_obstruction(state, prod)
        if residue:
            leftovers = [Polynomial(state.t_ring, dict(v)) for v in residue.values()]
            if any((trunc.nf(p).terms if trunc else p.terms) for p in leftovers):
                raise InternalInvariantError(
                    f"obstruction residue outside K_n at order {n_next}"
                )
        if not XC.is_zero():
            XC = reynolds_twisted(XC, (None, pres.rho1), spec.action)
        if not XD.is_zero():
            XD = reynolds_twisted(XD, (pres.rho1, pres.rho2), spec.action)
        for dd in range(2, n_next + 1):
            ac = XC.map(lambda f: _t_part(f, nw, dd))
            bc = XD.map(lambda f: _t_part(f, nw, dd))
            if not ac.is_zero():
                state.A[dd] = state.A[dd] + ac
            if not bc.is_zero():
                state.B[dd] = state.B[dd] + bc
        low_junk_a = XC.map(lambda f: _t_truncate(f, nw, 1))
        low_junk_b = XD.map(lambda f: _t_truncate(f, nw, 1))
        if not low_junk_a.is_zero() or not low_junk_b.is_zero():
            raise InternalInvariantError("correction with t-degree below 2")
    else:
        raise InternalInvariantError(f"order {n_next} failed to clear")

    state.order = n_next
    if log:
        log(
            f"order {n_next}: K has {len(state.k_gens)} generators"
            + (
                " (weights "
                + ",".join(str(gm_weight(g)) for g in state.k_gens)
                + ")"
                if state.k_gens
                else ""
            )
        )
    return state


def stop_check(state: DeformationState) -> Tuple[List[Polynomial], bool]:
    """K' = generators of weight < n * min t-weight; stopped iff the full
    product U*V vanishes modulo K' exactly."""
    n = state.order
    if state.t_ring.nvars == 0:
        return [], True
    min_w = min(state.t_ring.gm_weights)
    k_prime = [g for g in state.k_gens if gm_weight(g) < n * min_w]
    gbk = buchberger(k_prime, GREVLEX) if k_prime else None
    prod = matrix_mul(state.U(), state.V())
    for e in prod.entries[0]:
        if not _coeffwise_in_ideal(e, state.nw, state.t_ring, gbk):
            return k_prime, False
    return k_prime, True


class UniversalDeformation:
    def __init__(self, t_ring, K, U, V, stop_order, stopped, tangent_weights):
        self.t_ring = t_ring
        self.K = K
        self.U = U
        self.V = V
        self.stop_order = stop_order
        self.stopped = stopped
        self.tangent_weights = tangent_weights


def run(spec: ProblemSpec, log: Optional[Callable] = None) -> UniversalDeformation:
    """Algorithm main loop: presentation, tangent space, first order, then
    obstruction steps until the stop condition (or max_order)."""
    def say(msg):
        if log:
            log(msg)

    pres = build_presentation(spec)
    say(f"presentation: n1={pres.n1}, n2={pres.n2}, |GB(I)|={len(pres.gb_I.polys)}")
    cov = covariant_basis(spec, pres)
    say(f"covariants: {len(cov)} found up to weight {cov.top_weight}")
    tangent = tangent_space(spec, pres, cov)
    say(f"tangent dimension d={tangent.dimension}, weights {tangent.t_weights}")

    if spec.positive_weight_only:
        keep = [i for i, w in enumerate(tangent.t_weights) if w >= 1]
        if len(keep) < tangent.dimension:
            say(
                f"positive-weight-only: keeping {len(keep)} of {tangent.dimension} directions"
            )
        tangent = TangentBasis(
            [tangent.rows[i] for i in keep], [tangent.t_weights[i] for i in keep]
        )
    elif any(w < 1 for w in tangent.t_weights):
        if spec.max_order is None:
            raise SpecValidationError(
                "tangent space has non-positive G_m-weights "
                f"({tangent.t_weights}); the positivity hypothesis fails, so no "
                "algebraization is claimed. Re-run with positive_weight_only or "
                "set max_order for a truncated computation."
            )

    if tangent.dimension == 0:
        t_ring = VariableSet((), ())
        cr = tensor_vars(spec.vars, t_ring)
        ud = UniversalDeformation(
            t_ring,
            [],
            _embed_matrix(pres.A0, cr, 0),
            _embed_matrix(pres.B0, cr, 0),
            0,
            True,
            [],
        )
        return ud

    state = first_order(pres, tangent)
    say("order 1: first-order deformation constructed")
    max_order = spec.max_order if spec.max_order is not None else DEFAULT_MAX_ORDER
    k_prime: List[Polynomial] = []
    while True:
        k_prime, stopped = stop_check(state)
        if stopped:
            state.stopped = True
            say(f"stop condition satisfied at order {state.order}")
            break
        if state.order >= max_order:
            say(f"max order {max_order} reached without stop condition")
            break
        state = obstruction_step(state, log=log)
        state.check_invariants()

    if state.stopped:
        k_final = (
            [canonicalize_generator(p) for p in buchberger(k_prime, GREVLEX).polys]
            if k_prime
            else []
        )
    else:
        k_final = list(state.k_gens)
    return UniversalDeformation(
        state.t_ring,
        k_final,
        state.U(),
        state.V(),
        state.order,
        state.stopped,
        tangent.t_weights,
    )


# ---------------------------------------------------------------------------
# verification and the fiber over zero

class VerifyReport:
    def __init__(self):
        self.checks: List[Tuple[str, bool, str]] = []

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, ok, detail))

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def verify(result: UniversalDeformation, spec: ProblemSpec) -> VerifyReport:
    """Re-check the output from scratch: U*V in K*(P tensor S), equivariance,
    weight positivity/homogeneity of K, t-degree stratification."""
    report = VerifyReport()
    nw = spec.vars.nvars
    t_ring = result.t_ring
    cr = result.U.ring

    gbk = buchberger(result.K, GREVLEX) if result.K else None
    prod = matrix_mul(result.U, result.V)
    ok = all(
        _coeffwise_in_ideal(e, nw, t_ring, gbk) if result.K else not e.terms
        for e in prod.entries[0]
    )
    report.add("uv-in-K", ok, "every entry of U*V lies in K*(P tensor S)")

    ok = True
    detail = ""
    for g in result.K:
        w = gm_weight(g, t_ring)
        if w is None or w <= 0:
            ok = False
            detail = f"generator {poly_print(g)} fails"
            break
    report.add("K-weights", ok, detail or "K generators weight-homogeneous, positive")

    A0_entries = [
        Polynomial(spec.vars, {m[:nw]: c for m, c in e.terms.items() if _tdeg(m, nw) == 0})
        for e in result.U.entries[0]
    ]
    ok = ideal_equal([g for g in A0_entries if g.terms], spec.ideal_gens)
    report.add("t0-ideal", ok, "t-degree-0 part of U generates the input ideal")

    try:
        rho1 = rep_on_subspace([e for e in A0_entries], spec.action)
        if isinstance(rho1, NotStable):
            raise ValueError
        ok_u = is_equivariant(result.U, (None, rho1), spec.action)
        cols = [
            [
                Polynomial(
                    spec.vars,
                    {m[:nw]: c for m, c in result.V.entries[i][j].terms.items() if _tdeg(m, nw) == 0},
                )
                for i in range(result.V.rows)
            ]
            for j in range(result.V.cols)
        ]
        if cols:
            rho2 = rep_on_columns(cols, spec.action, rho1)
            ok_v = not isinstance(rho2, NotStable) and is_equivariant(
                result.V, (rho1, rho2), spec.action
            )
        else:
            ok_v = True
        report.add("equivariance", ok_u and ok_v, "U and V are (G x G_m)-equivariant")
    except Exception as exc:  # pragma: no cover - defensive
        report.add("equivariance", False, f"could not establish: {exc}")

    ok = True
    for e in result.U.entries[0]:
        if e.terms and gm_weight(e, cr) is None:
            ok = False
    for row in result.V.entries:
        for e in row:
            if e.terms and gm_weight(e, cr) is None:
                ok = False
    report.add("weight-homogeneity", ok, "U, V entries total-weight homogeneous")
    return report


def fiber_over_zero(
    result: UniversalDeformation,
    invariant_gens: Sequence[Polynomial],
    spec: ProblemSpec,
) -> List[Polynomial]:
    """Ideal of the fiber over 0 of the quotient-space map along the family:
    K plus the t-polynomials the positive-degree invariants reduce to."""
    if not invariant_gens:
        raise SpecValidationError("no invariant generators supplied")
    nw = spec.vars.nvars
    t_ring = result.t_ring
    cr = result.U.ring
    d = t_ring.nvars
    for i, f in enumerate(invariant_gens):
        if not is_invariant_poly(f, spec.action):
            raise SpecValidationError(f"fiber generator {i} is not invariant")

    gens = [e for e in result.U.entries[0] if e.terms]
    gens += [_embed_t(g, cr, nw) for g in result.K]
    # seed with deformed lifts of the Groebner basis of I to speed completion
    gb_I = buchberger(
        [
            Polynomial(spec.vars, {m[:nw]: c for m, c in e.terms.items() if _tdeg(m, nw) == 0})
            for e in result.U.entries[0]
            if e.terms
        ],
        GREVLEX,
        track=True,
    )
    for gidx in range(len(gb_I.polys)):
        trans = gb_I._mgb.transforms[gidx]
        acc = Polynomial.zero(cr)
        for k, t_raw in trans.items():
            acc = acc + _embed_w(Polynomial(spec.vars, t_raw), cr, d) * result.U.entries[0][k]
        if acc.terms:
            gens.append(acc)
    order = elimination_order(nw)
    gb = buchberger(gens, order)
    out = list(result.K)
    for i, f in enumerate(invariant_gens):
        nf, _ = gb.normal_form(_embed_w(f, cr, d), track=False)
        residue: dict = {}
        for m, c in nf.terms.items():
            if any(m[:nw]):
                raise InternalInvariantError(
                    f"invariant {i} did not reduce to the deformation variables; "
                    "the family Groebner basis is incomplete or h(trivial) != 1"
                )
            residue[m[nw:]] = c
        if residue:
            out.append(Polynomial(t_ring, residue))
    if not out:
        return []
    gbf = buchberger(out, GREVLEX)
    return [canonicalize_generator(p) for p in gbf.polys]
