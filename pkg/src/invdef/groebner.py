"""Groebner bases for ideals and submodules of free modules.

One Buchberger engine handles both cases: a module element of P^r is a dict
mapping (component, monomial) to a rational coefficient, and an ideal is the
r=1 case.  The engine optionally tracks, for every basis element, its
expression over the input generators; zero reductions of S-vectors then
yield syzygies of the inputs directly (Schreyer), which is how the syzygy
matrix of an ideal is computed.

Module term order is term-over-position: ambient monomial order first, ties
broken by lower component index.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .matrix import FreeModuleElement, PolyMatrix
from .rationals import QQ
from .ring import (
    GREVLEX,
    MonomialOrder,
    Polynomial,
    VariableSet,
    canonicalize_generator,
    elimination_order,
    gm_weight,
    mono_div,
    mono_divides,
    mono_gcd_is_one,
    mono_lcm,
    mono_mul,
    mono_weight,
    tensor_vars,
    weighted_order,
)

RawModule = Dict[tuple, object]  # {(component, monomial): QQ}
RawPoly = Dict[tuple, object]  # {monomial: QQ}


class UnitIdeal(ValueError):
    """Raised when an operation requires a proper ideal."""


# ---------------------------------------------------------------------------
# conversions

def _poly_to_raw(f: Polynomial, component: int = 0) -> RawModule:
    return {(component, m): c for m, c in f.terms.items()}


def _elem_to_raw(v: FreeModuleElement) -> RawModule:
    out: RawModule = {}
    for i, comp in enumerate(v.components):
        for m, c in comp.terms.items():
            out[(i, m)] = c
    return out


def _raw_to_elem(raw: RawModule, ring: VariableSet, rank: int) -> FreeModuleElement:
    comps: List[dict] = [dict() for _ in range(rank)]
    for (i, m), c in raw.items():
        comps[i][m] = c
    return FreeModuleElement([Polynomial(ring, t) for t in comps])


def _raw_to_poly(raw: RawModule, ring: VariableSet) -> Polynomial:
    return Polynomial(ring, {m: c for (_, m), c in raw.items()})


def _module_key(order: MonomialOrder):
    mono_key = order.key

    def key(t):
        return (mono_key(t[1]), -t[0])

    return key


# ---------------------------------------------------------------------------
# reduction

def _reduce_raw(
    vec: RawModule,
    basis: List[RawModule],
    leads: List[tuple],
    key,
    track: bool,
    by_component: Optional[Dict[int, List[int]]] = None,
):
    """Full normal form of vec against basis.

    leads[i] = (component, monomial, coefficient) of basis[i]'s lead.
    Returns (remainder, cofactors) with
    vec = sum_i cofactors[i] * basis[i] + remainder; cofactors is a dict
    {basis index -> raw polynomial} when track is set, else None.
    """
    todo = dict(vec)
    done: RawModule = {}
    cof: Optional[Dict[int, RawPoly]] = {} if track else None
    nb = len(basis)
    while todo:
        t = max(todo, key=key)
        c = todo.pop(t)
        comp, mono = t
        hit = -1
        if by_component is None:
            for gi in range(nb):
                lcomp, lmono, _ = leads[gi]
                if lcomp == comp and mono_divides(lmono, mono):
                    hit = gi
                    break
        else:
            for gi in by_component.get(comp, ()):
                if mono_divides(leads[gi][1], mono):
                    hit = gi
                    break
        if hit < 0:
            done[t] = c
            continue
        lcomp, lmono, lcoeff = leads[hit]
        shift = mono_div(mono, lmono)
        factor = c / lcoeff
        g = basis[hit]
        for (gc, gm), gv in g.items():
            if gc == lcomp and gm == lmono:
                continue
            k2 = (gc, mono_mul(gm, shift))
            acc = todo.get(k2)
            if acc is None:
                todo[k2] = -factor * gv
            else:
                acc = acc - factor * gv
                if acc == 0:
                    del todo[k2]
                else:
                    todo[k2] = acc
        if track:
            slot = cof.setdefault(hit, {})
            acc = slot.get(shift)
            if acc is None:
                slot[shift] = factor
            else:
                acc = acc + factor
                if acc == 0:
                    del slot[shift]
                else:
                    slot[shift] = acc
    return done, cof


def _combo_add_scaled(target: Dict[int, RawPoly], source: Dict[int, RawPoly], mono, coeff):
    """target += coeff * x^mono * source for combos over input indices."""
    for idx, poly in source.items():
        slot = target.setdefault(idx, {})
        for m, c in poly.items():
            k = mono_mul(m, mono)
            acc = slot.get(k)
            if acc is None:
                slot[k] = coeff * c
            else:
                acc = acc + coeff * c
                if acc == 0:
                    del slot[k]
                else:
                    slot[k] = acc
        if not slot:
            del target[idx]


def _combo_scale(combo: Dict[int, RawPoly], coeff) -> Dict[int, RawPoly]:
    return {i: {m: c * coeff for m, c in p.items()} for i, p in combo.items()}


def _raw_normalize(raw: RawModule, key):
    """Integer coefficients, content 1, positive lead; returns (raw, lead)."""
    from math import gcd

    lead = max(raw, key=key)
    den_lcm = 1
    for c in raw.values():
        d = int(c.denominator)
        den_lcm = den_lcm * d // gcd(den_lcm, d)
    g = 0
    for c in raw.values():
        g = gcd(g, abs(int(c.numerator) * (den_lcm // int(c.denominator))))
    scale = QQ(den_lcm, g) if g else QQ(1)
    if raw[lead] * scale < 0:
        scale = -scale
    return {k: c * scale for k, c in raw.items()}, lead, scale


class ModuleGB:
    """Reduced Groebner basis of a submodule of P^rank with transformations.

    transforms[i] expresses elements[i] as a P-combination of the inputs:
    elements[i] = sum_j transforms[i][j] * inputs[j].
    """

    def __init__(self, ring, rank, order, elements, leads, transforms, inputs, syzygy_combos):
        self.ring = ring
        self.rank = rank
        self.order = order
        self.elements: List[RawModule] = elements
        self.leads = leads
        self.transforms = transforms
        self.inputs: List[RawModule] = inputs
        self.syzygy_combos = syzygy_combos  # list of {input index -> RawPoly}
        self.reduced = True
        self._key = _module_key(order)
        self._by_component: Dict[int, List[int]] = {}
        for i, (comp, _, _) in enumerate(leads):
            self._by_component.setdefault(comp, []).append(i)

    def reduce_raw(self, vec: RawModule, track: bool = False):
        return _reduce_raw(
            vec, self.elements, self.leads, self._key, track, self._by_component
        )

    def reduce_element(self, v: FreeModuleElement, track: bool = False):
        rem, cof = self.reduce_raw(_elem_to_raw(v), track)
        remainder = _raw_to_elem(rem, self.ring, self.rank)
        if not track:
            return remainder, None
        cofactors = [
            Polynomial(self.ring, cof.get(i, {})) for i in range(len(self.elements))
        ]
        return remainder, cofactors

    def contains_element(self, v: FreeModuleElement) -> bool:
        rem, _ = self.reduce_raw(_elem_to_raw(v), False)
        return not rem

    def express_over_inputs(self, v: FreeModuleElement):
        """Cofactors over the original inputs, or None if v is outside."""
        rem, cof = self.reduce_raw(_elem_to_raw(v), True)
        if rem:
            return None
        combo: Dict[int, RawPoly] = {}
        for gi, qpoly in cof.items():
            for m, c in qpoly.items():
                _combo_add_scaled(combo, self.transforms[gi], m, c)
        n = len(self.inputs)
        return [Polynomial(self.ring, combo.get(i, {})) for i in range(n)]


def _select_pair(pending: dict, strategy: str):
    if strategy == "first":
        return min(pending, key=lambda p: (p[1], p[0]))
    # normal strategy: minimal total degree of the lcm, ties by pair index
    return min(pending, key=lambda p: (sum(pending[p]), p))


def module_buchberger(
    inputs: Sequence[RawModule],
    ring: VariableSet,
    rank: int,
    order: MonomialOrder = GREVLEX,
    track: bool = False,
    collect_syzygies: bool = False,
    pair_strategy: str = "normal",
    input_groups: Optional[Sequence] = None,
) -> ModuleGB:
    """Buchberger's algorithm with full tail reduction.

    With collect_syzygies, every S-pair is processed by explicit reduction
    (no pair-skipping criteria) and each zero reduction is recorded as a
    syzygy of the inputs; Schreyer's theorem makes the collected set,
    together with the input-vs-basis relations added by `syzygies`, a
    generating set of the full syzygy module.

    input_groups (optional, one label per input, None = ungrouped) marks
    inputs certified by the caller to be mutually Groebner within a label:
    S-pairs between two basis elements carrying the same label are skipped.
    Used to seed the obstruction module with per-component copies of an
    already reduced ideal basis.
    """
    if not order.is_global:
        raise ValueError("Buchberger requires a global monomial order")
    track = track or collect_syzygies
    use_criteria = not collect_syzygies
    key = _module_key(order)

    basis: List[RawModule] = []
    leads: List[tuple] = []
    trans: List[Dict[int, RawPoly]] = []
    single_comp: List[bool] = []
    groups: List = []
    by_component: Dict[int, List[int]] = {}
    syzygies_acc: List[Dict[int, RawPoly]] = []
    unit = (0,) * ring.nvars

    def append_element(raw: RawModule, combo: Dict[int, RawPoly], group=None):
        lead = max(raw, key=key)
        lc = raw[lead]
        inv = QQ(1) / lc
        raw = {k: c * inv for k, c in raw.items()}
        combo = _combo_scale(combo, inv)
        basis.append(raw)
        leads.append((lead[0], lead[1], QQ(1)))
        trans.append(combo)
        single_comp.append(len({k[0] for k in raw}) == 1)
        groups.append(group)
        by_component.setdefault(lead[0], []).append(len(basis) - 1)
        return len(basis) - 1

    pending: dict = {}  # (i, j) i<j -> lcm monomial

    def add_pairs(j: int):
        cj, mj, _ = leads[j]
        gj = groups[j]
        for i in by_component.get(cj, ()):
            if i >= j:
                continue
            if gj is not None and groups[i] == gj:
                continue
            pending[(i, j)] = mono_lcm(leads[i][1], mj)

    for raw in inputs:
        if not raw:
            raise ValueError("zero generator passed to module_buchberger")
    for idx, raw in enumerate(inputs):
        group = input_groups[idx] if input_groups is not None else None
        rem, cof = _reduce_raw(raw, basis, leads, key, track, by_component)
        combo: Dict[int, RawPoly] = {idx: {unit: QQ(1)}}
        if track and cof:
            for gi, qpoly in cof.items():
                for m, c in qpoly.items():
                    _combo_add_scaled(combo, trans[gi], m, -c)
        if not rem:
            if collect_syzygies and combo:
                syzygies_acc.append(combo)
            continue
        j = append_element(rem, combo, group if not cof else None)
        add_pairs(j)

    while pending:
        pair = _select_pair(pending, pair_strategy)
        i, j = pair
        lcm = pending.pop(pair)
        ci, mi, _ = leads[i]
        cj, mj, _ = leads[j]
        if use_criteria:
            if single_comp[i] and single_comp[j] and mono_gcd_is_one(mi, mj):
                continue
            chained = False
            for k in by_component.get(ci, ()):
                if k == i or k == j:
                    continue
                if not mono_divides(leads[k][1], lcm):
                    continue
                p1 = (min(i, k), max(i, k))
                p2 = (min(j, k), max(j, k))
                if p1 not in pending and p2 not in pending:
                    chained = True
                    break
            if chained:
                continue
        shift_i = mono_div(lcm, mi)
        shift_j = mono_div(lcm, mj)
        svec: RawModule = {}
        for (gc, gm), gv in basis[i].items():
            svec[(gc, mono_mul(gm, shift_i))] = gv
        for (gc, gm), gv in basis[j].items():
            k2 = (gc, mono_mul(gm, shift_j))
            acc = svec.get(k2)
            if acc is None:
                svec[k2] = -gv
            else:
                acc = acc - gv
                if acc == 0:
                    del svec[k2]
                else:
                    svec[k2] = acc
        rem, cof = _reduce_raw(svec, basis, leads, key, track, by_component)
        combo = {}
        if track:
            _combo_add_scaled(combo, trans[i], shift_i, QQ(1))
            _combo_add_scaled(combo, trans[j], shift_j, QQ(-1))
            if cof:
                for gi, qpoly in cof.items():
                    for m, c in qpoly.items():
                        _combo_add_scaled(combo, trans[gi], m, -c)
        if not rem:
            if collect_syzygies and combo:
                syzygies_acc.append(combo)
            continue
        jnew = append_element(rem, combo)
        add_pairs(jnew)

    # minimalize: drop elements whose lead is divisible by another's lead
    order_idx = sorted(range(len(basis)), key=lambda i: key(max(basis[i], key=key)))
    keep: List[int] = []
    for i in order_idx:
        ci, mi, _ = leads[i]
        redundant = any(
            leads[k][0] == ci and mono_divides(leads[k][1], mi) for k in keep
        )
        if not redundant:
            keep.append(i)
    min_basis = [basis[i] for i in keep]
    min_leads = [leads[i] for i in keep]
    min_trans = [trans[i] for i in keep] if track else [{} for _ in keep]

    # tail-reduce each element against the others
    final_basis: List[RawModule] = []
    final_leads: List[tuple] = []
    final_trans: List[Dict[int, RawPoly]] = []
    for i in range(len(min_basis)):
        others = [min_basis[k] for k in range(len(min_basis)) if k != i]
        other_leads = [min_leads[k] for k in range(len(min_basis)) if k != i]
        rem, cof = _reduce_raw(min_basis[i], others, other_leads, key, track)
        combo = dict() if not track else {
            idx: dict(p) for idx, p in min_trans[i].items()
        }
        if track and cof:
            reindex = [k for k in range(len(min_basis)) if k != i]
            for gi, qpoly in cof.items():
                for m, c in qpoly.items():
                    _combo_add_scaled(combo, min_trans[reindex[gi]], m, -c)
        raw, lead, scale = _raw_normalize(rem, key)
        final_basis.append(raw)
        final_leads.append((lead[0], lead[1], raw[lead]))
        final_trans.append(_combo_scale(combo, scale) if track else {})

    final_order = sorted(range(len(final_basis)), key=lambda i: key(max(final_basis[i], key=key)))
    elements = [final_basis[i] for i in final_order]
    lead_list = [final_leads[i] for i in final_order]
    trans_list = [final_trans[i] for i in final_order]
    return ModuleGB(
        ring, rank, order, elements, lead_list, trans_list, list(inputs), syzygies_acc
    )


# ---------------------------------------------------------------------------
# ideal-level API

class GroebnerBasis:
    """Reduced Groebner basis of an ideal, with input transformations."""

    def __init__(self, mgb: ModuleGB):
        self._mgb = mgb
        self.ring = mgb.ring
        self.order = mgb.order
        self.polys = [_raw_to_poly(e, mgb.ring) for e in mgb.elements]
        self.reduced = True

    def __len__(self) -> int:
        return len(self.polys)

    @property
    def lead_monomials(self) -> List[tuple]:
        return [lead[1] for lead in self._mgb.leads]

    def normal_form(self, f: Polynomial, track: bool = False):
        rem, cof = self._mgb.reduce_raw(_poly_to_raw(f), track)
        remainder = _raw_to_poly(rem, self.ring)
        if not track:
            return remainder, None
        cofactors = [
            Polynomial(self.ring, cof.get(i, {})) for i in range(len(self.polys))
        ]
        return remainder, cofactors

    def contains(self, f: Polynomial) -> bool:
        if not f.terms:
            return True
        rem, _ = self._mgb.reduce_raw(_poly_to_raw(f), False)
        return not rem

    def express_over_inputs(self, f: Polynomial):
        """Cofactors over the original generators, or None."""
        rem, cof = self._mgb.reduce_raw(_poly_to_raw(f), True)
        if rem:
            return None
        combo: Dict[int, RawPoly] = {}
        for gi, qpoly in cof.items():
            for m, c in qpoly.items():
                _combo_add_scaled(combo, self._mgb.transforms[gi], m, c)
        n = len(self._mgb.inputs)
        return [Polynomial(self.ring, combo.get(i, {})) for i in range(n)]

    def is_unit_ideal(self) -> bool:
        return any(len(e) == 1 and not any(next(iter(e))[1]) for e in self._mgb.elements)


def buchberger(
    gens: Sequence[Polynomial],
    order: MonomialOrder = GREVLEX,
    pair_strategy: str = "normal",
    track: bool = False,
) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by gens."""
    gens = [g for g in gens if g.terms]
    if not gens:
        raise ValueError("no nonzero generators")
    ring = gens[0].ring
    raws = [_poly_to_raw(g) for g in gens]
    mgb = module_buchberger(
        raws, ring, 1, order, track=track, pair_strategy=pair_strategy
    )
    return GroebnerBasis(mgb)


def module_gb(
    gens: Sequence[FreeModuleElement],
    order: MonomialOrder = GREVLEX,
    track: bool = False,
) -> ModuleGB:
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise ValueError("no nonzero generators")
    ring = gens[0].components[0].ring
    rank = gens[0].rank
    raws = [_elem_to_raw(g) for g in gens]
    return module_buchberger(raws, ring, rank, order, track=track)


def normal_form(f, gb, track: bool = True):
    """Normal form with cofactors: f = sum cof_i * basis_i + remainder."""
    if isinstance(gb, GroebnerBasis):
        return gb.normal_form(f, track=track)
    return gb.reduce_element(f, track=track)


def syzygies(row: PolyMatrix) -> PolyMatrix:
    """Columns generating the syzygy module of a 1 x n row of nonzero polys.

    Exactness (row @ result == 0) is checked; completeness follows from
    Schreyer's theorem since every S-pair of the computed basis is reduced
    explicitly and the input-vs-basis relations are included.
    """
    if row.rows != 1:
        raise ValueError("syzygies expects a 1 x n row matrix")
    ring = row.ring
    gens = list(row.entries[0])
    n = len(gens)
    for g in gens:
        if not g.terms:
            raise ValueError("zero entries must be stripped before syzygies")
    raws = [_poly_to_raw(g) for g in gens]
    mgb = module_buchberger(raws, ring, 1, GREVLEX, collect_syzygies=True)

    combos: List[Dict[int, RawPoly]] = list(mgb.syzygy_combos)
    # relations from re-expressing each input over the basis
    unit = (0,) * ring.nvars
    for idx, raw in enumerate(raws):
        rem, cof = mgb.reduce_raw(raw, True)
        if rem:
            raise AssertionError("input does not reduce to zero against its own GB")
        combo: Dict[int, RawPoly] = {idx: {unit: QQ(1)}}
        for gi, qpoly in cof.items():
            for m, c in qpoly.items():
                _combo_add_scaled(combo, mgb.transforms[gi], m, -c)
        if combo:
            combos.append(combo)

    seen = set()
    columns: List[List[Polynomial]] = []
    zero = Polynomial.zero(ring)
    for combo in combos:
        col = [Polynomial(ring, combo.get(i, {})) for i in range(n)]
        if all(not p for p in col):
            continue
        elem = FreeModuleElement(col)
        raw, _, _ = _raw_normalize(_elem_to_raw(elem), _module_key(GREVLEX))
        fingerprint = tuple(sorted(raw.items()))
        if fingerprint in seen:
            continue
        seen.add(fingerprint)
        columns.append([Polynomial(ring, {m: c for (i2, m), c in raw.items() if i2 == i}) for i in range(n)])
    if not columns:
        return PolyMatrix(ring, [[] for _ in range(n)]) if n else PolyMatrix(ring, [])
    # exactness check: row * column == 0 for every column
    for col in columns:
        acc = zero
        for g, c in zip(gens, col):
            acc = acc + g * c
        if acc.terms:
            raise AssertionError("syzygy exactness check failed")
    entries = [[columns[j][i] for j in range(len(columns))] for i in range(n)]
    return PolyMatrix(ring, entries)


def syzygy_completeness_check(row: PolyMatrix, syz: PolyMatrix) -> bool:
    """Every Buchberger S-pair syzygy of row reduces to zero against syz."""
    gens = list(row.entries[0])
    ring = row.ring
    raws = [_poly_to_raw(g) for g in gens]
    mgb = module_buchberger(raws, ring, 1, GREVLEX, collect_syzygies=True, pair_strategy="first")
    cols = [syz.column(j) for j in range(syz.cols)]
    if not cols:
        return not mgb.syzygy_combos
    sgb = module_gb(cols, GREVLEX)
    n = len(gens)
    for combo in mgb.syzygy_combos:
        vec = FreeModuleElement([Polynomial(ring, combo.get(i, {})) for i in range(n)])
        if vec.is_zero():
            continue
        if not sgb.contains_element(vec):
            return False
    return True


def ideal_membership(f: Polynomial, gens: Sequence[Polynomial], gb: Optional[GroebnerBasis] = None) -> bool:
    if not f.terms:
        return True
    gb = gb or buchberger(gens)
    return gb.contains(f)


def ideal_equal(gens_i: Sequence[Polynomial], gens_j: Sequence[Polynomial]) -> bool:
    gi = [g for g in gens_i if g.terms]
    gj = [g for g in gens_j if g.terms]
    if not gi or not gj:
        return not gi and not gj
    gb_i = buchberger(gi)
    gb_j = buchberger(gj)
    return all(gb_i.contains(g) for g in gj) and all(gb_j.contains(g) for g in gi)


def ideal_intersection(gens_i: Sequence[Polynomial], gens_j: Sequence[Polynomial]) -> List[Polynomial]:
    """Generators of I cap J via elimination of one auxiliary variable u
    from u*I + (1-u)*J; u sits in the outer block of the order."""
    gi = [g for g in gens_i if g.terms]
    gj = [g for g in gens_j if g.terms]
    if not gi or not gj:
        return []
    ring = gi[0].ring
    aux_name = "u_aux"
    while aux_name in ring.names:
        aux_name += "_"
    aux_ring = VariableSet((aux_name,) + ring.names, (1,) + ring.gm_weights)

    def embed(f: Polynomial, u_power: int) -> Polynomial:
        return Polynomial(aux_ring, {(u_power,) + m: c for m, c in f.terms.items()})

    u = Polynomial.variable(aux_ring, aux_name)
    one = Polynomial.constant(aux_ring, 1)
    gens = [embed(g, 1) for g in gi] + [(one - u) * embed(g, 0) for g in gj]
    gb = buchberger(gens, elimination_order(1))
    out = []
    for p in gb.polys:
        if all(m[0] == 0 for m in p.terms):
            out.append(Polynomial(ring, {m[1:]: c for m, c in p.terms.items()}))
    return out


def krull_dimension(gens: Sequence[Polynomial], gb: Optional[GroebnerBasis] = None) -> int:
    """Krull dimension of the quotient by the ideal.

    Computed on the initial ideal: the size of a maximum set of variables
    meeting the support of no lead monomial (exhaustive search; intended
    for small variable counts).
    """
    gens = [g for g in gens if g.terms]
    if not gens:
        if gb is None:
            raise ValueError("zero ideal: pass gb or use the variable count")
        return gb.ring.nvars
    ring = gens[0].ring
    gb = gb or buchberger(gens)
    if gb.is_unit_ideal():
        raise UnitIdeal("dimension of the unit ideal is undefined")
    supports = [frozenset(i for i, e in enumerate(m) if e) for m in gb.lead_monomials]
    n = ring.nvars
    from itertools import combinations

    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            s = set(subset)
            if all(not sup <= s for sup in supports):
                return size
    return 0


def zero_ideal_dimension(ring: VariableSet) -> int:
    return ring.nvars


# ---------------------------------------------------------------------------
# weighted Hilbert series

_U_RING = VariableSet(("u",), (1,))


def _series_u(coeffs: Dict[int, object]) -> Polynomial:
    return Polynomial(_U_RING, {(d,): QQ(c) for d, c in coeffs.items() if c != 0})


def weighted_hilbert_series(
    gens: Sequence[Polynomial],
    weights: Optional[Sequence[int]] = None,
    node_guard: int = 10**6,
) -> Polynomial:
    """Numerator N(u) of the weighted Hilbert series N(u)/prod(1-u^w_i).

    Every generator must be weight-homogeneous for the grading; the series
    of the quotient then equals that of the initial ideal, whose numerator
    is computed by a memoized pivot-splitting recursion over the minimal
    monomial generators (an inclusion-exclusion over the lcm lattice).
    """
    gens = [g for g in gens if g.terms]
    if not gens:
        return Polynomial.constant(_U_RING, 1)
    ring = gens[0].ring
    weights = tuple(weights) if weights is not None else ring.gm_weights
    if any(w < 1 for w in weights):
        raise ValueError("weights must be positive")
    for idx, g in enumerate(gens):
        if gm_weight(g, VariableSet(ring.names, weights)) is None:
            raise ValueError(f"generator {idx} is not weight-homogeneous")
    order = weighted_order(weights)
    gb = buchberger(gens, order)
    if gb.is_unit_ideal():
        return Polynomial.zero(_U_RING)
    minimal = _minimal_monomials(gb.lead_monomials)

    memo: dict = {}
    nodes = [0]

    def numerator(monos: tuple) -> Dict[int, int]:
        if monos in memo:
            return memo[monos]
        nodes[0] += 1
        if nodes[0] > node_guard:
            raise RuntimeError(
                f"hilbert series lattice exceeded {node_guard} nodes; "
                "generators too entangled for the desk-scale algorithm"
            )
        if not monos:
            return {0: 1}
        if len(monos) == 1:
            w = mono_weight(monos[0], weights)
            out = {0: 1, w: -1} if w else {0: 0}
            memo[monos] = out
            return out
        coprime = True
        for i in range(len(monos)):
            for j in range(i + 1, len(monos)):
                if not mono_gcd_is_one(monos[i], monos[j]):
                    coprime = False
                    break
            if not coprime:
                break
        if coprime:
            out = {0: 1}
            for m in monos:
                w = mono_weight(m, weights)
                nxt: Dict[int, int] = {}
                for d, c in out.items():
                    nxt[d] = nxt.get(d, 0) + c
                    nxt[d + w] = nxt.get(d + w, 0) - c
                out = {d: c for d, c in nxt.items() if c}
            memo[monos] = out
            return out
        # pivot on the most frequent variable
        counts = [0] * len(weights)
        for m in monos:
            for i, e in enumerate(m):
                if e:
                    counts[i] += 1
        pivot = max(range(len(counts)), key=lambda i: counts[i])
        pw = weights[pivot]
        plus = _minimal_monomials(
            [tuple(1 if i == pivot else 0 for i in range(len(weights)))]
            + [m for m in monos if not m[pivot]]
        )
        colon = _minimal_monomials(
            [tuple(e - 1 if i == pivot and e else e for i, e in enumerate(m)) for m in monos]
        )
        a = numerator(plus)
        b = numerator(colon)
        out = dict(a)
        for d, c in b.items():
            out[d + pw] = out.get(d + pw, 0) + c
        out = {d: c for d, c in out.items() if c}
        memo[monos] = out
        return out

    coeffs = numerator(_minimal_monomials(minimal))
    return _series_u(coeffs)


def _minimal_monomials(monos) -> tuple:
    monos = sorted(set(monos), key=lambda m: (sum(m), m))
    out: List[tuple] = []
    for m in monos:
        if not any(mono_divides(k, m) for k in out):
            out.append(m)
    return tuple(out)


def hilbert_numerator_zero_ideal() -> Polynomial:
    return Polynomial.constant(_U_RING, 1)


# ---------------------------------------------------------------------------
# module lifting

def lift_through_module(
    target: FreeModuleElement,
    gens: Sequence[FreeModuleElement],
    mgb: Optional[ModuleGB] = None,
):
    """Coefficients c with sum c_i * gens_i = target, or None (NotInImage)."""
    if target.is_zero():
        ring = target.components[0].ring
        return [Polynomial.zero(ring) for _ in gens]
    mgb = mgb or module_gb(list(gens), track=True)
    return mgb.express_over_inputs(target)
