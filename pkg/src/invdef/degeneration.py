"""One-parameter-subgroup flat limits of ideals (Groebner degeneration).

Scaling the points of V(L) by a diagonal one-parameter subgroup and letting
the parameter go to zero multiplies the coordinate x_i by t^{a_i}; on a
defining equation this scales each monomial by t^{<a, exponent>}, and after
clearing the lowest power of t the limit equation is the part of maximal
<a, .>-weight.  The limit ideal is generated by these initial parts of a
Groebner basis of L for an order refining "larger <a, exponent> first".

For signed weights such an order need not be global, so the computation
homogenizes with one auxiliary balancing variable, runs a global Groebner
basis, and dehomogenizes.
"""

from __future__ import annotations

from typing import List, Sequence

from .groebner import buchberger
from .rationals import QQ
from .ring import (
    GREVLEX,
    MonomialOrder,
    Polynomial,
    VariableSet,
    canonicalize_generator,
    mono_weight,
)


class OneParameterWeights:
    """Per-variable exponent weights induced by a diagonal subgroup."""

    def __init__(self, a: Sequence[int]):
        self.a = tuple(int(x) for x in a)

    def __len__(self):
        return len(self.a)


def initial_part(f: Polynomial, a: Sequence[int]) -> Polynomial:
    """Part of maximal <a, exponent>-weight (the t -> 0 limit of the scaled
    equation after clearing the lowest power of t)."""
    if not f.terms:
        return f
    top = max(mono_weight(m, a) for m in f.terms)
    return Polynomial(f.ring, {m: c for m, c in f.terms.items() if mono_weight(m, a) == top})


def flat_limit(gens: Sequence[Polynomial], a) -> List[Polynomial]:
    """Generators of the flat limit ideal L_0.

    Computes a Groebner basis of L for an a-weight order (homogenizing when
    the order is not global) and returns the initial parts of its elements.
    """
    if isinstance(a, OneParameterWeights):
        a = a.a
    gens = [g for g in gens if g.terms]
    if not gens:
        return []
    ring = gens[0].ring
    if len(a) != ring.nvars:
        raise ValueError("weight tuple length does not match the variable set")
    a = tuple(int(x) for x in a)
    if all(x == 0 for x in a):
        return [canonicalize_generator(g) for g in gens]

    if all(x > 0 for x in a):
        order = MonomialOrder("weighted", weights=a)
        gb = buchberger(gens, order)
        return [canonicalize_generator(initial_part(g, a)) for g in gb.polys]

    # signed weights: homogenize with a balancing variable h of weight 1,
    # appended last, so that every monomial of h^k * x^e has weight
    # <a, e> + k; each generator is balanced to uniform weight, the
    # Groebner basis is computed for the (now global) weight order, and
    # h goes back to 1 at the end.
    h_name = "h_balance"
    while h_name in ring.names:
        h_name += "_"
    big = VariableSet(ring.names + (h_name,), ring.gm_weights + (1,))
    shift = 1 - min(x for x in a)
    a_shifted = tuple(x + shift for x in a)  # all >= 1

    def homogenize(f: Polynomial) -> Polynomial:
        top = max(mono_weight(m, a_shifted) for m in f.terms)
        out = {}
        for m, c in f.terms.items():
            k = top - mono_weight(m, a_shifted)
            out[m + (k,)] = c
        return Polynomial(big, out)

    order = MonomialOrder("weighted", weights=a_shifted + (1,))
    gb = buchberger([homogenize(g) for g in gens], order)

    out = []
    for g in gb.polys:
        affine = Polynomial(ring, {})
        acc: dict = {}
        for m, c in g.terms.items():
            base = m[:-1]
            prev = acc.get(base)
            acc[base] = c if prev is None else prev + c
        affine = Polynomial(ring, {m: c for m, c in acc.items() if c != 0})
        if affine.terms:
            out.append(canonicalize_generator(initial_part(affine, a)))
    # setting h = 1 can collapse a GB element; the surviving initial parts
    # still generate L_0 because the homogenized basis was a GB
    return [g for g in out if g.terms]


def psg_column_weights(n_tuple: Sequence[int], columns: Sequence[int]) -> List[int]:
    """Convert the paper-style diagonal exponents n to per-variable weights.

    The subgroup acts by composing matrices on the right with diag(t^{n_j});
    on coordinates this scales column j by t^{-n_j}, so the variable weight
    for the limit computation is -n_j for every variable in column j.
    `columns` assigns each variable its column index (0-based).
    """
    return [-int(n_tuple[j]) for j in columns]
