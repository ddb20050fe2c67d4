"""Multivariate polynomial arithmetic over the rationals.

A polynomial is a dict mapping exponent tuples to nonzero rational
coefficients; the zero polynomial is the empty dict.  Every polynomial is
bound to a :class:`VariableSet`, which carries the variable names and their
multiplicative-group (G_m) weights.  All values are immutable after
construction and all operations are pure.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Optional

from .rationals import QQ, rat_from_string, rat_to_string

Monomial = tuple  # exponent tuple, one entry per variable


# ---------------------------------------------------------------------------
# monomial helpers (free functions; these run in the Groebner inner loops)

def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True iff a | b componentwise."""
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    """a / b; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x if x > y else y for x, y in zip(a, b))


def mono_gcd_is_one(a: Monomial, b: Monomial) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def mono_degree(a: Monomial) -> int:
    return sum(a)


def mono_weight(a: Monomial, weights) -> int:
    return sum(e * w for e, w in zip(a, weights) if e)


class VariableSet:
    """Ordered, named variables with integer G_m-weights.

    Weights are ring metadata: they belong to the group action, not to
    individual polynomials.  Signed weights are allowed (degeneration
    orders need them); strict positivity is enforced at the use sites
    that require it.
    """

    __slots__ = ("names", "gm_weights", "_index")

    def __init__(self, names: Iterable[str], gm_weights: Iterable[int]):
        self.names = tuple(names)
        self.gm_weights = tuple(int(w) for w in gm_weights)
        if len(set(self.names)) != len(self.names):
            raise ValueError("variable names must be distinct")
        if len(self.gm_weights) != len(self.names):
            raise ValueError("one G_m-weight per variable required")
        self._index = {n: i for i, n in enumerate(self.names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def monomial(self, **powers: int) -> Monomial:
        e = [0] * self.nvars
        for name, p in powers.items():
            e[self.index(name)] = p
        return tuple(e)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VariableSet)
            and self.names == other.names
            and self.gm_weights == other.gm_weights
        )

    def __hash__(self) -> int:
        return hash((self.names, self.gm_weights))

    def __repr__(self) -> str:
        return f"VariableSet({list(self.names)}, weights={list(self.gm_weights)})"


def tensor_vars(outer: VariableSet, inner: VariableSet) -> VariableSet:
    """Combined variable set; `outer` variables come first."""
    if set(outer.names) & set(inner.names):
        raise ValueError("variable sets overlap")
    return VariableSet(outer.names + inner.names, outer.gm_weights + inner.gm_weights)


# ---------------------------------------------------------------------------
# monomial orders

class MonomialOrder:
    """Total multiplicative order on monomials, given by a sort key.

    Kinds: grevlex, lex, weighted (weight vector refined by grevlex, not
    necessarily global with signed weights), and block elimination (grevlex
    on the first `split` variables, ties by grevlex on the rest; a monomial
    with any outer variable beats every inner-only monomial).
    """

    __slots__ = ("kind", "weights", "split", "key", "is_global")

    def __init__(self, kind: str, weights=None, split: int = 0):
        self.kind = kind
        self.weights = tuple(weights) if weights is not None else None
        self.split = split
        if kind == "grevlex":
            self.key = _grevlex_key
            self.is_global = True
        elif kind == "lex":
            self.key = _lex_key
            self.is_global = True
        elif kind == "weighted":
            w = self.weights

            def key(m, _w=w):
                return (mono_weight(m, _w),) + _grevlex_key(m)

            self.key = key
            self.is_global = all(x > 0 for x in w)
        elif kind == "elim":
            s = split

            def key(m, _s=s):
                return _grevlex_key(m[:_s]) + _grevlex_key(m[_s:])

            self.key = key
            self.is_global = True
        else:
            raise ValueError(f"unknown monomial order kind: {kind!r}")

    def __repr__(self) -> str:
        extra = ""
        if self.weights is not None:
            extra = f", weights={list(self.weights)}"
        if self.kind == "elim":
            extra = f", split={self.split}"
        return f"MonomialOrder({self.kind!r}{extra})"


def _grevlex_key(m: Monomial):
    return (sum(m),) + tuple(-e for e in reversed(m))


def _lex_key(m: Monomial):
    return m


GREVLEX = MonomialOrder("grevlex")
LEX = MonomialOrder("lex")


def weighted_order(weights) -> MonomialOrder:
    return MonomialOrder("weighted", weights=weights)


def elimination_order(split: int) -> MonomialOrder:
    return MonomialOrder("elim", split=split)


# ---------------------------------------------------------------------------
# polynomials

class Polynomial:
    """Immutable sparse polynomial over QQ, bound to a VariableSet."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: VariableSet, terms: dict):
        self.ring = ring
        self.terms = terms  # Monomial -> QQ, no zero values; treat as frozen

    # -- constructors -------------------------------------------------
    @staticmethod
    def zero(ring: VariableSet) -> "Polynomial":
        return Polynomial(ring, {})

    @staticmethod
    def constant(ring: VariableSet, c) -> "Polynomial":
        c = QQ(c)
        if c == 0:
            return Polynomial(ring, {})
        return Polynomial(ring, {(0,) * ring.nvars: c})

    @staticmethod
    def variable(ring: VariableSet, name: str) -> "Polynomial":
        e = [0] * ring.nvars
        e[ring.index(name)] = 1
        return Polynomial(ring, {tuple(e): QQ(1)})

    @staticmethod
    def from_terms(ring: VariableSet, items) -> "Polynomial":
        terms = {}
        for m, c in items:
            c = QQ(c)
            if c == 0:
                continue
            acc = terms.get(m)
            if acc is None:
                terms[m] = c
            else:
                acc = acc + c
                if acc == 0:
                    del terms[m]
                else:
                    terms[m] = acc
        return Polynomial(ring, terms)

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.terms, other.terms
        if not a:
            return other
        if not b:
            return self
        out = dict(a)
        for m, c in b.items():
            acc = out.get(m)
            if acc is None:
                out[m] = c
            else:
                acc = acc + c
                if acc == 0:
                    del out[m]
                else:
                    out[m] = acc
        return Polynomial(self.ring, out)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        a, b = self.terms, other.terms
        if not b:
            return self
        out = dict(a)
        for m, c in b.items():
            acc = out.get(m)
            if acc is None:
                out[m] = -c
            else:
                acc = acc - c
                if acc == 0:
                    del out[m]
                else:
                    out[m] = acc
        return Polynomial(self.ring, out)

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return self.scale(other)
        a, b = self.terms, other.terms
        if not a or not b:
            return Polynomial(self.ring, {})
        if len(a) > len(b):
            a, b = b, a
        out: dict = {}
        for ma, ca in a.items():
            for mb, cb in b.items():
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
        return Polynomial(self.ring, out)

    def __rmul__(self, other) -> "Polynomial":
        return self.scale(other)

    def scale(self, c) -> "Polynomial":
        c = QQ(c)
        if c == 0:
            return Polynomial(self.ring, {})
        return Polynomial(self.ring, {m: c * v for m, v in self.terms.items()})

    def mul_monomial(self, mono: Monomial, c=1) -> "Polynomial":
        c = QQ(c)
        if c == 0:
            return Polynomial(self.ring, {})
        return Polynomial(
            self.ring,
            {tuple(x + y for x, y in zip(m, mono)): c * v for m, v in self.terms.items()},
        )

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.ring, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure -----------------------------------------------------
    def total_degree(self) -> int:
        """Max total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def leading(self, order: MonomialOrder):
        """(monomial, coefficient) of the leading term for `order`."""
        key = order.key
        m = max(self.terms, key=key)
        return m, self.terms[m]

    def coefficient(self, mono: Monomial):
        return self.terms.get(mono, QQ(0))

    def substitute(self, values: dict) -> "Polynomial":
        """Substitute polynomials for variables (by name); others stay."""
        ring = self.ring
        polys = []
        for name in ring.names:
            polys.append(values.get(name, Polynomial.variable(ring, name)))
        out = Polynomial.zero(ring)
        for m, c in self.terms.items():
            term = Polynomial.constant(ring, c)
            for i, e in enumerate(m):
                if e:
                    term = term * polys[i] ** e
            out = out + term
        return out

    def apply_linear(self, matrix) -> "Polynomial":
        """Substitute x_j -> sum_i matrix[i][j] * x_i (column convention)."""
        ring = self.ring
        n = ring.nvars
        images = []
        for j in range(n):
            img = {}
            for i in range(n):
                c = matrix[i][j]
                if c:
                    e = [0] * n
                    e[i] = 1
                    img[tuple(e)] = QQ(c)
            images.append(Polynomial(ring, img))
        out = Polynomial.zero(ring)
        for m, c in self.terms.items():
            term = Polynomial.constant(ring, c)
            for j, e in enumerate(m):
                if e:
                    term = term * images[j] ** e
            out = out + term
        return out

    def __repr__(self) -> str:
        return f"Polynomial({poly_print(self)})"


# ---------------------------------------------------------------------------
# weights

def gm_weight(f: Polynomial, ring: Optional[VariableSet] = None) -> Optional[int]:
    """G_m-weight of a weight-homogeneous polynomial, else None.

    Raises ValueError on the zero polynomial (its weight is undefined).
    """
    ring = ring or f.ring
    if not f.terms:
        raise ValueError("gm_weight of the zero polynomial is undefined")
    weights = ring.gm_weights
    it = iter(f.terms)
    w = mono_weight(next(it), weights)
    for m in it:
        if mono_weight(m, weights) != w:
            return None
    return w


def weight_components(f: Polynomial, ring: Optional[VariableSet] = None) -> dict:
    """Split into weight-homogeneous parts: weight -> Polynomial."""
    ring = ring or f.ring
    weights = ring.gm_weights
    parts: dict = {}
    for m, c in f.terms.items():
        parts.setdefault(mono_weight(m, weights), {})[m] = c
    return {w: Polynomial(ring, t) for w, t in sorted(parts.items())}


# ---------------------------------------------------------------------------
# printing / parsing

def _power_str(name: str, e: int) -> str:
    return name if e == 1 else f"{name}^{e}"


def poly_print(f: Polynomial, order: MonomialOrder = GREVLEX) -> str:
    """Canonical string form; bit-exact round trip with poly_parse."""
    if not f.terms:
        return "0"
    names = f.ring.names
    key = order.key
    pieces = []
    for m in sorted(f.terms, key=key, reverse=True):
        c = f.terms[m]
        factors = [_power_str(names[i], e) for i, e in enumerate(m) if e]
        neg = c < 0
        c_abs = -c if neg else c
        if not factors:
            body = rat_to_string(c_abs)
        elif c_abs == 1:
            body = "*".join(factors)
        else:
            body = "*".join([rat_to_string(c_abs)] + factors)
        if not pieces:
            pieces.append(("-" if neg else "") + body)
        else:
            pieces.append(("-" if neg else "+") + body)
    return "".join(pieces)


class PolyParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def _tokenize(text: str) -> Iterator[tuple]:
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            yield ("num", text[i:j], i)
            i = j
        elif ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            yield ("ident", text[i:j], i)
            i = j
        elif ch in "+-*/^":
            yield (ch, ch, i)
            i += 1
        else:
            raise PolyParseError(f"unexpected character {ch!r}", i)
    yield ("end", "", n)


def poly_parse(text: str, ring: VariableSet) -> Polynomial:
    """Parse the external polynomial grammar.

    Terms are separated by '+'/'-'; a term is factors joined by '*'; a
    factor is an integer, a rational a/b, or a variable with an optional
    '^' power.  Unknown identifiers and malformed syntax raise
    PolyParseError with the offending position.
    """
    tokens = list(_tokenize(text))
    pos = 0

    def peek():
        return tokens[pos]

    def advance():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_factor(acc_coeff, acc_mono):
        kind, value, at = advance()
        if kind == "num":
            coeff = QQ(int(value))
            if peek()[0] == "/":
                advance()
                k2, v2, at2 = advance()
                if k2 != "num":
                    raise PolyParseError("expected denominator", at2)
                if int(v2) == 0:
                    raise PolyParseError("zero denominator", at2)
                coeff = coeff / QQ(int(v2))
            return acc_coeff * coeff, acc_mono
        if kind == "ident":
            try:
                idx = ring.index(value)
            except KeyError:
                raise PolyParseError(f"unknown identifier {value!r}", at) from None
            power = 1
            if peek()[0] == "^":
                advance()
                k2, v2, at2 = advance()
                if k2 != "num":
                    raise PolyParseError("expected exponent", at2)
                power = int(v2)
            acc_mono = list(acc_mono)
            acc_mono[idx] += power
            return acc_coeff, tuple(acc_mono)
        raise PolyParseError("expected coefficient or variable", at)

    def parse_term():
        coeff, mono = QQ(1), (0,) * ring.nvars
        coeff, mono = parse_factor(coeff, mono)
        while peek()[0] == "*":
            advance()
            coeff, mono = parse_factor(coeff, mono)
        return mono, coeff

    items = []
    sign = QQ(1)
    kind, _, _ = peek()
    if kind in "+-":
        sign = QQ(-1) if advance()[0] == "-" else QQ(1)
    m, c = parse_term()
    items.append((m, sign * c))
    while True:
        kind, _, at = peek()
        if kind == "end":
            break
        if kind not in "+-":
            raise PolyParseError("expected '+' or '-'", at)
        sign = QQ(-1) if advance()[0] == "-" else QQ(1)
        m, c = parse_term()
        items.append((m, sign * c))
    return Polynomial.from_terms(ring, items)


def canonicalize_generator(f: Polynomial, order: MonomialOrder = GREVLEX) -> Polynomial:
    """Scale to integer coefficients with content 1 and positive leading
    coefficient; the normal form for printed generators."""
    if not f.terms:
        return f
    from math import gcd

    den_lcm = 1
    for c in f.terms.values():
        d = int(c.denominator)
        den_lcm = den_lcm * d // gcd(den_lcm, d)
    num_gcd = 0
    for c in f.terms.values():
        num_gcd = gcd(num_gcd, abs(int(c.numerator * den_lcm // c.denominator)))
    scale = QQ(den_lcm, num_gcd) if num_gcd else QQ(1)
    g = f.scale(scale)
    _, lc = g.leading(order)
    if lc < 0:
        g = -g
    return g
