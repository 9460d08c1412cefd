"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a dict mapping exponent tuples to Fraction coefficients,
attached to a variable registry.  The registry partitions variables into
named blocks:

    "t"     coordinates of the induced-representation space
    "a"     exponential coordinates on the group
    "x"     ambient coordinates of concrete vector fields
    "param" formal parameters (mu, covector components, dilation rho, ...)

When the registry is built with ``a_truncated=True`` every arithmetic
operation silently drops terms of total a-degree >= 2.  The group-word
computations only ever need the a-linear part, and this truncation is what
keeps high-step algebras tractable.

Zero coefficients are never stored; the zero polynomial has an empty term
dict.  All arithmetic is exact (fractions.Fraction).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

Exponent = tuple[int, ...]

_VALID_BLOCKS = ("t", "a", "x", "param")


@dataclass(frozen=True)
class VarRegistry:
    """Ordered variable names with a block tag per variable."""

    names: tuple[str, ...]
    blocks: tuple[str, ...]
    a_truncated: bool = False

    def __post_init__(self):
        if len(self.names) != len(self.blocks):
            raise ValueError("names and blocks must have equal length")
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate variable names in {self.names}")
        for b in self.blocks:
            if b not in _VALID_BLOCKS:
                raise ValueError(f"unknown block {b!r}")
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(self.names)})

    @staticmethod
    def build(t: Iterable[str] = (), a: Iterable[str] = (), x: Iterable[str] = (),
              params: Iterable[str] = (), a_truncated: bool = False) -> "VarRegistry":
        names: list[str] = []
        blocks: list[str] = []
        for block, group in (("t", t), ("a", a), ("x", x), ("param", params)):
            for name in group:
                names.append(name)
                blocks.append(block)
        return VarRegistry(tuple(names), tuple(blocks), a_truncated)

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r}; registry has {self.names}") from None

    def block_indices(self, block: str) -> tuple[int, ...]:
        return tuple(i for i, b in enumerate(self.blocks) if b == block)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise TypeError(f"cannot coerce {value!r} to a rational")


class MultiPoly:
    """Sparse exact polynomial over a :class:`VarRegistry`.

    Treated as immutable: no method mutates ``terms`` after construction,
    so instances may be shared freely across threads.
    """

    __slots__ = ("registry", "terms")

    def __init__(self, registry: VarRegistry, terms: Mapping[Exponent, Fraction] | None = None):
        self.registry = registry
        canon: dict[Exponent, Fraction] = {}
        if terms:
            a_idx = registry.block_indices("a") if registry.a_truncated else ()
            nv = registry.nvars
            for exp, coeff in terms.items():
                if len(exp) != nv:
                    raise ValueError(f"exponent arity {len(exp)} != registry arity {nv}")
                if coeff == 0:
                    continue
                if registry.a_truncated and sum(exp[i] for i in a_idx) >= 2:
                    continue
                canon[exp] = _as_fraction(coeff)
        self.terms = canon

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, registry: VarRegistry) -> "MultiPoly":
        return cls(registry)

    @classmethod
    def const(cls, registry: VarRegistry, value) -> "MultiPoly":
        c = _as_fraction(value)
        if c == 0:
            return cls(registry)
        return cls(registry, {(0,) * registry.nvars: c})

    @classmethod
    def var(cls, registry: VarRegistry, name: str, power: int = 1) -> "MultiPoly":
        exp = [0] * registry.nvars
        exp[registry.index(name)] = power
        return cls(registry, {tuple(exp): Fraction(1)})

    @classmethod
    def monomial(cls, registry: VarRegistry, coeff, powers: Mapping[str, int]) -> "MultiPoly":
        exp = [0] * registry.nvars
        for name, p in powers.items():
            exp[registry.index(name)] = p
        return cls(registry, {tuple(exp): _as_fraction(coeff)})

    # -- predicates ----------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def degree(self, block: str | None = None) -> int:
        """Max total degree (restricted to a block if given); -1 for zero."""
        if not self.terms:
            return -1
        if block is None:
            return max(sum(exp) for exp in self.terms)
        idx = self.registry.block_indices(block)
        return max(sum(exp[i] for i in idx) for exp in self.terms)

    def is_homogeneous(self, degree: int, block: str | None = None) -> bool:
        if not self.terms:
            return True
        if block is None:
            return all(sum(exp) == degree for exp in self.terms)
        idx = self.registry.block_indices(block)
        return all(sum(exp[i] for i in idx) == degree for exp in self.terms)

    # -- arithmetic ----------------------------------------------------

    def _wrap(self, terms: dict[Exponent, Fraction]) -> "MultiPoly":
        out = MultiPoly.__new__(MultiPoly)
        out.registry = self.registry
        out.terms = terms
        return out

    def _check_same(self, other: "MultiPoly"):
        if self.registry is not other.registry and self.registry != other.registry:
            raise ValueError("polynomials over different variable registries")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.registry, other)
        self._check_same(other)
        out = dict(self.terms)
        for exp, c in other.terms.items():
            s = out.get(exp, Fraction(0)) + c
            if s == 0:
                out.pop(exp, None)
            else:
                out[exp] = s
        return self._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({exp: -c for exp, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.registry, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = _as_fraction(other)
            if c == 0:
                return self._wrap({})
            return self._wrap({exp: cc * c for exp, cc in self.terms.items()})
        self._check_same(other)
        if not self.terms or not other.terms:
            return self._wrap({})
        reg = self.registry
        a_idx = reg.block_indices("a") if reg.a_truncated else ()
        out: dict[Exponent, Fraction] = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                exp = tuple(i + j for i, j in zip(ea, eb))
                if a_idx and sum(exp[i] for i in a_idx) >= 2:
                    continue
                s = out.get(exp, Fraction(0)) + ca * cb
                if s == 0:
                    out.pop(exp, None)
                else:
                    out[exp] = s
        return self._wrap(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = MultiPoly.const(self.registry, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.const(self.registry, other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.registry == other.registry and self.terms == other.terms

    def __hash__(self):
        return hash((self.registry.names, frozenset(self.terms.items())))

    # -- calculus and substitution --------------------------------------

    def diff(self, name: str) -> "MultiPoly":
        i = self.registry.index(name)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            if exp[i] == 0:
                continue
            e2 = list(exp)
            e2[i] -= 1
            out[tuple(e2)] = c * exp[i]
        return self._wrap(out)

    def coefficient_of(self, name: str, power: int = 1) -> "MultiPoly":
        """Terms with exactly `power` in `name`, with that variable removed."""
        i = self.registry.index(name)
        out: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            if exp[i] != power:
                continue
            e2 = list(exp)
            e2[i] = 0
            out[tuple(e2)] = out.get(tuple(e2), Fraction(0)) + c
        return self._wrap({e: c for e, c in out.items() if c != 0})

    def substitute(self, mapping: Mapping[str, "MultiPoly | Fraction | int"]) -> "MultiPoly":
        """Substitute polynomials (over the same registry) or constants for variables."""
        reg = self.registry
        subs: dict[int, MultiPoly] = {}
        for name, val in mapping.items():
            if not isinstance(val, MultiPoly):
                val = MultiPoly.const(reg, val)
            subs[reg.index(name)] = val
        result = MultiPoly.zero(reg)
        for exp, c in self.terms.items():
            factor = MultiPoly.const(reg, c)
            rest = list(exp)
            for i, val in subs.items():
                for _ in range(exp[i]):
                    factor = factor * val
                rest[i] = 0
            factor = factor * self._wrap({tuple(rest): Fraction(1)})
            result = result + factor
        return result

    def map_registry(self, new_registry: VarRegistry,
                     rename: Mapping[str, str] | None = None) -> "MultiPoly":
        """Re-express over another registry; unmapped variables must be absent."""
        rename = rename or {}
        src = self.registry
        col: list[int | None] = []
        for name in src.names:
            target = rename.get(name, name)
            col.append(new_registry._index.get(target))
        out: dict[Exponent, Fraction] = {}
        for exp, c in self.terms.items():
            e2 = [0] * new_registry.nvars
            for i, p in enumerate(exp):
                if p == 0:
                    continue
                j = col[i]
                if j is None:
                    raise ValueError(f"variable {src.names[i]!r} has no image in target registry")
                e2[j] += p
            key = tuple(e2)
            out[key] = out.get(key, Fraction(0)) + c
        return MultiPoly(new_registry, out)

    def eval_fraction(self, env: Mapping[str, Fraction | int]) -> Fraction:
        vals = [None] * self.registry.nvars
        for name, v in env.items():
            vals[self.registry.index(name)] = _as_fraction(v)
        total = Fraction(0)
        for exp, c in self.terms.items():
            term = c
            for i, p in enumerate(exp):
                if p:
                    if vals[i] is None:
                        raise ValueError(f"unbound variable {self.registry.names[i]!r}")
                    term *= vals[i] ** p
            total += term
        return total

    def evalf(self, env: Mapping[str, object]):
        """Numeric evaluation; values may be floats or numpy arrays."""
        vals = {self.registry.index(k): v for k, v in env.items()}
        total = None
        for exp, c in self.terms.items():
            term = float(c)
            for i, p in enumerate(exp):
                if p:
                    term = term * vals[i] ** p
            total = term if total is None else total + term
        if total is None:
            return 0.0
        return total

    # -- display ---------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, Fraction]]:
        """Canonical monomial order: graded, then lexicographic by exponents."""
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        names = self.registry.names
        pieces = []
        for exp, c in self.sorted_terms():
            factors = []
            for i, p in enumerate(exp):
                if p == 1:
                    factors.append(names[i])
                elif p > 1:
                    factors.append(f"{names[i]}^{p}")
            body = "*".join(factors)
            if not body:
                piece = str(c)
            elif c == 1:
                piece = body
            elif c == -1:
                piece = f"-{body}"
            else:
                piece = f"{c}*{body}"
            pieces.append(piece)
        out = pieces[0]
        for piece in pieces[1:]:
            out += f" - {piece[1:]}" if piece.startswith("-") else f" + {piece}"
        return out

    def __repr__(self):
        return f"MultiPoly({self.to_str()})"


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
                    r"|(?P<op>[-+*^()]))")


def parse_poly(text: str, registry: VarRegistry) -> MultiPoly:
    """Parse a polynomial literal like ``"3/2 x1^2 x2 - x2 + 1"``.

    Grammar: sum of terms; a term is an optional rational coefficient and
    variable powers, joined by optional ``*``.  Parentheses are supported
    for grouping sums, e.g. ``"(x1^2 + x2^2)^2"``.
    """
    tokens: list[tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ValueError(f"cannot tokenize polynomial at {text[pos:]!r}")
            break
        pos = m.end()
        for kind in ("num", "name", "op"):
            if m.group(kind) is not None:
                tokens.append((kind, m.group(kind)))
                break
    idx = 0

    def peek():
        return tokens[idx] if idx < len(tokens) else (None, None)

    def take():
        nonlocal idx
        tok = tokens[idx]
        idx += 1
        return tok

    def parse_sum() -> MultiPoly:
        nonlocal idx
        total = MultiPoly.zero(registry)
        sign = Fraction(1)
        first = True
        while True:
            kind, val = peek()
            if kind is None or (kind == "op" and val == ")"):
                if first:
                    raise ValueError("empty polynomial expression")
                return total
            if kind == "op" and val in "+-":
                take()
                sign = Fraction(1) if val == "+" else Fraction(-1)
            elif not first:
                raise ValueError(f"expected '+' or '-' before {val!r}")
            total = total + parse_term() * sign
            sign = Fraction(1)
            first = False

    def parse_term() -> MultiPoly:
        result = MultiPoly.const(registry, 1)
        saw_factor = False
        while True:
            kind, val = peek()
            if kind == "num":
                take()
                factor = MultiPoly.const(registry, Fraction(val))
            elif kind == "name":
                take()
                factor = MultiPoly.var(registry, val)
            elif kind == "op" and val == "(":
                take()
                factor = parse_sum()
                k2, v2 = take()
                if v2 != ")":
                    raise ValueError("unbalanced parentheses")
            elif kind == "op" and val == "*":
                take()
                continue
            else:
                if not saw_factor:
                    raise ValueError(f"expected a factor, found {val!r}")
                return result
            kind, nxt = peek()
            if kind == "op" and nxt == "^":
                take()
                k2, v2 = take()
                if k2 != "num" or "/" in v2:
                    raise ValueError("exponent must be a nonnegative integer")
                factor = factor ** int(v2)
            result = result * factor
            saw_factor = True

    poly = parse_sum()
    if idx != len(tokens):
        raise ValueError(f"trailing tokens in polynomial: {tokens[idx:]}")
    return poly


# ---------------------------------------------------------------------------
# Exact univariate tools (dense coefficient lists, index = power).  Used for
# the vanishing-order analysis of circle profiles.
# ---------------------------------------------------------------------------

UniPoly = list  # list[Fraction]


def uni_trim(f: UniPoly) -> UniPoly:
    while f and f[-1] == 0:
        f = f[:-1]
    return f


def uni_from_multipoly(p: MultiPoly, name: str) -> UniPoly:
    """Dense coefficients of a MultiPoly that involves only `name`."""
    i = p.registry.index(name)
    deg = 0
    for exp in p.terms:
        if any(e and j != i for j, e in enumerate(exp)):
            raise ValueError("polynomial is not univariate in " + name)
        deg = max(deg, exp[i])
    out = [Fraction(0)] * (deg + 1)
    for exp, c in p.terms.items():
        out[exp[i]] += c
    return uni_trim(out)


def uni_degree(f: UniPoly) -> int:
    return len(uni_trim(f)) - 1


def uni_eval(f: UniPoly, x: Fraction) -> Fraction:
    total = Fraction(0)
    for c in reversed(f):
        total = total * x + c
    return total


def uni_derivative(f: UniPoly) -> UniPoly:
    return uni_trim([c * i for i, c in enumerate(f)][1:])


def uni_divmod(f: UniPoly, g: UniPoly) -> tuple[UniPoly, UniPoly]:
    f = uni_trim(list(f))
    g = uni_trim(list(g))
    if not g:
        raise ZeroDivisionError("division by zero polynomial")
    q = [Fraction(0)] * max(0, len(f) - len(g) + 1)
    r = list(f)
    while len(r) >= len(g) and uni_trim(r):
        shift = len(r) - len(g)
        coeff = r[-1] / g[-1]
        q[shift] = coeff
        for i, gc in enumerate(g):
            r[shift + i] -= coeff * gc
        r = uni_trim(r)
    return uni_trim(q), r


def uni_gcd(f: UniPoly, g: UniPoly) -> UniPoly:
    a, b = uni_trim(list(f)), uni_trim(list(g))
    while b:
        a, b = b, uni_divmod(a, b)[1]
    if a:
        lead = a[-1]
        a = [c / lead for c in a]
    return a


def squarefree_decomposition(f: UniPoly) -> list[tuple[int, UniPoly]]:
    """Yun-style decomposition: list of (multiplicity, monic square-free factor)."""
    f = uni_trim(list(f))
    if uni_degree(f) < 1:
        return []
    out = []
    g = uni_gcd(f, uni_derivative(f))
    w = uni_divmod(f, g)[0]
    mult = 1
    while uni_degree(w) >= 1:
        y = uni_gcd(w, g)
        factor = uni_divmod(w, y)[0]
        if uni_degree(factor) >= 1:
            lead = factor[-1]
            out.append((mult, [c / lead for c in factor]))
        w = y
        g = uni_divmod(g, y)[0]
        mult += 1
    return out


def sturm_chain(f: UniPoly) -> list[UniPoly]:
    chain = [uni_trim(list(f)), uni_derivative(f)]
    while uni_trim(chain[-1]):
        rem = uni_divmod(chain[-2], chain[-1])[1]
        if not rem:
            break
        chain.append([-c for c in rem])
    return [p for p in chain if uni_trim(p)]


def _sign_changes(values: list[Fraction]) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _chain_signs_at(chain: list[UniPoly], x) -> int:
    if x == "inf":
        vals = [p[-1] for p in chain]
    elif x == "-inf":
        vals = [p[-1] * (-1) ** uni_degree(p) for p in chain]
    else:
        vals = [uni_eval(p, x) for p in chain]
    return _sign_changes(vals)


def count_real_roots(f: UniPoly, lo=None, hi=None) -> int:
    """Distinct real roots of f in (lo, hi]; whole line when bounds omitted."""
    f = uni_trim(list(f))
    if uni_degree(f) < 1:
        return 0
    chain = sturm_chain(f)
    a = _chain_signs_at(chain, "-inf" if lo is None else lo)
    b = _chain_signs_at(chain, "inf" if hi is None else hi)
    return a - b


def root_bound(f: UniPoly) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    f = uni_trim(list(f))
    lead = abs(f[-1])
    return Fraction(1) + max((abs(c) / lead for c in f[:-1]), default=Fraction(0))


def isolate_real_roots(f: UniPoly) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals (lo, hi], one distinct real root in each."""
    f = uni_trim(list(f))
    if uni_degree(f) < 1:
        return []
    chain = sturm_chain(f)
    bound = root_bound(f)

    def roots_in(lo: Fraction, hi: Fraction) -> int:
        return _chain_signs_at(chain, lo) - _chain_signs_at(chain, hi)

    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound)]
    while stack:
        lo, hi = stack.pop()
        n = roots_in(lo, hi)
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if uni_eval(f, mid) == 0:
            # mid is an exact root; peel off an interval containing only it
            eps = (hi - lo) / 4
            while uni_eval(f, mid - eps) == 0 or roots_in(mid - eps, mid) > 1:
                eps /= 2
            out.append((mid - eps, mid))
            stack.append((lo, mid - eps))
            stack.append((mid, hi))
        else:
            stack.append((lo, mid))
            stack.append((mid, hi))
    out.sort()
    return out


def refine_root(f: UniPoly, lo: Fraction, hi: Fraction, width: Fraction) -> Fraction:
    """Bisect a bracketing interval (exact arithmetic) down to `width`."""
    chain = sturm_chain(f)

    def count(a, b):
        return _chain_signs_at(chain, a) - _chain_signs_at(chain, b)

    while hi - lo > width:
        mid = (lo + hi) / 2
        if uni_eval(f, mid) == 0:
            return mid
        if count(lo, mid) >= 1:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2
