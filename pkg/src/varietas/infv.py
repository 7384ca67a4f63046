"""Square-zero commutative semigroup with an idempotent unary family.

The signature has a zero, a commutative associative product that kills
squares, and countably many unary operations h_n; the interesting laws say
h_j iterated k times kills a product of j distinct factors exactly when j
is the k-th member of a fixed recursive listing.  Per presentation the word
problem is solved in an explicit algebra: a finite nilpotent quotient B
plus one fresh fixed point per large index over the quotient's unreachable
part.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Optional

from .terms import Equation, OperationSymbol, Presentation, Signature, Term, TermError

MUL = "*"
ZERO = "0"

_H_NAME = re.compile(r"h(\d+)$")


def h_name(i: int) -> str:
    return f"h{i}"


def h_index(name: str) -> Optional[int]:
    m = _H_NAME.fullmatch(name)
    return int(m.group(1)) if m else None


def _resolver(name: str) -> Optional[OperationSymbol]:
    if h_index(name) is not None:
        return OperationSymbol(name, 1)
    return None


def _enumerator(i: int) -> OperationSymbol:
    if i == 0:
        return OperationSymbol(ZERO, 0)
    if i == 1:
        return OperationSymbol(MUL, 2)
    return OperationSymbol(h_name(i - 2), 1)


def build_inf_signature() -> Signature:
    return Signature(
        [OperationSymbol(ZERO, 0), OperationSymbol(MUL, 2)],
        resolver=_resolver,
        enumerator=_enumerator,
    )


@dataclass(frozen=True)
class XListing:
    """Injective listing n -> m_n (1-indexed) with a materialized window."""
    name: str
    listing: Callable[[int], int] = field(compare=False)
    window: int = 64

    def members(self) -> set[int]:
        return {self.listing(n) for n in range(1, self.window + 1)}

    def contains(self, k: int) -> bool:
        return k in self.members()

    def index_of(self, j: int) -> Optional[int]:
        for n in range(1, self.window + 1):
            if self.listing(n) == j:
                return n
        return None


def _nth_prime(n: int) -> int:
    count, cand = 0, 1
    while count < n:
        cand += 1
        if all(cand % d for d in range(2, int(cand ** 0.5) + 1)):
            count += 1
    return cand


def builtin_listing(name: str, window: int = 64) -> XListing:
    if name == "primes":
        return XListing("primes", _nth_prime, window)
    if name == "evens":
        return XListing("evens", lambda n: 2 * n, window)
    raise ValueError(f"unknown builtin listing {name!r}")


def listing_from_values(values: Iterable[int], name: str = "file") -> XListing:
    vals = list(values)
    if len(set(vals)) != len(vals):
        raise ValueError("listing must be injective")

    def fn(n: int) -> int:
        if 1 <= n <= len(vals):
            return vals[n - 1]
        return max(vals, default=0) + 1 + n  # injective tail off the window

    return XListing(name, fn, window=len(vals))


# ----------------------------------------------------------------------------
# term syntax: juxtaposition or * for the product, h3(...) for the family
# ----------------------------------------------------------------------------

_TOKENS = re.compile(r"\s*([A-Za-z0-9_]+|[()*])")


def parse_inf_term(text: str, gens: Iterable[str]) -> Term:
    gens = set(gens)
    tokens: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKENS.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise TermError(f"bad character near {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()

    def factor(i: int) -> tuple[Term, int]:
        if i >= len(tokens):
            raise TermError("unexpected end of term")
        tok = tokens[i]
        if tok == "(":
            t, i = prod(i + 1)
            if i >= len(tokens) or tokens[i] != ")":
                raise TermError("missing )")
            return t, i + 1
        if h_index(tok) is not None and i + 1 < len(tokens) and tokens[i + 1] == "(":
            inner, j = prod(i + 2)
            if j >= len(tokens) or tokens[j] != ")":
                raise TermError("missing )")
            return Term(tok, (inner,)), j + 1
        if tok == ZERO:
            return Term(ZERO), i + 1
        if tok in gens:
            return Term(tok), i + 1
        raise TermError(f"unknown name {tok!r}")

    def prod(i: int) -> tuple[Term, int]:
        t, i = factor(i)
        while i < len(tokens) and tokens[i] not in (")",):
            if tokens[i] == MUL:
                i += 1
            u, i = factor(i)
            t = Term(MUL, (t, u))
        return t, i

    t, i = prod(0)
    if i != len(tokens):
        raise TermError(f"trailing input {tokens[i:]!r}")
    return t


def format_inf_term(t: Term) -> str:
    if not t.args:
        return t.head
    if t.head == MUL:
        parts = []
        for a in t.args:
            s = format_inf_term(a)
            parts.append(f"({s})" if a.args and a.head == MUL else s)
        return " ".join(parts)
    return f"{t.head}({format_inf_term(t.args[0])})"


# ----------------------------------------------------------------------------
# law recognition
# ----------------------------------------------------------------------------

def _flatten_product(t: Term) -> Optional[list[Term]]:
    if t.args and t.head == MUL:
        left = _flatten_product(t.args[0])
        right = _flatten_product(t.args[1])
        if left is None or right is None:
            return None
        return left + right
    return [t]


def law_instance_inf(eq: Equation, xl: XListing) -> bool:
    """Whether an equation is one of the defining laws (fixed schemas or a
    member of the indexed collapse family)."""
    for lhs, rhs in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
        if _is_fixed_schema(lhs, rhs):
            return True
        if _is_indexed_collapse(lhs, rhs, xl):
            return True
    return False


def _is_var(t: Term) -> bool:
    return t.is_leaf and t.head != ZERO and h_index(t.head) is None


def _is_fixed_schema(lhs: Term, rhs: Term) -> bool:
    zero = Term(ZERO)
    if lhs.args and lhs.head == MUL:
        a, b = lhs.args
        # commutativity
        if rhs.args and rhs.head == MUL and rhs.args == (b, a) and a != b \
                and _is_var(a) and _is_var(b):
            return True
        # associativity
        if b.args and b.head == MUL and rhs.args and rhs.head == MUL:
            y, z = b.args
            left = rhs.args[0]
            if left.args and left.head == MUL and left.args == (a, y) \
                    and rhs.args[1] == z \
                    and all(map(_is_var, (a, y, z))) and len({a, y, z}) == 3:
                return True
        if rhs == zero:
            # x 0 = 0, x x = 0, x h_n(y) = 0
            if b == zero and _is_var(a):
                return True
            if a == b and _is_var(a):
                return True
            if _is_var(a) and b.args and h_index(b.head) is not None \
                    and _is_var(b.args[0]):
                return True
    if lhs.args and h_index(lhs.head) is not None:
        inner = lhs.args[0]
        if inner.args and h_index(inner.head) is not None and _is_var(inner.args[0]):
            if lhs.head == inner.head and rhs == inner:
                return True
            if lhs.head != inner.head and rhs == zero:
                return True
    return False


def _is_indexed_collapse(lhs: Term, rhs: Term, xl: XListing) -> bool:
    if rhs != Term(ZERO):
        return False
    k = 0
    t = lhs
    j: Optional[int] = None
    while t.args and h_index(t.head) is not None:
        if j is None:
            j = h_index(t.head)
        elif h_index(t.head) != j:
            return False
        k += 1
        t = t.args[0]
    if j is None or k == 0:
        return False
    factors = _flatten_product(t)
    if factors is None or len(factors) != j:
        return False
    if not all(_is_var(f) for f in factors) or len(set(factors)) != j:
        return False
    n = xl.index_of(j)
    return n == k


def enumerate_laws_inf(xl: XListing, n: int, n_vars: int = 3) -> list[Equation]:
    """A prefix of a total enumeration of the law instances (as equations
    over variables v1, v2, ...)."""
    out: list[Equation] = []
    vs = [Term(f"v{i+1}") for i in range(max(n_vars, 12))]

    def add(lhs: Term, rhs: Term, variables: tuple[str, ...]):
        if len(out) < n:
            out.append(Equation(lhs, rhs, variables))

    size = 0
    while len(out) < n and size < 40:
        x, y, z = vs[0], vs[1], vs[2]
        if size == 0:
            add(Term(MUL, (x, y)), Term(MUL, (y, x)), ("v1", "v2"))
            add(Term(MUL, (x, Term(MUL, (y, z)))),
                Term(MUL, (Term(MUL, (x, y)), z)), ("v1", "v2", "v3"))
            add(Term(MUL, (x, Term(ZERO))), Term(ZERO), ("v1",))
            add(Term(MUL, (x, x)), Term(ZERO), ("v1",))
        idx = size
        add(Term(MUL, (x, Term(h_name(idx), (y,)))), Term(ZERO), ("v1", "v2"))
        add(Term(h_name(idx), (Term(h_name(idx), (x,)),)),
            Term(h_name(idx), (x,)), ("v1",))
        for other in range(size):
            add(Term(h_name(idx), (Term(h_name(other), (x,)),)),
                Term(ZERO), ("v1",))
            add(Term(h_name(other), (Term(h_name(idx), (x,)),)),
                Term(ZERO), ("v1",))
        if 1 <= size <= xl.window:
            j = xl.listing(size)
            if j <= len(vs):
                prod_t = vs[0]
                for i in range(1, j):
                    prod_t = Term(MUL, (prod_t, vs[i]))
                t = prod_t
                for _ in range(size):
                    t = Term(h_name(j), (t,))
                add(t, Term(ZERO), tuple(f"v{i+1}" for i in range(j)))
        size += 1
    return out[:n]


# ----------------------------------------------------------------------------
# the witness algebra
# ----------------------------------------------------------------------------

S_ZERO = ("zero",)


def witness_gen(name: str):
    return ("s", frozenset([name]))


def witness_a(i: int):
    return ("a", i)


def eval_witness(t: Term, env: dict[str, tuple], xl: XListing) -> tuple:
    """Evaluate in the separating algebra: square-zero products of
    generators plus one absorbing point per index outside the listing."""
    if t.is_leaf:
        if t.head == ZERO:
            return S_ZERO
        if t.head in env:
            return env[t.head]
        raise TermError(f"unbound leaf {t.head!r}")
    if t.head == MUL:
        a = eval_witness(t.args[0], env, xl)
        b = eval_witness(t.args[1], env, xl)
        if a[0] == "s" and b[0] == "s" and not (a[1] & b[1]):
            return ("s", a[1] | b[1])
        return S_ZERO
    i = h_index(t.head)
    if i is None:
        raise TermError(f"unknown operation {t.head!r}")
    x = eval_witness(t.args[0], env, xl)
    if xl.contains(i):
        return S_ZERO
    if x == S_ZERO or (x[0] == "a" and x[1] != i):
        return S_ZERO
    return witness_a(i)


# ----------------------------------------------------------------------------
# the per-presentation finite quotient and its extension
# ----------------------------------------------------------------------------

@dataclass
class FiniteQuotient:
    generators: tuple[str, ...]
    cutoff: int                       # m
    xl: XListing
    class_of: Optional[dict] = None   # None = free (no relations)

    def _subset_elt(self, names: frozenset) -> tuple:
        return ("s", names)

    def _h_elt(self, i: int, x: tuple) -> tuple:
        """h_i on raw nilpotent elements, i <= cutoff."""
        if x == S_ZERO:
            return S_ZERO
        if x[0] == "h":
            _, j, inner = x
            if j == i:
                return x
            return S_ZERO
        if x[0] == "s":
            if self.xl.contains(i) and len(x[1]) >= i:
                return S_ZERO
            return ("h", i, x[1])
        return S_ZERO

    def _mul_elt(self, a: tuple, b: tuple) -> tuple:
        if a[0] == "s" and b[0] == "s" and not (a[1] & b[1]):
            return ("s", a[1] | b[1])
        return S_ZERO

    def carrier(self) -> list[tuple]:
        if len(self.generators) > 12:
            raise TermError("materialization needs at most 12 generators")
        subsets: list[frozenset] = [frozenset()]
        for g in self.generators:
            subsets += [s | {g} for s in subsets]
        out = [S_ZERO]
        for s in subsets:
            if s:
                out.append(("s", s))
        for i in range(self.cutoff + 1):
            for s in subsets:
                if s:
                    h = self._h_elt(i, ("s", s))
                    if h != S_ZERO and h not in out:
                        out.append(h)
        return out

    def rep(self, x: tuple) -> tuple:
        if self.class_of is None:
            return x
        return self.class_of.get(x, x)

    def eval_raw(self, t: Term) -> tuple:
        if t.is_leaf:
            if t.head == ZERO:
                return S_ZERO
            if t.head in self.generators:
                return self.rep(("s", frozenset([t.head])))
            raise TermError(f"unbound generator {t.head!r}")
        if t.head == MUL:
            return self.mul(self.eval_raw(t.args[0]), self.eval_raw(t.args[1]))
        i = h_index(t.head)
        if i is None:
            raise TermError(f"unknown operation {t.head!r}")
        return self.h(i, self.eval_raw(t.args[0]))

    def mul(self, a: tuple, b: tuple) -> tuple:
        if a[0] == "ext" or b[0] == "ext":
            return self.rep(S_ZERO)
        return self.rep(self._mul_elt(a, b))

    def h(self, i: int, x: tuple) -> tuple:
        if i <= self.cutoff:
            if x[0] == "ext":
                return self.rep(S_ZERO)
            return self.rep(self._h_elt(i, x))
        # fresh fixed points over the unreachable part
        if x[0] == "ext":
            _, cls, j = x
            return x if j == i else self.rep(S_ZERO)
        if x != S_ZERO and self.in_c(x):
            return ("ext", x, i)
        return self.rep(S_ZERO)

    def in_c(self, x: tuple) -> bool:
        """Nonzero and outside every h-image (i <= cutoff)."""
        if x == S_ZERO or x[0] == "ext":
            return False
        if self.class_of is None:
            return x[0] == "s"
        for y in self._all_elements:
            for i in range(self.cutoff + 1):
                if self.rep(self._h_elt(i, y)) == x:
                    return False
        return True

    @property
    def _all_elements(self) -> list[tuple]:
        if not hasattr(self, "_carrier_cache"):
            self._carrier_cache = self.carrier()
        return self._carrier_cache


def build_finite_quotient(p: Presentation, xl: XListing) -> FiniteQuotient:
    max_h = 0
    seen: list[Term] = []
    for eq in p.relations:
        seen += [eq.lhs, eq.rhs]
    stack = list(seen)
    while stack:
        t = stack.pop()
        idx = h_index(t.head) if t.args else None
        if idx is not None:
            max_h = max(max_h, idx)
        stack.extend(t.args)
    cutoff = max(len(p.generators), max_h) + 1
    fq = FiniteQuotient(p.generators, cutoff, xl)
    if not p.relations:
        return fq
    # quotient the finite nilpotent algebra by the presented congruence
    carrier = fq.carrier()
    parent: dict[tuple, tuple] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        # prefer keeping zero as the representative
        if rb == S_ZERO:
            parent[ra] = rb
        else:
            parent[rb] = ra
        return True

    free = FiniteQuotient(p.generators, cutoff, xl)
    for eq in p.relations:
        union(free.eval_raw(eq.lhs), free.eval_raw(eq.rhs))
    subsets = [x for x in carrier if x[0] == "s"]
    changed = True
    while changed:
        changed = False
        sig_mul: dict = {}
        for a in subsets:
            for b in subsets:
                key = ("m", find(a), find(b))
                val = find(free._mul_elt(a, b))
                other = sig_mul.get(key)
                if other is None:
                    sig_mul[key] = val
                elif other != val and union(other, val):
                    changed = True
        for i in range(cutoff + 1):
            sig_h: dict = {}
            for x in carrier:
                key = find(x)
                val = find(free._h_elt(i, x))
                other = sig_h.get(key)
                if other is None:
                    sig_h[key] = val
                elif other != val and union(other, val):
                    changed = True
    class_of = {x: find(x) for x in carrier}
    fq.class_of = class_of
    return fq


def decide_inf(p: Presentation, lhs: Term, rhs: Term, xl: XListing) -> bool:
    """Equality in the explicit per-presentation algebra (total)."""
    fq = build_finite_quotient(p, xl)
    return fq.eval_raw(lhs) == fq.eval_raw(rhs)
