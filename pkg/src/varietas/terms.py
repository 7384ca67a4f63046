"""Terms of the absolutely free algebra, signatures, and presentations.

Terms are immutable trees; a leaf is either a constant of the signature or a
generator of the enclosing presentation.  The concrete syntax is prefix
application with a power shorthand for iterated unary symbols::

    c               constant or generator
    F(a, G(b))      application
    S^3(x)          = S(S(S(x)))
    S^-2(x)         = S_inv(S_inv(x))   (for symbols with a declared inverse)

Names are ``[A-Za-z0-9_]+``; generators and operation symbols share one
namespace, so a collision is a parse error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional


class TermError(Exception):
    """Malformed syntax, unknown symbol, or arity mismatch."""


@dataclass(frozen=True)
class OperationSymbol:
    name: str
    arity: int


@dataclass(frozen=True)
class Term:
    head: str
    args: tuple["Term", ...] = ()

    def __repr__(self) -> str:
        return f"Term({format_term(self)!r})"

    @property
    def is_leaf(self) -> bool:
        return not self.args


def const(name: str) -> Term:
    return Term(name)


def app(head: str, *args: Term) -> Term:
    return Term(head, tuple(args))


def unary_power(sym: str, k: int, arg: Term) -> Term:
    """Apply the unary symbol ``sym`` ``k`` times."""
    t = arg
    for _ in range(k):
        t = Term(sym, (t,))
    return t


class Signature:
    """A family of operation symbols, finite or recursively enumerated.

    ``resolver`` classifies names outside the finite table (used for the
    infinite unary family of the infinite-signature variety); ``enumerator``
    makes an infinite signature totally enumerable.  ``inverses`` maps a
    unary symbol to its formal inverse so that negative powers print and
    parse (S / S_inv).
    """

    def __init__(
        self,
        symbols: Iterable[OperationSymbol],
        resolver: Optional[Callable[[str], Optional[OperationSymbol]]] = None,
        enumerator: Optional[Callable[[int], OperationSymbol]] = None,
        inverses: Optional[dict[str, str]] = None,
    ) -> None:
        self.table: dict[str, OperationSymbol] = {}
        for sym in symbols:
            if sym.name in self.table:
                raise TermError(f"duplicate symbol {sym.name!r}")
            self.table[sym.name] = sym
        self.resolver = resolver
        self.enumerator = enumerator
        self.inverses = dict(inverses or {})

    def lookup(self, name: str) -> Optional[OperationSymbol]:
        sym = self.table.get(name)
        if sym is None and self.resolver is not None:
            sym = self.resolver(name)
        return sym

    def arity(self, name: str) -> Optional[int]:
        sym = self.lookup(name)
        return None if sym is None else sym.arity

    def is_symbol(self, name: str) -> bool:
        return self.lookup(name) is not None

    def constants(self) -> list[str]:
        return [s.name for s in self.table.values() if s.arity == 0]

    def enumerate_symbols(self, count: int) -> list[OperationSymbol]:
        if self.enumerator is None:
            return list(self.table.values())[:count]
        return [self.enumerator(i) for i in range(count)]

    def validate(self, t: Term, gens: Iterable[str] = ()) -> None:
        """Check arities and that every leaf is a constant or generator."""
        gen_set = set(gens)
        for name in gen_set:
            if self.is_symbol(name):
                raise TermError(f"generator {name!r} collides with a symbol")

        def walk(u: Term) -> None:
            sym = self.lookup(u.head)
            if sym is None:
                if u.args or u.head not in gen_set:
                    raise TermError(f"unknown symbol {u.head!r}")
                return
            if sym.arity != len(u.args):
                raise TermError(
                    f"{u.head!r} expects {sym.arity} arguments, got {len(u.args)}"
                )
            for a in u.args:
                walk(a)

        walk(t)


_TOKEN = re.compile(r"\s*([A-Za-z0-9_]+|\^-?\d+|[(),*])")


def _tokenize(text: str) -> list[str]:
    out: list[str] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise TermError(f"bad character at {text[pos:]!r}")
            break
        out.append(m.group(1))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str], sig: Signature, gens: set[str]):
        self.toks = tokens
        self.i = 0
        self.sig = sig
        self.gens = gens

    def peek(self) -> Optional[str]:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self, expect: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise TermError("unexpected end of input")
        if expect is not None and tok != expect:
            raise TermError(f"expected {expect!r}, got {tok!r}")
        self.i += 1
        return tok

    def parse(self) -> Term:
        t = self.atom()
        if self.peek() is not None:
            raise TermError(f"trailing input {self.toks[self.i:]!r}")
        return t

    def atom(self) -> Term:
        name = self.take()
        if not re.fullmatch(r"[A-Za-z0-9_]+", name):
            raise TermError(f"expected a name, got {name!r}")
        power = 1
        sym_name = name
        if self.peek() is not None and self.peek().startswith("^"):
            power = int(self.take()[1:])
            if power < 0:
                inv = self.sig.inverses.get(name)
                if inv is None:
                    inv = next((k for k, v in self.sig.inverses.items()
                                if v == name), None)
                if inv is None:
                    raise TermError(f"{name!r} has no inverse for negative power")
                sym_name, power = inv, -power
        sym = self.sig.lookup(sym_name)
        if self.peek() == "(":
            if sym is None:
                raise TermError(f"unknown symbol {sym_name!r}")
            if power != 1 and sym.arity != 1:
                raise TermError(f"power shorthand needs unary symbol, not {sym_name!r}")
            self.take("(")
            args = [self.atom()]
            while self.peek() == ",":
                self.take(",")
                args.append(self.atom())
            self.take(")")
            if sym.arity != len(args):
                raise TermError(
                    f"{sym_name!r} expects {sym.arity} arguments, got {len(args)}"
                )
            if power == 0:
                if len(args) != 1:
                    raise TermError("zero power needs a single argument")
                return args[0]
            t = Term(sym_name, tuple(args))
            for _ in range(power - 1):
                t = Term(sym_name, (t,))
            return t
        # bare name: constant or generator
        if power != 1:
            raise TermError(f"power on {name!r} without argument")
        if sym is not None:
            if sym.arity != 0:
                raise TermError(f"{sym_name!r} used without arguments")
            return Term(sym_name)
        if name in self.gens:
            return Term(name)
        raise TermError(f"unknown symbol {name!r}")


def parse_term(text: str, sig: Signature, gens: Iterable[str] = ()) -> Term:
    gen_set = set(gens)
    for g in gen_set:
        if sig.is_symbol(g):
            raise TermError(f"generator {g!r} collides with a symbol")
    return _Parser(_tokenize(text), sig, gen_set).parse()


def format_term(t: Term, sig: Optional[Signature] = None) -> str:
    """Canonical printing: runs of a unary symbol use the power shorthand,
    and a symbol declared as some symbol's inverse prints as a negative
    power of the latter."""
    inv_of = {}
    if sig is not None:
        inv_of = {v: k for k, v in sig.inverses.items() if k not in sig.inverses.values()}

    def fmt(u: Term) -> str:
        if not u.args:
            return u.head
        if len(u.args) == 1:
            head, k, v = u.head, 0, u
            while len(v.args) == 1 and v.head == head:
                k += 1
                v = v.args[0]
            if head in inv_of:
                return f"{inv_of[head]}^-{k}({fmt(v)})"
            if k > 1:
                return f"{head}^{k}({fmt(v)})"
            return f"{head}({fmt(v)})"
        return f"{u.head}({','.join(fmt(a) for a in u.args)})"

    return fmt(t)


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    variables: tuple[str, ...] = ()

    def __repr__(self) -> str:
        return f"Equation({format_term(self.lhs)} = {format_term(self.rhs)})"

    @property
    def is_ground(self) -> bool:
        return not self.variables


@dataclass(frozen=True)
class Presentation:
    """Finite list of generators together with ground relations."""

    generators: tuple[str, ...]
    relations: tuple[Equation, ...]
    signature: Signature = field(compare=False, hash=False, default=None)

    def validate(self) -> None:
        for eq in self.relations:
            if not eq.is_ground:
                raise TermError("presentation relations must be ground")
            self.signature.validate(eq.lhs, self.generators)
            self.signature.validate(eq.rhs, self.generators)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for a in t.args:
        yield from subterms(a)


def subterm_closure(ts: Iterable[Term]) -> set[Term]:
    """Smallest superset closed under taking children (idempotent, monotone)."""
    out: set[Term] = set()
    stack = list(ts)
    while stack:
        t = stack.pop()
        if t in out:
            continue
        out.add(t)
        stack.extend(t.args)
    return out


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict[object, object] = {}

    def find(self, x):
        p = self.parent
        if x not in p:
            p[x] = x
            return x
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[ra] = rb
        return True


def smallest_partial_congruence(
    carrier: Iterable[Term], seeds: Iterable[tuple[Term, Term]]
) -> dict[Term, frozenset[Term]]:
    """Smallest partial congruence on a subterm-closed carrier containing the
    seed pairs; returned as a map term -> class.

    Closure alternates the congruence rule (children pairwise related and both
    composites in the carrier imply the composites are related) with the
    union-find's built-in reflexive/symmetric/transitive closure.
    """
    terms = list(set(carrier))
    term_set = set(terms)
    uf = _UnionFind()
    for t in terms:
        uf.find(t)
    for s, t in seeds:
        if s not in term_set or t not in term_set:
            raise TermError("seed term outside carrier")
        uf.union(s, t)

    composite = [t for t in terms if t.args]
    changed = True
    while changed:
        changed = False
        sigs: dict[tuple, Term] = {}
        for t in composite:
            key = (t.head, tuple(uf.find(a) for a in t.args))
            other = sigs.get(key)
            if other is None:
                sigs[key] = t
            elif uf.union(t, other):
                changed = True

    classes: dict[object, set[Term]] = {}
    for t in terms:
        classes.setdefault(uf.find(t), set()).add(t)
    return {t: frozenset(classes[uf.find(t)]) for t in terms}


def congruence_classes(
    carrier: Iterable[Term], seeds: Iterable[tuple[Term, Term]]
) -> Callable[[Term, Term], bool]:
    rel = smallest_partial_congruence(carrier, seeds)

    def related(s: Term, t: Term) -> bool:
        cls = rel.get(s)
        return cls is not None and t in cls

    return related


def evans_solve(p: Presentation, lhs: Term, rhs: Term) -> bool:
    """Word problem for a finite presentation in the variety of all algebras.

    The carrier is the finite set of presentation terms and their subterms;
    its smallest partial congruence containing the relations is fed to the
    closure engine, which decides the generated congruence on all of FX.
    """
    from .congruence import CongruenceDecider, finite_partial_subalgebra

    base_terms: set[Term] = set()
    for eq in p.relations:
        base_terms.add(eq.lhs)
        base_terms.add(eq.rhs)
    carrier = subterm_closure(base_terms)
    seeds = [(eq.lhs, eq.rhs) for eq in p.relations]
    psa = finite_partial_subalgebra(carrier, seeds)
    return CongruenceDecider(psa).decide(lhs, rhs)


# ----------------------------------------------------------------------------
# presentation files:  `gen x1 x2 ...` and `rel <term> = <term>` lines
# ----------------------------------------------------------------------------

def parse_presentation(text: str, sig: Signature) -> Presentation:
    gens: list[str] = []
    relations: list[Equation] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("gen "):
            gens.extend(line.split()[1:])
        elif line.startswith("rel "):
            body = line[4:]
            if "=" not in body:
                raise TermError(f"line {lineno}: missing '=' in relation")
            left, right = body.split("=", 1)
            relations.append(
                Equation(parse_term(left, sig, gens), parse_term(right, sig, gens))
            )
        else:
            raise TermError(f"line {lineno}: expected 'gen' or 'rel'")
    pres = Presentation(tuple(gens), tuple(relations), sig)
    pres.validate()
    return pres


def format_presentation(p: Presentation, sig: Optional[Signature] = None) -> str:
    lines = []
    if p.generators:
        lines.append("gen " + " ".join(p.generators))
    for eq in p.relations:
        lines.append(f"rel {format_term(eq.lhs, sig)} = {format_term(eq.rhs, sig)}")
    return "\n".join(lines) + "\n"
