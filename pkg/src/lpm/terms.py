"""Core term syntax for the lambda-Pi kernel.

Terms use a locally nameless representation: bound variables are de
Bruijn indices (`Var`), free variables are named (`FVar`), and global
constants are `Const`.  Binder display names are kept for printing but
excluded from equality, so structural equality coincides with
alpha-equivalence.

The discipline throughout the kernel is that every term handled at top
level is *locally closed* (no dangling indices).  Binders are always
opened with `instantiate` before their bodies are inspected, which makes
free-variable substitution capture-free without any index shifting.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class KTerm:
    """Base class for kernel terms."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Sort(KTerm):
    name: str  # "Type" or "Kind"

    def __str__(self) -> str:
        return self.name


TYPE = Sort("Type")
KIND = Sort("Kind")


@dataclass(frozen=True, slots=True)
class Var(KTerm):
    """Bound variable as a de Bruijn index; the name is display-only."""

    index: int
    name: str = field(default="", compare=False)

    def __str__(self) -> str:
        return self.name or f"#{self.index}"


@dataclass(frozen=True, slots=True)
class FVar(KTerm):
    """Free variable: a local-context entry or rewrite pattern variable."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Const(KTerm):
    """Global constant, usually carrying a module prefix (`logic.prf`)."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App(KTerm):
    fn: KTerm
    arg: KTerm

    def __str__(self) -> str:
        fn = str(self.fn)
        arg = f"({self.arg})" if isinstance(self.arg, (App, Lam, Pi)) else str(self.arg)
        return f"{fn} {arg}"


@dataclass(frozen=True, slots=True)
class Lam(KTerm):
    name: str = field(compare=False)
    annot: KTerm = field()
    body: KTerm = field()

    def __str__(self) -> str:
        return f"({self.name or '_'} : {self.annot} => {self.body})"


@dataclass(frozen=True, slots=True)
class Pi(KTerm):
    name: str = field(compare=False)
    domain: KTerm = field()
    codomain: KTerm = field()

    def __str__(self) -> str:
        dom = f"({self.domain})" if isinstance(self.domain, (Lam, Pi)) else str(self.domain)
        if uses_binder(self.codomain):
            return f"({self.name or '_'} : {dom} -> {self.codomain})"
        return f"({dom} -> {self.codomain})"


def app(fn: KTerm, *args: KTerm) -> KTerm:
    """Left-nested application `fn a1 ... an`."""
    for a in args:
        fn = App(fn, a)
    return fn


def arrow(*tys: KTerm) -> KTerm:
    """Right-nested non-dependent product `t1 -> ... -> tn`."""
    result = tys[-1]
    for t in reversed(tys[:-1]):
        result = Pi("", t, result)
    return result


def spine(t: KTerm) -> tuple[KTerm, list[KTerm]]:
    """Split `f a1 ... an` into the head `f` and argument list."""
    args: list[KTerm] = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def instantiate(body: KTerm, value: KTerm, depth: int = 0) -> KTerm:
    """Replace the binder index `depth` in `body` by a locally closed term."""
    match body:
        case Var(index=i):
            return value if i == depth else body
        case App(fn=f, arg=a):
            return App(instantiate(f, value, depth), instantiate(a, value, depth))
        case Lam(name=n, annot=t, body=b):
            return Lam(n, instantiate(t, value, depth), instantiate(b, value, depth + 1))
        case Pi(name=n, domain=d, codomain=c):
            return Pi(n, instantiate(d, value, depth), instantiate(c, value, depth + 1))
        case _:
            return body


def abstract(t: KTerm, name: str, depth: int = 0) -> KTerm:
    """Turn free occurrences of `FVar(name)` into the binder index `depth`."""
    match t:
        case FVar(name=n) if n == name:
            return Var(depth, name)
        case App(fn=f, arg=a):
            return App(abstract(f, name, depth), abstract(a, name, depth))
        case Lam(name=n, annot=ty, body=b):
            return Lam(n, abstract(ty, name, depth), abstract(b, name, depth + 1))
        case Pi(name=n, domain=d, codomain=c):
            return Pi(n, abstract(d, name, depth), abstract(c, name, depth + 1))
        case _:
            return t


def substitute(t: KTerm, bindings: dict[str, KTerm]) -> KTerm:
    """Simultaneous substitution of free variables by locally closed terms.

    Capture-avoiding by construction: binders are indices, so no value can
    be captured when the walk passes under them.
    """
    if not bindings:
        return t
    match t:
        case FVar(name=n):
            return bindings.get(n, t)
        case App(fn=f, arg=a):
            return App(substitute(f, bindings), substitute(a, bindings))
        case Lam(name=n, annot=ty, body=b):
            return Lam(n, substitute(ty, bindings), substitute(b, bindings))
        case Pi(name=n, domain=d, codomain=c):
            return Pi(n, substitute(d, bindings), substitute(c, bindings))
        case _:
            return t


def free_fvars(t: KTerm) -> frozenset[str]:
    """Names of the free variables occurring in `t`."""
    out: set[str] = set()
    stack = [t]
    while stack:
        match stack.pop():
            case FVar(name=n):
                out.add(n)
            case App(fn=f, arg=a):
                stack += (f, a)
            case Lam(annot=ty, body=b) | Pi(domain=ty, codomain=b):
                stack += (ty, b)
            case _:
                pass
    return frozenset(out)


def const_names(t: KTerm) -> frozenset[str]:
    """Names of the constants occurring in `t`."""
    out: set[str] = set()
    stack = [t]
    while stack:
        match stack.pop():
            case Const(name=n):
                out.add(n)
            case App(fn=f, arg=a):
                stack += (f, a)
            case Lam(annot=ty, body=b) | Pi(domain=ty, codomain=b):
                stack += (ty, b)
            case _:
                pass
    return frozenset(out)


def uses_binder(body: KTerm, depth: int = 0) -> bool:
    """True when `body` references the binder at index `depth`."""
    match body:
        case Var(index=i):
            return i == depth
        case App(fn=f, arg=a):
            return uses_binder(f, depth) or uses_binder(a, depth)
        case Lam(annot=ty, body=b) | Pi(domain=ty, codomain=b):
            return uses_binder(ty, depth) or uses_binder(b, depth + 1)
        case _:
            return False


def is_locally_closed(t: KTerm, depth: int = 0) -> bool:
    """True when every de Bruijn index resolves to an enclosing binder."""
    match t:
        case Var(index=i):
            return i < depth
        case App(fn=f, arg=a):
            return is_locally_closed(f, depth) and is_locally_closed(a, depth)
        case Lam(annot=ty, body=b) | Pi(domain=ty, codomain=b):
            return is_locally_closed(ty, depth) and is_locally_closed(b, depth + 1)
        case _:
            return True


_fresh_counter = itertools.count()


def fresh_name(hint: str = "x") -> str:
    """A free-variable name that no parsed or printed term can contain."""
    return f"{hint}#{next(_fresh_counter)}"


def pi(name: str, domain: KTerm, body_fn) -> KTerm:
    """Dependent product built through a callback receiving the bound variable."""
    u = fresh_name(name)
    return Pi(name, domain, abstract(body_fn(FVar(u)), u))


def lam(name: str, annot: KTerm, body_fn) -> KTerm:
    """Abstraction built through a callback receiving the bound variable."""
    u = fresh_name(name)
    return Lam(name, annot, abstract(body_fn(FVar(u)), u))
