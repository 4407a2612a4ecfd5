"""Reduction modulo rewriting, conversion, and type checking.

The trusted core: weak-head and full normalization under beta plus the
signature's rewrite rules, the conversion test, and the bidirectional
typing judgment.  All operations are pure functions of a signature and a
term; a shared fuel budget makes divergent user rewrite systems fail
loudly instead of hanging.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping, Optional

from .terms import (
    KIND,
    TYPE,
    App,
    Const,
    FVar,
    KTerm,
    Lam,
    Pi,
    Sort,
    Var,
    abstract,
    app,
    fresh_name,
    instantiate,
    spine,
    substitute,
)

if TYPE_CHECKING:
    from .signature import Signature


DEFAULT_REWRITE_STEPS = 100_000
DEFAULT_CONVERSION_DEPTH = 10_000


class KernelError(Exception):
    """Base class for kernel failures."""


class FuelExhausted(KernelError):
    pass


class UnboundIdentifier(KernelError):
    def __init__(self, name: str):
        super().__init__(f"unbound identifier: {name}")
        self.name = name


class NotAFunction(KernelError):
    def __init__(self, fn: KTerm, fn_type: KTerm):
        super().__init__(f"term {fn} of type {fn_type} is applied but is not a function")
        self.fn = fn
        self.fn_type = fn_type


class SortError(KernelError):
    pass


class UntypableKind(KernelError):
    def __init__(self) -> None:
        super().__init__("Kind has no type")


class TypeMismatch(KernelError):
    """Failed conversion check, carrying both sides in normal form."""

    def __init__(self, expected: KTerm, actual: KTerm):
        super().__init__(f"type mismatch: expected {expected}, found {actual}")
        self.expected = expected
        self.actual = actual


class Fuel:
    """Budgets for rewrite steps and conversion recursion depth.

    Counters only decrease; running out raises `FuelExhausted` rather
    than silently accepting or rejecting anything.
    """

    __slots__ = ("max_rewrite_steps", "max_conversion_depth", "steps_left")

    def __init__(
        self,
        max_rewrite_steps: int = DEFAULT_REWRITE_STEPS,
        max_conversion_depth: int = DEFAULT_CONVERSION_DEPTH,
    ):
        if max_rewrite_steps < 0 or max_conversion_depth < 0:
            raise ValueError("fuel budgets must be nonnegative")
        self.max_rewrite_steps = max_rewrite_steps
        self.max_conversion_depth = max_conversion_depth
        self.steps_left = max_rewrite_steps

    def step(self) -> None:
        if self.steps_left <= 0:
            raise FuelExhausted(f"rewrite budget of {self.max_rewrite_steps} steps exhausted")
        self.steps_left -= 1

    def check_depth(self, depth: int) -> None:
        if depth > self.max_conversion_depth:
            raise FuelExhausted(f"conversion depth budget of {self.max_conversion_depth} exhausted")


@dataclass(frozen=True)
class RewriteRule:
    """A typed rewrite rule `lhs --> rhs` over the pattern context `ctx`.

    `lhs` is a constant applied to a spine of first-order patterns whose
    variables are drawn from `ctx`; both sides were checked to share
    `rule_type` when the rule was installed.
    """

    ctx: tuple[tuple[str, KTerm], ...]
    lhs: KTerm
    rhs: KTerm
    rule_type: KTerm
    head: str = field(init=False, compare=False)
    lhs_args: tuple[KTerm, ...] = field(init=False, compare=False)
    arity: int = field(init=False, compare=False)
    delta: frozenset[str] = field(init=False, compare=False)
    # (position, head constant, spine length) of each constant-headed
    # pattern argument, used to skip definite non-matches cheaply
    screens: tuple[tuple[int, str, int], ...] = field(init=False, compare=False)

    def __post_init__(self) -> None:
        head, args = spine(self.lhs)
        if not isinstance(head, Const):
            raise ValueError("rewrite rule left-hand side must be constant-headed")
        object.__setattr__(self, "head", head.name)
        object.__setattr__(self, "lhs_args", tuple(args))
        object.__setattr__(self, "arity", len(args))
        object.__setattr__(self, "delta", frozenset(name for name, _ in self.ctx))
        screens = []
        for j, arg in enumerate(args):
            h, sub = spine(arg)
            if isinstance(h, Const):
                screens.append((j, h.name, len(sub)))
        object.__setattr__(self, "screens", tuple(screens))


Substitution = dict[str, KTerm]


def match_pattern(lhs: KTerm, delta: Iterable[str], subject: KTerm) -> Optional[Substitution]:
    """First-order syntactic matching of a rule pattern against a term.

    Pattern variables (free variables named in `delta`) match arbitrary
    subterms; repeated occurrences must match alpha-equal subterms.
    Everything else matches only itself.  Returns the bindings or None.
    """
    bindings: Substitution = {}
    if _match(lhs, subject, frozenset(delta), bindings):
        return bindings
    return None


def _match(pat: KTerm, subj: KTerm, delta: frozenset[str], out: Substitution) -> bool:
    stack = [(pat, subj)]
    while stack:
        p, s = stack.pop()
        tp = type(p)
        if tp is FVar:
            n = p.name
            if n in delta:
                prev = out.get(n)
                if prev is None:
                    out[n] = s
                elif prev != s:
                    return False
                continue
            if type(s) is not FVar or s.name != n:
                return False
        elif tp is App:
            if type(s) is not App:
                return False
            stack.append((p.fn, s.fn))
            stack.append((p.arg, s.arg))
        elif tp is Const:
            if type(s) is not Const or s.name != p.name:
                return False
        elif p != s:
            return False
    return True


def _screens_fail(rule: RewriteRule, rev: list[KTerm]) -> bool:
    for j, name, arity in rule.screens:
        subj = rev[-1 - j]
        n = 0
        while type(subj) is App:
            n += 1
            subj = subj.fn
        if n != arity or type(subj) is not Const or subj.name != name:
            return True
    return False


def whnf(sig: Signature, t: KTerm, fuel: Fuel | None = None) -> KTerm:
    """Weak-head normal form under beta plus the signature's rules.

    The result's head is a binder, sort, variable, or a constant whose
    argument spine matches no rule.
    """
    fuel = fuel or Fuel()
    head = t
    rev: list[KTerm] = []  # argument spine, innermost application last
    while True:
        while type(head) is App:
            rev.append(head.arg)
            head = head.fn
        if type(head) is Lam and rev:
            fuel.step()
            head = instantiate(head.body, rev.pop())
            continue
        if type(head) is Const:
            rules = sig.rules_for(head.name)
            if rules:
                nargs = len(rev)
                for rule in rules:
                    k = rule.arity
                    if k > nargs or _screens_fail(rule, rev):
                        continue
                    bindings: Substitution = {}
                    for j, pat in enumerate(rule.lhs_args):
                        if not _match(pat, rev[-1 - j], rule.delta, bindings):
                            break
                    else:
                        fuel.step()
                        del rev[len(rev) - k :]
                        head = substitute(rule.rhs, bindings)
                        break
                else:
                    break
                continue
        break
    for a in reversed(rev):
        head = App(head, a)
    return head


def reveal(sig: Signature, t: KTerm, fuel: Fuel | None = None) -> KTerm:
    """Expose the head shape of `t`, normalizing arguments when needed.

    Plain `whnf` matches rules against the raw argument spine; a rule can
    still fire after an argument reduces (for example when a rule demands
    a connective that only appears after a beta step inside the argument).
    Typing uses this stronger form wherever a product or sort must show.
    """
    fuel = fuel or Fuel()
    t = whnf(sig, t, fuel)
    while isinstance(t, App):
        head, args = spine(t)
        t2 = app(head, *(normalize(sig, a, fuel) for a in args))
        if t2 == t:
            break
        t = whnf(sig, t2, fuel)
    return t


def normalize(sig: Signature, t: KTerm, fuel: Fuel | None = None) -> KTerm:
    """Full beta/rewrite normal form, reducing under binders and in arguments.

    Head reduction is retried after the arguments are normalized, since a
    normalized argument can enable a rule that the raw spine did not match.
    """
    fuel = fuel or Fuel()
    t = whnf(sig, t, fuel)
    match t:
        case App():
            head, args = spine(t)
            nargs = [normalize(sig, a, fuel) for a in args]
            t2 = app(head, *nargs)
            if t2 == t:
                return t2
            # arguments are normal now; if the head still does not fire,
            # the rebuilt term is the normal form
            t3 = whnf(sig, t2, fuel)
            if t3 == t2:
                return t2
            return normalize(sig, t3, fuel)
        case Lam(name=n, annot=ty, body=b):
            f = fresh_name(n or "x")
            nb = normalize(sig, instantiate(b, FVar(f)), fuel)
            return Lam(n, normalize(sig, ty, fuel), abstract(nb, f))
        case Pi(name=n, domain=d, codomain=c):
            f = fresh_name(n or "x")
            nc = normalize(sig, instantiate(c, FVar(f)), fuel)
            return Pi(n, normalize(sig, d, fuel), abstract(nc, f))
        case _:
            return t


def convertible(sig: Signature, a: KTerm, b: KTerm, fuel: Fuel | None = None) -> bool:
    """Decide `a` and `b` equal modulo beta and the signature's rules."""
    fuel = fuel or Fuel()
    return _conv(sig, a, b, fuel, 0)


def _conv(sig: Signature, a: KTerm, b: KTerm, fuel: Fuel, depth: int) -> bool:
    fuel.check_depth(depth)
    if a == b:
        return True
    wa = whnf(sig, a, fuel)
    wb = whnf(sig, b, fuel)
    if wa == wb:
        return True
    if _conv_heads(sig, wa, wb, fuel, depth):
        return True
    # A stuck head can still come unstuck once its arguments are reduced,
    # so disagreement falls back to comparing full normal forms.
    return normalize(sig, wa, fuel) == normalize(sig, wb, fuel)


def _conv_heads(sig: Signature, wa: KTerm, wb: KTerm, fuel: Fuel, depth: int) -> bool:
    match wa, wb:
        case (App(), App()):
            ha, argsa = spine(wa)
            hb, argsb = spine(wb)
            if ha == hb and len(argsa) == len(argsb):
                return all(_conv(sig, x, y, fuel, depth + 1) for x, y in zip(argsa, argsb))
            return False
        case (Lam(annot=ta, body=ba), Lam(annot=tb, body=bb)):
            if not _conv(sig, ta, tb, fuel, depth + 1):
                return False
            f = FVar(fresh_name())
            return _conv(sig, instantiate(ba, f), instantiate(bb, f), fuel, depth + 1)
        case (Pi(domain=da, codomain=ca), Pi(domain=db, codomain=cb)):
            if not _conv(sig, da, db, fuel, depth + 1):
                return False
            f = FVar(fresh_name())
            return _conv(sig, instantiate(ca, f), instantiate(cb, f), fuel, depth + 1)
        case (Lam(body=ba), _) if sig.eta:
            f = FVar(fresh_name())
            return _conv(sig, instantiate(ba, f), App(wb, f), fuel, depth + 1)
        case (_, Lam(body=bb)) if sig.eta:
            f = FVar(fresh_name())
            return _conv(sig, App(wa, f), instantiate(bb, f), fuel, depth + 1)
        case _:
            return False


Context = Mapping[str, KTerm]


def infer(sig: Signature, ctx: Context, t: KTerm, fuel: Fuel | None = None) -> KTerm:
    """Infer the type of `t` in the signature and local context."""
    fuel = fuel or Fuel()
    return _infer(sig, dict(ctx), t, fuel)


def _infer(sig: Signature, ctx: dict[str, KTerm], t: KTerm, fuel: Fuel) -> KTerm:
    match t:
        case Sort(name="Type"):
            return KIND
        case Sort():
            raise UntypableKind()
        case FVar(name=n):
            try:
                return ctx[n]
            except KeyError:
                raise UnboundIdentifier(n) from None
        case Const(name=n):
            ty = sig.type_of(n)
            if ty is None:
                raise UnboundIdentifier(n)
            return ty
        case Var(index=i):
            raise UnboundIdentifier(f"#{i}")
        case App(fn=f, arg=a):
            fn_ty = reveal(sig, _infer(sig, ctx, f, fuel), fuel)
            if not isinstance(fn_ty, Pi):
                raise NotAFunction(f, fn_ty)
            arg_ty = _infer(sig, ctx, a, fuel)
            if not _conv(sig, arg_ty, fn_ty.domain, fuel, 0):
                raise TypeMismatch(_safe_nf(sig, fn_ty.domain, fuel), _safe_nf(sig, arg_ty, fuel))
            return instantiate(fn_ty.codomain, a)
        case Lam(name=n, annot=ty, body=b):
            _check_domain(sig, ctx, ty, fuel)
            f = fresh_name(n or "x")
            ctx2 = dict(ctx)
            ctx2[f] = ty
            body_ty = _infer(sig, ctx2, instantiate(b, FVar(f)), fuel)
            body_sort = reveal(sig, _infer(sig, ctx2, body_ty, fuel), fuel)
            if not isinstance(body_sort, Sort):
                raise SortError(f"lambda body type {body_ty} does not live in a sort")
            return Pi(n, ty, abstract(body_ty, f))
        case Pi(name=n, domain=d, codomain=c):
            _check_domain(sig, ctx, d, fuel)
            f = fresh_name(n or "x")
            ctx2 = dict(ctx)
            ctx2[f] = d
            cod_sort = reveal(sig, _infer(sig, ctx2, instantiate(c, FVar(f)), fuel), fuel)
            if not isinstance(cod_sort, Sort):
                raise SortError(f"product codomain in {t} is not a sort")
            return cod_sort
        case _:
            raise KernelError(f"cannot type {t!r}")


def _check_domain(sig: Signature, ctx: dict[str, KTerm], ty: KTerm, fuel: Fuel) -> None:
    s = reveal(sig, _infer(sig, ctx, ty, fuel), fuel)
    if s != TYPE:
        raise SortError(f"binder domain {ty} must have sort Type, has {s}")


def check(sig: Signature, ctx: Context, t: KTerm, expected: KTerm, fuel: Fuel | None = None) -> None:
    """Check `t` against `expected`; raises `TypeMismatch` on failure."""
    fuel = fuel or Fuel()
    actual = _infer(sig, dict(ctx), t, fuel)
    if not _conv(sig, actual, expected, fuel, 0):
        raise TypeMismatch(_safe_nf(sig, expected, fuel), _safe_nf(sig, actual, fuel))


def _safe_nf(sig: Signature, t: KTerm, fuel: Fuel) -> KTerm:
    """Best-effort normal form for error messages."""
    try:
        return normalize(sig, t, Fuel(min(fuel.steps_left, 10_000), fuel.max_conversion_depth))
    except FuelExhausted:
        return t
