"""Global context management: declarations and rewrite-rule installation.

A `Signature` is the ordered list of declarations and rewrite rules the
kernel checks against.  Extension is persistent: `declare` and
`add_rewrite` verify the well-formedness side conditions and return a new
signature, leaving the original untouched, so frozen signatures can be
shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from . import kernel
from .terms import Const, FVar, KTerm, Sort, Var, App, Lam, Pi, free_fvars, spine


class SignatureError(Exception):
    """Base class for signature construction failures."""


class DuplicateName(SignatureError):
    def __init__(self, name: str):
        super().__init__(f"duplicate declaration: {name}")
        self.name = name


class NotASort(SignatureError):
    def __init__(self, name: str, ty: KTerm):
        super().__init__(f"type of {name} must be a sort, found {ty}")
        self.name = name


class IllTypedSide(SignatureError):
    def __init__(self, side: str, cause: Exception):
        super().__init__(f"ill-typed rewrite rule {side}-hand side: {cause}")
        self.side = side
        self.cause = cause


class FVViolation(SignatureError):
    def __init__(self, names: Iterable[str], where: str):
        names = sorted(names)
        super().__init__(f"variables {names} violate the free-variable inclusion ({where})")
        self.names = names


class NonPatternLhs(SignatureError):
    pass


@dataclass(frozen=True)
class Declaration:
    name: str
    type: KTerm


class Signature:
    """Ordered global context of declarations and rewrite rules."""

    __slots__ = ("entries", "_types", "_rules", "eta")

    def __init__(
        self,
        entries: tuple = (),
        types: dict[str, KTerm] | None = None,
        rules: dict[str, tuple[kernel.RewriteRule, ...]] | None = None,
        eta: bool = False,
    ):
        self.entries = entries
        self._types = types or {}
        self._rules = rules or {}
        self.eta = eta

    def type_of(self, name: str) -> Optional[KTerm]:
        return self._types.get(name)

    def rules_for(self, head: str) -> tuple[kernel.RewriteRule, ...]:
        return self._rules.get(head, ())

    def __contains__(self, name: str) -> bool:
        return name in self._types

    def __len__(self) -> int:
        return len(self.entries)

    def declare(self, name: str, ty: KTerm, fuel: kernel.Fuel | None = None) -> "Signature":
        """Extend with `name : ty` after checking `ty` lives in a sort."""
        if name in self._types:
            raise DuplicateName(name)
        sort = kernel.reveal(self, kernel.infer(self, {}, ty, fuel), fuel)
        if not isinstance(sort, Sort):
            raise NotASort(name, sort)
        types = dict(self._types)
        types[name] = ty
        return Signature(self.entries + (Declaration(name, ty),), types, self._rules, self.eta)

    def add_rewrite(
        self,
        ctx: Sequence[tuple[str, KTerm]],
        lhs: KTerm,
        rhs: KTerm,
        fuel: kernel.Fuel | None = None,
    ) -> "Signature":
        """Install `lhs --> rhs` over the typed pattern context `ctx`.

        Checks that the left-hand side is a constant-headed first-order
        pattern, that both sides share one type under the context, and
        that FV(rhs) <= FV(lhs) <= ctx.
        """
        delta = _check_context(self, ctx, fuel)
        _check_pattern(lhs, set(delta))
        lhs_vars = free_fvars(lhs)
        rhs_vars = free_fvars(rhs)
        if not lhs_vars <= set(delta):
            raise FVViolation(lhs_vars - set(delta), "left-hand side outside the pattern context")
        if not rhs_vars <= lhs_vars:
            raise FVViolation(rhs_vars - lhs_vars, "right-hand side not covered by the left")
        try:
            rule_type = kernel.infer(self, delta, lhs, fuel)
        except kernel.KernelError as e:
            raise IllTypedSide("left", e) from e
        try:
            kernel.check(self, delta, rhs, rule_type, fuel)
        except kernel.KernelError as e:
            raise IllTypedSide("right", e) from e
        rule = kernel.RewriteRule(tuple(ctx), lhs, rhs, rule_type)
        rules = dict(self._rules)
        rules[rule.head] = rules.get(rule.head, ()) + (rule,)
        return Signature(self.entries + (rule,), self._types, rules, self.eta)

    def with_eta(self, eta: bool = True) -> "Signature":
        return Signature(self.entries, self._types, self._rules, eta)


EMPTY = Signature()


def _check_context(
    sig: Signature, ctx: Sequence[tuple[str, KTerm]], fuel: kernel.Fuel | None
) -> dict[str, KTerm]:
    delta: dict[str, KTerm] = {}
    for name, ty in ctx:
        if name in delta:
            raise DuplicateName(name)
        sort = kernel.reveal(sig, kernel.infer(sig, delta, ty, fuel), fuel)
        if not isinstance(sort, Sort):
            raise NotASort(name, sort)
        delta[name] = ty
    return delta


def _check_pattern(lhs: KTerm, delta: set[str]) -> None:
    head, args = spine(lhs)
    if not isinstance(head, Const):
        raise NonPatternLhs(f"rule left-hand side must be headed by a constant, found {head}")
    stack = list(args)
    while stack:
        match stack.pop():
            case App(fn=f, arg=a):
                stack += (f, a)
            case FVar(name=n):
                if n not in delta:
                    raise FVViolation({n}, "left-hand side outside the pattern context")
            case Const() | Sort():
                pass
            case Lam() | Pi() | Var() as sub:
                raise NonPatternLhs(f"subterm {sub} is not first-order pattern syntax")


def install_entries(sig: Signature, entries: Iterable, fuel: kernel.Fuel | None = None) -> Signature:
    """Install parsed or generated entries in order, checking each one.

    Definitions desugar to a declaration plus an empty-context rewrite
    rule; `#ASSERT` entries run a check without extending the signature.
    """
    from . import dkparse

    for e in entries:
        match e:
            case dkparse.Decl(name=n, type=ty):
                sig = sig.declare(n, ty, fuel)
            case dkparse.Def(name=n, type=ty, body=b):
                sig = sig.declare(n, ty, fuel)
                sig = sig.add_rewrite((), Const(n), b, fuel)
            case dkparse.Rule(ctx=ctx, lhs=lhs, rhs=rhs):
                sig = sig.add_rewrite(ctx, lhs, rhs, fuel)
            case dkparse.AssertType(term=t, type=ty):
                sort = kernel.reveal(sig, kernel.infer(sig, {}, ty, fuel), fuel)
                if not isinstance(sort, Sort):
                    raise NotASort("#ASSERT", sort)
                kernel.check(sig, {}, t, ty, fuel)
            case dkparse.Comment():
                pass
            case _:
                raise SignatureError(f"cannot install entry {e!r}")
    return sig


def replay(sig: Signature, fuel: kernel.Fuel | None = None) -> Signature:
    """Re-derive every judgment of `sig` from the empty signature.

    Succeeds exactly when the signature was well-formed by construction;
    the result lists the same entries in the same order.
    """
    out = Signature(eta=sig.eta)
    for entry in sig.entries:
        if isinstance(entry, Declaration):
            out = out.declare(entry.name, entry.type, fuel)
        else:
            out = out.add_rewrite(entry.ctx, entry.lhs, entry.rhs, fuel)
    return out
