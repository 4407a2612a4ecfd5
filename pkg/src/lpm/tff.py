"""Polymorphic first-order logic with rewrite rules: syntax and checking.

The logic has rank-1 polymorphic type constructors, function and
predicate symbols with explicit type arguments, primitive typed
equality, term and type quantifiers, and two kinds of rewrite rules:
term rules between terms of a common type and proposition rules whose
left-hand side is an atomic formula.

Theories are read from `.tffx` files (an S-expression schema, see
docs/format-tffx.md) and checked by `wf_theory` before translation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from . import sexp

# ---------------------------------------------------------------------------
# Syntax


@dataclass(frozen=True)
class TVar:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TCons:
    name: str
    args: tuple["TffType", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.name
        return f"{self.name}({', '.join(map(str, self.args))})"


TffType = Union[TVar, TCons]


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fun:
    name: str
    ty_args: tuple[TffType, ...] = ()
    args: tuple["TffTerm", ...] = ()

    def __str__(self) -> str:
        if not self.ty_args and not self.args:
            return self.name
        parts = [", ".join(map(str, self.ty_args)), ", ".join(map(str, self.args))]
        return f"{self.name}({'; '.join(p for p in parts)})"


TffTerm = Union[Var, Fun]


class TffFormula:
    __slots__ = ()


@dataclass(frozen=True)
class Top(TffFormula):
    pass


@dataclass(frozen=True)
class Bottom(TffFormula):
    pass


@dataclass(frozen=True)
class Not(TffFormula):
    body: TffFormula


@dataclass(frozen=True)
class And(TffFormula):
    lhs: TffFormula
    rhs: TffFormula


@dataclass(frozen=True)
class Or(TffFormula):
    lhs: TffFormula
    rhs: TffFormula


@dataclass(frozen=True)
class Implies(TffFormula):
    lhs: TffFormula
    rhs: TffFormula


@dataclass(frozen=True)
class Iff(TffFormula):
    lhs: TffFormula
    rhs: TffFormula


@dataclass(frozen=True)
class Eq(TffFormula):
    ty: TffType
    lhs: TffTerm
    rhs: TffTerm


@dataclass(frozen=True)
class Pred(TffFormula):
    name: str
    ty_args: tuple[TffType, ...] = ()
    args: tuple[TffTerm, ...] = ()


@dataclass(frozen=True)
class Forall(TffFormula):
    var: str
    ty: TffType
    body: TffFormula


@dataclass(frozen=True)
class Exists(TffFormula):
    var: str
    ty: TffType
    body: TffFormula


@dataclass(frozen=True)
class ForallType(TffFormula):
    tvar: str
    body: TffFormula


@dataclass(frozen=True)
class ExistsType(TffFormula):
    tvar: str
    body: TffFormula


# ---------------------------------------------------------------------------
# Theories


@dataclass(frozen=True)
class TypeCons:
    name: str
    arity: int


@dataclass(frozen=True)
class FunDecl:
    name: str
    tvars: tuple[str, ...]
    arg_types: tuple[TffType, ...]
    result: TffType


@dataclass(frozen=True)
class PredDecl:
    name: str
    tvars: tuple[str, ...]
    arg_types: tuple[TffType, ...]


@dataclass(frozen=True)
class Axiom:
    name: str
    formula: TffFormula


@dataclass(frozen=True)
class TermRule:
    tvars: tuple[str, ...]
    ctx: tuple[tuple[str, TffType], ...]
    lhs: TffTerm
    rhs: TffTerm


@dataclass(frozen=True)
class PropRule:
    tvars: tuple[str, ...]
    ctx: tuple[tuple[str, TffType], ...]
    lhs: TffFormula
    rhs: TffFormula


@dataclass(frozen=True)
class ExtDecl:
    """Reference to a registered extension deduction rule of the theory."""

    name: str


TheoryItem = Union[TypeCons, FunDecl, PredDecl, Axiom, TermRule, PropRule, ExtDecl]


@dataclass(frozen=True)
class TffTheory:
    name: str
    items: tuple[TheoryItem, ...]


@dataclass(frozen=True)
class TffContext:
    """Term variables in order plus the type variables in scope."""

    tvars: tuple[str, ...] = ()
    vars: tuple[tuple[str, TffType], ...] = ()

    def lookup(self, name: str) -> Optional[TffType]:
        for x, ty in reversed(self.vars):
            if x == name:
                return ty
        return None

    def bind(self, name: str, ty: TffType) -> "TffContext":
        return TffContext(self.tvars, self.vars + ((name, ty),))

    def bind_tvar(self, name: str) -> "TffContext":
        return TffContext(self.tvars + (name,), self.vars)


# ---------------------------------------------------------------------------
# Errors


class TffError(Exception):
    pass


class UnknownConstructor(TffError):
    pass


class ArityMismatch(TffError):
    pass


class UnboundTypeVariable(TffError):
    pass


class UnknownSymbol(TffError):
    pass


class ArgTypeMismatch(TffError):
    pass


class EqTypeMismatch(TffError):
    pass


class NonAtomicLhs(TffError):
    pass


class DuplicateSymbol(TffError):
    pass


class RuleViolation(TffError):
    pass


class TheoryItemError(TffError):
    """Failure of one theory item, with its position."""

    def __init__(self, index: int, item: TheoryItem, cause: TffError):
        super().__init__(f"item {index} ({type(item).__name__}): {cause}")
        self.index = index
        self.item = item
        self.cause = cause


# ---------------------------------------------------------------------------
# Symbol table accumulated while checking a theory


class Table:
    def __init__(self) -> None:
        self.type_cons: dict[str, int] = {}
        self.funs: dict[str, FunDecl] = {}
        self.preds: dict[str, PredDecl] = {}
        self.axioms: dict[str, TffFormula] = {}
        self.exts: list[str] = []

    def declare(self, name: str, kind: str) -> None:
        if name in self.type_cons or name in self.funs or name in self.preds or name in self.axioms:
            raise DuplicateSymbol(f"symbol {name} declared twice")
        _ = kind


def table_of(thy: TffTheory) -> Table:
    """Symbol table of an already-checked theory."""
    tbl = Table()
    for item in thy.items:
        match item:
            case TypeCons(name=n, arity=m):
                tbl.type_cons[n] = m
            case FunDecl(name=n):
                tbl.funs[n] = item
            case PredDecl(name=n):
                tbl.preds[n] = item
            case Axiom(name=n, formula=phi):
                tbl.axioms[n] = phi
            case ExtDecl(name=n):
                tbl.exts.append(n)
            case _:
                pass
    return tbl


# ---------------------------------------------------------------------------
# Well-formedness


def wf_type(tbl: Table, tvars: Iterable[str], ty: TffType) -> None:
    """Check arities of constructors and scoping of type variables."""
    tvars = set(tvars)
    stack = [ty]
    while stack:
        match stack.pop():
            case TVar(name=a):
                if a not in tvars:
                    raise UnboundTypeVariable(f"type variable {a} is not in scope")
            case TCons(name=c, args=args):
                arity = tbl.type_cons.get(c)
                if arity is None:
                    raise UnknownConstructor(f"unknown type constructor {c}")
                if arity != len(args):
                    raise ArityMismatch(f"constructor {c} expects {arity} arguments, got {len(args)}")
                stack += args


def subst_type(ty: TffType, mapping: Mapping[str, TffType]) -> TffType:
    match ty:
        case TVar(name=a):
            return mapping.get(a, ty)
        case TCons(name=c, args=args):
            return TCons(c, tuple(subst_type(a, mapping) for a in args))
    raise TypeError(ty)


def infer_term(tbl: Table, ctx: TffContext, e: TffTerm) -> TffType:
    """Instantiate the declared scheme of the head symbol and check arguments."""
    match e:
        case Var(name=x):
            ty = ctx.lookup(x)
            if ty is None:
                raise UnknownSymbol(f"unbound term variable {x}")
            return ty
        case Fun(name=f, ty_args=ty_args, args=args):
            decl = tbl.funs.get(f)
            if decl is None:
                raise UnknownSymbol(f"unknown function symbol {f}")
            return _check_application(tbl, ctx, decl.tvars, decl.arg_types, ty_args, args, f, decl.result)
    raise TypeError(e)


def _check_application(
    tbl: Table,
    ctx: TffContext,
    tvars: tuple[str, ...],
    arg_types: tuple[TffType, ...],
    ty_args: tuple[TffType, ...],
    args: tuple[TffTerm, ...],
    name: str,
    result: Optional[TffType],
) -> Optional[TffType]:
    if len(ty_args) != len(tvars):
        raise ArityMismatch(f"{name} expects {len(tvars)} type arguments, got {len(ty_args)}")
    if len(args) != len(arg_types):
        raise ArityMismatch(f"{name} expects {len(arg_types)} arguments, got {len(args)}")
    for ty in ty_args:
        wf_type(tbl, ctx.tvars, ty)
    mapping = dict(zip(tvars, ty_args))
    for i, (arg, decl_ty) in enumerate(zip(args, arg_types)):
        expected = subst_type(decl_ty, mapping)
        actual = infer_term(tbl, ctx, arg)
        if actual != expected:
            raise ArgTypeMismatch(f"argument {i + 1} of {name}: expected {expected}, found {actual}")
    return subst_type(result, mapping) if result is not None else None


def wf_formula(tbl: Table, ctx: TffContext, phi: TffFormula) -> None:
    match phi:
        case Top() | Bottom():
            return
        case Not(body=b):
            wf_formula(tbl, ctx, b)
        case And(lhs=a, rhs=b) | Or(lhs=a, rhs=b) | Implies(lhs=a, rhs=b) | Iff(lhs=a, rhs=b):
            wf_formula(tbl, ctx, a)
            wf_formula(tbl, ctx, b)
        case Eq(ty=ty, lhs=a, rhs=b):
            wf_type(tbl, ctx.tvars, ty)
            ta = infer_term(tbl, ctx, a)
            tb = infer_term(tbl, ctx, b)
            if ta != ty or tb != ty:
                raise EqTypeMismatch(f"equality at {ty} applied to terms of types {ta} and {tb}")
        case Pred(name=p, ty_args=ty_args, args=args):
            decl = tbl.preds.get(p)
            if decl is None:
                raise UnknownSymbol(f"unknown predicate symbol {p}")
            _check_application(tbl, ctx, decl.tvars, decl.arg_types, ty_args, args, p, None)
        case Forall(var=x, ty=ty, body=b) | Exists(var=x, ty=ty, body=b):
            wf_type(tbl, ctx.tvars, ty)
            wf_formula(tbl, ctx.bind(x, ty), b)
        case ForallType(tvar=a, body=b) | ExistsType(tvar=a, body=b):
            wf_formula(tbl, ctx.bind_tvar(a), b)
        case _:
            raise TypeError(phi)


def wf_theory(thy: TffTheory) -> Table:
    """Check every item against the prefix theory before it.

    Returns the symbol table; raises `TheoryItemError` for the first
    failing item.  Symbol names are unique across all namespaces so the
    kernel embedding stays injective.
    """
    tbl = Table()
    for index, item in enumerate(thy.items):
        try:
            _wf_item(tbl, item)
        except TffError as e:
            raise TheoryItemError(index, item, e) from e
    return tbl


def _wf_item(tbl: Table, item: TheoryItem) -> None:
    match item:
        case TypeCons(name=n, arity=m):
            tbl.declare(n, "type constructor")
            if m < 0:
                raise ArityMismatch("negative arity")
            tbl.type_cons[n] = m
        case FunDecl(name=n, tvars=tvs, arg_types=args, result=res):
            tbl.declare(n, "function")
            _check_scheme_tvars(tvs)
            for ty in args + (res,):
                wf_type(tbl, tvs, ty)
            tbl.funs[n] = item
        case PredDecl(name=n, tvars=tvs, arg_types=args):
            tbl.declare(n, "predicate")
            _check_scheme_tvars(tvs)
            for ty in args:
                wf_type(tbl, tvs, ty)
            tbl.preds[n] = item
        case Axiom(name=n, formula=phi):
            tbl.declare(n, "axiom")
            wf_formula(tbl, TffContext(), phi)
            tbl.axioms[n] = phi
        case TermRule(tvars=tvs, ctx=ctx, lhs=l, rhs=r):
            context = _rule_context(tbl, tvs, ctx)
            lt = infer_term(tbl, context, l)
            rt = infer_term(tbl, context, r)
            if lt != rt:
                raise RuleViolation(f"rule sides have types {lt} and {rt}")
            _check_rule_variables(term_vars(l), term_vars(r), set(x for x, _ in ctx))
            _check_rule_tvars(term_tvars(l), term_tvars(r), set(tvs))
        case PropRule(tvars=tvs, ctx=ctx, lhs=l, rhs=r):
            if not isinstance(l, (Pred, Eq)):
                raise NonAtomicLhs(f"proposition rule left-hand side must be atomic, found {type(l).__name__}")
            context = _rule_context(tbl, tvs, ctx)
            wf_formula(tbl, context, l)
            wf_formula(tbl, context, r)
            _check_rule_variables(formula_vars(l), formula_vars(r), set(x for x, _ in ctx))
            _check_rule_tvars(formula_tvars(l), formula_tvars(r), set(tvs))
        case ExtDecl(name=n):
            tbl.exts.append(n)
        case _:
            raise TffError(f"unknown theory item {item!r}")


def _check_scheme_tvars(tvs: tuple[str, ...]) -> None:
    if len(set(tvs)) != len(tvs):
        raise DuplicateSymbol("duplicate type variables in scheme")


def _rule_context(tbl: Table, tvs: tuple[str, ...], ctx: tuple[tuple[str, TffType], ...]) -> TffContext:
    _check_scheme_tvars(tvs)
    out = TffContext(tvars=tvs)
    seen: set[str] = set()
    for x, ty in ctx:
        if x in seen:
            raise DuplicateSymbol(f"duplicate context variable {x}")
        seen.add(x)
        wf_type(tbl, tvs, ty)
        out = out.bind(x, ty)
    return out


def _check_rule_variables(lhs_vars: frozenset[str], rhs_vars: frozenset[str], delta: set[str]) -> None:
    if not lhs_vars <= delta:
        raise RuleViolation(f"left-hand side variables {sorted(lhs_vars - delta)} not in the context")
    if not rhs_vars <= lhs_vars:
        raise RuleViolation(f"right-hand side variables {sorted(rhs_vars - lhs_vars)} not on the left")


def _check_rule_tvars(lhs_tvs: frozenset[str], rhs_tvs: frozenset[str], tvs: set[str]) -> None:
    if not lhs_tvs <= tvs:
        raise RuleViolation(f"left-hand side type variables {sorted(lhs_tvs - tvs)} not in the context")
    if not rhs_tvs <= lhs_tvs:
        raise RuleViolation(f"right-hand side type variables {sorted(rhs_tvs - lhs_tvs)} not on the left")


# ---------------------------------------------------------------------------
# Free variables and substitution


def type_tvars(ty: TffType) -> frozenset[str]:
    match ty:
        case TVar(name=a):
            return frozenset((a,))
        case TCons(args=args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= type_tvars(a)
            return out
    raise TypeError(ty)


def term_vars(e: TffTerm) -> frozenset[str]:
    match e:
        case Var(name=x):
            return frozenset((x,))
        case Fun(args=args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= term_vars(a)
            return out
    raise TypeError(e)


def term_tvars(e: TffTerm) -> frozenset[str]:
    match e:
        case Var():
            return frozenset()
        case Fun(ty_args=tys, args=args):
            out: frozenset[str] = frozenset()
            for ty in tys:
                out |= type_tvars(ty)
            for a in args:
                out |= term_tvars(a)
            return out
    raise TypeError(e)


def formula_vars(phi: TffFormula) -> frozenset[str]:
    match phi:
        case Top() | Bottom():
            return frozenset()
        case Not(body=b):
            return formula_vars(b)
        case And(lhs=a, rhs=b) | Or(lhs=a, rhs=b) | Implies(lhs=a, rhs=b) | Iff(lhs=a, rhs=b):
            return formula_vars(a) | formula_vars(b)
        case Eq(lhs=a, rhs=b):
            return term_vars(a) | term_vars(b)
        case Pred(args=args):
            out: frozenset[str] = frozenset()
            for a in args:
                out |= term_vars(a)
            return out
        case Forall(var=x, body=b) | Exists(var=x, body=b):
            return formula_vars(b) - {x}
        case ForallType(body=b) | ExistsType(body=b):
            return formula_vars(b)
    raise TypeError(phi)


def formula_tvars(phi: TffFormula) -> frozenset[str]:
    match phi:
        case Top() | Bottom():
            return frozenset()
        case Not(body=b):
            return formula_tvars(b)
        case And(lhs=a, rhs=b) | Or(lhs=a, rhs=b) | Implies(lhs=a, rhs=b) | Iff(lhs=a, rhs=b):
            return formula_tvars(a) | formula_tvars(b)
        case Eq(ty=ty, lhs=a, rhs=b):
            return type_tvars(ty) | term_tvars(a) | term_tvars(b)
        case Pred(ty_args=tys, args=args):
            out: frozenset[str] = frozenset()
            for ty in tys:
                out |= type_tvars(ty)
            for a in args:
                out |= term_tvars(a)
            return out
        case Forall(ty=ty, body=b) | Exists(ty=ty, body=b):
            return type_tvars(ty) | formula_tvars(b)
        case ForallType(tvar=a, body=b) | ExistsType(tvar=a, body=b):
            return formula_tvars(b) - {a}
    raise TypeError(phi)


_rename_counter = itertools.count()


def _rename(base: str) -> str:
    return f"{base}'{next(_rename_counter)}"


def subst_term(e: TffTerm, mapping: Mapping[str, TffTerm]) -> TffTerm:
    match e:
        case Var(name=x):
            return mapping.get(x, e)
        case Fun(name=f, ty_args=tys, args=args):
            return Fun(f, tys, tuple(subst_term(a, mapping) for a in args))
    raise TypeError(e)


def subst_formula(phi: TffFormula, mapping: Mapping[str, TffTerm]) -> TffFormula:
    """Capture-avoiding substitution of term variables in a formula."""
    if not mapping:
        return phi
    match phi:
        case Top() | Bottom():
            return phi
        case Not(body=b):
            return Not(subst_formula(b, mapping))
        case And(lhs=a, rhs=b):
            return And(subst_formula(a, mapping), subst_formula(b, mapping))
        case Or(lhs=a, rhs=b):
            return Or(subst_formula(a, mapping), subst_formula(b, mapping))
        case Implies(lhs=a, rhs=b):
            return Implies(subst_formula(a, mapping), subst_formula(b, mapping))
        case Iff(lhs=a, rhs=b):
            return Iff(subst_formula(a, mapping), subst_formula(b, mapping))
        case Eq(ty=ty, lhs=a, rhs=b):
            return Eq(ty, subst_term(a, mapping), subst_term(b, mapping))
        case Pred(name=p, ty_args=tys, args=args):
            return Pred(p, tys, tuple(subst_term(a, mapping) for a in args))
        case Forall(var=x, ty=ty, body=b):
            x, b, mapping = _avoid_capture(x, b, mapping)
            return Forall(x, ty, subst_formula(b, mapping))
        case Exists(var=x, ty=ty, body=b):
            x, b, mapping = _avoid_capture(x, b, mapping)
            return Exists(x, ty, subst_formula(b, mapping))
        case ForallType(tvar=a, body=b):
            return ForallType(a, subst_formula(b, mapping))
        case ExistsType(tvar=a, body=b):
            return ExistsType(a, subst_formula(b, mapping))
    raise TypeError(phi)


def _avoid_capture(
    x: str, body: TffFormula, mapping: Mapping[str, TffTerm]
) -> tuple[str, TffFormula, Mapping[str, TffTerm]]:
    free = formula_vars(body)
    mapping = {k: v for k, v in mapping.items() if k != x and k in free}
    if not mapping:
        return x, body, mapping
    value_vars: set[str] = set()
    for v in mapping.values():
        value_vars |= term_vars(v)
    if x in value_vars:
        fresh = _rename(x)
        body = subst_formula(body, {x: Var(fresh)})
        x = fresh
    return x, body, mapping


def subst_type_in_term(e: TffTerm, mapping: Mapping[str, TffType]) -> TffTerm:
    match e:
        case Var():
            return e
        case Fun(name=f, ty_args=tys, args=args):
            return Fun(
                f,
                tuple(subst_type(ty, mapping) for ty in tys),
                tuple(subst_type_in_term(a, mapping) for a in args),
            )
    raise TypeError(e)


def subst_type_in_formula(phi: TffFormula, mapping: Mapping[str, TffType]) -> TffFormula:
    """Capture-avoiding substitution of type variables in a formula."""
    if not mapping:
        return phi
    match phi:
        case Top() | Bottom():
            return phi
        case Not(body=b):
            return Not(subst_type_in_formula(b, mapping))
        case And(lhs=a, rhs=b):
            return And(subst_type_in_formula(a, mapping), subst_type_in_formula(b, mapping))
        case Or(lhs=a, rhs=b):
            return Or(subst_type_in_formula(a, mapping), subst_type_in_formula(b, mapping))
        case Implies(lhs=a, rhs=b):
            return Implies(subst_type_in_formula(a, mapping), subst_type_in_formula(b, mapping))
        case Iff(lhs=a, rhs=b):
            return Iff(subst_type_in_formula(a, mapping), subst_type_in_formula(b, mapping))
        case Eq(ty=ty, lhs=a, rhs=b):
            return Eq(subst_type(ty, mapping), subst_type_in_term(a, mapping), subst_type_in_term(b, mapping))
        case Pred(name=p, ty_args=tys, args=args):
            return Pred(
                p,
                tuple(subst_type(ty, mapping) for ty in tys),
                tuple(subst_type_in_term(a, mapping) for a in args),
            )
        case Forall(var=x, ty=ty, body=b):
            return Forall(x, subst_type(ty, mapping), subst_type_in_formula(b, mapping))
        case Exists(var=x, ty=ty, body=b):
            return Exists(x, subst_type(ty, mapping), subst_type_in_formula(b, mapping))
        case ForallType(tvar=a, body=b):
            a, b, mapping = _avoid_tvar_capture(a, b, mapping)
            return ForallType(a, subst_type_in_formula(b, mapping))
        case ExistsType(tvar=a, body=b):
            a, b, mapping = _avoid_tvar_capture(a, b, mapping)
            return ExistsType(a, subst_type_in_formula(b, mapping))
    raise TypeError(phi)


def _avoid_tvar_capture(
    a: str, body: TffFormula, mapping: Mapping[str, TffType]
) -> tuple[str, TffFormula, Mapping[str, TffType]]:
    free = formula_tvars(body)
    mapping = {k: v for k, v in mapping.items() if k != a and k in free}
    if not mapping:
        return a, body, mapping
    value_tvars: set[str] = set()
    for v in mapping.values():
        value_tvars |= type_tvars(v)
    if a in value_tvars:
        fresh = _rename(a)
        body = subst_type_in_formula(body, {a: TVar(fresh)})
        a = fresh
    return a, body, mapping


# ---------------------------------------------------------------------------
# S-expression reading and writing (.tffx)


class FormatError(TffError):
    pass


def theory_from_sexp(sx: object) -> TffTheory:
    if not (isinstance(sx, list) and len(sx) >= 2 and sx[0] == "theory" and isinstance(sx[1], str)):
        raise FormatError("expected (theory NAME item ...)")
    cons: set[str] = set()
    items: list[TheoryItem] = []
    for raw in sx[2:]:
        item = _item_from_sexp(raw, cons)
        if isinstance(item, TypeCons):
            cons.add(item.name)
        items.append(item)
    return TffTheory(sx[1], tuple(items))


def parse_theory(text: str) -> TffTheory:
    """Read a `.tffx` theory file."""
    return theory_from_sexp(sexp.loads_one(text))


def _item_from_sexp(sx: object, cons: set[str]) -> TheoryItem:
    if not (isinstance(sx, list) and sx and isinstance(sx[0], str)):
        raise FormatError(f"bad theory item {sexp.dumps(sx)}")
    tag = sx[0]
    try:
        if tag == "type":
            _expect_len(sx, 3)
            return TypeCons(_symbol(sx[1]), _int(sx[2]))
        if tag == "fun":
            _expect_len(sx, 5)
            tvs = tuple(_symbol(a) for a in _list(sx[2]))
            scope = set(tvs)
            return FunDecl(
                _symbol(sx[1]),
                tvs,
                tuple(type_from_sexp(t, scope, cons) for t in _list(sx[3])),
                type_from_sexp(sx[4], scope, cons),
            )
        if tag == "pred":
            _expect_len(sx, 4)
            tvs = tuple(_symbol(a) for a in _list(sx[2]))
            scope = set(tvs)
            return PredDecl(
                _symbol(sx[1]),
                tvs,
                tuple(type_from_sexp(t, scope, cons) for t in _list(sx[3])),
            )
        if tag == "axiom":
            _expect_len(sx, 3)
            return Axiom(_symbol(sx[1]), formula_from_sexp(sx[2], cons))
        if tag in ("term-rule", "prop-rule"):
            _expect_len(sx, 5)
            tvs = tuple(_symbol(a) for a in _list(sx[1]))
            scope = set(tvs)
            ctx = tuple(
                (_symbol(_list(b)[0]), type_from_sexp(_list(b)[1], scope, cons)) for b in _list(sx[2])
            )
            if tag == "term-rule":
                return TermRule(tvs, ctx, term_from_sexp(sx[3], cons), term_from_sexp(sx[4], cons))
            return PropRule(tvs, ctx, formula_from_sexp(sx[3], cons), formula_from_sexp(sx[4], cons))
        if tag == "ext":
            _expect_len(sx, 2)
            return ExtDecl(_symbol(sx[1]))
    except FormatError:
        raise
    raise FormatError(f"unknown theory item tag {tag!r}")


def _expect_len(sx: list, n: int) -> None:
    if len(sx) != n:
        raise FormatError(f"{sx[0]} expects {n - 1} fields: {sexp.dumps(sx)}")


def _symbol(x: object) -> str:
    if not isinstance(x, str):
        raise FormatError(f"expected a symbol, found {sexp.dumps(x)}")
    return x


def _int(x: object) -> int:
    if not isinstance(x, int):
        raise FormatError(f"expected an integer, found {sexp.dumps(x)}")
    return x


def _list(x: object) -> list:
    if not isinstance(x, list):
        raise FormatError(f"expected a list, found {sexp.dumps(x)}")
    return x


def type_from_sexp(sx: object, tvars: set[str], cons: set[str]) -> TffType:
    """A bare symbol is a type variable unless it names a declared constructor."""
    if isinstance(sx, str):
        if sx in tvars or sx not in cons:
            return TVar(sx)
        return TCons(sx, ())
    if isinstance(sx, list) and sx and isinstance(sx[0], str):
        return TCons(sx[0], tuple(type_from_sexp(a, tvars, cons) for a in sx[1:]))
    raise FormatError(f"bad type {sexp.dumps(sx)}")


def term_from_sexp(sx: object, cons: set[str]) -> TffTerm:
    if isinstance(sx, str):
        return Var(sx)
    if isinstance(sx, list) and len(sx) >= 2 and isinstance(sx[0], str) and isinstance(sx[1], list):
        ty_args = tuple(type_from_sexp(t, set(), cons) for t in sx[1])
        args = tuple(term_from_sexp(a, cons) for a in sx[2:])
        return Fun(sx[0], ty_args, args)
    raise FormatError(f"bad term {sexp.dumps(sx)}")


_CONNECTIVES = {"and": And, "or": Or, "imp": Implies, "iff": Iff}


def formula_from_sexp(sx: object, cons: set[str]) -> TffFormula:
    if not (isinstance(sx, list) and sx and isinstance(sx[0], str)):
        raise FormatError(f"bad formula {sexp.dumps(sx)}")
    tag = sx[0]
    if tag == "top":
        _expect_len(sx, 1)
        return Top()
    if tag == "bot":
        _expect_len(sx, 1)
        return Bottom()
    if tag == "not":
        _expect_len(sx, 2)
        return Not(formula_from_sexp(sx[1], cons))
    if tag in _CONNECTIVES:
        _expect_len(sx, 3)
        return _CONNECTIVES[tag](formula_from_sexp(sx[1], cons), formula_from_sexp(sx[2], cons))
    if tag == "eq":
        _expect_len(sx, 4)
        return Eq(
            type_from_sexp(sx[1], set(), cons),
            term_from_sexp(sx[2], cons),
            term_from_sexp(sx[3], cons),
        )
    if tag == "pred":
        if len(sx) < 3:
            raise FormatError(f"pred expects a name and type-argument list: {sexp.dumps(sx)}")
        ty_args = tuple(type_from_sexp(t, set(), cons) for t in _list(sx[2]))
        return Pred(_symbol(sx[1]), ty_args, tuple(term_from_sexp(a, cons) for a in sx[3:]))
    if tag in ("forall", "exists"):
        _expect_len(sx, 4)
        cls = Forall if tag == "forall" else Exists
        return cls(_symbol(sx[1]), type_from_sexp(sx[2], set(), cons), formula_from_sexp(sx[3], cons))
    if tag in ("foralltype", "existstype"):
        _expect_len(sx, 3)
        cls = ForallType if tag == "foralltype" else ExistsType
        return cls(_symbol(sx[1]), formula_from_sexp(sx[2], cons))
    raise FormatError(f"unknown formula tag {tag!r}")


def type_to_sexp(ty: TffType, cons: set[str]) -> object:
    match ty:
        case TVar(name=a):
            return a
        case TCons(name=c, args=args):
            if not args and c in cons:
                return c
            return [c] + [type_to_sexp(a, cons) for a in args]
    raise TypeError(ty)


def term_to_sexp(e: TffTerm, cons: set[str]) -> object:
    match e:
        case Var(name=x):
            return x
        case Fun(name=f, ty_args=tys, args=args):
            return [f, [type_to_sexp(t, cons) for t in tys]] + [term_to_sexp(a, cons) for a in args]
    raise TypeError(e)


def formula_to_sexp(phi: TffFormula, cons: set[str]) -> object:
    match phi:
        case Top():
            return ["top"]
        case Bottom():
            return ["bot"]
        case Not(body=b):
            return ["not", formula_to_sexp(b, cons)]
        case And(lhs=a, rhs=b):
            return ["and", formula_to_sexp(a, cons), formula_to_sexp(b, cons)]
        case Or(lhs=a, rhs=b):
            return ["or", formula_to_sexp(a, cons), formula_to_sexp(b, cons)]
        case Implies(lhs=a, rhs=b):
            return ["imp", formula_to_sexp(a, cons), formula_to_sexp(b, cons)]
        case Iff(lhs=a, rhs=b):
            return ["iff", formula_to_sexp(a, cons), formula_to_sexp(b, cons)]
        case Eq(ty=ty, lhs=a, rhs=b):
            return ["eq", type_to_sexp(ty, cons), term_to_sexp(a, cons), term_to_sexp(b, cons)]
        case Pred(name=p, ty_args=tys, args=args):
            return ["pred", p, [type_to_sexp(t, cons) for t in tys]] + [term_to_sexp(a, cons) for a in args]
        case Forall(var=x, ty=ty, body=b):
            return ["forall", x, type_to_sexp(ty, cons), formula_to_sexp(b, cons)]
        case Exists(var=x, ty=ty, body=b):
            return ["exists", x, type_to_sexp(ty, cons), formula_to_sexp(b, cons)]
        case ForallType(tvar=a, body=b):
            return ["foralltype", a, formula_to_sexp(b, cons)]
        case ExistsType(tvar=a, body=b):
            return ["existstype", a, formula_to_sexp(b, cons)]
    raise TypeError(phi)


def theory_to_sexp(thy: TffTheory) -> list:
    cons = {item.name for item in thy.items if isinstance(item, TypeCons)}
    out: list = ["theory", thy.name]
    for item in thy.items:
        match item:
            case TypeCons(name=n, arity=m):
                out.append(["type", n, m])
            case FunDecl(name=n, tvars=tvs, arg_types=args, result=res):
                out.append(
                    ["fun", n, list(tvs), [type_to_sexp(t, cons) for t in args], type_to_sexp(res, cons)]
                )
            case PredDecl(name=n, tvars=tvs, arg_types=args):
                out.append(["pred", n, list(tvs), [type_to_sexp(t, cons) for t in args]])
            case Axiom(name=n, formula=phi):
                out.append(["axiom", n, formula_to_sexp(phi, cons)])
            case TermRule(tvars=tvs, ctx=ctx, lhs=l, rhs=r):
                out.append(
                    [
                        "term-rule",
                        list(tvs),
                        [[x, type_to_sexp(ty, cons)] for x, ty in ctx],
                        term_to_sexp(l, cons),
                        term_to_sexp(r, cons),
                    ]
                )
            case PropRule(tvars=tvs, ctx=ctx, lhs=l, rhs=r):
                out.append(
                    [
                        "prop-rule",
                        list(tvs),
                        [[x, type_to_sexp(ty, cons)] for x, ty in ctx],
                        formula_to_sexp(l, cons),
                        formula_to_sexp(r, cons),
                    ]
                )
            case ExtDecl(name=n):
                out.append(["ext", n])
    return out


def print_theory(thy: TffTheory) -> str:
    body = theory_to_sexp(thy)
    lines = [f"(theory {thy.name}"]
    for item in body[2:]:
        lines.append("  " + sexp.dumps(item))
    return "\n".join(lines) + ")\n"
