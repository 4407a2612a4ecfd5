"""Sequent-style proof trees and their compilation to kernel terms.

A proof tree refutes a set of hypotheses: every node concludes a sequent
`Gamma, [C1], ..., [Cp] |- bot`, where the bracketed formulas are the
hypotheses the rule consumes, written as they appear in the sequent (the
kernel's conversion bridges the gap between a written hypothesis and the
shape the rule expects).  Each premise introduces new hypotheses, and
existential-style rules introduce fresh eigenvariables.

`rules_prelude` produces the `rules` module: one constant per inference
rule, declared abstractly in deep mode and given rewrite definitions in
shallow mode, where the law of excluded middle is the only axiom.
`check_certificate` compiles a tree against a theory and runs the kernel
over the result.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from . import embed, kernel, sexp, signature, tff
from .dkparse import Decl, Def, Entry, Rule
from .embed import (
    EXISTS,
    EXISTSTYPE,
    FALSE,
    FORALL,
    FORALLTYPE,
    PROP,
    TRUE,
    TYPE_C,
    neg,
    prf,
    term,
)
from .terms import App, Const, FVar, KTerm, Lam, abstract, app, arrow, fresh_name, lam, pi

# ---------------------------------------------------------------------------
# Rules


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class NotTop:
    pass


@dataclass(frozen=True)
class Ax:
    p: tff.TffFormula


@dataclass(frozen=True)
class Cut:
    p: tff.TffFormula


@dataclass(frozen=True)
class Neq:
    ty: tff.TffType
    t: tff.TffTerm


@dataclass(frozen=True)
class Sym:
    ty: tff.TffType
    t: tff.TffTerm
    u: tff.TffTerm


@dataclass(frozen=True)
class NotNot:
    p: tff.TffFormula


@dataclass(frozen=True)
class And:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class Or:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class Imp:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class Iff:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class NotAnd:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class NotOr:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class NotImp:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class NotIff:
    p: tff.TffFormula
    q: tff.TffFormula


@dataclass(frozen=True)
class Exists:
    ty: tff.TffType
    var: str
    body: tff.TffFormula
    const: str  # fresh constant bound in the premise


@dataclass(frozen=True)
class Forall:
    ty: tff.TffType
    var: str
    body: tff.TffFormula
    witness: tff.TffTerm  # closed instantiation


@dataclass(frozen=True)
class NotExists:
    ty: tff.TffType
    var: str
    body: tff.TffFormula
    witness: tff.TffTerm


@dataclass(frozen=True)
class NotForall:
    ty: tff.TffType
    var: str
    body: tff.TffFormula
    const: str


@dataclass(frozen=True)
class ExistsType:
    tvar: str
    body: tff.TffFormula
    fresh_type: str


@dataclass(frozen=True)
class ForallType:
    tvar: str
    body: tff.TffFormula
    witness: tff.TffType


@dataclass(frozen=True)
class NotExistsType:
    tvar: str
    body: tff.TffFormula
    witness: tff.TffType


@dataclass(frozen=True)
class NotForallType:
    tvar: str
    body: tff.TffFormula
    fresh_type: str


@dataclass(frozen=True)
class Pred:
    name: str
    ty_args: tuple[tff.TffType, ...]
    lhs_args: tuple[tff.TffTerm, ...]
    rhs_args: tuple[tff.TffTerm, ...]
    eq_types: tuple[tff.TffType, ...]


@dataclass(frozen=True)
class Fun:
    name: str
    ty_args: tuple[tff.TffType, ...]
    lhs_args: tuple[tff.TffTerm, ...]
    rhs_args: tuple[tff.TffTerm, ...]
    eq_types: tuple[tff.TffType, ...]
    result_ty: tff.TffType


@dataclass(frozen=True)
class Subst:
    ty: tff.TffType
    var: str
    body: tff.TffFormula
    t: tff.TffTerm
    u: tff.TffTerm


@dataclass(frozen=True)
class AbsArg:
    """Predicate abstraction argument `lambda var : ty. body`."""

    var: str
    ty: tff.TffType
    body: tff.TffFormula


@dataclass(frozen=True)
class FormulaArg:
    formula: tff.TffFormula


@dataclass(frozen=True)
class TermArg:
    term: tff.TffTerm


@dataclass(frozen=True)
class TypeArg:
    ty: tff.TffType


ExtArg = Union[AbsArg, FormulaArg, TermArg, TypeArg]


@dataclass(frozen=True)
class Ext:
    name: str
    args: tuple[ExtArg, ...]
    conclusions: tuple[tff.TffFormula, ...]
    hyp_blocks: tuple[tuple[tff.TffFormula, ...], ...]


LLRule = Union[
    Bot, NotTop, Ax, Cut, Neq, Sym, NotNot, And, Or, Imp, Iff, NotAnd, NotOr,
    NotImp, NotIff, Exists, Forall, NotExists, NotForall, ExistsType,
    ForallType, NotExistsType, NotForallType, Pred, Fun, Subst, Ext,
]


@dataclass(frozen=True)
class LLSequent:
    """Hypotheses refuted by a proof; the succedent is always bottom."""

    hypotheses: tuple[tff.TffFormula, ...]


@dataclass(frozen=True)
class LLProof:
    rule: LLRule
    premises: tuple["LLProof", ...] = ()
    # Consumed hypotheses as written in the sequent, when they differ
    # from the shapes implied by the rule parameters (congruence).
    concls: Optional[tuple[tff.TffFormula, ...]] = None

    def conclusion_hyps(self) -> tuple[tff.TffFormula, ...]:
        return self.concls if self.concls is not None else tuple(rule_conclusions(self.rule))

    def conclusion(self, ambient: tuple[tff.TffFormula, ...] = ()) -> LLSequent:
        return LLSequent(tuple(ambient) + self.conclusion_hyps())


class CertificateError(Exception):
    """Rejection of a certificate, localized to a proof-tree node."""

    def __init__(self, path: tuple[int, ...], message: str):
        super().__init__(f"at node {list(path)}: {message}")
        self.path = path
        self.reason = message


class MissingHypothesis(CertificateError):
    pass


class FreshnessViolation(CertificateError):
    pass


class UnregisteredExtRule(CertificateError):
    pass


# ---------------------------------------------------------------------------
# Rule schemas: consumed hypotheses, premise hypotheses, eigenvariables


def _neq(ty: tff.TffType, t: tff.TffTerm, u: tff.TffTerm) -> tff.TffFormula:
    return tff.Not(tff.Eq(ty, t, u))


def _inst(body: tff.TffFormula, var: str, value: tff.TffTerm) -> tff.TffFormula:
    return tff.subst_formula(body, {var: value})


def _inst_ty(body: tff.TffFormula, tvar: str, value: tff.TffType) -> tff.TffFormula:
    return tff.subst_type_in_formula(body, {tvar: value})


def rule_conclusions(rule: LLRule) -> list[tff.TffFormula]:
    """Default consumed hypotheses, as implied by the rule parameters."""
    match rule:
        case Bot():
            return [tff.Bottom()]
        case NotTop():
            return [tff.Not(tff.Top())]
        case Ax(p=p):
            return [p, tff.Not(p)]
        case Cut():
            return []
        case Neq(ty=ty, t=t):
            return [_neq(ty, t, t)]
        case Sym(ty=ty, t=t, u=u):
            return [tff.Eq(ty, t, u), _neq(ty, u, t)]
        case NotNot(p=p):
            return [tff.Not(tff.Not(p))]
        case And(p=p, q=q):
            return [tff.And(p, q)]
        case Or(p=p, q=q):
            return [tff.Or(p, q)]
        case Imp(p=p, q=q):
            return [tff.Implies(p, q)]
        case Iff(p=p, q=q):
            return [tff.Iff(p, q)]
        case NotAnd(p=p, q=q):
            return [tff.Not(tff.And(p, q))]
        case NotOr(p=p, q=q):
            return [tff.Not(tff.Or(p, q))]
        case NotImp(p=p, q=q):
            return [tff.Not(tff.Implies(p, q))]
        case NotIff(p=p, q=q):
            return [tff.Not(tff.Iff(p, q))]
        case Exists(ty=ty, var=x, body=b):
            return [tff.Exists(x, ty, b)]
        case Forall(ty=ty, var=x, body=b):
            return [tff.Forall(x, ty, b)]
        case NotExists(ty=ty, var=x, body=b):
            return [tff.Not(tff.Exists(x, ty, b))]
        case NotForall(ty=ty, var=x, body=b):
            return [tff.Not(tff.Forall(x, ty, b))]
        case ExistsType(tvar=a, body=b):
            return [tff.ExistsType(a, b)]
        case ForallType(tvar=a, body=b):
            return [tff.ForallType(a, b)]
        case NotExistsType(tvar=a, body=b):
            return [tff.Not(tff.ExistsType(a, b))]
        case NotForallType(tvar=a, body=b):
            return [tff.Not(tff.ForallType(a, b))]
        case Pred(name=p, ty_args=tys, lhs_args=ts, rhs_args=us):
            return [tff.Pred(p, tys, ts), tff.Not(tff.Pred(p, tys, us))]
        case Fun(name=f, ty_args=tys, lhs_args=ts, rhs_args=us, result_ty=res):
            return [_neq(res, tff.Fun(f, tys, ts), tff.Fun(f, tys, us))]
        case Subst(ty=ty, var=x, body=b, t=t):
            return [_inst(b, x, t)]
        case Ext(conclusions=cs):
            return list(cs)
    raise TypeError(rule)


def rule_premise_hyps(rule: LLRule) -> list[list[tff.TffFormula]]:
    """Hypotheses each premise introduces, in binding order."""
    match rule:
        case Bot() | NotTop() | Ax() | Neq() | Sym():
            return []
        case Cut(p=p):
            return [[p], [tff.Not(p)]]
        case NotNot(p=p):
            return [[p]]
        case And(p=p, q=q):
            return [[p, q]]
        case Or(p=p, q=q):
            return [[p], [q]]
        case Imp(p=p, q=q):
            return [[tff.Not(p)], [q]]
        case Iff(p=p, q=q):
            return [[tff.Not(p), tff.Not(q)], [p, q]]
        case NotAnd(p=p, q=q):
            return [[tff.Not(p)], [tff.Not(q)]]
        case NotOr(p=p, q=q):
            return [[tff.Not(p), tff.Not(q)]]
        case NotImp(p=p, q=q):
            return [[p, tff.Not(q)]]
        case NotIff(p=p, q=q):
            return [[tff.Not(p), q], [p, tff.Not(q)]]
        case Exists(var=x, body=b, const=c):
            return [[_inst(b, x, tff.Var(c))]]
        case Forall(var=x, body=b, witness=t):
            return [[_inst(b, x, t)]]
        case NotExists(var=x, body=b, witness=t):
            return [[tff.Not(_inst(b, x, t))]]
        case NotForall(var=x, body=b, const=c):
            return [[tff.Not(_inst(b, x, tff.Var(c)))]]
        case ExistsType(tvar=a, body=b, fresh_type=f):
            return [[_inst_ty(b, a, tff.TVar(f))]]
        case ForallType(tvar=a, body=b, witness=w):
            return [[_inst_ty(b, a, w)]]
        case NotExistsType(tvar=a, body=b, witness=w):
            return [[tff.Not(_inst_ty(b, a, w))]]
        case NotForallType(tvar=a, body=b, fresh_type=f):
            return [[tff.Not(_inst_ty(b, a, tff.TVar(f)))]]
        case Pred(lhs_args=ts, rhs_args=us, eq_types=tys):
            return [[_neq(ty, t, u)] for ty, t, u in zip(tys, ts, us)]
        case Fun(lhs_args=ts, rhs_args=us, eq_types=tys):
            return [[_neq(ty, t, u)] for ty, t, u in zip(tys, ts, us)]
        case Subst(ty=ty, var=x, body=b, t=t, u=u):
            return [[_neq(ty, t, u)], [_inst(b, x, u)]]
        case Ext(hyp_blocks=blocks):
            return [list(block) for block in blocks]
    raise TypeError(rule)


def rule_eigenvars(rule: LLRule) -> list[list[tuple[str, Optional[tff.TffType]]]]:
    """Per premise: eigenvariables bound before the hypotheses.

    A `None` type marks a type eigenvariable.
    """
    n = len(rule_premise_hyps(rule))
    out: list[list[tuple[str, Optional[tff.TffType]]]] = [[] for _ in range(n)]
    match rule:
        case Exists(ty=ty, const=c) | NotForall(ty=ty, const=c):
            out[0] = [(c, ty)]
        case ExistsType(fresh_type=f) | NotForallType(fresh_type=f):
            out[0] = [(f, None)]
        case _:
            pass
    return out


# ---------------------------------------------------------------------------
# Extension rule registry


@dataclass(frozen=True)
class ExtRuleSpec:
    """Shape of a registered extension deduction rule.

    `const_basename` is declared in the theory's module (its type comes
    from the same registration, see `embed.EXT_CONSTANTS`); the two
    builders give default conclusions and premise hypothesis blocks from
    the node's arguments.
    """

    name: str
    const_basename: str
    arg_kinds: tuple[str, ...]
    n_premises: int
    default_conclusions: Callable[[tuple[ExtArg, ...]], tuple[tff.TffFormula, ...]]
    default_blocks: Callable[[tuple[ExtArg, ...]], tuple[tuple[tff.TffFormula, ...], ...]]


def _bool_case_defaults(case_exists: bool):
    true_t = tff.Fun("true", (), ())
    false_t = tff.Fun("false", (), ())

    def concls(args: tuple[ExtArg, ...]) -> tuple[tff.TffFormula, ...]:
        p = args[0]
        assert isinstance(p, AbsArg)
        quantified = tff.Forall(p.var, p.ty, p.body) if not case_exists else tff.Exists(p.var, p.ty, p.body)
        return (tff.Not(quantified),) if not case_exists else (quantified,)

    def blocks(args: tuple[ExtArg, ...]) -> tuple[tuple[tff.TffFormula, ...], ...]:
        p = args[0]
        assert isinstance(p, AbsArg)
        def at(v: tff.TffTerm) -> tff.TffFormula:
            inst = _inst(p.body, p.var, v)
            return inst if case_exists else tff.Not(inst)
        return ((at(true_t),), (at(false_t),))

    return concls, blocks


_nf_concls, _nf_blocks = _bool_case_defaults(case_exists=False)
_ex_concls, _ex_blocks = _bool_case_defaults(case_exists=True)

EXT_REGISTRY: dict[str, ExtRuleSpec] = {
    "bool-case-notforall": ExtRuleSpec(
        "bool-case-notforall", "R_bool_case_nf", ("abs",), 2, _nf_concls, _nf_blocks
    ),
    "bool-case-exists": ExtRuleSpec(
        "bool-case-exists", "R_bool_case_ex", ("abs",), 2, _ex_concls, _ex_blocks
    ),
}


# ---------------------------------------------------------------------------
# Rule constants: declarations (deep) and rewrite definitions (shallow)

EXMID = Const("rules.ExMid")
NNPP = Const("rules.NNPP")
CONTR = Const("rules.Contr")


def _r(name: str) -> Const:
    return Const(f"rules.{name}")


def rule_constant_types() -> list[tuple[str, KTerm]]:
    """The inference-rule constants with their declared types."""
    bot = prf(FALSE)

    def cont(*tys: KTerm) -> KTerm:
        return arrow(*tys, bot)

    return [
        ("R_bot", cont(prf(FALSE))),
        ("R_nottop", cont(prf(neg(TRUE)))),
        ("R_Ax", pi("P", PROP, lambda p: cont(prf(p), prf(neg(p))))),
        ("R_Cut", pi("P", PROP, lambda p: cont(cont(prf(p)), cont(prf(neg(p)))))),
        ("R_neq", pi("a", TYPE_C, lambda a: pi("t", term(a), lambda t: cont(prf(neg(app(embed.EQ, a, t, t))))))),
        ("R_Sym", pi("a", TYPE_C, lambda a: pi("t", term(a), lambda t: pi("u", term(a), lambda u: cont(
            prf(app(embed.EQ, a, t, u)), prf(neg(app(embed.EQ, a, u, t)))))))),
        ("R_notnot", pi("P", PROP, lambda p: cont(cont(prf(p)), prf(neg(neg(p)))))),
        ("R_and", _pq(lambda p, q: cont(cont(prf(p), prf(q)), prf(app(embed.AND, p, q))))),
        ("R_or", _pq(lambda p, q: cont(cont(prf(p)), cont(prf(q)), prf(app(embed.OR, p, q))))),
        ("R_imp", _pq(lambda p, q: cont(cont(prf(neg(p))), cont(prf(q)), prf(app(embed.IMP, p, q))))),
        ("R_eqv", _pq(lambda p, q: cont(
            cont(prf(neg(p)), prf(neg(q))), cont(prf(p), prf(q)), prf(app(embed.EQV, p, q))))),
        ("R_notand", _pq(lambda p, q: cont(
            cont(prf(neg(p))), cont(prf(neg(q))), prf(neg(app(embed.AND, p, q)))))),
        ("R_notor", _pq(lambda p, q: cont(
            cont(prf(neg(p)), prf(neg(q))), prf(neg(app(embed.OR, p, q)))))),
        ("R_notimp", _pq(lambda p, q: cont(
            cont(prf(p), prf(neg(q))), prf(neg(app(embed.IMP, p, q)))))),
        ("R_noteqv", _pq(lambda p, q: cont(
            cont(prf(neg(p)), prf(q)), cont(prf(p), prf(neg(q))), prf(neg(app(embed.EQV, p, q)))))),
        ("R_exists", _aP(lambda a, p: cont(
            pi("t", term(a), lambda t: cont(prf(App(p, t)))), prf(app(EXISTS, a, p))))),
        ("R_forall", _aP(lambda a, p: pi("t", term(a), lambda t: cont(
            cont(prf(App(p, t))), prf(app(FORALL, a, p)))))),
        ("R_notexists", _aP(lambda a, p: pi("t", term(a), lambda t: cont(
            cont(prf(neg(App(p, t)))), prf(neg(app(EXISTS, a, p))))))),
        ("R_notforall", _aP(lambda a, p: cont(
            pi("t", term(a), lambda t: cont(prf(neg(App(p, t))))), prf(neg(app(FORALL, a, p)))))),
        ("R_existstype", _P(lambda p: cont(
            pi("a", TYPE_C, lambda a: cont(prf(App(p, a)))), prf(App(EXISTSTYPE, p))))),
        ("R_foralltype", _P(lambda p: pi("a", TYPE_C, lambda a: cont(
            cont(prf(App(p, a))), prf(App(FORALLTYPE, p)))))),
        ("R_notexiststype", _P(lambda p: pi("a", TYPE_C, lambda a: cont(
            cont(prf(neg(App(p, a)))), prf(neg(App(EXISTSTYPE, p))))))),
        ("R_notforalltype", _P(lambda p: cont(
            pi("a", TYPE_C, lambda a: cont(prf(neg(App(p, a))))), prf(neg(App(FORALLTYPE, p)))))),
        ("R_Subst", pi("a", TYPE_C, lambda a: pi("P", arrow(term(a), PROP), lambda p: pi(
            "t", term(a), lambda t: pi("u", term(a), lambda u: cont(
                cont(prf(neg(app(embed.EQ, a, t, u)))), cont(prf(App(p, u))), prf(App(p, t)))))))),
    ]


def _pq(fn: Callable[[KTerm, KTerm], KTerm]) -> KTerm:
    return pi("P", PROP, lambda p: pi("Q", PROP, lambda q: fn(p, q)))


def _aP(fn: Callable[[KTerm, KTerm], KTerm]) -> KTerm:
    return pi("a", TYPE_C, lambda a: pi("P", arrow(term(a), PROP), lambda p: fn(a, p)))


def _P(fn: Callable[[KTerm], KTerm]) -> KTerm:
    return pi("P", arrow(TYPE_C, PROP), lambda p: fn(p))


def _shallow_definitions() -> list[tuple[str, tuple[tuple[str, KTerm], ...], KTerm]]:
    """Rewrite definitions proving every rule constant, excluded middle aside.

    Returns (constant basename, pattern context, right-hand side).
    """
    bot = prf(FALSE)
    P, Q = FVar("P"), FVar("Q")
    a, t, u = FVar("a"), FVar("t"), FVar("u")
    t1, t2 = FVar("t1"), FVar("t2")
    pp = FVar("P")
    prop = ("P", PROP)
    prop2 = (("P", PROP), ("Q", PROP))

    def eq(x: KTerm, y: KTerm, at: KTerm = None) -> KTerm:
        return app(embed.EQ, at if at is not None else a, x, y)

    def imp(x: KTerm, y: KTerm) -> KTerm:
        return app(embed.IMP, x, y)

    out: list[tuple[str, tuple[tuple[str, KTerm], ...], KTerm]] = []

    out.append(("R_bot", (), lam("H", bot, lambda h: h)))

    out.append(("R_nottop", (), lam(
        "H1", prf(neg(TRUE)),
        lambda h1: App(h1, lam("Z", PROP, lambda z: lam("H2", prf(z), lambda h2: h2))))))

    out.append(("R_Ax", (prop,), lam(
        "H1", prf(P), lambda h1: lam("H2", prf(neg(P)), lambda h2: App(h2, h1)))))

    out.append(("R_neq", (("a", TYPE_C), ("t", term(a))), lam(
        "H1", prf(neg(eq(t, t))),
        lambda h1: App(h1, lam("z", arrow(term(a), PROP), lambda z: lam(
            "H2", prf(App(z, t)), lambda h2: h2))))))

    out.append(("R_Sym", (("a", TYPE_C), ("t", term(a)), ("u", term(a))), lam(
        "H1", prf(eq(t, u)), lambda h1: lam(
            "H2", prf(neg(eq(u, t))), lambda h2: App(h2, lam(
                "z", arrow(term(a), PROP), lambda z: lam(
                    "H3", prf(App(z, u)), lambda h3: app(
                        h1,
                        lam("x", term(a), lambda x: imp(App(z, x), App(z, t))),
                        lam("H4", prf(App(z, t)), lambda h4: h4),
                        h3))))))))

    out.append(("R_Cut", (prop,), lam(
        "H1", arrow(prf(P), bot), lambda h1: lam(
            "H2", arrow(prf(neg(P)), bot), lambda h2: App(h2, h1)))))

    out.append(("R_notnot", (prop,), lam(
        "H1", arrow(prf(P), bot), lambda h1: lam(
            "H2", prf(neg(neg(P))), lambda h2: App(h2, h1)))))

    out.append(("R_and", prop2, lam(
        "H1", arrow(prf(P), prf(Q), bot), lambda h1: lam(
            "H2", prf(app(embed.AND, P, Q)), lambda h2: app(h2, FALSE, h1)))))

    out.append(("R_or", prop2, lam(
        "H1", arrow(prf(P), bot), lambda h1: lam(
            "H2", arrow(prf(Q), bot), lambda h2: lam(
                "H3", prf(app(embed.OR, P, Q)), lambda h3: app(h3, FALSE, h1, h2))))))

    out.append(("R_imp", prop2, lam(
        "H1", arrow(prf(neg(P)), bot), lambda h1: lam(
            "H2", arrow(prf(Q), bot), lambda h2: lam(
                "H3", prf(imp(P, Q)), lambda h3: App(h1, app(CONTR, P, Q, h3, h2)))))))

    out.append(("R_eqv", prop2, lam(
        "H1", arrow(prf(neg(P)), prf(neg(Q)), bot), lambda h1: lam(
            "H2", arrow(prf(P), prf(Q), bot), lambda h2: lam(
                "H3", prf(app(embed.EQV, P, Q)), lambda h3: app(
                    h3, FALSE, lam(
                        "H4", arrow(prf(P), prf(Q)), lambda h4: lam(
                            "H5", arrow(prf(Q), prf(P)), lambda h5: app(
                                h1,
                                app(CONTR, P, Q, h4, lam(
                                    "H6", prf(Q), lambda h6: app(h2, App(h5, h6), h6))),
                                lam("H7", prf(Q), lambda h7: app(h2, App(h5, h7), h7)))))))))))

    out.append(("R_notand", prop2, lam(
        "H1", arrow(prf(neg(P)), bot), lambda h1: lam(
            "H2", arrow(prf(neg(Q)), bot), lambda h2: lam(
                "H3", prf(neg(app(embed.AND, P, Q))), lambda h3: App(h1, lam(
                    "H5", prf(P), lambda h5: App(h2, lam(
                        "H6", prf(Q), lambda h6: App(h3, lam(
                            "Z", PROP, lambda z: lam(
                                "H4", arrow(prf(P), prf(Q), prf(z)),
                                lambda h4: app(h4, h5, h6)))))))))))))

    out.append(("R_notor", prop2, lam(
        "H1", arrow(prf(neg(P)), prf(neg(Q)), bot), lambda h1: lam(
            "H2", prf(neg(app(embed.OR, P, Q))), lambda h2: app(
                h1,
                app(CONTR, P, app(embed.OR, P, Q), lam(
                    "H3", prf(P), lambda h3: lam("Z", PROP, lambda z: lam(
                        "H4", arrow(prf(P), prf(z)), lambda h4: lam(
                            "H5", arrow(prf(Q), prf(z)), lambda h5: App(h4, h3))))), h2),
                app(CONTR, Q, app(embed.OR, P, Q), lam(
                    "H6", prf(Q), lambda h6: lam("Z", PROP, lambda z: lam(
                        "H7", arrow(prf(P), prf(z)), lambda h7: lam(
                            "H8", arrow(prf(Q), prf(z)), lambda h8: App(h8, h6))))), h2))))))

    out.append(("R_notimp", prop2, lam(
        "H1", arrow(prf(P), prf(neg(Q)), bot), lambda h1: lam(
            "H2", prf(neg(imp(P, Q))), lambda h2: App(h2, lam(
                "H3", prf(P), lambda h3: app(
                    App(h1, h3),
                    lam("H4", prf(Q), lambda h4: App(h2, lam("H5", prf(P), lambda h5: h4))),
                    Q)))))))

    out.append(("R_noteqv", prop2, lam(
        "H1", arrow(prf(neg(P)), prf(Q), bot), lambda h1: lam(
            "H2", arrow(prf(P), prf(neg(Q)), bot), lambda h2: lam(
                "H3", prf(neg(app(embed.EQV, P, Q))), lambda h3: App(
                    lam("H4", prf(neg(P)), lambda h4: App(h3, lam(
                        "Z", PROP, lambda z: lam(
                            "H5", arrow(prf(imp(P, Q)), prf(imp(Q, P)), prf(z)),
                            lambda h5: app(
                                h5,
                                lam("H6", prf(P), lambda h6: app(h4, h6, Q)),
                                lam("H7", prf(Q), lambda h7: app(h1, h4, h7, P))))))),
                    lam("H8", prf(P), lambda h8: app(h2, h8, lam(
                        "H9", prf(Q), lambda h9: App(h3, lam(
                            "Z", PROP, lambda z: lam(
                                "H10", arrow(prf(imp(P, Q)), prf(imp(Q, P)), prf(z)),
                                lambda h10: app(
                                    h10,
                                    lam("H11", prf(P), lambda h11: h9),
                                    lam("H12", prf(Q), lambda h12: h8))))))))))))))

    aP = (("a", TYPE_C), ("P", arrow(term(a), PROP)))
    aPt = aP + (("t", term(a)),)

    out.append(("R_exists", aP, lam(
        "H1", pi("t", term(a), lambda t_: arrow(prf(App(pp, t_)), bot)), lambda h1: lam(
            "H2", prf(app(EXISTS, a, pp)), lambda h2: app(h2, FALSE, h1)))))

    out.append(("R_forall", aPt, lam(
        "H1", arrow(prf(App(pp, t)), bot), lambda h1: lam(
            "H2", prf(app(FORALL, a, pp)), lambda h2: App(h1, App(h2, t))))))

    out.append(("R_notexists", aPt, lam(
        "H1", arrow(prf(neg(App(pp, t))), bot), lambda h1: lam(
            "H2", prf(neg(app(EXISTS, a, pp))), lambda h2: App(h1, lam(
                "H4", prf(App(pp, t)), lambda h4: App(h2, lam(
                    "Z", PROP, lambda z: lam(
                        "H3", pi("x", term(a), lambda x: arrow(prf(App(pp, x)), prf(z))),
                        lambda h3: app(h3, t, h4))))))))))

    out.append(("R_notforall", aP, lam(
        "H1", pi("t", term(a), lambda t_: arrow(prf(neg(App(pp, t_))), bot)), lambda h1: lam(
            "H2", prf(neg(app(FORALL, a, pp))), lambda h2: App(h2, lam(
                "t", term(a), lambda t_: app(NNPP, App(pp, t_), App(h1, t_))))))))

    tyP = (("P", arrow(TYPE_C, PROP)),)
    tyPa = tyP + (("a", TYPE_C),)

    out.append(("R_existstype", tyP, lam(
        "H1", pi("a", TYPE_C, lambda b: arrow(prf(App(pp, b)), bot)), lambda h1: lam(
            "H2", prf(App(EXISTSTYPE, pp)), lambda h2: app(h2, FALSE, h1)))))

    out.append(("R_foralltype", tyPa, lam(
        "H1", arrow(prf(App(pp, a)), bot), lambda h1: lam(
            "H2", prf(App(FORALLTYPE, pp)), lambda h2: App(h1, App(h2, a))))))

    out.append(("R_notexiststype", tyPa, lam(
        "H1", arrow(prf(neg(App(pp, a))), bot), lambda h1: lam(
            "H2", prf(neg(App(EXISTSTYPE, pp))), lambda h2: App(h1, lam(
                "H4", prf(App(pp, a)), lambda h4: App(h2, lam(
                    "Z", PROP, lambda z: lam(
                        "H3", pi("b", TYPE_C, lambda b: arrow(prf(App(pp, b)), prf(z))),
                        lambda h3: app(h3, a, h4))))))))))

    out.append(("R_notforalltype", tyP, lam(
        "H1", pi("a", TYPE_C, lambda b: arrow(prf(neg(App(pp, b))), bot)), lambda h1: lam(
            "H2", prf(neg(App(FORALLTYPE, pp))), lambda h2: App(h2, lam(
                "a", TYPE_C, lambda b: app(NNPP, App(pp, b), App(h1, b))))))))

    out.append(("R_Subst", (("a", TYPE_C), ("P", arrow(term(a), PROP)),
                            ("t1", term(a)), ("t2", term(a))), lam(
        "H1", arrow(prf(neg(eq(t1, t2))), bot), lambda h1: lam(
            "H2", arrow(prf(App(pp, t2)), bot), lambda h2: lam(
                "H3", prf(App(pp, t1)), lambda h3: App(h1, lam(
                    "H4", prf(eq(t1, t2)), lambda h4: App(h2, app(h4, pp, h3)))))))))

    return out


def rules_prelude(mode: str = "shallow") -> list[Entry]:
    """The `rules` module.

    Deep mode declares every inference-rule constant abstractly.  Shallow
    mode instead derives them: the law of excluded middle is declared as
    the sole axiom, double-negation elimination and contraposition are
    defined from it, and every rule constant is given a rewrite
    definition.
    """
    if mode not in ("deep", "shallow"):
        raise ValueError(f"unknown mode {mode!r}")
    decls = rule_constant_types()
    if mode == "deep":
        return [Decl(f"rules.{name}", ty) for name, ty in decls]

    entries: list[Entry] = [
        Decl("rules.ExMid", pi("P", PROP, lambda p: pi("Z", PROP, lambda z: arrow(
            arrow(prf(p), prf(z)), arrow(prf(neg(p)), prf(z)), prf(z))))),
        Def("rules.NNPP",
            pi("P", PROP, lambda p: arrow(prf(neg(neg(p))), prf(p))),
            lam("P", PROP, lambda p: lam(
                "H1", prf(neg(neg(p))), lambda h1: app(
                    EXMID, p, p,
                    lam("H2", prf(p), lambda h2: h2),
                    lam("H3", prf(neg(p)), lambda h3: app(h1, h3, p)))))),
        Def("rules.Contr",
            pi("P", PROP, lambda p: pi("Q", PROP, lambda q: arrow(
                prf(app(embed.IMP, p, q)), prf(app(embed.IMP, neg(q), neg(p)))))),
            lam("P", PROP, lambda p: lam("Q", PROP, lambda q: lam(
                "H1", prf(app(embed.IMP, p, q)), lambda h1: lam(
                    "H2", prf(neg(q)), lambda h2: lam(
                        "H3", prf(p), lambda h3: App(h2, App(h1, h3)))))))),
    ]
    bodies = dict((name, (ctx, rhs)) for name, ctx, rhs in _shallow_definitions())
    for name, ty in decls:
        entries.append(Decl(f"rules.{name}", ty))
        ctx, rhs = bodies[name]
        entries.append(Rule(ctx, app(_r(name), *(FVar(x) for x, _ in ctx)), rhs))
    return entries


# ---------------------------------------------------------------------------
# Pred/Fun elimination


def eliminate_pred_fun(p: LLProof) -> LLProof:
    """Decompose every Pred/Fun node into a chain of Subst steps.

    An n-ary predicate node becomes n Subst steps closed by an axiom
    step on the fully rewritten atom; an n-ary function node becomes n
    Subst steps on the disequality closed by a reflexivity refutation.
    All other nodes are preserved.
    """
    premises = tuple(eliminate_pred_fun(q) for q in p.premises)
    match p.rule:
        case Pred(name=pn, ty_args=tys, lhs_args=ts, rhs_args=us, eq_types=eq_tys):
            _check_arities(ts, us, eq_tys)
            concls = p.concls if p.concls is not None else tuple(rule_conclusions(p.rule))
            atom = lambda args: tff.Pred(pn, tys, tuple(args))
            core = LLProof(Ax(atom(us)), (), (atom(us), concls[1]))
            tree = _subst_chain(atom, ts, us, eq_tys, premises, core)
            return LLProof(tree.rule, tree.premises, (concls[0],) if ts else (concls[0], concls[1]))
        case Fun(name=fn, ty_args=tys, lhs_args=ts, rhs_args=us, eq_types=eq_tys, result_ty=res):
            _check_arities(ts, us, eq_tys)
            concls = p.concls if p.concls is not None else tuple(rule_conclusions(p.rule))
            atom = lambda args: _neq(res, tff.Fun(fn, tys, tuple(args)), tff.Fun(fn, tys, us))
            core = LLProof(Neq(res, tff.Fun(fn, tys, us)), (), (atom(us),))
            tree = _subst_chain(atom, ts, us, eq_tys, premises, core)
            return LLProof(tree.rule, tree.premises, (concls[0],))
        case _:
            return LLProof(p.rule, premises, p.concls)


def _check_arities(ts, us, eq_tys) -> None:
    if not (len(ts) == len(us) == len(eq_tys)):
        raise CertificateError((), f"term lists of lengths {len(ts)}/{len(us)}/{len(eq_tys)} disagree")


def _subst_chain(atom, ts, us, eq_tys, premises, core: LLProof) -> LLProof:
    """Right-nested Subst chain rewriting ts into us inside `atom`."""
    if not ts:
        return core
    used: set[str] = set()
    for e in (*ts, *us):
        used |= tff.term_vars(e)

    def fresh_var(base: str = "z") -> str:
        name = base
        while name in used:
            name += "'"
        used.add(name)
        return name

    def build(i: int) -> LLProof:
        if i == len(ts):
            return core
        z = fresh_var()
        mixed = list(us[:i]) + [tff.Var(z)] + list(ts[i + 1 :])
        rule = Subst(eq_tys[i], z, atom(mixed), ts[i], us[i])
        return LLProof(rule, (premises[i], build(i + 1)))

    return build(0)


# ---------------------------------------------------------------------------
# Sequent and proof translation


def translate_sequent(s: LLSequent, module: str = "", start: int = 0) -> list[tuple[str, KTerm]]:
    """One `prf`-typed context variable per hypothesis, in order."""
    return [
        (f"h{start + i}", prf(embed.translate_formula(phi, module)))
        for i, phi in enumerate(s.hypotheses)
    ]


class _Translator:
    def __init__(
        self,
        thy: tff.TffTheory,
        tbl: tff.Table,
        module: str,
        sig: Optional[signature.Signature] = None,
        fuel: Optional[kernel.Fuel] = None,
    ):
        self.thy = thy
        self.tbl = tbl
        self.module = module
        self.sig = sig
        self.fuel = fuel
        self.counter = 0
        # formula -> stack of hypothesis variable names (innermost last)
        self.env: dict[tff.TffFormula, list[str]] = {}
        self.env_formulas: list[tuple[tff.TffFormula, str]] = []
        # kernel context snapshots for failure localization
        self.ctx: dict[str, KTerm] = {}
        self.kenv: dict[str, KTerm] = {}
        self.eigen_terms: dict[str, tff.TffType] = {}
        self.eigen_types: set[str] = set()
        self.nodes: list[tuple[tuple[int, ...], KTerm, dict[str, KTerm]]] = []

    # -- environment -------------------------------------------------

    def push_hyp(self, phi: tff.TffFormula) -> tuple[str, KTerm]:
        name = f"h{self.counter}"
        self.counter += 1
        ktype = prf(self.formula(phi))
        self.env.setdefault(phi, []).append(name)
        self.env_formulas.append((phi, name))
        self.ctx[name] = ktype
        return name, ktype

    def pop_hyp(self, phi: tff.TffFormula, name: str) -> None:
        self.env[phi].pop()
        self.env_formulas.pop()
        del self.ctx[name]

    def lookup(self, phi: tff.TffFormula, path: tuple[int, ...]) -> KTerm:
        stack = self.env.get(phi)
        if stack:
            return FVar(stack[-1])
        axiom = next((n for n, f in self.tbl.axioms.items() if f == phi), None)
        if axiom is not None:
            return Const(embed.qualify(self.module, axiom))
        # a bracketed hypothesis stands for any congruent formula, so a
        # structural miss falls back to conversion against the sequent
        if self.sig is not None:
            want = self.formula(phi)
            for candidate, name in reversed(self.env_formulas):
                have = self.formula(candidate)
                try:
                    if kernel.convertible(self.sig, have, want, self._fresh_fuel()):
                        return FVar(name)
                except kernel.FuelExhausted:
                    continue
            for name, f in self.tbl.axioms.items():
                try:
                    if kernel.convertible(self.sig, self.formula(f), want, self._fresh_fuel()):
                        return Const(embed.qualify(self.module, name))
                except kernel.FuelExhausted:
                    continue
        raise MissingHypothesis(path, f"hypothesis {phi} is not available in the sequent")

    def _fresh_fuel(self) -> kernel.Fuel:
        budget = self.fuel or kernel.Fuel()
        return kernel.Fuel(budget.max_rewrite_steps, budget.max_conversion_depth)

    # -- formula/term/type translation under the eigenvariable scope --

    def formula(self, phi: tff.TffFormula) -> KTerm:
        return embed.translate_formula(phi, self.module, self.kenv)

    def ktype(self, ty: tff.TffType) -> KTerm:
        return embed.translate_type(ty, self.module, self.kenv)

    def kterm(self, e: tff.TffTerm) -> KTerm:
        return embed.translate_term(e, self.module, self.kenv)

    def abstraction(self, var: str, ty: tff.TffType, body: tff.TffFormula) -> KTerm:
        kty = self.ktype(ty)
        u = fresh_name(var)
        inner = embed.translate_formula(body, self.module, {**self.kenv, var: FVar(u)})
        return Lam(var, term(kty), abstract(inner, u))

    def type_abstraction(self, tvar: str, body: tff.TffFormula) -> KTerm:
        u = fresh_name(tvar)
        inner = embed.translate_formula(body, self.module, {**self.kenv, tvar: FVar(u)})
        return Lam(tvar, TYPE_C, abstract(inner, u))

    # -- freshness and closedness side conditions ----------------------

    def check_fresh_const(self, name: str, path: tuple[int, ...]) -> None:
        if name in self.eigen_terms or name in self.eigen_types or name in self.kenv:
            raise FreshnessViolation(path, f"constant {name} was already introduced")
        if name in self.tbl.funs or name in self.tbl.preds or name in self.tbl.type_cons:
            raise FreshnessViolation(path, f"constant {name} collides with a theory symbol")
        for phi, _ in self.env_formulas:
            if name in tff.formula_vars(phi):
                raise FreshnessViolation(path, f"constant {name} occurs in the conclusion sequent")

    def check_fresh_type(self, name: str, path: tuple[int, ...]) -> None:
        if name in self.eigen_types or name in self.eigen_terms or name in self.kenv:
            raise FreshnessViolation(path, f"type {name} was already introduced")
        if name in self.tbl.type_cons:
            raise FreshnessViolation(path, f"type {name} collides with a theory constructor")
        for phi, _ in self.env_formulas:
            if name in tff.formula_tvars(phi):
                raise FreshnessViolation(path, f"type {name} occurs in the conclusion sequent")

    def check_witness_closed(self, e: tff.TffTerm, path: tuple[int, ...]) -> None:
        stray = tff.term_vars(e) - set(self.kenv)
        if stray:
            raise CertificateError(path, f"witness term mentions unbound variables {sorted(stray)}")

    def check_witness_type_closed(self, ty: tff.TffType, path: tuple[int, ...]) -> None:
        stray = tff.type_tvars(ty) - set(self.kenv)
        if stray:
            raise CertificateError(path, f"witness type mentions unbound type variables {sorted(stray)}")

    # -- the Fig-style node compilation --------------------------------

    def rule_args(self, rule: LLRule, path: tuple[int, ...]) -> tuple[Const, list[KTerm]]:
        match rule:
            case Bot():
                return _r("R_bot"), []
            case NotTop():
                return _r("R_nottop"), []
            case Ax(p=p):
                return _r("R_Ax"), [self.formula(p)]
            case Cut(p=p):
                return _r("R_Cut"), [self.formula(p)]
            case Neq(ty=ty, t=t):
                return _r("R_neq"), [self.ktype(ty), self.kterm(t)]
            case Sym(ty=ty, t=t, u=u):
                return _r("R_Sym"), [self.ktype(ty), self.kterm(t), self.kterm(u)]
            case NotNot(p=p):
                return _r("R_notnot"), [self.formula(p)]
            case And(p=p, q=q):
                return _r("R_and"), [self.formula(p), self.formula(q)]
            case Or(p=p, q=q):
                return _r("R_or"), [self.formula(p), self.formula(q)]
            case Imp(p=p, q=q):
                return _r("R_imp"), [self.formula(p), self.formula(q)]
            case Iff(p=p, q=q):
                return _r("R_eqv"), [self.formula(p), self.formula(q)]
            case NotAnd(p=p, q=q):
                return _r("R_notand"), [self.formula(p), self.formula(q)]
            case NotOr(p=p, q=q):
                return _r("R_notor"), [self.formula(p), self.formula(q)]
            case NotImp(p=p, q=q):
                return _r("R_notimp"), [self.formula(p), self.formula(q)]
            case NotIff(p=p, q=q):
                return _r("R_noteqv"), [self.formula(p), self.formula(q)]
            case Exists(ty=ty, var=x, body=b):
                return _r("R_exists"), [self.ktype(ty), self.abstraction(x, ty, b)]
            case Forall(ty=ty, var=x, body=b, witness=t):
                self.check_witness_closed(t, path)
                return _r("R_forall"), [self.ktype(ty), self.abstraction(x, ty, b), self.kterm(t)]
            case NotExists(ty=ty, var=x, body=b, witness=t):
                self.check_witness_closed(t, path)
                return _r("R_notexists"), [self.ktype(ty), self.abstraction(x, ty, b), self.kterm(t)]
            case NotForall(ty=ty, var=x, body=b):
                return _r("R_notforall"), [self.ktype(ty), self.abstraction(x, ty, b)]
            case ExistsType(tvar=a, body=b):
                return _r("R_existstype"), [self.type_abstraction(a, b)]
            case ForallType(tvar=a, body=b, witness=w):
                self.check_witness_type_closed(w, path)
                return _r("R_foralltype"), [self.type_abstraction(a, b), self.ktype(w)]
            case NotExistsType(tvar=a, body=b, witness=w):
                self.check_witness_type_closed(w, path)
                return _r("R_notexiststype"), [self.type_abstraction(a, b), self.ktype(w)]
            case NotForallType(tvar=a, body=b):
                return _r("R_notforalltype"), [self.type_abstraction(a, b)]
            case Subst(ty=ty, var=x, body=b, t=t, u=u):
                return _r("R_Subst"), [
                    self.ktype(ty), self.abstraction(x, ty, b), self.kterm(t), self.kterm(u)]
            case Ext(name=n, args=args):
                spec = EXT_REGISTRY.get(n)
                if spec is None or n not in self.tbl.exts:
                    raise UnregisteredExtRule(path, f"extension rule {n!r} is not registered for this theory")
                if len(args) != len(spec.arg_kinds):
                    raise CertificateError(path, f"extension rule {n} expects {len(spec.arg_kinds)} arguments")
                kargs = []
                for kind, arg in zip(spec.arg_kinds, args):
                    match kind, arg:
                        case ("abs", AbsArg(var=x, ty=ty, body=b)):
                            kargs.append(self.abstraction(x, ty, b))
                        case ("formula", FormulaArg(formula=f)):
                            kargs.append(self.formula(f))
                        case ("term", TermArg(term=e)):
                            kargs.append(self.kterm(e))
                        case ("type", TypeArg(ty=ty)):
                            kargs.append(self.ktype(ty))
                        case _:
                            raise CertificateError(path, f"extension argument {arg!r} does not fit kind {kind!r}")
                return embed.ext_constant(n, self.module), kargs
        raise TypeError(rule)

    def translate(self, p: LLProof, path: tuple[int, ...] = ()) -> KTerm:
        rule = p.rule
        if isinstance(rule, (Pred, Fun)):
            raise CertificateError(path, "Pred/Fun nodes must be eliminated before translation")
        head, kargs = self.rule_args(rule, path)
        blocks = rule_premise_hyps(rule)
        eigen = rule_eigenvars(rule)
        if isinstance(rule, Ext):
            spec = EXT_REGISTRY[rule.name]
            if len(blocks) != spec.n_premises:
                raise CertificateError(path, f"extension rule {rule.name} expects {spec.n_premises} premises")
        if len(p.premises) != len(blocks):
            raise CertificateError(
                path, f"rule {type(rule).__name__} expects {len(blocks)} premises, got {len(p.premises)}")

        continuations: list[KTerm] = []
        for i, (premise, block, evars) in enumerate(zip(p.premises, blocks, eigen)):
            opened: list[tuple[str, str, Optional[tff.TffType]]] = []
            for name, ty in evars:
                if ty is None:
                    self.check_fresh_type(name, path)
                    u = fresh_name(name)
                    self.kenv[name] = FVar(u)
                    self.eigen_types.add(name)
                    self.ctx[u] = TYPE_C
                else:
                    self.check_fresh_const(name, path)
                    u = fresh_name(name)
                    self.kenv[name] = FVar(u)
                    self.eigen_terms[name] = ty
                    self.ctx[u] = term(self.ktype(ty))
                opened.append((name, u, ty))
            bound: list[tuple[tff.TffFormula, str, KTerm]] = []
            for phi in block:
                name, ktype = self.push_hyp(phi)
                bound.append((phi, name, ktype))
            body = self.translate(premise, path + (i,))
            for phi, name, ktype in reversed(bound):
                self.pop_hyp(phi, name)
                body = Lam(name, ktype, abstract(body, name))
            for name, u, ty in reversed(opened):
                del self.kenv[name]
                if ty is None:
                    self.eigen_types.discard(name)
                    annot = TYPE_C
                else:
                    del self.eigen_terms[name]
                    annot = term(self.ktype(ty))
                del self.ctx[u]
                body = Lam(name, annot, abstract(body, u))
            continuations.append(body)

        consumed = [self.lookup(phi, path) for phi in p.conclusion_hyps()]
        node_term = app(head, *kargs, *continuations, *consumed)
        self.nodes.append((path, node_term, dict(self.ctx)))
        return node_term


def translate_proof(
    p: LLProof,
    hyp_env: dict[tff.TffFormula, str],
    thy: tff.TffTheory,
    module: Optional[str] = None,
    sig: Optional[signature.Signature] = None,
) -> KTerm:
    """Compile an eliminated proof tree against pre-bound hypotheses."""
    tbl = tff.table_of(thy)
    tr = _Translator(thy, tbl, module or thy.name, sig)
    for phi, name in hyp_env.items():
        tr.env.setdefault(phi, []).append(name)
        tr.env_formulas.append((phi, name))
        tr.ctx[name] = prf(tr.formula(phi))
        tr.counter = max(tr.counter, _hyp_index(name) + 1)
    return tr.translate(p)


def _hyp_index(name: str) -> int:
    return int(name[1:]) if name[1:].isdigit() else 0


# ---------------------------------------------------------------------------
# Certificate checking


@dataclass
class Verdict:
    accepted: bool
    error: Optional[str] = None
    path: Optional[tuple[int, ...]] = None
    entries: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.accepted


def certificate_entries(
    thy: tff.TffTheory,
    goal: tff.TffFormula,
    proof: LLProof,
    module: Optional[str] = None,
    sig: Optional[signature.Signature] = None,
    fuel: Optional[kernel.Fuel] = None,
) -> tuple[list[Entry], _Translator]:
    """The `cert` module: the goal constant with its proof definition."""
    module = module or thy.name
    tbl = tff.wf_theory(thy)
    tff.wf_formula(tbl, tff.TffContext(), goal)
    proof = eliminate_pred_fun(proof)
    tr = _Translator(thy, tbl, module, sig, fuel)
    neg_goal = tff.Not(goal)
    name, ktype = tr.push_hyp(neg_goal)
    body = tr.translate(proof)
    cert_type = arrow(ktype, prf(FALSE))
    cert_body = Lam(name, ktype, abstract(body, name))
    return [Def("cert.goal", cert_type, cert_body)], tr


def check_certificate(
    thy: tff.TffTheory,
    goal: tff.TffFormula,
    proof: LLProof,
    mode: str = "shallow",
    fuel: Optional[kernel.Fuel] = None,
    sig: Optional[signature.Signature] = None,
) -> Verdict:
    """Compile the tree and run the kernel over the resulting definition.

    `sig` may carry a pre-installed logic+rules+theory signature for the
    same mode to avoid rebuilding it across many certificates.
    """
    try:
        if sig is None:
            sig = base_signature(thy, mode, fuel)
    except (kernel.KernelError, signature.SignatureError, tff.TffError, embed.UnknownExtension) as e:
        return Verdict(False, error=str(e))
    try:
        entries, tr = certificate_entries(thy, goal, proof, sig=sig, fuel=fuel)
    except CertificateError as e:
        return Verdict(False, error=str(e), path=e.path)
    except (tff.TffError, embed.UnknownExtension) as e:
        return Verdict(False, error=str(e))
    try:
        signature.install_entries(sig, entries, fuel)
    except kernel.FuelExhausted:
        raise
    except (kernel.KernelError, signature.SignatureError) as e:
        path = _locate_failure(sig, tr, fuel)
        return Verdict(False, error=str(e), path=path, entries=entries)
    return Verdict(True, entries=entries)


def base_signature(
    thy: tff.TffTheory, mode: str = "shallow", fuel: Optional[kernel.Fuel] = None
) -> signature.Signature:
    """logic + rules + theory, ready for certificate checking."""
    entries = embed.prelude(mode) + rules_prelude(mode) + embed.theory_entries(thy)
    return signature.install_entries(signature.EMPTY, entries, fuel)


def _locate_failure(
    sig: signature.Signature, tr: _Translator, fuel: Optional[kernel.Fuel]
) -> Optional[tuple[int, ...]]:
    """Deepest proof node whose compiled term fails to check."""
    failing: list[tuple[int, ...]] = []
    for path, node_term, ctx in tr.nodes:
        try:
            budget = fuel or kernel.Fuel()
            kernel.check(sig, ctx, node_term, prf(FALSE), kernel.Fuel(budget.max_rewrite_steps,
                                                                      budget.max_conversion_depth))
        except kernel.KernelError:
            failing.append(path)
    if not failing:
        return None
    return max(failing, key=len)


# ---------------------------------------------------------------------------
# Proof interchange format (.llpx)


_BINARY_TAGS = {
    "and": And, "or": Or, "imp": Imp, "iff": Iff,
    "notand": NotAnd, "notor": NotOr, "notimp": NotImp, "notiff": NotIff,
}


def proof_from_sexp(sx: object, cons: set[str]) -> LLProof:
    if not (isinstance(sx, list) and sx and isinstance(sx[0], str)):
        raise tff.FormatError(f"bad proof node {sexp.dumps(sx)}")
    tag = sx[0]
    fields, concl_sx, premises_sx = _split_node(tag, sx[1:])
    concls: Optional[tuple[tff.TffFormula, ...]] = None
    if concl_sx is not None:
        concls = tuple(tff.formula_from_sexp(f, cons) for f in concl_sx[1:])
    rule = _rule_from_fields(tag, fields, cons)
    premises = tuple(proof_from_sexp(p, cons) for p in premises_sx)
    return LLProof(rule, premises, concls)


_FIELD_COUNTS = {
    "bot": 0, "nottop": 0, "ax": 1, "cut": 1, "neq": 2, "sym": 3, "notnot": 1,
    "and": 2, "or": 2, "imp": 2, "iff": 2, "notand": 2, "notor": 2,
    "notimp": 2, "notiff": 2,
    "exists": 4, "forall": 4, "notexists": 4, "notforall": 4,
    "existstype": 3, "foralltype": 3, "notexiststype": 3, "notforalltype": 3,
    "subst": 5, "pred": 5, "fun": 6, "ext": 4,
}


def _split_node(tag: str, rest: list) -> tuple[list, Optional[list], list]:
    count = _FIELD_COUNTS.get(tag)
    if count is None:
        raise tff.FormatError(f"unknown proof rule tag {tag!r}")
    if len(rest) < count:
        raise tff.FormatError(f"rule {tag} expects {count} fields")
    fields = rest[:count]
    extra = rest[count:]
    concl = None
    if extra and isinstance(extra[0], list) and extra[0] and extra[0][0] == "concl":
        concl = extra[0]
        extra = extra[1:]
    return fields, concl, extra


def _rule_from_fields(tag: str, fields: list, cons: set[str]) -> LLRule:
    f = lambda i: tff.formula_from_sexp(fields[i], cons)
    ty = lambda i: tff.type_from_sexp(fields[i], set(), cons)
    tm = lambda i: tff.term_from_sexp(fields[i], cons)
    sym = lambda i: tff._symbol(fields[i])
    if tag == "bot":
        return Bot()
    if tag == "nottop":
        return NotTop()
    if tag == "ax":
        return Ax(f(0))
    if tag == "cut":
        return Cut(f(0))
    if tag == "neq":
        return Neq(ty(0), tm(1))
    if tag == "sym":
        return Sym(ty(0), tm(1), tm(2))
    if tag == "notnot":
        return NotNot(f(0))
    if tag in _BINARY_TAGS:
        return _BINARY_TAGS[tag](f(0), f(1))
    if tag in ("exists", "notforall"):
        cls = Exists if tag == "exists" else NotForall
        return cls(ty(0), sym(1), f(2), sym(3))
    if tag in ("forall", "notexists"):
        cls = Forall if tag == "forall" else NotExists
        return cls(ty(0), sym(1), f(2), tm(3))
    if tag in ("existstype", "notforalltype"):
        cls = ExistsType if tag == "existstype" else NotForallType
        return cls(sym(0), f(1), sym(2))
    if tag in ("foralltype", "notexiststype"):
        cls = ForallType if tag == "foralltype" else NotExistsType
        return cls(sym(0), f(1), ty(2))
    if tag == "subst":
        return Subst(ty(0), sym(1), f(2), tm(3), tm(4))
    if tag == "pred":
        return Pred(
            sym(0),
            tuple(tff.type_from_sexp(t, set(), cons) for t in tff._list(fields[1])),
            tuple(tff.term_from_sexp(t, cons) for t in tff._list(fields[2])),
            tuple(tff.term_from_sexp(t, cons) for t in tff._list(fields[3])),
            tuple(tff.type_from_sexp(t, set(), cons) for t in tff._list(fields[4])),
        )
    if tag == "fun":
        return Fun(
            sym(0),
            tuple(tff.type_from_sexp(t, set(), cons) for t in tff._list(fields[1])),
            tuple(tff.term_from_sexp(t, cons) for t in tff._list(fields[2])),
            tuple(tff.term_from_sexp(t, cons) for t in tff._list(fields[3])),
            tuple(tff.type_from_sexp(t, set(), cons) for t in tff._list(fields[4])),
            ty(5),
        )
    if tag == "ext":
        args = tuple(_ext_arg_from_sexp(a, cons) for a in tff._list(fields[1]))
        concls = tuple(tff.formula_from_sexp(c, cons) for c in tff._list(fields[2]))
        blocks = tuple(
            tuple(tff.formula_from_sexp(h, cons) for h in tff._list(b)) for b in tff._list(fields[3])
        )
        return Ext(sym(0), args, concls, blocks)
    raise tff.FormatError(f"unknown proof rule tag {tag!r}")


def _ext_arg_from_sexp(sx: object, cons: set[str]) -> ExtArg:
    if not (isinstance(sx, list) and sx and isinstance(sx[0], str)):
        raise tff.FormatError(f"bad extension argument {sexp.dumps(sx)}")
    tag = sx[0]
    if tag == "abs":
        return AbsArg(tff._symbol(sx[1]), tff.type_from_sexp(sx[2], set(), cons),
                      tff.formula_from_sexp(sx[3], cons))
    if tag == "fm":
        return FormulaArg(tff.formula_from_sexp(sx[1], cons))
    if tag == "tm":
        return TermArg(tff.term_from_sexp(sx[1], cons))
    if tag == "ty":
        return TypeArg(tff.type_from_sexp(sx[1], set(), cons))
    raise tff.FormatError(f"unknown extension argument tag {tag!r}")


def proof_to_sexp(p: LLProof, cons: set[str]) -> list:
    rule = p.rule
    f = lambda phi: tff.formula_to_sexp(phi, cons)
    ty = lambda t: tff.type_to_sexp(t, cons)
    tm = lambda e: tff.term_to_sexp(e, cons)
    match rule:
        case Bot():
            out = ["bot"]
        case NotTop():
            out = ["nottop"]
        case Ax(p=q):
            out = ["ax", f(q)]
        case Cut(p=q):
            out = ["cut", f(q)]
        case Neq(ty=t0, t=t1):
            out = ["neq", ty(t0), tm(t1)]
        case Sym(ty=t0, t=t1, u=t2):
            out = ["sym", ty(t0), tm(t1), tm(t2)]
        case NotNot(p=q):
            out = ["notnot", f(q)]
        case And(p=q, q=r):
            out = ["and", f(q), f(r)]
        case Or(p=q, q=r):
            out = ["or", f(q), f(r)]
        case Imp(p=q, q=r):
            out = ["imp", f(q), f(r)]
        case Iff(p=q, q=r):
            out = ["iff", f(q), f(r)]
        case NotAnd(p=q, q=r):
            out = ["notand", f(q), f(r)]
        case NotOr(p=q, q=r):
            out = ["notor", f(q), f(r)]
        case NotImp(p=q, q=r):
            out = ["notimp", f(q), f(r)]
        case NotIff(p=q, q=r):
            out = ["notiff", f(q), f(r)]
        case Exists(ty=t0, var=x, body=b, const=c):
            out = ["exists", ty(t0), x, f(b), c]
        case Forall(ty=t0, var=x, body=b, witness=w):
            out = ["forall", ty(t0), x, f(b), tm(w)]
        case NotExists(ty=t0, var=x, body=b, witness=w):
            out = ["notexists", ty(t0), x, f(b), tm(w)]
        case NotForall(ty=t0, var=x, body=b, const=c):
            out = ["notforall", ty(t0), x, f(b), c]
        case ExistsType(tvar=a, body=b, fresh_type=w):
            out = ["existstype", a, f(b), w]
        case ForallType(tvar=a, body=b, witness=w):
            out = ["foralltype", a, f(b), ty(w)]
        case NotExistsType(tvar=a, body=b, witness=w):
            out = ["notexiststype", a, f(b), ty(w)]
        case NotForallType(tvar=a, body=b, fresh_type=w):
            out = ["notforalltype", a, f(b), w]
        case Subst(ty=t0, var=x, body=b, t=t1, u=t2):
            out = ["subst", ty(t0), x, f(b), tm(t1), tm(t2)]
        case Pred(name=n, ty_args=tys, lhs_args=ts, rhs_args=us, eq_types=eqs):
            out = ["pred", n, [ty(t) for t in tys], [tm(t) for t in ts],
                   [tm(t) for t in us], [ty(t) for t in eqs]]
        case Fun(name=n, ty_args=tys, lhs_args=ts, rhs_args=us, eq_types=eqs, result_ty=res):
            out = ["fun", n, [ty(t) for t in tys], [tm(t) for t in ts],
                   [tm(t) for t in us], [ty(t) for t in eqs], ty(res)]
        case Ext(name=n, args=args, conclusions=cs, hyp_blocks=blocks):
            out = ["ext", n, [_ext_arg_to_sexp(x, cons) for x in args],
                   [f(c) for c in cs], [[f(h) for h in b] for b in blocks]]
        case _:
            raise TypeError(rule)
    if p.concls is not None:
        out.append(["concl"] + [f(c) for c in p.concls])
    out += [proof_to_sexp(q, cons) for q in p.premises]
    return out


def _ext_arg_to_sexp(arg: ExtArg, cons: set[str]) -> list:
    match arg:
        case AbsArg(var=x, ty=t, body=b):
            return ["abs", x, tff.type_to_sexp(t, cons), tff.formula_to_sexp(b, cons)]
        case FormulaArg(formula=phi):
            return ["fm", tff.formula_to_sexp(phi, cons)]
        case TermArg(term=e):
            return ["tm", tff.term_to_sexp(e, cons)]
        case TypeArg(ty=t):
            return ["ty", tff.type_to_sexp(t, cons)]
    raise TypeError(arg)


def parse_proof(text: str, thy: tff.TffTheory) -> tuple[tff.TffFormula, LLProof]:
    """Read a `.llpx` file: (proof (theory NAME) (goal F) TREE)."""
    sx = sexp.loads_one(text)
    if not (isinstance(sx, list) and len(sx) == 4 and sx[0] == "proof"):
        raise tff.FormatError("expected (proof (theory NAME) (goal F) TREE)")
    theory_ref = sx[1]
    if not (isinstance(theory_ref, list) and len(theory_ref) == 2 and theory_ref[0] == "theory"):
        raise tff.FormatError("expected (theory NAME)")
    if theory_ref[1] != thy.name:
        raise tff.FormatError(f"proof references theory {theory_ref[1]!r}, got {thy.name!r}")
    goal_sx = sx[2]
    if not (isinstance(goal_sx, list) and len(goal_sx) == 2 and goal_sx[0] == "goal"):
        raise tff.FormatError("expected (goal FORMULA)")
    cons = {item.name for item in thy.items if isinstance(item, tff.TypeCons)}
    goal = tff.formula_from_sexp(goal_sx[1], cons)
    tree = proof_from_sexp(sx[3], cons)
    return goal, tree


def print_proof(thy: tff.TffTheory, goal: tff.TffFormula, proof: LLProof) -> str:
    cons = {item.name for item in thy.items if isinstance(item, tff.TypeCons)}
    body = [
        "proof",
        ["theory", thy.name],
        ["goal", tff.formula_to_sexp(goal, cons)],
        proof_to_sexp(proof, cons),
    ]
    return sexp.dumps_pretty(body) + "\n"
