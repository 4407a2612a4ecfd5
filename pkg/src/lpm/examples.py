"""Built-in corpus: theories, goals, and proof trees used end to end.

Four pipelines ship with the tool:

* ``bool-commute``: the boolean theory with its algebraic rewrite rules
  and case-split extension rules; proves commutativity of conjunction.
* ``set-diff``: a typed set-theory fragment (membership, extensional
  set equality, empty set, difference, all as proposition rewrite
  rules); proves that the difference of a set with itself is empty.
* ``pair-fst-snd``: projections over pairs as term rewrite rules; the
  projection equation collapses to reflexivity by rewriting alone.
* ``pred-decomp``: a binary-predicate refutation whose Pred node
  exercises the decomposition into equality-substitution steps.
"""

from __future__ import annotations

from . import llproof, tff
from .tff import (
    And,
    Eq,
    ExtDecl,
    Forall,
    ForallType,
    Fun,
    FunDecl,
    Iff,
    Implies,
    Not,
    Pred,
    PredDecl,
    PropRule,
    TCons,
    TffTheory,
    TermRule,
    TVar,
    TypeCons,
    Var,
)

# ---------------------------------------------------------------------------
# Booleans

_BOOL = TCons("bool")
_TRUE = Fun("true")
_FALSE = Fun("false")


def _notb(x: tff.TffTerm) -> Fun:
    return Fun("notb", (), (x,))


def _andb(x: tff.TffTerm, y: tff.TffTerm) -> Fun:
    return Fun("andb", (), (x, y))


def _orb(x: tff.TffTerm, y: tff.TffTerm) -> Fun:
    return Fun("orb", (), (x, y))


def bool_theory() -> TffTheory:
    """Booleans with idempotent/associative/distributive rewrite rules
    and the two case-split extension rules."""
    a, b, c = Var("a"), Var("b"), Var("c")
    t, e = Var("t"), Var("e")
    ctx1 = (("a", _BOOL),)
    ctx2 = (("a", _BOOL), ("b", _BOOL))
    ctx3 = (("a", _BOOL), ("b", _BOOL), ("c", _BOOL))
    rules = [
        TermRule((), ctx1, _andb(_TRUE, a), a),
        TermRule((), ctx1, _andb(a, _TRUE), a),
        TermRule((), ctx1, _andb(_FALSE, a), _FALSE),
        TermRule((), ctx1, _andb(a, _FALSE), _FALSE),
        TermRule((), ctx1, _andb(a, a), a),
        TermRule((), ctx3, _andb(a, _andb(b, c)), _andb(_andb(a, b), c)),
        TermRule((), ctx1, _orb(_TRUE, a), _TRUE),
        TermRule((), ctx1, _orb(a, _TRUE), _TRUE),
        TermRule((), ctx1, _orb(_FALSE, a), a),
        TermRule((), ctx1, _orb(a, _FALSE), a),
        TermRule((), ctx1, _orb(a, a), a),
        TermRule((), ctx3, _orb(a, _orb(b, c)), _orb(_orb(a, b), c)),
        TermRule((), (), _notb(_TRUE), _FALSE),
        TermRule((), (), _notb(_FALSE), _TRUE),
        TermRule((), ctx1, _notb(_notb(a)), a),
        TermRule((), ctx2, _notb(_orb(a, b)), _andb(_notb(a), _notb(b))),
        TermRule((), ctx2, _notb(_andb(a, b)), _orb(_notb(a), _notb(b))),
        TermRule((), ctx3, _andb(a, _orb(b, c)), _orb(_andb(a, b), _andb(a, c))),
        TermRule((), ctx3, _andb(_orb(a, b), c), _orb(_andb(a, c), _andb(b, c))),
        TermRule(("al",), (("t", TVar("al")), ("e", TVar("al"))),
                 Fun("ifte", (TVar("al"),), (_TRUE, t, e)), t),
        TermRule(("al",), (("t", TVar("al")), ("e", TVar("al"))),
                 Fun("ifte", (TVar("al"),), (_FALSE, t, e)), e),
    ]
    return TffTheory(
        "bool",
        (
            TypeCons("bool", 0),
            FunDecl("false", (), (), _BOOL),
            FunDecl("true", (), (), _BOOL),
            FunDecl("notb", (), (_BOOL,), _BOOL),
            FunDecl("andb", (), (_BOOL, _BOOL), _BOOL),
            FunDecl("orb", (), (_BOOL, _BOOL), _BOOL),
            FunDecl("ifte", ("al",), (_BOOL, TVar("al"), TVar("al")), TVar("al")),
            *rules,
            ExtDecl("bool-case-notforall"),
            ExtDecl("bool-case-exists"),
        ),
    )


def bool_commute_goal() -> tff.TffFormula:
    x, y = Var("x"), Var("y")
    return Forall("x", _BOOL, Forall("y", _BOOL, Eq(_BOOL, _andb(x, y), _andb(y, x))))


def bool_commute_proof() -> llproof.LLProof:
    """Case split on the outer variable; each branch closes by reflexivity
    after the boolean rules rewrite the instance."""
    x, y = Var("x"), Var("y")
    inner = Eq(_BOOL, _andb(x, y), _andb(y, x))

    def branch(instance: tff.TffFormula, refl_term: tff.TffTerm) -> llproof.LLProof:
        # instance is the rewritten hypothesis: not (forall y. lhs = rhs)
        eq = instance.body.body  # the equality under not/forall
        assert isinstance(eq, Eq)
        leaf = llproof.LLProof(llproof.Neq(_BOOL, refl_term))
        return llproof.LLProof(
            llproof.NotForall(_BOOL, "y", eq, "a"),
            (leaf,),
        )

    true_case = Not(Forall("y", _BOOL, Eq(_BOOL, y, y)))
    false_case = Not(Forall("y", _BOOL, Eq(_BOOL, _FALSE, _FALSE)))
    ext = llproof.Ext(
        "bool-case-notforall",
        (llproof.AbsArg("x", _BOOL, Forall("y", _BOOL, inner)),),
        (Not(bool_commute_goal()),),
        ((true_case,), (false_case,)),
    )
    return llproof.LLProof(
        ext,
        (branch(true_case, Var("a")), branch(false_case, _FALSE)),
    )


# ---------------------------------------------------------------------------
# Set theory fragment

_AL = TVar("al")


def _set(ty: tff.TffType) -> TCons:
    return TCons("set", (ty,))


def _in(ty: tff.TffType, x: tff.TffTerm, s: tff.TffTerm) -> Pred:
    return Pred("in", (ty,), (x, s))


def _eqset(ty: tff.TffType, s: tff.TffTerm, t: tff.TffTerm) -> Pred:
    return Pred("eqset", (ty,), (s, t))


def _empty(ty: tff.TffType) -> Fun:
    return Fun("empty", (ty,), ())


def _minus(ty: tff.TffType, s: tff.TffTerm, t: tff.TffTerm) -> Fun:
    return Fun("minus", (ty,), (s, t))


def set_theory() -> TffTheory:
    """Membership, extensional set equality, empty set, and difference,
    with the three axioms installed as proposition rewrite rules."""
    s, t, x = Var("s"), Var("t"), Var("x")
    return TffTheory(
        "set",
        (
            TypeCons("set", 1),
            PredDecl("in", ("al",), (_AL, _set(_AL))),
            PredDecl("eqset", ("al",), (_set(_AL), _set(_AL))),
            FunDecl("empty", ("al",), (), _set(_AL)),
            FunDecl("minus", ("al",), (_set(_AL), _set(_AL)), _set(_AL)),
            PropRule(
                ("al",), (("s", _set(_AL)), ("t", _set(_AL))),
                _eqset(_AL, s, t),
                Forall("x", _AL, Iff(_in(_AL, x, s), _in(_AL, x, t))),
            ),
            PropRule(("al",), (("x", _AL),), _in(_AL, x, _empty(_AL)), tff.Bottom()),
            PropRule(
                ("al",), (("x", _AL), ("s", _set(_AL)), ("t", _set(_AL))),
                _in(_AL, x, _minus(_AL, s, t)),
                And(_in(_AL, x, s), Not(_in(_AL, x, t))),
            ),
        ),
    )


def set_diff_goal() -> tff.TffFormula:
    s = Var("s")
    return ForallType(
        "al", Forall("s", _set(_AL), _eqset(_AL, _minus(_AL, s, s), _empty(_AL)))
    )


def set_diff_proof() -> llproof.LLProof:
    tau = TVar("tau")
    s, c1, c2 = Var("s"), Var("c1"), Var("c2")
    diff = _minus(tau, c1, c1)
    in_diff = _in(tau, c2, diff)
    in_empty = _in(tau, c2, _empty(tau))

    ax = llproof.LLProof(llproof.Ax(_in(tau, c2, c1)))
    and_node = llproof.LLProof(
        llproof.And(_in(tau, c2, c1), Not(_in(tau, c2, c1))),
        (ax,),
        (in_diff,),
    )
    bot = llproof.LLProof(llproof.Bot(), (), (in_empty,))
    notiff = llproof.LLProof(
        llproof.NotIff(in_diff, in_empty),
        (bot, and_node),
    )
    inner_notforall = llproof.LLProof(
        llproof.NotForall(tau, "x", Iff(_in(tau, Var("x"), diff), _in(tau, Var("x"), _empty(tau))), "c2"),
        (notiff,),
        (Not(_eqset(tau, diff, _empty(tau))),),
    )
    outer_notforall = llproof.LLProof(
        llproof.NotForall(_set(tau), "s", _eqset(tau, _minus(tau, s, s), _empty(tau)), "c1"),
        (inner_notforall,),
    )
    return llproof.LLProof(
        llproof.NotForallType(
            "al", Forall("s", _set(_AL), _eqset(_AL, _minus(_AL, s, s), _empty(_AL))), "tau"
        ),
        (outer_notforall,),
    )


# ---------------------------------------------------------------------------
# Pairs: projections collapse the goal to reflexivity

_ELEM = TCons("elem")
_PROD = TCons("prod")


def pair_theory() -> TffTheory:
    x, y = Var("x"), Var("y")
    pair = Fun("pair", (), (x, y))
    ctx = (("x", _ELEM), ("y", _ELEM))
    return TffTheory(
        "pairs",
        (
            TypeCons("elem", 0),
            TypeCons("prod", 0),
            FunDecl("a", (), (), _ELEM),
            FunDecl("pair", (), (_ELEM, _ELEM), _PROD),
            FunDecl("fst", (), (_PROD,), _ELEM),
            FunDecl("snd", (), (_PROD,), _ELEM),
            TermRule((), ctx, Fun("fst", (), (pair,)), x),
            TermRule((), ctx, Fun("snd", (), (pair,)), y),
        ),
    )


def pair_goal() -> tff.TffFormula:
    a = Fun("a")
    pp = Fun("pair", (), (a, a))
    return Eq(_ELEM, Fun("fst", (), (pp,)), Fun("snd", (), (pp,)))


def pair_proof() -> llproof.LLProof:
    """Single reflexivity refutation: the projections rewrite both sides
    to the same constant."""
    return llproof.LLProof(
        llproof.Neq(_ELEM, Fun("a")),
        (),
        (Not(pair_goal()),),
    )


# ---------------------------------------------------------------------------
# Predicate decomposition demo

_TAU = TCons("tau")


def pred_decomp_theory() -> TffTheory:
    return TffTheory(
        "preddemo",
        (
            TypeCons("tau", 0),
            PredDecl("P", (), (_TAU, _TAU)),
            FunDecl("c1", (), (), _TAU),
            FunDecl("c2", (), (), _TAU),
            FunDecl("d1", (), (), _TAU),
            FunDecl("d2", (), (), _TAU),
            TermRule((), (), Fun("d1"), Fun("c1")),
            TermRule((), (), Fun("d2"), Fun("c2")),
        ),
    )


def pred_decomp_goal() -> tff.TffFormula:
    lhs = Pred("P", (), (Fun("c1"), Fun("c2")))
    rhs = Pred("P", (), (Fun("d1"), Fun("d2")))
    return Implies(lhs, rhs)


def pred_decomp_proof() -> llproof.LLProof:
    lhs = Pred("P", (), (Fun("c1"), Fun("c2")))
    rhs = Pred("P", (), (Fun("d1"), Fun("d2")))
    pred = llproof.Pred(
        "P", (), (Fun("c1"), Fun("c2")), (Fun("d1"), Fun("d2")), (_TAU, _TAU)
    )
    leaves = (
        llproof.LLProof(llproof.Neq(_TAU, Fun("c1")), (), (Not(Eq(_TAU, Fun("c1"), Fun("d1"))),)),
        llproof.LLProof(llproof.Neq(_TAU, Fun("c2")), (), (Not(Eq(_TAU, Fun("c2"), Fun("d2"))),)),
    )
    notimp = llproof.LLProof(
        llproof.NotImp(lhs, rhs),
        (llproof.LLProof(pred, leaves),),
    )
    return notimp


BUILTINS = {
    "bool-commute": (bool_theory, bool_commute_goal, bool_commute_proof),
    "set-diff": (set_theory, set_diff_goal, set_diff_proof),
    "pair-fst-snd": (pair_theory, pair_goal, pair_proof),
    "pred-decomp": (pred_decomp_theory, pred_decomp_goal, pred_decomp_proof),
}
