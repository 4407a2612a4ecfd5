"""Proof trees: rule preludes, elimination, compilation, certificates."""

import pytest

from mutations import enumerate_mutations
from lpm import dkparse, embed, examples, llproof, signature, tff
from lpm.dkparse import Decl, Def, Rule, parse_term
from lpm.llproof import LLProof, LLSequent, check_certificate, eliminate_pred_fun, translate_sequent
from lpm.terms import App, Const, FVar, Lam, app


def T(text, delta=()):
    return parse_term(text, delta)


# ---------------------------------------------------------------------------
# rules prelude


def test_deep_prelude_declares_axiom_rule():
    entries = llproof.rules_prelude("deep")
    assert Decl("rules.R_Ax", T("P : logic.Prop -> logic.prf P -> logic.prf (logic.not P) -> logic.prf logic.False")) in entries


def test_deep_prelude_has_the_24_rule_constants():
    entries = llproof.rules_prelude("deep")
    assert len(entries) == 24
    names = [e.name for e in entries]
    assert names[0] == "rules.R_bot" and "rules.R_Subst" in names


def test_shallow_prelude_defines_axiom_rule():
    expected = dkparse.parse_file(
        "[P : logic.Prop] rules.R_Ax P --> "
        "H1 : logic.prf P => H2 : logic.prf (logic.not P) => H2 H1.\n"
    )[0]
    assert expected in llproof.rules_prelude("shallow")


def test_shallow_prelude_sole_axiom_is_excluded_middle():
    from lpm.terms import spine

    entries = llproof.rules_prelude("shallow")
    declared = {e.name for e in entries if isinstance(e, Decl)}
    defined = set()
    for e in entries:
        if isinstance(e, Rule):
            head, _ = spine(e.lhs)
            defined.add(head.name)
        elif isinstance(e, Def):
            defined.add(e.name)
    assert declared - defined == {"rules.ExMid"}


def test_rule_preludes_type_check(logic_deep, logic_shallow):
    signature.install_entries(logic_deep, llproof.rules_prelude("deep"))
    signature.install_entries(logic_shallow, llproof.rules_prelude("shallow"))


def test_shallow_rules_unfold_to_proofs(base_sigs):
    # R_bot applied to a bottom proof reduces to that proof
    sig = base_sigs("bool-commute", "shallow")
    from lpm import kernel

    t = App(Const("rules.R_bot"), FVar("h"))
    got = kernel.whnf(sig, t)
    assert got == FVar("h")


# ---------------------------------------------------------------------------
# eliminate_pred_fun


def _pred_node():
    tau = tff.TCons("tau")
    return llproof.Pred(
        "P", (), (tff.Fun("c1"), tff.Fun("c2")), (tff.Fun("d1"), tff.Fun("d2")), (tau, tau)
    )


def test_eliminate_binary_pred_shape():
    tau = tff.TCons("tau")
    leaves = (
        LLProof(llproof.Neq(tau, tff.Fun("c1")), (), (tff.Not(tff.Eq(tau, tff.Fun("c1"), tff.Fun("d1"))),)),
        LLProof(llproof.Neq(tau, tff.Fun("c2")), (), (tff.Not(tff.Eq(tau, tff.Fun("c2"), tff.Fun("d2"))),)),
    )
    tree = LLProof(_pred_node(), leaves)
    out = eliminate_pred_fun(tree)
    # outer Subst rewrites the first argument
    assert isinstance(out.rule, llproof.Subst)
    assert out.rule.t == tff.Fun("c1") and out.rule.u == tff.Fun("d1")
    assert out.premises[0] is not None and isinstance(out.premises[0].rule, llproof.Neq)
    inner = out.premises[1]
    assert isinstance(inner.rule, llproof.Subst)
    assert inner.rule.t == tff.Fun("c2") and inner.rule.u == tff.Fun("d2")
    # the inner substitution context already carries the rewritten first slot
    assert inner.rule.body == tff.Pred("P", (), (tff.Fun("d1"), tff.Var(inner.rule.var)))
    ax = inner.premises[1]
    assert ax.rule == llproof.Ax(tff.Pred("P", (), (tff.Fun("d1"), tff.Fun("d2"))))
    # consumed hypotheses thread the original conclusions through
    assert out.conclusion_hyps() == (tff.Pred("P", (), (tff.Fun("c1"), tff.Fun("c2"))),)
    assert ax.conclusion_hyps()[1] == tff.Not(tff.Pred("P", (), (tff.Fun("d1"), tff.Fun("d2"))))


def test_eliminate_nullary_pred_is_single_axiom():
    node = LLProof(llproof.Pred("Q", (), (), (), ()))
    out = eliminate_pred_fun(node)
    assert out.rule == llproof.Ax(tff.Pred("Q", (), ()))
    assert out.premises == ()


def test_eliminate_ternary_fun_ends_in_reflexivity():
    tau = tff.TCons("tau")
    ts = tuple(tff.Fun(c) for c in ("c1", "c2", "c1"))
    us = tuple(tff.Fun(c) for c in ("d1", "d2", "d1"))
    leaves = tuple(
        LLProof(llproof.Neq(tau, t), (), (tff.Not(tff.Eq(tau, t, u)),)) for t, u in zip(ts, us)
    )
    node = LLProof(llproof.Fun("g", (), ts, us, (tau, tau, tau), tau), leaves)
    out = eliminate_pred_fun(node)
    depth = 0
    cur = out
    while isinstance(cur.rule, llproof.Subst):
        depth += 1
        cur = cur.premises[1]
    assert depth == 3
    assert isinstance(cur.rule, llproof.Neq)
    assert cur.rule.t == tff.Fun("g", (), us)


def test_eliminate_arity_mismatch():
    node = LLProof(llproof.Pred("P", (), (tff.Fun("c1"),), (), ()))
    with pytest.raises(llproof.CertificateError):
        eliminate_pred_fun(node)


def test_eliminate_preserves_other_nodes():
    tree = examples.set_diff_proof()
    assert eliminate_pred_fun(tree) == tree


def test_eliminate_fresh_variable_avoids_clash():
    tau = tff.TCons("tau")
    z = tff.Var("z")  # the default abstraction name occurs in the terms
    node = LLProof(
        llproof.Pred("P", (), (z,), (z,), (tau,)),
        (LLProof(llproof.Neq(tau, z), (), (tff.Not(tff.Eq(tau, z, z)),)),),
    )
    out = eliminate_pred_fun(node)
    assert out.rule.var != "z"


# ---------------------------------------------------------------------------
# translate_sequent


def test_translate_sequent_single_hypothesis():
    phi = tff.Or(tff.Bottom(), tff.Top())
    got = translate_sequent(LLSequent((phi,)))
    assert got == [("h0", embed.prf(T("logic.or logic.False logic.True")))]


def test_translate_sequent_empty():
    assert translate_sequent(LLSequent(())) == []


def test_translate_sequent_duplicates_get_distinct_names():
    phi = tff.Top()
    got = translate_sequent(LLSequent((phi, phi)))
    assert [n for n, _ in got] == ["h0", "h1"]
    assert got[0][1] == got[1][1]


def test_node_conclusion_sequent():
    node = LLProof(llproof.Ax(tff.Top()))
    ambient = (tff.Bottom(),)
    assert node.conclusion(ambient) == LLSequent((tff.Bottom(), tff.Top(), tff.Not(tff.Top())))


# ---------------------------------------------------------------------------
# translate_proof


def test_or_node_translation_shape():
    # the disjunction node applies its rule constant to both operand
    # formulas, one continuation per branch, then the consumed hypothesis
    bot = tff.Bottom()
    tree = LLProof(
        llproof.Or(bot, bot),
        (LLProof(llproof.Bot()), LLProof(llproof.Bot())),
    )
    thy = tff.TffTheory("t", ())
    got = llproof.translate_proof(tree, {tff.Or(bot, bot): "h9"}, thy)
    from lpm.terms import abstract

    f = Const("logic.False")
    prf_f = embed.prf(f)

    def cont(h):
        return Lam(h, prf_f, abstract(App(Const("rules.R_bot"), FVar(h)), h))

    expected = app(Const("rules.R_or"), f, f, cont("h10"), cont("h11"), FVar("h9"))
    assert got == expected


def test_translate_proof_missing_hypothesis_path():
    tree = LLProof(llproof.Bot())
    thy = tff.TffTheory("t", ())
    with pytest.raises(llproof.MissingHypothesis) as e:
        llproof.translate_proof(tree, {}, thy)
    assert e.value.path == ()


def test_translate_proof_uses_theory_axioms():
    thy = tff.TffTheory(
        "t",
        (
            tff.TypeCons("b", 0),
            tff.FunDecl("c", (), (), tff.TCons("b")),
            tff.Axiom("bad", tff.Bottom()),
        ),
    )
    tree = LLProof(llproof.Bot())  # consumes [bot], provided by the axiom
    got = llproof.translate_proof(tree, {}, thy)
    assert got == App(Const("rules.R_bot"), Const("t.bad"))


def test_fig11_certificate_term_matches_reference():
    # the emitted boolean-commutativity certificate equals the reference
    # term built by hand (hypothesis variable names are display-only)
    from references import bool_commute_reference_body

    v = check_certificate(
        examples.bool_theory(), examples.bool_commute_goal(), examples.bool_commute_proof()
    )
    assert v.accepted
    assert v.entries[0].body == bool_commute_reference_body()


# ---------------------------------------------------------------------------
# check_certificate


@pytest.mark.parametrize("name", sorted(examples.BUILTINS))
@pytest.mark.parametrize("mode", ["deep", "shallow"])
def test_corpus_certificates_accepted(base_sigs, name, mode):
    mk_thy, mk_goal, mk_proof = examples.BUILTINS[name]
    v = check_certificate(mk_thy(), mk_goal(), mk_proof(), mode=mode, sig=base_sigs(name, mode))
    assert v.accepted, v.error


def test_dual_mode_stability(base_sigs):
    # deep acceptance implies shallow acceptance across the corpus
    for name, (mk_thy, mk_goal, mk_proof) in examples.BUILTINS.items():
        deep = check_certificate(mk_thy(), mk_goal(), mk_proof(), "deep", sig=base_sigs(name, "deep"))
        shallow = check_certificate(mk_thy(), mk_goal(), mk_proof(), "shallow", sig=base_sigs(name, "shallow"))
        assert not deep.accepted or shallow.accepted


def test_swapped_ax_hypotheses_rejected_at_node(base_sigs):
    # flipping the axiom-node parameter asks for hypotheses that do not exist
    from mutations import _replace_at

    proof = examples.set_diff_proof()
    mutated = _replace_at(
        proof, (0, 0, 0, 1, 0), lambda n: LLProof(llproof.Ax(tff.Not(n.rule.p)), n.premises, n.concls)
    )
    v = check_certificate(examples.set_theory(), examples.set_diff_goal(), mutated,
                          sig=base_sigs("set-diff", "shallow"))
    assert not v.accepted
    assert v.path == (0, 0, 0, 1, 0)


def test_congruence_tolerant_hypotheses(base_sigs):
    # rewriting a consumed-hypothesis annotation by one rule step anywhere
    # keeps the certificate acceptable
    proof = examples.set_diff_proof()
    # the [in tau c2 (minus tau c1 c1)] override is congruent to the
    # conjunction it unfolds to
    unfolded = tff.And(
        tff.Pred("in", (tff.TVar("tau"),), (tff.Var("c2"), tff.Var("c1"))),
        tff.Not(tff.Pred("in", (tff.TVar("tau"),), (tff.Var("c2"), tff.Var("c1")))),
    )
    from mutations import _replace_at

    mutated = _replace_at(
        proof, (0, 0, 0, 1), lambda n: LLProof(n.rule, n.premises, (unfolded,))
    )
    v = check_certificate(examples.set_theory(), examples.set_diff_goal(), mutated,
                          sig=base_sigs("set-diff", "shallow"))
    assert v.accepted, v.error


def test_freshness_violation_rejected(base_sigs):
    from mutations import _replace_at
    from dataclasses import replace

    proof = examples.set_diff_proof()
    # inner NotForall reuses the outer eigenvariable c1
    mutated = _replace_at(
        proof, (0, 0), lambda n: LLProof(replace(n.rule, const="c1"), n.premises, n.concls)
    )
    v = check_certificate(examples.set_theory(), examples.set_diff_goal(), mutated,
                          sig=base_sigs("set-diff", "shallow"))
    assert not v.accepted
    assert "c1" in v.error and v.path is not None


def test_unregistered_ext_rejected(base_sigs):
    proof = examples.bool_commute_proof()
    from dataclasses import replace

    bad = LLProof(replace(proof.rule, name="no-such"), proof.premises, proof.concls)
    v = check_certificate(examples.bool_theory(), examples.bool_commute_goal(), bad,
                          sig=base_sigs("bool-commute", "shallow"))
    assert not v.accepted and "no-such" in v.error


def test_mutation_sample_rejected(base_sigs):
    muts = enumerate_mutations(examples.bool_commute_proof())[:8]
    for label, mutated in muts:
        v = check_certificate(examples.bool_theory(), examples.bool_commute_goal(), mutated,
                              sig=base_sigs("bool-commute", "shallow"))
        assert not v.accepted, label
        assert v.path is not None, label


def _mini_certificates():
    """Small refutations exercising every rule tag the corpus misses."""
    top, bot = tff.Top(), tff.Bottom()
    boolc = tff.TCons("bool")
    t_true, t_false = tff.Fun("true"), tff.Fun("false")
    eq = lambda a, b: tff.Eq(boolc, a, b)
    x = tff.Var("x")

    def leaf(rule, concls=None):
        return LLProof(rule, (), concls)

    nottop = leaf(llproof.NotTop())
    bot_leaf = leaf(llproof.Bot())
    out = []

    out.append(("nottop", top, nottop))
    out.append(("cut-ax", top, LLProof(
        llproof.Cut(top),
        (leaf(llproof.Ax(top)), nottop),
    )))
    out.append(("notnot-bot", tff.Not(bot), LLProof(llproof.NotNot(bot), (bot_leaf,))))
    out.append(("or", tff.Not(tff.Or(bot, bot)), LLProof(
        llproof.NotNot(tff.Or(bot, bot)),
        (LLProof(llproof.Or(bot, bot), (bot_leaf, bot_leaf)),),
    )))
    out.append(("imp", tff.Not(tff.Implies(top, bot)), LLProof(
        llproof.NotNot(tff.Implies(top, bot)),
        (LLProof(llproof.Imp(top, bot), (nottop, bot_leaf)),),
    )))
    out.append(("iff", tff.Not(tff.Iff(top, bot)), LLProof(
        llproof.NotNot(tff.Iff(top, bot)),
        (LLProof(llproof.Iff(top, bot), (nottop, bot_leaf)),),
    )))
    out.append(("notand", tff.And(top, top), LLProof(
        llproof.NotAnd(top, top), (nottop, nottop),
    )))
    out.append(("notor", tff.Or(top, bot), LLProof(
        llproof.NotOr(top, bot), (nottop,),
    )))
    out.append(("notimp", tff.Implies(bot, bot), LLProof(
        llproof.NotImp(bot, bot), (bot_leaf,),
    )))
    out.append(("sym", tff.Implies(eq(t_true, t_false), eq(t_false, t_true)), LLProof(
        llproof.NotImp(eq(t_true, t_false), eq(t_false, t_true)),
        (leaf(llproof.Sym(boolc, t_true, t_false)),),
    )))
    out.append(("forall-witness", tff.Implies(tff.Forall("x", boolc, eq(x, x)), eq(t_true, t_true)), LLProof(
        llproof.NotImp(tff.Forall("x", boolc, eq(x, x)), eq(t_true, t_true)),
        (LLProof(
            llproof.Forall(boolc, "x", eq(x, x), t_true),
            (leaf(llproof.Ax(eq(t_true, t_true))),),
        ),),
    )))
    out.append(("exists-fresh", tff.Not(tff.Exists("x", boolc, bot)), LLProof(
        llproof.NotNot(tff.Exists("x", boolc, bot)),
        (LLProof(llproof.Exists(boolc, "x", bot, "c"), (bot_leaf,)),),
    )))
    out.append(("notexists-witness", tff.Exists("x", boolc, top), LLProof(
        llproof.NotExists(boolc, "x", top, t_true), (nottop,),
    )))
    out.append(("foralltype-witness", tff.Implies(tff.ForallType("al", top), top), LLProof(
        llproof.NotImp(tff.ForallType("al", top), top),
        (LLProof(
            llproof.ForallType("al", top, boolc),
            (leaf(llproof.Ax(top)),),
        ),),
    )))
    out.append(("existstype-fresh", tff.Not(tff.ExistsType("al", bot)), LLProof(
        llproof.NotNot(tff.ExistsType("al", bot)),
        (LLProof(llproof.ExistsType("al", bot, "fresh_ty"), (bot_leaf,)),),
    )))
    out.append(("notexiststype-witness", tff.ExistsType("al", top), LLProof(
        llproof.NotExistsType("al", top, boolc), (nottop,),
    )))
    out.append(("subst-direct", tff.Implies(eq(t_true, t_false), eq(t_false, t_false)), LLProof(
        llproof.NotImp(eq(t_true, t_false), eq(t_false, t_false)),
        (LLProof(
            llproof.Subst(boolc, "z", eq(tff.Var("z"), t_false), t_true, t_false),
            (
                leaf(llproof.Ax(eq(t_true, t_false))),
                leaf(llproof.Ax(eq(t_false, t_false))),
            ),
        ),),
    )))
    # function congruence closed by a rewriting reflexivity step
    notb = lambda e: tff.Fun("notb", (), (e,))
    fun_goal = eq(notb(t_true), notb(notb(t_false)))
    out.append(("fun-node", fun_goal, LLProof(
        llproof.Fun("notb", (), (t_true,), (notb(t_false),), (boolc,), boolc),
        (leaf(llproof.Neq(boolc, t_true), (tff.Not(eq(t_true, notb(t_false))),)),),
        (tff.Not(fun_goal),),
    )))
    return out


@pytest.mark.parametrize("mode", ["deep", "shallow"])
def test_every_rule_tag_end_to_end(base_sigs, mode):
    sig = base_sigs("bool-commute", mode)
    thy = examples.bool_theory()
    for label, goal, tree in _mini_certificates():
        v = check_certificate(thy, goal, tree, mode, sig=sig)
        assert v.accepted, (label, mode, v.error, v.path)


def test_mini_certificates_cover_all_rule_tags():
    covered = set()

    def walk(p):
        covered.add(type(p.rule).__name__)
        for q in p.premises:
            walk(q)

    for _, _, tree in _mini_certificates():
        walk(tree)
    for name, (_, _, mk_proof) in examples.BUILTINS.items():
        walk(mk_proof())
    walk(llproof.eliminate_pred_fun(examples.pred_decomp_proof()))
    all_tags = {
        "Bot", "NotTop", "Ax", "Cut", "Neq", "Sym", "NotNot", "And", "Or", "Imp",
        "Iff", "NotAnd", "NotOr", "NotImp", "NotIff", "Exists", "Forall",
        "NotExists", "NotForall", "ExistsType", "ForallType", "NotExistsType",
        "NotForallType", "Pred", "Fun", "Subst", "Ext",
    }
    assert covered == all_tags


# ---------------------------------------------------------------------------
# .llpx round trip


@pytest.mark.parametrize("name", sorted(examples.BUILTINS))
def test_proof_file_round_trip(name):
    mk_thy, mk_goal, mk_proof = examples.BUILTINS[name]
    thy, goal, proof = mk_thy(), mk_goal(), mk_proof()
    text = llproof.print_proof(thy, goal, proof)
    goal2, proof2 = llproof.parse_proof(text, thy)
    assert goal2 == goal
    assert proof2 == proof


def test_parse_proof_validates_structure():
    thy = examples.bool_theory()
    with pytest.raises(tff.FormatError):
        llproof.parse_proof("(proof (theory wrong) (goal (top)) (bot))", thy)
    with pytest.raises(tff.FormatError):
        llproof.parse_proof("(proof (theory bool) (goal (top)) (frob))", thy)
