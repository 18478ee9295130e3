import itertools

import pytest

from microhol import kernel
from microhol.bootstrap import (
    FALSE,
    TRUE,
    beta_conv,
    install_logic,
    mk_conj,
    mk_disj,
    mk_exists,
    mk_forall,
    mk_imp,
    mk_neg,
    sym,
)
from microhol.kernel import DuplicateName, Theory, VarFreeInHyps, assume, refl, tracing, replay_trace
from microhol.semantics import (
    FALSE_ELEM,
    TRUE_ELEM,
    Model,
    Valuation,
    eval_term,
    is_valid,
    theorem_sequent,
)
from microhol.syntax import (
    BOOL,
    IND,
    Abs,
    Comb,
    Const,
    Substitution,
    Var,
    alpha_equiv,
    fn,
    mk_abs,
    mk_comb,
    mk_eq,
)

p = Var("p", BOOL)
q = Var("q", BOOL)
x = Var("x", IND)
y = Var("y", IND)


class TestInstallation:
    def test_false_is_literally_forall_p_p(self, theory):
        rhs = theory.definitions["F"]
        want = mk_forall(p, p)
        assert rhs == want

    def test_all_constants_present(self, theory):
        for name in ("T", "and", "imp", "forall", "exists", "or", "F", "not",
                     "ONE_ONE", "ONTO"):
            assert theory.has_constant(name)

    def test_reinstall_rejected(self, theory):
        with pytest.raises(DuplicateName):
            install_logic(theory)

    def test_signature_handles(self, logic):
        sig = logic.signature
        assert sig.F.const.name == "F"
        assert sig.conj.definition.assumptions == ()

    def test_t_true_under_every_valuation(self, theory):
        for n in (1, 2, 3):
            assert eval_term(TRUE, Valuation(Model(ind_size=n)), theory) == TRUE_ELEM

    def test_definitional_theorems_valid(self, logic):
        for dc in (
            logic.signature.T,
            logic.signature.conj,
            logic.signature.imp,
            logic.signature.disj,
            logic.signature.F,
            logic.signature.neg,
        ):
            verdict = is_valid(theorem_sequent(dc.definition), Model(ind_size=2),
                               theory=logic.theory)
            assert verdict.valid, dc.const.name


class TestTruthTables:
    def test_connectives_exhaustively(self, theory):
        cases = {
            "and": lambda a, b: a and b,
            "or": lambda a, b: a or b,
            "imp": lambda a, b: (not a) or b,
        }
        for name, fnc in cases.items():
            c = Const(name, fn(BOOL, fn(BOOL, BOOL)))
            for a, b in itertools.product((False, True), repeat=2):
                v = Valuation(Model(), {}, {p: int(a), q: int(b)})
                got = eval_term(mk_comb(mk_comb(c, p), q), v, theory)
                assert got == int(fnc(a, b)), (name, a, b)
        for a in (False, True):
            v = Valuation(Model(), {}, {p: int(a)})
            got = eval_term(mk_neg(p), v, theory)
            assert got == int(not a)
            got = eval_term(mk_eq(p, q), Valuation(Model(), {}, {p: int(a), q: 1}), theory)
            assert got == int(a == True)

    def test_quantifiers_over_bool(self, theory):
        # forall/exists at A = bool against all 4 predicate tables
        pv = Var("P", fn(BOOL, BOOL))
        fa = mk_comb(Const("forall", fn(fn(BOOL, BOOL), BOOL)), pv)
        ex = mk_comb(Const("exists", fn(fn(BOOL, BOOL), BOOL)), pv)
        for table in range(4):
            entries = [(table >> i) & 1 for i in range(2)]
            v = Valuation(Model(), {}, {pv: table})
            assert eval_term(fa, v, theory) == int(all(entries))
            assert eval_term(ex, v, theory) == int(any(entries))

    def test_proved_tables_match_semantics(self, logic):
        # each proved value lemma |- op args = V evaluates to true
        for (name, args), th in logic.tables.items():
            verdict = is_valid(theorem_sequent(th), Model(ind_size=1),
                               theory=logic.theory)
            assert verdict.valid, (name, args)


class TestDerivedRules:
    def test_mp_from_self_implication(self, logic):
        imp_self = logic.disch(p, assume(p))  # |- p ==> p
        th = logic.mp(imp_self, assume(p))
        assert th.assumptions == (p,)
        assert th.conclusion == p

    def test_spec_example(self, logic):
        allx = logic.gen(x, refl(x))  # |- !x. x = x
        th = logic.spec(y, allx)
        assert th.conclusion == mk_eq(y, y)

    def test_beta_conv_replays_inst_of_primitive_beta(self):
        # beta_conv((\x. x) y) must equal inst_rule([y/x], beta((\x. x) x))
        idx = mk_abs(x, x)
        via_conv = beta_conv(mk_comb(idx, y))
        prim = kernel.beta(mk_comb(idx, x))
        via_inst = kernel.inst_rule(Substitution.of_terms({x: y}), prim)
        assert alpha_equiv(via_conv.conclusion, via_inst.conclusion)
        assert via_conv.assumptions == via_inst.assumptions == ()

    def test_gen_side_condition(self, logic):
        with pytest.raises(VarFreeInHyps):
            logic.gen(x, assume(mk_eq(x, y)))

    def test_sym(self, logic):
        th = sym(assume(mk_eq(p, q)))
        assert th.conclusion == mk_eq(q, p)

    def test_conj_and_projections(self, logic):
        th = logic.conj(assume(p), assume(q))
        assert th.conclusion == mk_conj(p, q)
        back1 = logic.conjunct1(th)
        back2 = logic.conjunct2(th)
        assert back1.conclusion == p
        assert back2.conclusion == q

    def test_disch_undisch_roundtrip(self, logic):
        th = logic.disch(p, assume(p))
        again = logic.undisch(th)
        assert again.conclusion == p
        assert again.assumptions == (p,)

    def test_disj_cases(self, logic):
        em = kernel.inst_rule(
            Substitution.of_terms({Var("t", BOOL): p}), logic.EXCLUDED_MIDDLE
        )
        case2 = logic.contr(p, logic.mp(logic.not_elim(assume(mk_neg(p))), assume(p)))
        out = logic.disj_cases(em, assume(p), case2)
        assert out.conclusion == p
        assert out.assumptions == (p,)

    def test_exists_and_choose(self, logic):
        pv = Var("P", fn(IND, BOOL))
        goal = mk_exists(x, mk_comb(pv, x))
        intro = logic.exists_intro(goal, y, assume(mk_comb(pv, y)))
        assert alpha_equiv(intro.conclusion, goal)
        w = Var("w", IND)
        body = logic.exists_intro(goal, w, assume(mk_comb(pv, w)))
        out = logic.choose(w, intro, body)
        assert alpha_equiv(out.conclusion, goal)

    def test_select_rule(self, logic):
        pv = Var("P", fn(IND, BOOL))
        goal = mk_exists(x, mk_comb(pv, x))
        intro = logic.exists_intro(goal, y, assume(mk_comb(pv, y)))
        sel = logic.select_rule(intro)
        # concludes P (@x. P x)
        assert isinstance(sel.conclusion, Comb)
        assert sel.conclusion.rator == pv

    def test_ccontr(self, logic):
        to_f = logic.mp(logic.not_elim(assume(mk_neg(p))), assume(p))
        th = logic.ccontr(p, to_f)
        assert th.conclusion == p
        assert th.assumptions == (p,)

    def test_eq_imp_rule(self, logic):
        fwd, bwd = logic.eq_imp_rule(assume(mk_eq(p, q)))
        assert fwd.conclusion == mk_imp(p, q)
        assert bwd.conclusion == mk_imp(q, p)


class TestSoundnessOfDerived:
    def test_excluded_middle_valid(self, logic):
        verdict = is_valid(
            theorem_sequent(logic.EXCLUDED_MIDDLE), Model(ind_size=2),
            theory=logic.theory,
        )
        assert verdict.valid

    def test_derived_rules_trace_to_primitives(self, logic):
        with tracing() as log:
            th = logic.conj(assume(p), assume(q))
        assert replay_trace(log)
        names = {name for name, _, _ in log}
        assert names <= set(kernel.PRIMITIVE_RULES)

    def test_choice_axiom_valid_in_model(self, logic):
        th = kernel.axiom_choice(logic.theory)
        verdict = is_valid(theorem_sequent(th), Model(ind_size=3), theory=logic.theory)
        assert verdict.valid

    def test_extensionality_valid_in_model(self, logic):
        th = kernel.axiom_extensionality()
        verdict = is_valid(theorem_sequent(th), Model(ind_size=2), theory=logic.theory)
        assert verdict.valid
