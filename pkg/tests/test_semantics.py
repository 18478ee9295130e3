import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microhol import kernel
from microhol.bootstrap import FALSE, TRUE, install_logic, mk_neg
from microhol.fuzz import RULE_IDS, TermGen, alpha_variant, make_generator, weakened_abs_generator
from microhol.kernel import Theory, assume, new_basic_definition, refl
from microhol.semantics import (
    FALSE_ELEM,
    TRUE_ELEM,
    CarrierOverflow,
    Model,
    UnassignedTypeVar,
    UnassignedVariable,
    UninterpretableConstant,
    Valuation,
    carrier_size,
    decode_table,
    encode_table,
    eval_term,
    fuzz_rule_soundness,
    holds_sequent,
    is_valid,
    theorem_sequent,
)
from microhol.syntax import (
    BOOL,
    IND,
    Const,
    Substitution,
    TyVar,
    Var,
    alpha_equiv,
    eq_const,
    fn,
    mk_abs,
    mk_comb,
    mk_eq,
    vsubst,
)

from .strategies import typed_terms

x = Var("x", BOOL)
xi = Var("i", IND)


class TestCarriers:
    def test_bool_carrier(self):
        assert carrier_size(BOOL, Model()) == 2

    def test_bool_to_bool(self):
        assert carrier_size(fn(BOOL, BOOL), Model()) == 4

    def test_second_order_within_cap(self):
        # 2^(2^2) = 16 tables, the derived count for (bool->bool)->bool
        assert 2 ** (2**2) == 16
        assert carrier_size(fn(fn(BOOL, BOOL), BOOL), Model(cap=16)) == 16

    def test_cap_overflow(self):
        with pytest.raises(CarrierOverflow):
            carrier_size(fn(fn(BOOL, BOOL), BOOL), Model(cap=15))

    def test_ind_size(self):
        assert carrier_size(IND, Model(ind_size=5)) == 5

    def test_unassigned_tyvar(self):
        with pytest.raises(UnassignedTypeVar):
            carrier_size(TyVar("A"), Model())

    def test_table_roundtrip(self):
        for value in range(27):
            entries = decode_table(value, 3, 3)
            assert encode_table(entries, 3) == value

    def test_eval_type_carrier(self, theory):
        from microhol.semantics import eval_type

        v = Valuation(Model(ind_size=3), {"A": 2})
        assert list(eval_type(BOOL, v, theory)) == [0, 1]
        assert len(eval_type(fn(TyVar("A"), BOOL), v, theory)) == 4


class TestEvalTerm:
    def test_equality_is_delta(self, theory):
        v = Valuation(Model())
        value = eval_term(eq_const(BOOL), v, theory)
        # the table sends a to the delta function supported at a
        outer = decode_table(value, 2, 4)
        for a in range(2):
            delta = decode_table(outer[a], 2, 2)
            assert delta == tuple(1 if b == a else 0 for b in range(2))

    def test_false_is_false_everywhere(self, theory):
        for n in (1, 2, 3):
            v = Valuation(Model(ind_size=n))
            assert eval_term(FALSE, v, theory) == FALSE_ELEM

    def test_true(self, theory):
        assert eval_term(TRUE, Valuation(Model()), theory) == TRUE_ELEM

    def test_choice_empty_support(self, theory):
        # @ applied to an empty predicate on ind of size 3 gives element 0
        pred = mk_abs(xi, FALSE)
        sel = Const("@", fn(fn(IND, BOOL), IND))
        v = Valuation(Model(ind_size=3))
        assert eval_term(mk_comb(sel, pred), v, theory) == 0

    def test_choice_minimal_support_brute_force(self, theory):
        # over all 2^3 predicates on a 3-element carrier, choice picks the
        # least element of the support (or 0 when empty)
        model = Model(ind_size=3)
        p = Var("p", fn(IND, BOOL))
        sel = Const("@", fn(fn(IND, BOOL), IND))
        term = mk_comb(sel, p)
        for table in range(2**3):
            expected = 0
            support = [a for a in range(3) if (table >> a) & 1]
            if support:
                expected = min(support)
            v = Valuation(model, {}, {p: table})
            assert eval_term(term, v, theory) == expected

    def test_unassigned_variable(self, theory):
        with pytest.raises(UnassignedVariable):
            eval_term(x, Valuation(Model()), theory)

    def test_assignment_out_of_carrier(self, theory):
        with pytest.raises(Exception):
            eval_term(x, Valuation(Model(), {}, {x: 5}), theory)

    def test_uninterpretable_constant(self):
        with pytest.raises(UninterpretableConstant):
            eval_term(Const("mystery", BOOL), Valuation(Model()), Theory())

    def test_malformed_equality_constant_rejected(self):
        # a hand-built `=` whose two argument types differ must not be
        # interpreted as a cross-carrier comparison
        bad = Const("=", fn(BOOL, fn(IND, BOOL)))
        t = mk_comb(mk_comb(bad, Var("b", BOOL)), Var("i", IND))
        v = Valuation(Model(), {}, {Var("b", BOOL): 0, Var("i", IND): 0})
        with pytest.raises(UninterpretableConstant):
            eval_term(t, v, Theory())

    def test_malformed_choice_constant_rejected(self):
        bad = Const("@", fn(fn(IND, BOOL), BOOL))
        pred = mk_abs(Var("i", IND), Const("T", BOOL))
        with pytest.raises(UninterpretableConstant):
            eval_term(mk_comb(bad, pred), Valuation(Model()), Theory())

    def test_defined_constants_unfold(self, theory):
        # ~F evaluates true by unfolding not and F
        v = Valuation(Model())
        assert eval_term(mk_neg(FALSE), v, theory) == TRUE_ELEM


class TestSequents:
    def test_p_entails_p(self, theory):
        for val in (0, 1):
            v = Valuation(Model(), {}, {x: val})
            assert holds_sequent(((x,), x), v, theory)

    def test_false_sequent_invalid(self, theory):
        verdict = is_valid(((), FALSE), Model(), theory=theory)
        assert not verdict.valid
        assert verdict.exhaustive
        assert verdict.counterexample is not None

    def test_excluded_middle_by_enumeration(self, theory):
        from microhol.bootstrap import mk_disj

        seq = ((), mk_disj(x, mk_neg(x)))
        verdict = is_valid(seq, Model(), theory=theory)
        assert verdict.valid and verdict.exhaustive and verdict.checked == 2

    def test_sampled_verdict_reports_count(self, theory):
        vs = [Var(f"v{i}", fn(IND, IND)) for i in range(4)]
        concl = mk_eq(vs[0], vs[0])
        seq = (tuple(mk_eq(a, b) for a, b in zip(vs, vs[1:])), concl)
        verdict = is_valid(seq, Model(ind_size=3), budget=10, samples=50, theory=theory)
        assert not verdict.exhaustive
        assert verdict.checked <= 50


class TestSemanticInvariants:
    @given(typed_terms(depth=4), st.integers(0, 10**6))
    @settings(max_examples=80, deadline=None)
    def test_compositionality(self, t, seed):
        # eval(f a) = apply(eval f, eval a) on random applications
        from microhol.semantics import _Compiler

        theory = Theory()
        rng = random.Random(seed)
        g = TermGen(rng, max_free=3)
        f = g.term(fn(BOOL, IND), 2)
        a = g.term(BOOL, 2)
        app = mk_comb(f, a)
        model = Model(ind_size=3)
        tyenv = {"A": 2, "B": 2}
        comp = _Compiler(model, tyenv, theory)
        prog = comp.compile(app)
        prog_f = comp.compile(f)
        prog_a = comp.compile(a)
        env_vals = {v: rng.randrange(comp.size_of(v.ty)) for v in comp.slots}
        env = [0] * comp.n_slots
        for v, slot in comp.slots.items():
            env[slot] = env_vals[v]
        from microhol._accel import run_program

        fv = run_program(prog_f, env)
        av = run_program(prog_a, env)
        cod = comp.size_of(IND)
        assert run_program(prog, env) == (fv // cod**av) % cod

    @given(typed_terms(ty=BOOL, depth=4), st.integers(0, 10**6))
    @settings(max_examples=80, deadline=None)
    def test_alpha_invariance(self, t, seed):
        from hypothesis import assume as hyp_assume

        theory = Theory()
        rng = random.Random(seed)
        u = alpha_variant(rng, t)
        assert alpha_equiv(t, u)
        model = Model(ind_size=2)
        from microhol.syntax import free_vars, type_vars_of_term

        tyenv = {name: 2 for name in type_vars_of_term(t)}
        try:
            assignment = {}
            for v in free_vars(t):
                assignment[v] = rng.randrange(
                    carrier_size(v.ty, model, tyenv, theory)
                )
            val = Valuation(model, tyenv, assignment)
            left = eval_term(t, val, theory)
        except CarrierOverflow:
            hyp_assume(False)
            return
        assert left == eval_term(u, val, theory)

    @given(st.integers(0, 10**6))
    @settings(max_examples=80, deadline=None)
    def test_substitution_lemma(self, seed):
        # eval(t[u/x], v) = eval(t, v[x := eval(u, v)])
        theory = Theory()
        rng = random.Random(seed)
        g = TermGen(rng, max_free=3)
        t = g.term(BOOL, 3)
        u = g.term(BOOL, 2)
        target = Var("x", BOOL)
        substituted = vsubst(Substitution.of_terms({target: u}), t)
        model = Model(ind_size=2)
        from microhol.syntax import free_vars, type_vars_of_term

        tyenv = {
            name: 2
            for name in type_vars_of_term(t) | type_vars_of_term(u)
        }
        assignment = {}
        for v in free_vars(t) | free_vars(u) | {target}:
            assignment[v] = rng.randrange(carrier_size(v.ty, model, tyenv, theory))
        val = Valuation(model, tyenv, assignment)
        u_val = eval_term(u, val, theory)
        val2 = Valuation(model, tyenv, {**assignment, target: u_val})
        assert eval_term(substituted, val, theory) == eval_term(t, val2, theory)

    @given(st.integers(0, 10**6))
    @settings(max_examples=80, deadline=None)
    def test_equality_is_identity_relation(self, seed):
        theory = Theory()
        rng = random.Random(seed)
        g = TermGen(rng, max_free=3)
        a = g.term(IND, 2)
        b = g.term(IND, 2)
        model = Model(ind_size=3)
        from microhol.syntax import free_vars, type_vars_of_term

        tyenv = {n: 2 for n in type_vars_of_term(a) | type_vars_of_term(b)}
        assignment = {}
        for v in free_vars(a) | free_vars(b):
            assignment[v] = rng.randrange(carrier_size(v.ty, model, tyenv, theory))
        val = Valuation(model, tyenv, assignment)
        eq_val = eval_term(mk_eq(a, b), val, theory)
        same = eval_term(a, val, theory) == eval_term(b, val, theory)
        assert (eq_val == TRUE_ELEM) == same


class TestTypedefSemantics:
    def test_one_element_type(self):
        thy = Theory()
        logic = install_logic(thy)
        b = Var("b", BOOL)
        pred = mk_abs(b, mk_eq(b, TRUE))
        from .test_kernel import _pred_holds

        inhab = _pred_holds(logic, pred, TRUE)
        th1, th2 = kernel.new_basic_type_definition(thy, "unit", "mk_u", "dest_u", inhab)
        newty = th1.conclusion.rand.ty
        assert carrier_size(newty, Model(), {}, thy) == 1
        # both bijection theorems hold in the finite model
        for th in (th1, th2):
            verdict = is_valid(theorem_sequent(th), Model(), theory=thy)
            assert verdict.valid, verdict


class TestFuzzer:
    def test_refl_clean(self):
        rep = fuzz_rule_soundness("refl", make_generator("refl"), 200, seed=5)
        assert rep.ok and rep.trials == 200

    @pytest.mark.parametrize("rule", RULE_IDS)
    def test_all_rules_small(self, rule):
        rep = fuzz_rule_soundness(rule, make_generator(rule), 120, seed=9)
        assert rep.ok, rep.counterexamples[:1]

    def test_weakened_abs_finds_counterexample(self):
        rep = fuzz_rule_soundness(
            "weakened-abs", weakened_abs_generator, 50, seed=3
        )
        assert not rep.ok
        cex = rep.counterexamples[0]
        assert "\\" in cex.conclusion  # an abstraction equation
        assert cex.valuation

    def test_spec_example_counterexample(self, theory):
        # {x = y} |- (\x. x) = (\x. y) fails where x = y holds but the
        # identity and constant tables differ
        xv = Var("x", IND)
        yv = Var("y", IND)
        concl = mk_eq(mk_abs(xv, xv), mk_abs(xv, yv))
        seq = ((mk_eq(xv, yv),), concl)
        verdict = is_valid(seq, Model(ind_size=2), theory=theory)
        assert not verdict.valid

    def test_deterministic_given_seed(self):
        a = fuzz_rule_soundness("trans", make_generator("trans"), 60, seed=42)
        b = fuzz_rule_soundness("trans", make_generator("trans"), 60, seed=42)
        assert a == b

    def test_deduct_with_extra_assumption_valid(self, theory):
        # {r, q} |- p and {p} |- q combine to {r} |- p = q; spot-check model
        p = Var("p", BOOL)
        q = Var("q", BOOL)
        r = Var("r", BOOL)
        th1 = kernel.eq_mp(assume(q), assume(mk_eq(q, p)))  # {q, q=p} |- p
        th2 = kernel.eq_mp(assume(p), assume(mk_eq(p, q)))  # {p, p=q} |- q
        th = kernel.deduct_antisym(th1, th2)
        verdict = is_valid(theorem_sequent(th), Model(), theory=theory)
        assert verdict.valid
