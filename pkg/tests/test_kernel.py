import pytest
from hypothesis import given, settings

from microhol import kernel
from microhol.kernel import (
    DuplicateName,
    KernelViolation,
    MalformedInhabitation,
    MiddleMismatch,
    Mismatch,
    MissingDefinitions,
    NotABetaRedex,
    NotAnEquation,
    NotBoolean,
    NotClosed,
    Theorem,
    Theory,
    TypeVarEscape,
    VarFreeInHyps,
    abs_rule,
    assume,
    axiom_choice,
    axiom_extensionality,
    axiom_infinity,
    beta,
    check_theorem,
    deduct_antisym,
    eq_mp,
    inst_rule,
    inst_type_rule,
    mk_comb_rule,
    new_basic_definition,
    new_basic_type_definition,
    refl,
    replay_trace,
    tracing,
    trans,
)
from microhol.syntax import (
    BOOL,
    IND,
    Abs,
    Comb,
    Const,
    Substitution,
    TyVar,
    Var,
    alpha_equiv,
    fn,
    mk_abs,
    mk_comb,
    mk_eq,
    term_order_key,
)

from .strategies import typed_terms

x = Var("x", BOOL)
y = Var("y", BOOL)
z = Var("z", BOOL)
xi = Var("x", IND)


def eq(a, b):
    return mk_eq(a, b)


class TestRefl:
    def test_simple(self):
        th = refl(x)
        assert th.assumptions == ()
        assert th.conclusion == eq(x, x)

    def test_abstraction(self):
        idf = mk_abs(xi, xi)
        th = refl(idf)
        assert th.conclusion == eq(idf, idf)

    def test_non_term(self):
        with pytest.raises(Exception):
            refl("not a term")


class TestTrans:
    def test_chain(self):
        a, b, c = x, y, z
        th = trans(assume(eq(a, b)), assume(eq(b, c)))
        assert th.conclusion == eq(a, c)
        assert len(th.assumptions) == 2

    def test_alpha_middle(self):
        idx = mk_abs(x, x)
        idy = mk_abs(y, y)
        # |- (\x. x) = (\y. y): the middle terms only match modulo alpha
        th = trans(refl(idx), refl(idy))
        assert alpha_equiv(th.conclusion, eq(idx, idy))

    def test_middle_mismatch(self):
        with pytest.raises(MiddleMismatch):
            trans(assume(eq(x, y)), assume(eq(z, x)))

    def test_not_equation(self):
        with pytest.raises(NotAnEquation):
            trans(assume(x), assume(eq(x, y)))


class TestMkCombRule:
    def test_congruence(self):
        f = Var("f", fn(BOOL, BOOL))
        g = Var("g", fn(BOOL, BOOL))
        th = mk_comb_rule(assume(eq(f, g)), assume(eq(x, y)))
        assert th.conclusion == eq(mk_comb(f, x), mk_comb(g, y))

    def test_with_refl_functional(self):
        f = Var("f", fn(BOOL, BOOL))
        th = mk_comb_rule(refl(f), assume(eq(x, y)))
        assert th.conclusion == eq(mk_comb(f, x), mk_comb(f, y))

    def test_ill_typed(self):
        f = Var("f", fn(IND, BOOL))
        g = Var("g", fn(IND, BOOL))
        from microhol.syntax import IllTyped

        with pytest.raises(IllTyped):
            mk_comb_rule(assume(eq(f, g)), assume(eq(x, y)))


class TestAbsRule:
    def test_basic(self):
        th = abs_rule(x, refl(x))
        assert th.conclusion == eq(mk_abs(x, x), mk_abs(x, x))

    def test_side_condition(self):
        premise = assume(mk_eq(x, y))
        with pytest.raises(VarFreeInHyps):
            abs_rule(x, premise)

    def test_not_equation(self):
        with pytest.raises(NotAnEquation):
            abs_rule(x, assume(x))


class TestBeta:
    def test_self_application(self):
        f = Var("f", fn(BOOL, BOOL))
        t = mk_comb(mk_abs(x, mk_comb(f, x)), x)
        th = beta(t)
        assert th.conclusion == eq(t, mk_comb(f, x))

    def test_identity(self):
        t = mk_comb(mk_abs(x, x), x)
        assert beta(t).conclusion == eq(t, x)

    def test_rejects_general_redex(self):
        t = mk_comb(mk_abs(x, x), y)
        with pytest.raises(NotABetaRedex):
            beta(t)

    def test_rejects_non_redex(self):
        with pytest.raises(NotABetaRedex):
            beta(x)


class TestAssume:
    def test_basic(self):
        th = assume(x)
        assert th.assumptions == (x,)
        assert th.conclusion == x

    def test_non_boolean(self):
        with pytest.raises(NotBoolean):
            assume(xi)

    def test_assume_deduct_matches_refl(self):
        # assume then deduct_antisym with itself replays to |- p = p
        th = deduct_antisym(assume(x), assume(x))
        assert th.assumptions == ()
        assert alpha_equiv(th.conclusion, refl(x).conclusion)


class TestEqMp:
    def test_basic(self):
        th = eq_mp(assume(x), assume(eq(x, y)))
        assert th.conclusion == y

    def test_alpha_premise(self):
        idx = mk_abs(x, x)
        idy = mk_abs(y, y)
        premise = refl(idx)  # |- (\x. x) = (\x. x)
        equation = assume(eq(eq(idy, idy), z))
        th = eq_mp(premise, equation)
        assert th.conclusion == z

    def test_mismatch(self):
        with pytest.raises(Mismatch):
            eq_mp(assume(x), assume(eq(y, z)))


class TestDeductAntisym:
    def test_both_removals(self):
        th1 = assume(x)
        th2 = assume(y)
        th = deduct_antisym(th1, th2)
        assert th.conclusion == eq(x, y)
        assert set(th.assumptions) == {x, y}

    def test_discharges(self):
        # {q} |- p and {p} |- q give |- p = q
        p_from_q = eq_mp(assume(y), assume(eq(y, x)))  # {y, y=x} |- x
        q_from_p = eq_mp(assume(x), assume(eq(x, y)))  # {x, x=y} |- y
        th = deduct_antisym(p_from_q, q_from_p)
        # x and y both discharged; the equation hypotheses remain
        assert all(not alpha_equiv(h, x) and not alpha_equiv(h, y) for h in th.assumptions)
        assert th.conclusion == eq(x, y)


class TestInstRules:
    def test_inst_type(self):
        a = TyVar("A")
        v = Var("x", a)
        th = inst_type_rule(Substitution.of_types({"A": BOOL}), refl(v))
        assert th.conclusion == eq(x, x)

    def test_inst_type_identity(self):
        th = refl(Var("x", TyVar("A")))
        th2 = inst_type_rule(Substitution.of_types({}), th)
        assert alpha_equiv(th2.conclusion, th.conclusion)

    def test_inst_term(self):
        th = inst_rule(Substitution.of_terms({x: y}), refl(x))
        assert th.conclusion == eq(y, y)

    def test_inst_substitutes_assumptions(self):
        p = Var("P", fn(BOOL, BOOL))
        th = assume(mk_comb(p, x))
        t = mk_eq(y, z)
        out = inst_rule(Substitution.of_terms({x: t}), th)
        assert out.assumptions == (mk_comb(p, t),)
        assert out.conclusion == mk_comb(p, t)

    def test_inst_collapses_alpha_duplicate_assumptions(self):
        th1 = assume(x)
        th2 = assume(y)
        both = deduct_antisym(th1, th2)
        # substituting y := x makes the two assumptions equal
        merged = inst_rule(Substitution.of_terms({y: x}), both)
        assert len(merged.assumptions) == 1


class TestNoForgery:
    def test_direct_construction_rejected(self):
        with pytest.raises(KernelViolation):
            Theorem((), x)

    def test_keyword_token_guess_rejected(self):
        with pytest.raises(KernelViolation):
            Theorem((), x, False, _token=object())

    def test_subclassing_rejected(self):
        with pytest.raises(TypeError):

            class Fake(Theorem):
                pass

    def test_rules_reject_non_theorems(self):
        class Look:
            assumptions = ()
            conclusion = eq(x, x)
            _hyps = ()
            _uses_infinity = False

        with pytest.raises(KernelViolation):
            trans(Look(), Look())

    def test_theorem_immutable(self):
        th = refl(x)
        with pytest.raises(AttributeError):
            th.conclusion = y


class TestAxioms:
    def test_extensionality_shape(self):
        th = axiom_extensionality()
        lhs, rhs = th.conclusion.rator.rand, th.conclusion.rand
        assert isinstance(lhs, Abs)
        assert rhs == Var("t", fn(TyVar("A"), TyVar("B")))
        assert not th.uses_infinity

    def test_choice_requires_bootstrap(self):
        with pytest.raises(MissingDefinitions):
            axiom_choice(Theory())

    def test_infinity_flagged(self, theory):
        th = axiom_infinity(theory)
        assert th.uses_infinity

    def test_flag_is_monotone(self, theory):
        inf = axiom_infinity(theory)
        chained = deduct_antisym(inf, assume(x))
        assert chained.uses_infinity
        further = inst_rule(Substitution.of_terms({}), chained)
        assert further.uses_infinity


class TestDefinitions:
    def test_basic_definition(self):
        thy = Theory()
        rhs = mk_abs(x, x)
        th = new_basic_definition(thy, "myid", rhs)
        assert th.conclusion == eq(Const("myid", rhs.ty), rhs)
        assert thy.has_constant("myid")
        assert len(thy.definition_log) == 1

    def test_not_closed(self):
        with pytest.raises(NotClosed):
            new_basic_definition(Theory(), "bad", x)

    def test_type_var_escape(self):
        a = TyVar("A")
        v = Var("v", a)
        # \v. T has type A -> bool... use an equation to erase A from the type
        rhs = mk_abs(v, mk_eq(v, v))  # A -> bool: A occurs, fine
        thy = Theory()
        new_basic_definition(thy, "ok", rhs)
        # (\v:A. v = v) applied nowhere... build a body whose type hides A:
        bad = mk_eq(mk_abs(v, v), mk_abs(v, v))  # bool, but A occurs inside
        with pytest.raises(TypeVarEscape):
            new_basic_definition(thy, "bad", bad)

    def test_duplicate_name(self):
        thy = Theory()
        rhs = mk_abs(x, x)
        new_basic_definition(thy, "c", rhs)
        with pytest.raises(DuplicateName):
            new_basic_definition(thy, "c", rhs)
        with pytest.raises(DuplicateName):
            new_basic_definition(thy, "=", rhs)

    def test_fingerprint_changes_and_replays(self):
        thy = Theory()
        fp0 = thy.fingerprint()
        new_basic_definition(thy, "c", mk_abs(x, x))
        fp1 = thy.fingerprint()
        assert fp0 != fp1
        replayed = Theory.replay(thy.definition_log)
        assert replayed.fingerprint() == fp1
        assert replayed.constant_type("c") == fn(BOOL, BOOL)


class TestTypeDefinition:
    def _one_point_pred(self, logic):
        # P = \b:bool. b = T carves a one-element type out of bool
        b = Var("b", BOOL)
        return mk_abs(b, mk_eq(b, Const("T", BOOL)))

    def test_bijections(self, logic):
        thy = Theory()
        from microhol.bootstrap import install_logic

        lg = install_logic(thy)
        pred = self._one_point_pred(lg)
        witness = Const("T", BOOL)
        inhab = _pred_holds(lg, pred, witness)
        th1, th2 = new_basic_type_definition(thy, "unit", "mk_unit", "dest_unit", inhab)
        newty = th1.conclusion.rand.ty
        assert newty.con == "unit"
        # |- mk (dest a) = a
        a = Var("a", newty)
        assert alpha_equiv(
            th1.conclusion,
            mk_eq(
                mk_comb(
                    Const("mk_unit", fn(BOOL, newty)),
                    mk_comb(Const("dest_unit", fn(newty, BOOL)), a),
                ),
                a,
            ),
        )
        # |- P r = (dest (mk r) = r)
        r = Var("r", BOOL)
        want = mk_eq(
            mk_comb(pred, r),
            mk_eq(
                mk_comb(
                    Const("dest_unit", fn(newty, BOOL)),
                    mk_comb(Const("mk_unit", fn(BOOL, newty)), r),
                ),
                r,
            ),
        )
        assert alpha_equiv(th2.conclusion, want)

    def test_open_predicate_rejected(self, logic):
        thy = Theory()
        from microhol.bootstrap import install_logic

        lg = install_logic(thy)
        b = Var("b", BOOL)
        free_pred = Var("Q", fn(BOOL, BOOL))
        th = assume(mk_comb(free_pred, Const("T", BOOL)))
        with pytest.raises(MalformedInhabitation):
            new_basic_type_definition(thy, "t2", "mk2", "dest2", th)

    def test_reusing_builtin_name(self, logic):
        thy = Theory()
        from microhol.bootstrap import install_logic

        lg = install_logic(thy)
        pred = self._one_point_pred(lg)
        inhab = _pred_holds(lg, pred, Const("T", BOOL))
        with pytest.raises(DuplicateName):
            new_basic_type_definition(thy, "bool", "mkb", "destb", inhab)


def _pred_holds(lg, pred, witness):
    """|- pred witness, for pred = \\b. b = T and witness = T."""
    from microhol.bootstrap import beta_conv, sym

    applied = mk_comb(pred, witness)
    reduced = beta_conv(applied)  # |- (\b. b = T) T = (T = T)
    truth_eq = lg.eqt_intro(kernel.refl(Const("T", BOOL)))  # |- (T = T) = T
    chained = kernel.trans(reduced, truth_eq)  # |- pred T = T
    return lg.eqt_elim(chained)


class TestHygiene:
    @given(typed_terms(ty=BOOL, depth=4), typed_terms(ty=BOOL, depth=4))
    @settings(max_examples=100, deadline=None)
    def test_no_alpha_duplicate_assumptions(self, p, q):
        th = deduct_antisym(assume(p), assume(q))
        keys = [term_order_key(h) for h in th.assumptions]
        assert keys == sorted(set(keys))

    def test_full_audit(self, theory):
        th = trans(assume(eq(x, y)), assume(eq(y, z)))
        check_theorem(theory, th)


class TestConcurrency:
    def test_definitions_serialize(self):
        import threading

        thy = Theory()
        errors = []

        def define(i):
            try:
                new_basic_definition(thy, f"c{i}", mk_abs(x, x))
            except Exception as exc:  # noqa: BLE001
                errors.append(exc)

        threads = [threading.Thread(target=define, args=(i,)) for i in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        assert len(thy.definition_log) == 8
        assert Theory.replay(thy.definition_log).fingerprint() == thy.fingerprint()

    def test_rules_pure_across_threads(self):
        import threading

        results = []

        def work():
            th = trans(assume(eq(x, y)), assume(eq(y, z)))
            results.append(th.conclusion)

        threads = [threading.Thread(target=work) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert all(c == eq(x, z) for c in results)


class TestTracing:
    def test_replay(self):
        with tracing() as log:
            th = trans(assume(eq(x, y)), assume(eq(y, z)))
        assert [name for name, _, _ in log] == ["assume", "assume", "trans"]
        assert replay_trace(log)

    def test_derived_rules_replay_through_primitives(self, logic):
        with tracing() as log:
            logic.disch(x, assume(x))
        assert len(log) > 3
        assert replay_trace(log)
        assert all(name in kernel.PRIMITIVE_RULES for name, _, _ in log)
