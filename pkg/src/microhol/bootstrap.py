"""Derived logic on top of the kernel: the standard constants (T, /\\,
==>, !, ?, \\/, F, ~, ONE_ONE, ONTO), their defining theorems, a small
conversion toolkit, and the usual derived inference rules.

Every function here bottoms out in the ten primitive rules; with kernel
tracing enabled, any derived-rule output replays as a sequence of
primitive calls.  FALSE is defined literally as `!p:bool. p`.

Conversions are functions from a term t to a theorem `|- t = t'`; they
raise ``Inapplicable`` to signal "no change here", and the combinators
interpret that.  All conversion results are hypothesis-free, which is
what lets ``abs_conv`` pass the abstraction rule's side condition.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernel
from .kernel import (
    Theorem,
    Theory,
    abs_rule,
    assume,
    axiom_choice,
    beta,
    deduct_antisym,
    eq_mp,
    inst_rule,
    inst_type_rule,
    mk_comb_rule,
    new_basic_definition,
    refl,
    trans,
)
from .syntax import (
    BOOL,
    Abs,
    Comb,
    Const,
    HolError,
    HolType,
    IllTyped,
    Substitution,
    Term,
    TyVar,
    Var,
    alpha_equiv,
    dest_eq,
    fn,
    inst_type,
    mk_abs,
    mk_comb,
    mk_eq,
    type_match,
    variant,
    vfree_in,
    vsubst,
)

__all__ = [
    "Inapplicable",
    "DefinedConstant",
    "LogicSignature",
    "Logic",
    "install_logic",
    "ap_term",
    "ap_thm",
    "sym",
    "alpha_link",
    "beta_conv",
    "prove_hyp",
    "conv_rule",
    "all_conv",
    "try_beta",
    "rand_conv",
    "rator_conv",
    "abs_conv",
    "then_conv",
    "repeat_conv",
    "first_conv",
    "rewr_conv",
    "exhaustive_conv",
    "beta_norm_conv",
    "head_beta",
    "head_beta_norm",
    "beta_n",
    "both_sides",
    "lhs",
    "rhs",
    "TRUE",
    "FALSE",
    "mk_conj",
    "mk_disj",
    "mk_imp",
    "mk_neg",
    "mk_forall",
    "mk_exists",
    "mk_select",
    "dest_conj",
    "dest_disj",
    "dest_imp",
    "dest_neg",
    "dest_forall",
    "dest_exists",
    "is_conj",
    "is_disj",
    "is_imp",
    "is_neg",
    "is_forall",
    "is_exists",
]

_B2 = fn(BOOL, fn(BOOL, BOOL))

TRUE = Const("T", BOOL)
FALSE = Const("F", BOOL)


def _binapp(name: str, l: Term, r: Term) -> Term:
    return mk_comb(mk_comb(Const(name, _B2), l), r)


def mk_conj(l: Term, r: Term) -> Term:
    return _binapp("and", l, r)


def mk_disj(l: Term, r: Term) -> Term:
    return _binapp("or", l, r)


def mk_imp(l: Term, r: Term) -> Term:
    return _binapp("imp", l, r)


def mk_neg(t: Term) -> Term:
    return mk_comb(Const("not", fn(BOOL, BOOL)), t)


def mk_forall(v: Var, body: Term) -> Term:
    return mk_comb(Const("forall", fn(fn(v.ty, BOOL), BOOL)), mk_abs(v, body))


def mk_exists(v: Var, body: Term) -> Term:
    return mk_comb(Const("exists", fn(fn(v.ty, BOOL), BOOL)), mk_abs(v, body))


def mk_select(v: Var, body: Term) -> Term:
    return mk_comb(Const("@", fn(fn(v.ty, BOOL), v.ty)), mk_abs(v, body))


def _is_binapp(name: str, t: Term) -> bool:
    return (
        isinstance(t, Comb)
        and isinstance(t.rator, Comb)
        and isinstance(t.rator.rator, Const)
        and t.rator.rator.name == name
    )


def is_conj(t):
    return _is_binapp("and", t)


def is_disj(t):
    return _is_binapp("or", t)


def is_imp(t):
    return _is_binapp("imp", t)


def is_neg(t):
    return (
        isinstance(t, Comb)
        and isinstance(t.rator, Const)
        and t.rator.name == "not"
    )


def _is_binder(name: str, t: Term) -> bool:
    return (
        isinstance(t, Comb)
        and isinstance(t.rator, Const)
        and t.rator.name == name
        and isinstance(t.rand, Abs)
    )


def is_forall(t):
    return _is_binder("forall", t)


def is_exists(t):
    return _is_binder("exists", t)


def _dest_binapp(name: str, t: Term) -> tuple[Term, Term]:
    if not _is_binapp(name, t):
        raise IllTyped(f"not a {name}-term: {t!r}")
    return t.rator.rand, t.rand


def dest_conj(t):
    return _dest_binapp("and", t)


def dest_disj(t):
    return _dest_binapp("or", t)


def dest_imp(t):
    return _dest_binapp("imp", t)


def dest_neg(t):
    if not is_neg(t):
        raise IllTyped(f"not a negation: {t!r}")
    return t.rand


def dest_forall(t) -> tuple[Var, Term]:
    if not _is_binder("forall", t):
        raise IllTyped(f"not a universal: {t!r}")
    return t.rand.bvar, t.rand.body


def dest_exists(t) -> tuple[Var, Term]:
    if not _is_binder("exists", t):
        raise IllTyped(f"not an existential: {t!r}")
    return t.rand.bvar, t.rand.body


def lhs(th: Theorem) -> Term:
    return dest_eq(th.conclusion)[0]


def rhs(th: Theorem) -> Term:
    return dest_eq(th.conclusion)[1]


# ---------------------------------------------------------------------------
# Rules derivable without any defined constant


def ap_term(f: Term, th: Theorem) -> Theorem:
    """From |- a = b conclude |- f a = f b."""
    return mk_comb_rule(refl(f), th)


def ap_thm(th: Theorem, a: Term) -> Theorem:
    """From |- f = g conclude |- f a = g a."""
    return mk_comb_rule(th, refl(a))


def sym(th: Theorem) -> Theorem:
    """From |- l = r conclude |- r = l."""
    l, _ = dest_eq(th.conclusion)
    op = th.conclusion.rator.rator
    lth = refl(l)
    return eq_mp(lth, mk_comb_rule(ap_term(op, th), lth))


def alpha_link(t: Term, u: Term) -> Theorem:
    """|- t = u for alpha-equivalent terms."""
    return trans(refl(t), refl(u))


def beta_conv(t: Term) -> Theorem:
    """|- (\\x. b) a = b[a/x], derived from the primitive self-application
    beta by instantiation."""
    if not (isinstance(t, Comb) and isinstance(t.rator, Abs)):
        raise kernel.NotABetaRedex(f"not a beta redex: {t!r}")
    x = t.rator.bvar
    if t.rand == x:
        return beta(t)
    prim = beta(mk_comb(t.rator, x))
    return inst_rule(Substitution.of_terms({x: t.rand}), prim)


def prove_hyp(ath: Theorem, bth: Theorem) -> Theorem:
    """Cut: discharge ath's conclusion from bth's assumptions."""
    return eq_mp(ath, deduct_antisym(ath, bth))


def conv_rule(conv, th: Theorem) -> Theorem:
    """Rewrite a theorem's conclusion with a conversion."""
    return eq_mp(th, conv(th.conclusion))


# ---------------------------------------------------------------------------
# Conversions


class Inapplicable(HolError):
    """A conversion made no change at this term."""


def all_conv(t: Term) -> Theorem:
    return refl(t)


def try_beta(t: Term) -> Theorem:
    if isinstance(t, Comb) and isinstance(t.rator, Abs):
        return beta_conv(t)
    raise Inapplicable


def rand_conv(conv):
    def go(t: Term) -> Theorem:
        if not isinstance(t, Comb):
            raise Inapplicable
        return ap_term(t.rator, conv(t.rand))

    return go


def rator_conv(conv):
    def go(t: Term) -> Theorem:
        if not isinstance(t, Comb):
            raise Inapplicable
        return ap_thm(conv(t.rator), t.rand)

    return go


def abs_conv(conv):
    def go(t: Term) -> Theorem:
        if not isinstance(t, Abs):
            raise Inapplicable
        return abs_rule(t.bvar, conv(t.body))

    return go


def then_conv(c1, c2):
    def go(t: Term) -> Theorem:
        th1 = c1(t)
        th2 = c2(rhs(th1))
        return trans(th1, th2)

    return go


def repeat_conv(c):
    """Apply c at this term until it reports no change."""

    def go(t: Term) -> Theorem:
        th = None
        current = t
        for _ in range(_REWRITE_LIMIT):
            try:
                step = c(current)
            except Inapplicable:
                if th is None:
                    raise
                return th
            th = step if th is None else trans(th, step)
            current = rhs(th)
        raise HolError("conversion did not terminate")

    return go


def head_beta(t: Term) -> Theorem:
    """Contract the leftmost-outermost redex on the application spine,
    leaving argument subterms untouched."""
    if isinstance(t, Comb):
        if isinstance(t.rator, Abs):
            return beta_conv(t)
        return rator_conv(head_beta)(t)
    raise Inapplicable


head_beta_norm = repeat_conv(head_beta)


def beta_n(n: int):
    """Exactly n head contractions; never reaches into the residual term."""

    def go(t: Term) -> Theorem:
        th = head_beta(t)
        for _ in range(n - 1):
            th = trans(th, head_beta(rhs(th)))
        return th

    return go


def first_conv(convs):
    def go(t: Term) -> Theorem:
        for c in convs:
            try:
                return c(t)
            except Inapplicable:
                continue
        raise Inapplicable

    return go


def rewr_conv(eq_th: Theorem):
    """Left-to-right rewriting with a closed equation theorem.

    Matching is first-order: pattern variables (the equation's free
    variables) match whole subterms, constants match by name with type
    instantiation.  Patterns never contain abstractions here.
    """
    if eq_th.assumptions:
        raise HolError("rewrite equations must have no assumptions")
    pat = lhs(eq_th)

    def match(p: Term, t: Term, tyenv, tenv) -> bool:
        if isinstance(p, Var):
            prev = tenv.get(p)
            if prev is not None:
                return alpha_equiv(prev, t)
            if type_match(p.ty, t.ty, tyenv) is None:
                return False
            tenv[p] = t
            return True
        if isinstance(p, Const):
            return (
                isinstance(t, Const)
                and t.name == p.name
                and type_match(p.ty, t.ty, tyenv) is not None
            )
        if isinstance(p, Comb):
            return (
                isinstance(t, Comb)
                and match(p.rator, t.rator, tyenv, tenv)
                and match(p.rand, t.rand, tyenv, tenv)
            )
        raise HolError("rewrite patterns must not contain abstractions")

    def go(t: Term) -> Theorem:
        tyenv: dict[str, HolType] = {}
        tenv: dict[Var, Term] = {}
        if not match(pat, t, tyenv, tenv):
            raise Inapplicable
        th = inst_type_rule(Substitution.of_types(tyenv), eq_th)
        mapping = {
            inst_type(Substitution.of_types(tyenv), v): image
            for v, image in tenv.items()
        }
        th = inst_rule(Substitution.of_terms(mapping), th)
        if not alpha_equiv(lhs(th), t):
            raise Inapplicable  # a nonlinear pattern mismatch
        return th

    return go


_REWRITE_LIMIT = 100_000


def exhaustive_conv(conv):
    """Apply a conversion anywhere, repeatedly, until a fixed point.

    One pass works bottom-up and then repeats the conversion at each
    node; passes repeat while anything changes.
    """

    def onepass(t: Term) -> Theorem:
        if isinstance(t, Comb):
            th = mk_comb_rule(onepass(t.rator), onepass(t.rand))
        elif isinstance(t, Abs):
            th = abs_rule(t.bvar, onepass(t.body))
        else:
            th = refl(t)
        for _ in range(_REWRITE_LIMIT):
            try:
                th = trans(th, conv(rhs(th)))
            except Inapplicable:
                return th
        raise HolError("rewriting did not terminate at a node")

    def go(t: Term) -> Theorem:
        th = refl(t)
        current = t
        for _ in range(_REWRITE_LIMIT):
            step = onepass(current)
            new = rhs(step)
            if alpha_equiv(new, current):
                return th
            th = trans(th, step)
            current = new
        raise HolError("rewriting did not terminate")

    return go


beta_norm_conv = exhaustive_conv(try_beta)


def both_sides(th: Theorem, conv) -> Theorem:
    """Normalize both sides of an equation theorem with a conversion."""
    x, y = dest_eq(th.conclusion)
    return trans(trans(sym(conv(x)), th), conv(y))


# ---------------------------------------------------------------------------
# The signature and the Logic object


@dataclass(frozen=True)
class DefinedConstant:
    const: Const
    definition: Theorem  # |- const = rhs


@dataclass(frozen=True)
class LogicSignature:
    T: DefinedConstant
    conj: DefinedConstant
    imp: DefinedConstant
    forall: DefinedConstant
    exists: DefinedConstant
    disj: DefinedConstant
    F: DefinedConstant
    neg: DefinedConstant
    one_one: DefinedConstant
    onto: DefinedConstant


def _define_signature(theory: Theory) -> LogicSignature:
    p = Var("p", BOOL)
    q = Var("q", BOOL)
    r = Var("r", BOOL)
    a = TyVar("A")
    b = TyVar("B")

    t_def = new_basic_definition(theory, "T", mk_eq(mk_abs(p, p), mk_abs(p, p)))

    f2 = Var("f", _B2)
    and_def = new_basic_definition(
        theory,
        "and",
        mk_abs(
            p,
            mk_abs(
                q,
                mk_eq(
                    mk_abs(f2, mk_comb(mk_comb(f2, p), q)),
                    mk_abs(f2, mk_comb(mk_comb(f2, TRUE), TRUE)),
                ),
            ),
        ),
    )
    imp_def = new_basic_definition(
        theory, "imp", mk_abs(p, mk_abs(q, mk_eq(mk_conj(p, q), p)))
    )

    cap_p = Var("P", fn(a, BOOL))
    x = Var("x", a)
    forall_def = new_basic_definition(
        theory, "forall", mk_abs(cap_p, mk_eq(cap_p, mk_abs(x, TRUE)))
    )
    exists_def = new_basic_definition(
        theory,
        "exists",
        mk_abs(
            cap_p,
            mk_forall(q, mk_imp(mk_forall(x, mk_imp(mk_comb(cap_p, x), q)), q)),
        ),
    )
    or_def = new_basic_definition(
        theory,
        "or",
        mk_abs(p, mk_abs(q, mk_forall(r, mk_imp(mk_imp(p, r), mk_imp(mk_imp(q, r), r))))),
    )
    f_def = new_basic_definition(theory, "F", mk_forall(p, p))
    not_def = new_basic_definition(theory, "not", mk_abs(p, mk_imp(p, FALSE)))

    f1 = Var("f", fn(a, b))
    x1 = Var("x1", a)
    x2 = Var("x2", a)
    one_one_def = new_basic_definition(
        theory,
        "ONE_ONE",
        mk_abs(
            f1,
            mk_forall(
                x1,
                mk_forall(
                    x2,
                    mk_imp(
                        mk_eq(mk_comb(f1, x1), mk_comb(f1, x2)), mk_eq(x1, x2)
                    ),
                ),
            ),
        ),
    )
    y = Var("y", b)
    onto_def = new_basic_definition(
        theory,
        "ONTO",
        mk_abs(f1, mk_forall(y, mk_exists(x, mk_eq(y, mk_comb(f1, x))))),
    )

    def dc(name: str, th: Theorem) -> DefinedConstant:
        return DefinedConstant(Const(name, theory.constant_type(name)), th)

    return LogicSignature(
        T=dc("T", t_def),
        conj=dc("and", and_def),
        imp=dc("imp", imp_def),
        forall=dc("forall", forall_def),
        exists=dc("exists", exists_def),
        disj=dc("or", or_def),
        F=dc("F", f_def),
        neg=dc("not", not_def),
        one_one=dc("ONE_ONE", one_one_def),
        onto=dc("ONTO", onto_def),
    )


class Logic:
    """The bootstrapped logic: signature handles plus derived rules.

    Construction defines the constants (it must run on a fresh theory)
    and eagerly proves the small lemma base the derived rules lean on:
    |- T, excluded middle, the connective value tables, and F-elimination.
    """

    def __init__(self, theory: Theory):
        self.theory = theory
        self.signature = _define_signature(theory)
        sig = self.signature

        self._and_def = sig.conj.definition
        self._imp_def = sig.imp.definition
        self._or_def = sig.disj.definition
        self._not_def = sig.neg.definition
        self._forall_def = sig.forall.definition
        self._exists_def = sig.exists.definition
        self._f_def = sig.F.definition

        # |- T
        p = Var("p", BOOL)
        self.TRUTH = eq_mp(refl(mk_abs(p, p)), sym(sig.T.definition))

        # |- p = (p = T), the workhorse behind EQT_INTRO
        th1 = deduct_antisym(assume(p), self.TRUTH)
        th2 = self.eqt_elim(assume(mk_eq(p, TRUE)))
        self._eqt_pth = deduct_antisym(th2, th1)

        # {F} |- p
        fth = eq_mp(assume(FALSE), self._f_def)
        self._f_elim_pth = self.spec(p, fth)

        self.EXCLUDED_MIDDLE = self._prove_excluded_middle()
        self.tables = self._prove_value_tables()

    # -- equality/truth plumbing

    def eqt_elim(self, th: Theorem) -> Theorem:
        """From |- p = T conclude |- p."""
        return eq_mp(self.TRUTH, sym(th))

    def eqt_intro(self, th: Theorem) -> Theorem:
        """From |- p conclude |- p = T."""
        p = Var("p", BOOL)
        pth = inst_rule(Substitution.of_terms({p: th.conclusion}), self._eqt_pth)
        return eq_mp(th, pth)

    def contr(self, p: Term, th: Theorem) -> Theorem:
        """From |- F conclude |- p."""
        q = Var("p", BOOL)
        inst = inst_rule(Substitution.of_terms({q: p}), self._f_elim_pth)
        return prove_hyp(th, inst)

    # -- definitional unfolding conversions

    def conj_eq(self, p: Term, q: Term) -> Theorem:
        """|- (p /\\ q) = ((\\f. f p q) = (\\f. f T T))."""
        th = ap_thm(ap_thm(self._and_def, p), q)
        return trans(th, beta_n(2)(rhs(th)))

    def imp_eq(self, p: Term, q: Term) -> Theorem:
        th = ap_thm(ap_thm(self._imp_def, p), q)
        return trans(th, beta_n(2)(rhs(th)))

    def or_eq(self, p: Term, q: Term) -> Theorem:
        th = ap_thm(ap_thm(self._or_def, p), q)
        return trans(th, beta_n(2)(rhs(th)))

    def neg_eq(self, p: Term) -> Theorem:
        th = ap_thm(self._not_def, p)
        return trans(th, beta_n(1)(rhs(th)))

    def forall_eq(self, pred: Term) -> Theorem:
        """|- (!) pred = (pred = \\x. T)."""
        a = dest_pred_ty(pred)
        def_i = inst_type_rule(Substitution.of_types({"A": a}), self._forall_def)
        th = ap_thm(def_i, pred)
        return trans(th, try_beta(rhs(th)))

    def exists_eq(self, pred: Term) -> Theorem:
        a = dest_pred_ty(pred)
        def_i = inst_type_rule(Substitution.of_types({"A": a}), self._exists_def)
        th = ap_thm(def_i, pred)
        return trans(th, try_beta(rhs(th)))

    # -- conjunction

    def conj(self, th1: Theorem, th2: Theorem) -> Theorem:
        p = Var("p", BOOL)
        q = Var("q", BOOL)
        f = Var("f", _B2)
        thp = self.eqt_intro(assume(p))
        thq = self.eqt_intro(assume(q))
        th_ap = mk_comb_rule(ap_term(f, thp), thq)
        th_abs = abs_rule(f, th_ap)
        pth = eq_mp(th_abs, sym(self.conj_eq(p, q)))
        inst = inst_rule(
            Substitution.of_terms({p: th1.conclusion, q: th2.conclusion}), pth
        )
        return prove_hyp(th2, prove_hyp(th1, inst))

    def _conjunct(self, th: Theorem, first: bool) -> Theorem:
        p, q = dest_conj(th.conclusion)
        a = Var("a", BOOL)
        b = Var("b", BOOL)
        sel = mk_abs(a, mk_abs(b, a if first else b))
        expanded = eq_mp(assume(th.conclusion), self.conj_eq(p, q))
        applied = ap_thm(expanded, sel)
        reduced = both_sides(applied, beta_n(3))
        out = self.eqt_elim(reduced)
        return prove_hyp(th, out)

    def conjunct1(self, th: Theorem) -> Theorem:
        return self._conjunct(th, True)

    def conjunct2(self, th: Theorem) -> Theorem:
        return self._conjunct(th, False)

    # -- implication

    def mp(self, th_imp: Theorem, th_ant: Theorem) -> Theorem:
        p, q = dest_imp(th_imp.conclusion)
        th1 = eq_mp(th_imp, self.imp_eq(p, q))  # G |- (p /\ q) = p
        th2 = eq_mp(th_ant, sym(th1))
        return self.conjunct2(th2)

    def disch(self, a: Term, th: Theorem) -> Theorem:
        th1 = self.conj(assume(a), th)
        th2 = self.conjunct1(assume(mk_conj(a, th.conclusion)))
        th3 = deduct_antisym(th1, th2)  # G \ {a} |- (a /\ q) = a
        return eq_mp(th3, sym(self.imp_eq(a, th.conclusion)))

    def undisch(self, th: Theorem) -> Theorem:
        p, _ = dest_imp(th.conclusion)
        return self.mp(th, assume(p))

    # -- quantifiers

    def gen(self, x: Var, th: Theorem) -> Theorem:
        th1 = abs_rule(x, self.eqt_intro(th))
        pred = mk_abs(x, th.conclusion)
        return eq_mp(th1, sym(self.forall_eq(pred)))

    def spec(self, t: Term, th: Theorem) -> Theorem:
        c = th.conclusion
        if not (
            isinstance(c, Comb)
            and isinstance(c.rator, Const)
            and c.rator.name == "forall"
        ):
            raise IllTyped(f"spec needs a universal theorem: {th!r}")
        pred = c.rand
        th1 = eq_mp(th, self.forall_eq(pred))
        th2 = ap_thm(th1, t)
        th3 = trans(th2, try_beta(rhs(th2)))
        th4 = self.eqt_elim(th3)
        if isinstance(pred, Abs):
            return eq_mp(th4, beta_conv(th4.conclusion))
        return th4

    def gen_list(self, xs, th: Theorem) -> Theorem:
        for x in reversed(list(xs)):
            th = self.gen(x, th)
        return th

    def spec_list(self, ts, th: Theorem) -> Theorem:
        for t in ts:
            th = self.spec(t, th)
        return th

    def exists_intro(self, etm: Term, witness: Term, th: Theorem) -> Theorem:
        """From |- p[witness/x] conclude |- ?x. p (etm is the target)."""
        pred = etm.rand
        eqth = self.exists_eq(pred)
        qv, body = dest_forall(rhs(eqth))
        avoid = list(th.assumptions) + [th.conclusion, etm]
        q = variant(avoid, qv)
        ante = vsubst(Substitution.of_terms({qv: q}), dest_imp(body)[0])
        th1 = assume(ante)
        th2 = self.spec(witness, th1)
        if isinstance(pred, Abs):
            th2 = conv_rule(rator_conv(rand_conv(beta_conv)), th2)
        th3 = self.mp(th2, th)
        th4 = self.disch(ante, th3)
        th5 = self.gen(q, th4)
        return eq_mp(th5, sym(eqth))

    def choose(self, v: Var, th_ex: Theorem, th_body: Theorem) -> Theorem:
        """Existential elimination: from |- ?x. p and p[v/x] |- r (v fresh)
        conclude |- r."""
        pred = th_ex.conclusion.rand
        if not isinstance(pred, Abs):
            raise IllTyped("choose needs an explicit existential abstraction")
        instance = beta_conv(mk_comb(pred, v))  # |- pred v = p[v/x]
        r = th_body.conclusion
        for h in th_body.assumptions:
            if vfree_in(v, h) and not alpha_equiv(h, rhs(instance)):
                raise kernel.VarFreeInHyps(
                    f"{v.name} occurs free in a retained assumption"
                )
        if vfree_in(v, r) or vfree_in(v, th_ex.conclusion):
            raise kernel.VarFreeInHyps(f"{v.name} occurs free in the conclusion")
        th1 = eq_mp(th_ex, self.exists_eq(pred))
        th2 = self.spec(r, th1)  # G |- (!x. pred x ==> r) ==> r
        th3 = self.disch(rhs(instance), th_body)  # D |- p[v/x] ==> r
        th4 = conv_rule(rator_conv(rand_conv(lambda t: sym(instance))), th3)
        th5 = self.gen(v, th4)  # D |- !v. pred v ==> r
        return self.mp(th2, th5)

    def select_rule(self, th: Theorem) -> Theorem:
        """From |- ?x. p conclude |- p[(@x. p)/x] (choice-based witness)."""
        pred = th.conclusion.rand
        a = pred.ty.args[0]
        ax = inst_type_rule(Substitution.of_types({"A": a}), axiom_choice(self.theory))
        p0 = Var("P", fn(a, BOOL))
        x0 = Var("x", a)
        xf = variant([pred], Var("x", a))
        ax = inst_rule(Substitution.of_terms({p0: pred, x0: xf}), ax)
        gen_ax = self.gen(xf, ax)  # |- !x. pred x ==> pred (@ pred)
        target = dest_imp(ax.conclusion)[1]  # pred (@ pred)
        th1 = eq_mp(th, self.exists_eq(pred))
        th2 = self.spec(target, th1)
        th3 = self.mp(th2, gen_ax)
        if isinstance(pred, Abs):
            return conv_rule(try_beta, th3)
        return th3

    # -- negation

    def not_elim(self, th: Theorem) -> Theorem:
        p = dest_neg(th.conclusion)
        return eq_mp(th, self.neg_eq(p))

    def not_intro(self, th: Theorem) -> Theorem:
        p, f = dest_imp(th.conclusion)
        return eq_mp(th, sym(self.neg_eq(p)))

    # -- disjunction

    def disj1(self, th: Theorem, q: Term) -> Theorem:
        p = th.conclusion
        r = variant(list(th.assumptions) + [p, q], Var("r", BOOL))
        th1 = self.mp(assume(mk_imp(p, r)), th)
        th2 = self.disch(mk_imp(q, r), th1)
        th3 = self.disch(mk_imp(p, r), th2)
        th4 = self.gen(r, th3)
        return eq_mp(th4, sym(self.or_eq(p, q)))

    def disj2(self, p: Term, th: Theorem) -> Theorem:
        q = th.conclusion
        r = variant(list(th.assumptions) + [p, q], Var("r", BOOL))
        th1 = self.mp(assume(mk_imp(q, r)), th)
        th2 = self.disch(mk_imp(q, r), th1)
        th3 = self.disch(mk_imp(p, r), th2)
        th4 = self.gen(r, th3)
        return eq_mp(th4, sym(self.or_eq(p, q)))

    def disj_cases(self, th: Theorem, th1: Theorem, th2: Theorem) -> Theorem:
        if not alpha_equiv(th1.conclusion, th2.conclusion):
            raise kernel.Mismatch("disjunction branches prove different goals")
        p, q = dest_disj(th.conclusion)
        r = th1.conclusion
        exp = eq_mp(th, self.or_eq(p, q))
        sp = self.spec(r, exp)
        return self.mp(self.mp(sp, self.disch(p, th1)), self.disch(q, th2))

    def ccontr(self, p: Term, th: Theorem) -> Theorem:
        """Classical contradiction: from G u {~p} |- F conclude G |- p."""
        np = mk_neg(p)
        th1 = self.disch(np, th)
        em = inst_rule(
            Substitution.of_terms({Var("t", BOOL): p}), self.EXCLUDED_MIDDLE
        )
        case1 = assume(p)
        case2 = self.contr(p, self.mp(th1, assume(np)))
        return self.disj_cases(em, case1, case2)

    def eq_imp_rule(self, th: Theorem) -> tuple[Theorem, Theorem]:
        """From |- p = q conclude (|- p ==> q, |- q ==> p)."""
        p, q = dest_eq(th.conclusion)
        fwd = self.disch(p, eq_mp(assume(p), th))
        bwd = self.disch(q, eq_mp(assume(q), sym(th)))
        return fwd, bwd

    # -- excluded middle via choice

    def _prove_excluded_middle(self) -> Theorem:
        t = Var("t", BOOL)
        x = Var("x", BOOL)
        goal_neg = mk_neg(t)
        p1 = mk_abs(x, mk_disj(mk_eq(x, TRUE), t))
        p2 = mk_abs(x, mk_disj(mk_eq(x, FALSE), t))
        sel = Const("@", fn(fn(BOOL, BOOL), BOOL))
        u = mk_comb(sel, p1)
        v = mk_comb(sel, p2)

        def select_fact(pred: Term, witness: Term, wth: Theorem) -> Theorem:
            """From |- body[witness] conclude |- body[@ pred] (beta-reduced)."""
            ax = axiom_choice(self.theory)
            ax = inst_type_rule(Substitution.of_types({"A": BOOL}), ax)
            p0 = Var("P", fn(BOOL, BOOL))
            x0 = Var("x", BOOL)
            ax = inst_rule(Substitution.of_terms({p0: pred, x0: witness}), ax)
            ax = conv_rule(rator_conv(rand_conv(try_beta)), ax)
            ax = conv_rule(rand_conv(try_beta), ax)
            return self.mp(ax, wth)

        th_u = select_fact(p1, TRUE, self.disj1(refl(TRUE), t))  # |- (u=T) \/ t
        th_v = select_fact(p2, FALSE, self.disj1(refl(FALSE), t))  # |- (v=F) \/ t

        goal = mk_disj(t, goal_neg)
        branch_t = self.disj1(assume(t), goal_neg)  # {t} |- t \/ ~t

        # Under t, the two predicates coincide, so u = v; with u = T and
        # v = F that gives T = F, hence ~t.
        e1 = self.eqt_intro(self.disj2(mk_eq(x, TRUE), assume(t)))
        e2 = self.eqt_intro(self.disj2(mk_eq(x, FALSE), assume(t)))
        same = trans(e1, sym(e2))  # {t} |- ((x=T) \/ t) = ((x=F) \/ t)
        same_pred = abs_rule(x, same)
        th_uv = ap_term(sel, same_pred)  # {t} |- u = v
        chain = trans(sym(assume(mk_eq(u, TRUE))), th_uv)
        chain = trans(chain, assume(mk_eq(v, FALSE)))  # {t, u=T, v=F} |- T = F
        th_f = eq_mp(self.TRUTH, chain)  # {t, u=T, v=F} |- F
        th_nt = self.not_intro(self.disch(t, th_f))  # {u=T, v=F} |- ~t
        branch_uv = self.disj2(t, th_nt)

        inner = self.disj_cases(th_v, branch_uv, branch_t)  # {u=T} |- goal
        return self.disj_cases(th_u, inner, branch_t)

    # -- the connective value tables

    def _prove_eqf(self, term: Term, th_to_f: Theorem) -> Theorem:
        """From {term} |- F conclude |- term = F."""
        th_from_f = self.contr(term, assume(FALSE))
        return deduct_antisym(th_from_f, th_to_f)

    def _prove_value_tables(self) -> dict[tuple[str, tuple[bool, ...]], Theorem]:
        tables: dict[tuple[str, tuple[bool, ...]], Theorem] = {}
        truth = self.TRUTH
        # and
        tables[("and", (True, True))] = self.eqt_intro(self.conj(truth, truth))
        tables[("and", (True, False))] = self._prove_eqf(
            mk_conj(TRUE, FALSE), self.conjunct2(assume(mk_conj(TRUE, FALSE)))
        )
        tables[("and", (False, True))] = self._prove_eqf(
            mk_conj(FALSE, TRUE), self.conjunct1(assume(mk_conj(FALSE, TRUE)))
        )
        tables[("and", (False, False))] = self._prove_eqf(
            mk_conj(FALSE, FALSE), self.conjunct1(assume(mk_conj(FALSE, FALSE)))
        )
        # or
        tables[("or", (True, True))] = self.eqt_intro(self.disj1(truth, TRUE))
        tables[("or", (True, False))] = self.eqt_intro(self.disj1(truth, FALSE))
        tables[("or", (False, True))] = self.eqt_intro(self.disj2(FALSE, truth))
        ff = mk_disj(FALSE, FALSE)
        tables[("or", (False, False))] = self._prove_eqf(
            ff, self.disj_cases(assume(ff), assume(FALSE), assume(FALSE))
        )
        # imp
        tables[("imp", (True, True))] = self.eqt_intro(self.disch(TRUE, truth))
        tables[("imp", (True, False))] = self._prove_eqf(
            mk_imp(TRUE, FALSE), self.mp(assume(mk_imp(TRUE, FALSE)), truth)
        )
        tables[("imp", (False, True))] = self.eqt_intro(self.disch(FALSE, truth))
        tables[("imp", (False, False))] = self.eqt_intro(
            self.disch(FALSE, assume(FALSE))
        )
        # iff (equality on bool)
        tables[("iff", (True, True))] = self.eqt_intro(refl(TRUE))
        tables[("iff", (True, False))] = self._prove_eqf(
            mk_eq(TRUE, FALSE), eq_mp(truth, assume(mk_eq(TRUE, FALSE)))
        )
        tables[("iff", (False, True))] = self._prove_eqf(
            mk_eq(FALSE, TRUE), eq_mp(truth, sym(assume(mk_eq(FALSE, TRUE))))
        )
        tables[("iff", (False, False))] = self.eqt_intro(refl(FALSE))
        # not
        tables[("not", (True,))] = self._prove_eqf(
            mk_neg(TRUE), self.mp(self.not_elim(assume(mk_neg(TRUE))), truth)
        )
        tables[("not", (False,))] = self.eqt_intro(
            self.not_intro(self.disch(FALSE, assume(FALSE)))
        )
        return tables


def dest_pred_ty(pred: Term) -> HolType:
    ty = pred.ty
    if not (hasattr(ty, "con") and ty.con == "fun" and ty.args[1] == BOOL):
        raise IllTyped(f"not a predicate: {pred!r}")
    return ty.args[0]


def install_logic(theory: Theory) -> Logic:
    """Define the logical constants in a fresh theory and return the
    derived-rule layer (raises DuplicateName if run twice)."""
    return Logic(theory)
