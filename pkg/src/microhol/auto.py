"""Proof search that returns kernel theorems.

``taut`` decides propositional formulas by exhaustive truth-table
evaluation through the semantics module; when the formula is a
tautology it reconstructs a kernel proof by case-splitting each
variable with excluded middle and evaluating the formula with the
proved connective tables.

``meson`` is bounded model elimination for the first-order fragment
(quantifiers only over individual types, predicates and functions as
constants or free variables).  The problem is clausified through
proof-producing normalization: kernel rewrites to negation normal form,
prenexing, universal stripping by specialization, and skolemization via
the choice operator.  The search runs on a lightweight clause
representation; a successful refutation is replayed through the kernel
as a case analysis over clause instances, so every result is an
ordinary theorem `axioms |- goal`.  Search and reconstruction are two
routes to the same answer: the kernel accepts no step on the search's
authority.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from . import kernel
from .bootstrap import (
    FALSE,
    Logic,
    TRUE,
    ap_term,
    conv_rule,
    dest_disj,
    exhaustive_conv,
    first_conv,
    is_conj,
    is_disj,
    is_exists,
    is_forall,
    is_imp,
    is_neg,
    mk_conj,
    mk_disj,
    mk_exists,
    mk_forall,
    mk_imp,
    mk_neg,
    mk_select,
    prove_hyp,
    rewr_conv,
    sym,
    try_beta,
)
from .kernel import Theorem, assume, eq_mp, inst_rule, inst_type_rule
from .semantics import Model, Valuation, eval_term
from .surface import print_term
from .syntax import (
    BOOL,
    Abs,
    Comb,
    Const,
    HolError,
    HolType,
    Substitution,
    Term,
    TyApp,
    Var,
    free_vars,
    is_eq,
    mk_comb,
    mk_eq,
    term_order_key,
    variant,
    vsubst,
)

__all__ = [
    "NotPropositional",
    "NotATautology",
    "OutOfFragment",
    "DepthExhausted",
    "FirstOrderProblem",
    "MesonTrace",
    "Prover",
    "taut",
    "clausify",
    "meson",
    "add_equality_axioms",
]


class NotPropositional(HolError):
    pass


class NotATautology(HolError):
    def __init__(self, assignment: dict[str, bool]):
        names = ", ".join(f"{k}={str(v).lower()}" for k, v in sorted(assignment.items()))
        super().__init__(f"falsified by {names}")
        self.assignment = assignment


class OutOfFragment(HolError):
    pass


class DepthExhausted(HolError):
    def __init__(self, depth: int, trace: "MesonTrace"):
        super().__init__(f"no proof within depth {depth}")
        self.depth = depth
        self.trace = trace


MAX_TAUT_VARS = 16


# ---------------------------------------------------------------------------
# Propositional tautologies


def _prop_vars(t: Term, out: dict[Var, None]):
    if isinstance(t, Var):
        if t.ty != BOOL:
            raise NotPropositional(f"non-boolean variable {t.name}")
        out[t] = None
        return
    if isinstance(t, Const):
        if t.ty == BOOL and t.name in ("T", "F"):
            return
        raise NotPropositional(f"constant {print_term(t)} is not propositional")
    if is_neg(t):
        _prop_vars(t.rand, out)
        return
    if is_conj(t) or is_disj(t) or is_imp(t):
        _prop_vars(t.rator.rand, out)
        _prop_vars(t.rand, out)
        return
    if is_eq(t) and t.rand.ty == BOOL:
        _prop_vars(t.rator.rand, out)
        _prop_vars(t.rand, out)
        return
    raise NotPropositional(f"not a propositional formula: {print_term(t)}")


def taut(logic: Logic, p: Term) -> Theorem:
    """|- p for a propositional tautology, by kernel case-splitting.

    The decision itself comes from exhaustive finite-model evaluation;
    the kernel reconstruction only runs once the truth table is known
    full of trues.  Raises NotATautology with a falsifying assignment.
    """
    if p.ty != BOOL:
        raise NotPropositional("goal must be boolean")
    vars_: dict[Var, None] = {}
    _prop_vars(p, vars_)
    order = sorted(vars_, key=lambda v: v.name)
    if len(order) > MAX_TAUT_VARS:
        raise NotPropositional(f"more than {MAX_TAUT_VARS} variables")

    model = Model(ind_size=1)
    for bits in itertools.product((False, True), repeat=len(order)):
        v = Valuation(model, {}, {var: int(b) for var, b in zip(order, bits)})
        if eval_term(p, v, logic.theory) != 1:
            raise NotATautology({var.name: b for var, b in zip(order, bits)})

    return _taut_reconstruct(logic, p, order, {})


def _assign_true(logic: Logic, v: Var) -> tuple[bool, Theorem]:
    return True, logic.eqt_intro(assume(v))


def _assign_false(logic: Logic, v: Var) -> tuple[bool, Theorem]:
    nv = mk_neg(v)
    to_f = logic.mp(logic.not_elim(assume(nv)), assume(v))  # {~v, v} |- F
    from_f = logic.contr(v, assume(FALSE))  # {F} |- v
    return False, kernel.deduct_antisym(from_f, to_f)  # {~v} |- v = F


def _taut_reconstruct(logic, p, order, asg) -> Theorem:
    if order:
        v, rest = order[0], order[1:]
        th_t = _taut_reconstruct(logic, p, rest, {**asg, v: _assign_true(logic, v)})
        th_f = _taut_reconstruct(logic, p, rest, {**asg, v: _assign_false(logic, v)})
        em = inst_rule(
            Substitution.of_terms({Var("t", BOOL): v}), logic.EXCLUDED_MIDDLE
        )
        return logic.disj_cases(em, th_t, th_f)
    value, th = _eval_formula(logic, p, asg)
    if not value:
        raise AssertionError("truth table said tautology but evaluation derived F")
    return logic.eqt_elim(th)


def _eval_formula(logic, t, asg) -> tuple[bool, Theorem]:
    """Evaluate under an assignment, returning (value, G |- t = T/F)."""
    if isinstance(t, Var):
        return asg[t][0], asg[t][1]
    if isinstance(t, Const):
        if t.name == "T":
            return True, logic.eqt_intro(logic.TRUTH)
        return False, logic._prove_eqf(FALSE, assume(FALSE))
    if is_neg(t):
        val, th = _eval_formula(logic, t.rand, asg)
        combined = ap_term(t.rator, th)
        table = logic.tables[("not", (val,))]
        return not val, kernel.trans(combined, table)
    if is_eq(t) and t.rand.ty == BOOL:
        opname = "iff"
    elif is_conj(t):
        opname = "and"
    elif is_disj(t):
        opname = "or"
    elif is_imp(t):
        opname = "imp"
    else:
        raise NotPropositional(f"not propositional: {print_term(t)}")
    lval, lth = _eval_formula(logic, t.rator.rand, asg)
    rval, rth = _eval_formula(logic, t.rand, asg)
    combined = kernel.mk_comb_rule(ap_term(t.rator.rator, lth), rth)
    table = logic.tables[(opname, (lval, rval))]
    value = {
        "and": lval and rval,
        "or": lval or rval,
        "imp": (not lval) or rval,
        "iff": lval == rval,
    }[opname]
    return value, kernel.trans(combined, table)


# ---------------------------------------------------------------------------
# The first-order fragment


@dataclass(frozen=True)
class FirstOrderProblem:
    """Axioms and a goal in the first-order fragment.  Free variables act
    as uninterpreted predicate/function symbols; quantifiers range only
    over individual (non-boolean, non-function) types."""

    axioms: tuple[Term, ...]
    goal: Term

    def __post_init__(self):
        for t in (*self.axioms, self.goal):
            if t.ty != BOOL:
                raise OutOfFragment("problem parts must be boolean")
            _check_formula(t, bound=[])


def _is_individual(ty: HolType) -> bool:
    return not (
        ty == BOOL or (isinstance(ty, TyApp) and ty.con == "fun")
    )


def _check_formula(t: Term, bound: list[Var]):
    if is_neg(t):
        _check_formula(t.rand, bound)
        return
    if is_conj(t) or is_disj(t) or is_imp(t) or (is_eq(t) and t.rand.ty == BOOL):
        _check_formula(t.rator.rand, bound)
        _check_formula(t.rand, bound)
        return
    if is_forall(t) or is_exists(t):
        v = t.rand.bvar
        if not _is_individual(v.ty):
            raise OutOfFragment(
                f"quantification over {print_term(v)} is not first-order"
            )
        bound.append(v)
        _check_formula(t.rand.body, bound)
        bound.pop()
        return
    _check_atom(t, bound)


def _check_atom(t: Term, bound: list[Var]):
    head, args = _strip_app(t)
    if isinstance(head, Abs):
        raise OutOfFragment(f"lambda in atom: {print_term(t)}")
    if not isinstance(head, (Var, Const)):
        raise OutOfFragment(f"bad atom head: {print_term(t)}")
    if isinstance(head, Var) and head in bound:
        raise OutOfFragment(f"quantified variable used as predicate: {head.name}")
    for a in args:
        _check_fo_term(a, bound)


def _check_fo_term(t: Term, bound: list[Var]):
    if not _is_individual(t.ty):
        raise OutOfFragment(f"higher-order argument: {print_term(t)}")
    head, args = _strip_app(t)
    if not isinstance(head, (Var, Const)):
        raise OutOfFragment(f"bad term head: {print_term(t)}")
    if isinstance(head, Var) and head in bound and args:
        raise OutOfFragment(f"quantified variable applied as function: {head.name}")
    for a in args:
        _check_fo_term(a, bound)


def _strip_app(t: Term) -> tuple[Term, list[Term]]:
    args: list[Term] = []
    while isinstance(t, Comb):
        args.append(t.rand)
        t = t.rator
    args.reverse()
    return t, args


# ---------------------------------------------------------------------------
# Proof-producing clausification


@dataclass
class _NormLemmas:
    """The rewrite equations behind clausification, proved once per Logic."""

    nnf: list
    pull: list

    @classmethod
    def get(cls, logic: Logic) -> "_NormLemmas":
        cached = getattr(logic, "_clausifier_lemmas", None)
        if cached is None:
            cached = cls.build(logic)
            logic._clausifier_lemmas = cached
        return cached

    @classmethod
    def build(cls, logic: Logic) -> "_NormLemmas":
        p = Var("p", BOOL)
        q = Var("q", BOOL)
        r = Var("r", BOOL)
        t_ = taut
        props = [
            t_(logic, mk_eq(mk_neg(mk_neg(p)), p)),
            t_(logic, mk_eq(mk_neg(mk_conj(p, q)), mk_disj(mk_neg(p), mk_neg(q)))),
            t_(logic, mk_eq(mk_neg(mk_disj(p, q)), mk_conj(mk_neg(p), mk_neg(q)))),
            t_(logic, mk_eq(mk_imp(p, q), mk_disj(mk_neg(p), q))),
            t_(
                logic,
                mk_eq(
                    mk_eq(p, q),
                    mk_conj(mk_disj(mk_neg(p), q), mk_disj(mk_neg(q), p)),
                ),
            ),
        ]
        quants = [
            _not_forall_thm(logic),
            _not_exists_thm(logic),
        ]
        pulls = _pull_theorems(logic)
        dists = [
            t_(
                logic,
                mk_eq(
                    mk_disj(p, mk_conj(q, r)),
                    mk_conj(mk_disj(p, q), mk_disj(p, r)),
                ),
            ),
            t_(
                logic,
                mk_eq(
                    mk_disj(mk_conj(q, r), p),
                    mk_conj(mk_disj(q, p), mk_disj(r, p)),
                ),
            ),
        ]
        return cls(nnf=props + quants, pull=pulls + dists)


def _eta_quant(logic: Logic, quant: Const, pred: Term) -> Theorem:
    """|- quant (\\x. pred x) = quant pred (eta through a binder)."""
    a = pred.ty.args[0]
    b = pred.ty.args[1]
    ext = kernel.axiom_extensionality()
    ext = inst_type_rule(Substitution.of_types({"A": a, "B": b}), ext)
    tvar = Var("t", pred.ty)
    xvar = Var("x", a)
    fresh = variant([pred], xvar)
    if fresh != xvar:
        ext = inst_rule(Substitution.of_terms({xvar: fresh}), ext)
    ext = inst_rule(Substitution.of_terms({tvar: pred}), ext)
    return ap_term(quant, ext)


def _forall_var(logic: Logic, pred_var: Var, th: Theorem) -> Theorem:
    """Repackage G |- !x. P x (an explicit abstraction over an application)
    as G |- (!) P when P is a plain variable."""
    quant = th.conclusion.rator
    return eq_mp(th, _eta_quant(logic, quant, pred_var))


def _not_forall_thm(logic: Logic) -> Theorem:
    """|- ~((!) P) = ?x. ~(P x)."""
    from .syntax import TyVar

    alpha = TyVar("A")
    P = Var("P", _fn(alpha, BOOL))
    x = Var("x", alpha)
    forall_p = mk_comb(Const("forall", _fn(_fn(alpha, BOOL), BOOL)), P)
    goal = mk_exists(x, mk_neg(mk_comb(P, x)))

    # {~(!)P} |- ?x. ~(P x)
    ng = mk_neg(goal)
    step1 = logic.exists_intro(goal, x, assume(mk_neg(mk_comb(P, x))))
    step2 = logic.mp(logic.not_elim(assume(ng)), step1)  # {ng, ~Px} |- F
    step3 = logic.ccontr(mk_comb(P, x), step2)  # {ng} |- P x
    step4 = _forall_var(logic, P, logic.gen(x, step3))  # {ng} |- (!) P
    step5 = logic.mp(logic.not_elim(assume(mk_neg(forall_p))), step4)
    fwd = logic.ccontr(goal, step5)  # {~(!)P} |- goal

    # {?x. ~(P x)} |- ~((!) P)
    v = Var("v", alpha)
    body = logic.mp(
        logic.not_elim(assume(mk_neg(mk_comb(P, v)))),
        logic.spec(v, assume(forall_p)),
    )  # {~Pv, (!)P} |- F
    body = logic.not_intro(logic.disch(forall_p, body))  # {~Pv} |- ~(!)P
    bwd = logic.choose(v, assume(goal), body)

    return kernel.deduct_antisym(bwd, fwd)


def _not_exists_thm(logic: Logic) -> Theorem:
    """|- ~((?) P) = !x. ~(P x)."""
    from .syntax import TyVar

    alpha = TyVar("A")
    P = Var("P", _fn(alpha, BOOL))
    x = Var("x", alpha)
    exists_p = mk_comb(Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P)
    goal = mk_forall(x, mk_neg(mk_comb(P, x)))

    # {~(?)P} |- !x. ~(P x)
    w1 = logic.exists_intro(exists_p, x, assume(mk_comb(P, x)))  # {Px} |- (?)P
    w2 = logic.mp(logic.not_elim(assume(mk_neg(exists_p))), w1)
    fwd = logic.gen(x, logic.not_intro(logic.disch(mk_comb(P, x), w2)))

    # {!x. ~(P x)} |- ~((?) P)
    v = Var("v", alpha)
    eta = _eta_quant(logic, Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P)
    expanded = eq_mp(assume(exists_p), sym(eta))  # {(?)P} |- ? (\x. P x)
    body = logic.mp(
        logic.not_elim(logic.spec(v, assume(goal))), assume(mk_comb(P, v))
    )  # {goal, P v} |- F
    elim = logic.choose(v, expanded, body)  # {goal, (?)P} |- F
    bwd = logic.not_intro(logic.disch(exists_p, elim))

    return kernel.deduct_antisym(bwd, fwd)


def _fn(a, b):
    return TyApp("fun", (a, b))


def _pull_theorems(logic: Logic) -> list[Theorem]:
    """The eight quantifier-pull equations, e.g.
    |- ((!) P \\/ q) = !x. P x \\/ q."""
    from .syntax import TyVar

    alpha = TyVar("A")
    P = Var("P", _fn(alpha, BOOL))
    q = Var("q", BOOL)
    x = Var("x", alpha)
    forall_p = mk_comb(Const("forall", _fn(_fn(alpha, BOOL), BOOL)), P)
    exists_p = mk_comb(Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P)
    px = mk_comb(P, x)
    out = []

    def em_cases(goal_if_q: Theorem, goal_if_nq: Theorem) -> Theorem:
        em = inst_rule(
            Substitution.of_terms({Var("t", BOOL): q}), logic.EXCLUDED_MIDDLE
        )
        return logic.disj_cases(em, goal_if_q, goal_if_nq)

    # (!) P \/ q  =  !x. P x \/ q
    lhs_t = mk_disj(forall_p, q)
    rhs_t = mk_forall(x, mk_disj(px, q))
    b1 = logic.disj1(logic.spec(x, assume(forall_p)), q)
    b2 = logic.disj2(px, assume(q))
    fwd = logic.gen(x, logic.disj_cases(assume(lhs_t), b1, b2))
    inner = logic.disj_cases(
        logic.spec(x, assume(rhs_t)),
        assume(px),
        logic.contr(px, logic.mp(logic.not_elim(assume(mk_neg(q))), assume(q))),
    )  # {rhs, ~q} |- P x
    nq_case = logic.disj1(_forall_var(logic, P, logic.gen(x, inner)), q)
    bwd = em_cases(logic.disj2(forall_p, assume(q)), nq_case)
    out.append(kernel.deduct_antisym(bwd, fwd))

    # q \/ (!) P  =  !x. q \/ P x
    lhs_t = mk_disj(q, forall_p)
    rhs_t = mk_forall(x, mk_disj(q, px))
    b1 = logic.disj1(assume(q), px)
    b2 = logic.disj2(q, logic.spec(x, assume(forall_p)))
    fwd = logic.gen(x, logic.disj_cases(assume(lhs_t), b1, b2))
    inner = logic.disj_cases(
        logic.spec(x, assume(rhs_t)),
        logic.contr(px, logic.mp(logic.not_elim(assume(mk_neg(q))), assume(q))),
        assume(px),
    )
    nq_case = logic.disj2(q, _forall_var(logic, P, logic.gen(x, inner)))
    bwd = em_cases(logic.disj1(assume(q), forall_p), nq_case)
    out.append(kernel.deduct_antisym(bwd, fwd))

    # (?) P \/ q  =  ?x. P x \/ q
    lhs_t = mk_disj(exists_p, q)
    rhs_t = mk_exists(x, mk_disj(px, q))
    v = Var("v", alpha)
    eta_e = _eta_quant(logic, Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P)
    pv = mk_comb(P, v)
    wit = logic.exists_intro(rhs_t, v, logic.disj1(assume(pv), q))
    caseA = logic.choose(v, eq_mp(assume(exists_p), sym(eta_e)), wit)
    anyx = mk_select(x, TRUE)
    caseB = logic.exists_intro(
        rhs_t, anyx, logic.disj2(mk_comb(P, anyx), assume(q))
    )
    fwd = logic.disj_cases(assume(lhs_t), caseA, caseB)
    back_body = logic.disj_cases(
        assume(mk_disj(pv, q)),
        logic.disj1(
            eq_mp(
                logic.exists_intro(mk_exists(x, px), v, assume(pv)),
                _eta_quant(logic, Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P),
            ),
            q,
        ),
        logic.disj2(exists_p, assume(q)),
    )
    bwd = logic.choose(v, assume(rhs_t), back_body)
    out.append(kernel.deduct_antisym(bwd, fwd))

    # q \/ (?) P  =  ?x. q \/ P x
    lhs_t = mk_disj(q, exists_p)
    rhs_t = mk_exists(x, mk_disj(q, px))
    wit = logic.exists_intro(rhs_t, v, logic.disj2(q, assume(pv)))
    caseB2 = logic.choose(v, eq_mp(assume(exists_p), sym(eta_e)), wit)
    caseA2 = logic.exists_intro(
        rhs_t, anyx, logic.disj1(assume(q), mk_comb(P, anyx))
    )
    fwd = logic.disj_cases(assume(lhs_t), caseA2, caseB2)
    back_body = logic.disj_cases(
        assume(mk_disj(q, pv)),
        logic.disj1(assume(q), exists_p),
        logic.disj2(
            q,
            eq_mp(
                logic.exists_intro(mk_exists(x, px), v, assume(pv)),
                _eta_quant(logic, Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P),
            ),
        ),
    )
    bwd = logic.choose(v, assume(rhs_t), back_body)
    out.append(kernel.deduct_antisym(bwd, fwd))

    # (!) P /\ q  =  !x. P x /\ q
    lhs_t = mk_conj(forall_p, q)
    rhs_t = mk_forall(x, mk_conj(px, q))
    fwd = logic.gen(
        x,
        logic.conj(
            logic.spec(x, logic.conjunct1(assume(lhs_t))),
            logic.conjunct2(assume(lhs_t)),
        ),
    )
    allp = _forall_var(
        logic, P, logic.gen(x, logic.conjunct1(logic.spec(x, assume(rhs_t))))
    )
    bwd = logic.conj(allp, logic.conjunct2(logic.spec(x, assume(rhs_t))))
    out.append(kernel.deduct_antisym(bwd, fwd))

    # q /\ (!) P  =  !x. q /\ P x
    lhs_t = mk_conj(q, forall_p)
    rhs_t = mk_forall(x, mk_conj(q, px))
    fwd = logic.gen(
        x,
        logic.conj(
            logic.conjunct1(assume(lhs_t)),
            logic.spec(x, logic.conjunct2(assume(lhs_t))),
        ),
    )
    allp = _forall_var(
        logic, P, logic.gen(x, logic.conjunct2(logic.spec(x, assume(rhs_t))))
    )
    bwd = logic.conj(logic.conjunct1(logic.spec(x, assume(rhs_t))), allp)
    out.append(kernel.deduct_antisym(bwd, fwd))

    # (?) P /\ q  =  ?x. P x /\ q
    lhs_t = mk_conj(exists_p, q)
    rhs_t = mk_exists(x, mk_conj(px, q))
    wit = logic.exists_intro(
        rhs_t, v, logic.conj(assume(pv), logic.conjunct2(assume(lhs_t)))
    )
    fwd = logic.choose(
        v, eq_mp(logic.conjunct1(assume(lhs_t)), sym(eta_e)), wit
    )
    back_body = logic.conj(
        eq_mp(
            logic.exists_intro(
                mk_exists(x, px), v, logic.conjunct1(assume(mk_conj(pv, q)))
            ),
            _eta_quant(logic, Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P),
        ),
        logic.conjunct2(assume(mk_conj(pv, q))),
    )
    bwd = logic.choose(v, assume(rhs_t), back_body)
    out.append(kernel.deduct_antisym(bwd, fwd))

    # q /\ (?) P  =  ?x. q /\ P x
    lhs_t = mk_conj(q, exists_p)
    rhs_t = mk_exists(x, mk_conj(q, px))
    wit = logic.exists_intro(
        rhs_t, v, logic.conj(logic.conjunct1(assume(lhs_t)), assume(pv))
    )
    fwd = logic.choose(
        v, eq_mp(logic.conjunct2(assume(lhs_t)), sym(eta_e)), wit
    )
    back_body = logic.conj(
        logic.conjunct1(assume(mk_conj(q, pv))),
        eq_mp(
            logic.exists_intro(
                mk_exists(x, px), v, logic.conjunct2(assume(mk_conj(q, pv)))
            ),
            _eta_quant(logic, Const("exists", _fn(_fn(alpha, BOOL), BOOL)), P),
        ),
    )
    bwd = logic.choose(v, assume(rhs_t), back_body)
    out.append(kernel.deduct_antisym(bwd, fwd))

    return out


# ---------------------------------------------------------------------------
# Clause extraction


@dataclass(frozen=True)
class SkolemEntry:
    index: int
    witness: Term  # the epsilon-term, with the clause's universals free
    params: tuple[Var, ...]  # universal variables occurring in the witness


@dataclass
class Clause:
    thm: Theorem  # G |- L1 \/ ... \/ Lk, free universals
    universals: tuple[Var, ...]
    lits: tuple[tuple[bool, tuple], ...]  # (positive, fo-atom)
    source: str


@dataclass
class ClauseSet:
    clauses: list[Clause]
    skolems: list[SkolemEntry]


@dataclass
class MesonTrace:
    """Clausified problem plus the extension/reduction steps of a search."""

    clauses: list[str]
    skolems: list[str]
    steps: list[str]
    depth_bound: int
    depth_used: Optional[int] = None

    def render(self) -> str:
        lines = ["clauses:"]
        lines += [f"  {i}: {c}" for i, c in enumerate(self.clauses)]
        if self.skolems:
            lines.append("skolem terms:")
            lines += [f"  {s}" for s in self.skolems]
        lines.append(
            f"depth bound {self.depth_bound}"
            + (f", proof at depth {self.depth_used}" if self.depth_used else "")
        )
        lines.append("steps:")
        lines += [f"  {i}: {s}" for i, s in enumerate(self.steps)]
        return "\n".join(lines)


class _Clausifier:
    def __init__(self, logic: Logic, lemmas: _NormLemmas):
        self.logic = logic
        self.nnf_conv = exhaustive_conv(
            first_conv([rewr_conv(t) for t in lemmas.nnf] + [try_beta])
        )
        self.pull_conv = exhaustive_conv(
            first_conv([rewr_conv(t) for t in lemmas.pull] + [try_beta])
        )
        self.skolems: list[SkolemEntry] = []
        self._fresh = 0

    def fresh_var(self, base: Var, avoid: list[Term]) -> Var:
        self._fresh += 1
        return variant(avoid, Var(f"{base.name}_{self._fresh}", base.ty))

    def clause_theorems(self, th: Theorem, source: str) -> list[tuple[Theorem, tuple[Var, ...]]]:
        """Normalize one assumed formula into clause theorems."""
        th = conv_rule(self.nnf_conv, th)
        th = conv_rule(self.pull_conv, th)
        return self._decompose(th, (), source)

    def _decompose(self, th: Theorem, universals: tuple[Var, ...], source: str):
        concl = th.conclusion
        if is_forall(concl):
            bv = concl.rand.bvar
            v = self.fresh_var(bv, [concl, *th.assumptions])
            return self._decompose(self.logic.spec(v, th), universals + (v,), source)
        if is_exists(concl):
            witness = mk_comb(
                Const("@", _fn(concl.rand.ty, concl.rand.ty.args[0])), concl.rand
            )
            params = tuple(v for v in universals if v in free_vars(witness))
            self.skolems.append(SkolemEntry(len(self.skolems), witness, params))
            return self._decompose(self.logic.select_rule(th), universals, source)
        if is_conj(concl):
            return self._decompose(
                self.logic.conjunct1(th), universals, source
            ) + self._decompose(self.logic.conjunct2(th), universals, source)
        # re-distribute: stripping may have exposed conjunctions under \/
        redone = conv_rule(self.pull_conv, th)
        if is_conj(redone.conclusion) or is_forall(redone.conclusion) or is_exists(
            redone.conclusion
        ):
            return self._decompose(redone, universals, source)
        return [(redone, universals, source)]


def _flatten_disj(t: Term) -> list[Term]:
    if is_disj(t):
        return _flatten_disj(t.rator.rand) + _flatten_disj(t.rand)
    return [t]


# FO representation: ("v", var_key) | ("f", symbol, args-tuple)


def _term_to_fo(t: Term, universals: set[Var], skolems: list[SkolemEntry], copy):
    for sk in skolems:
        if t == sk.witness:
            return (
                "f",
                ("sk", sk.index),
                tuple(_term_to_fo(p, universals, skolems, copy) for p in sk.params),
            )
    if isinstance(t, Var) and t in universals:
        return ("v", (t, copy))
    head, args = _strip_app(t)
    if isinstance(head, Var) and head in universals and not args:
        return ("v", (head, copy))
    sym_: tuple
    if isinstance(head, Const):
        sym_ = ("c", head.name, head.ty)
    else:
        sym_ = ("w", head.name, head.ty)
    return (
        "f",
        sym_,
        tuple(_term_to_fo(a, universals, skolems, copy) for a in args),
    )


def _atom_to_fo(t: Term, universals, skolems, copy):
    return _term_to_fo(t, universals, skolems, copy)


def _lit_of(t: Term, universals, skolems, copy=0):
    if is_neg(t):
        return (False, _atom_to_fo(t.rand, universals, skolems, copy))
    return (True, _atom_to_fo(t, universals, skolems, copy))


def _fo_rename(fo, copy):
    tag = fo[0]
    if tag == "v":
        var, _ = fo[1]
        return ("v", (var, copy))
    return ("f", fo[1], tuple(_fo_rename(a, copy) for a in fo[2]))


def _walk(fo, theta):
    while fo[0] == "v":
        nxt = theta.get(fo[1])
        if nxt is None:
            return fo
        fo = nxt
    return fo


def _occurs(key, fo, theta):
    fo = _walk(fo, theta)
    if fo[0] == "v":
        return fo[1] == key
    return any(_occurs(key, a, theta) for a in fo[2])


def _unify(a, b, theta):
    """Returns an extended substitution dict or None."""
    a = _walk(a, theta)
    b = _walk(b, theta)
    if a == b:
        return theta
    if a[0] == "v":
        if _occurs(a[1], b, theta):
            return None
        out = dict(theta)
        out[a[1]] = b
        return out
    if b[0] == "v":
        if _occurs(b[1], a, theta):
            return None
        out = dict(theta)
        out[b[1]] = a
        return out
    if a[1] != b[1] or len(a[2]) != len(b[2]):
        return None
    for x, y in zip(a[2], b[2]):
        theta = _unify(x, y, theta)
        if theta is None:
            return None
    return theta


def clausify(logic: Logic, p: Term, source: str = "formula") -> ClauseSet:
    """Clausify an assumed formula: NNF, prenex pulls, skolemization via
    choice, and distribution, all proof-producing.  The clause theorems
    carry `p` as their only assumption."""
    _check_formula(p, [])
    lemmas = _NormLemmas.get(logic)
    cl = _Clausifier(logic, lemmas)
    out = ClauseSet(clauses=[], skolems=cl.skolems)
    for th, universals, src in cl.clause_theorems(assume(p), source):
        uset = set(universals)
        lits = tuple(
            _lit_of(t, uset, cl.skolems, 0) for t in _flatten_disj(th.conclusion)
        )
        out.clauses.append(Clause(th, universals, lits, src))
    return out


# ---------------------------------------------------------------------------
# Model elimination


class _Search:
    def __init__(self, clauses: list[Clause], log: list[str]):
        self.clauses = clauses
        self.copies = 0
        self.log = log

    def new_copy(self) -> int:
        self.copies += 1
        return self.copies

    def prove_goals(self, goals, path, depth, theta, trace):
        """Refute every goal literal; yields extended substitutions."""
        if not goals:
            yield theta, []
            return
        first, rest = goals[0], goals[1:]
        for theta2, node in self.prove(first, path, depth, theta):
            for theta3, nodes in self.prove_goals(rest, path, depth, theta2, trace):
                yield theta3, [node] + nodes

    def prove(self, goal, path, depth, theta):
        pos, atom = goal
        # reduction: the complement of an ancestor
        for i, (ppos, patom) in enumerate(path):
            if ppos == pos:
                continue
            theta2 = _unify(atom, patom, theta)
            if theta2 is not None:
                yield theta2, ("red", goal, i)
        if depth <= 0:
            return
        # extension against every complementary clause literal
        for ci, clause in enumerate(self.clauses):
            for li, (lpos, latom) in enumerate(clause.lits):
                if lpos == pos:
                    continue
                copy = self.copies + 1
                renamed = _fo_rename(latom, copy)
                theta2 = _unify(atom, renamed, theta)
                if theta2 is None:
                    continue
                self.copies = copy
                new_goals = [
                    (p2, _fo_rename(a2, copy))
                    for j, (p2, a2) in enumerate(clause.lits)
                    if j != li
                ]
                new_path = path + [goal]
                for theta3, nodes in self.prove_goals(
                    new_goals, new_path, depth - 1, theta2, None
                ):
                    yield theta3, ("ext", goal, ci, li, copy, nodes)


# -- reconstruction


class _Rebuild:
    def __init__(self, logic: Logic, clauses: list[Clause], skolems, theta):
        self.logic = logic
        self.clauses = clauses
        self.skolems = skolems
        self.theta = theta
        self.residuals: dict = {}

    def hol_of(self, fo) -> Term:
        fo = _walk(fo, self.theta)
        if fo[0] == "v":
            key = fo[1]
            got = self.residuals.get(key)
            if got is None:
                base = key[0]
                got = Var(f"{base.name}_r{len(self.residuals)}", base.ty)
                self.residuals[key] = got
            return got
        sym_ = fo[1]
        args = [self.hol_of(a) for a in fo[2]]
        if sym_[0] == "sk":
            entry = self.skolems[sym_[1]]
            mapping = dict(zip(entry.params, args))
            return vsubst(Substitution.of_terms(mapping), entry.witness)
        head = Const(sym_[1], sym_[2]) if sym_[0] == "c" else Var(sym_[1], sym_[2])
        out: Term = head
        for a in args:
            out = mk_comb(out, a)
        return out

    def lit_term(self, lit) -> Term:
        pos, atom = lit
        t = self.hol_of(atom)
        return t if pos else mk_neg(t)

    def _pair_false(self, pos_t: Term, neg_t: Term) -> Theorem:
        """{pos, ~pos} |- F."""
        return self.logic.mp(self.logic.not_elim(assume(neg_t)), assume(pos_t))

    def refute(self, node, path_terms) -> Theorem:
        kind = node[0]
        if kind == "red":
            _, goal, i = node
            g = self.lit_term(goal)
            p = path_terms[i]
            if is_neg(g):
                return self._pair_false(p, g)
            return self._pair_false(g, p)
        _, goal, ci, li, copy, children = node
        clause = self.clauses[ci]
        mapping = {}
        for v in clause.universals:
            mapping[v] = self.hol_of(("v", (v, copy)))
        inst = inst_rule(Substitution.of_terms(mapping), clause.thm)
        goal_term = self.lit_term(goal)
        refuters: dict[bytes, Theorem] = {}
        lit_terms = _flatten_disj(inst.conclusion)
        child_iter = iter(children)
        for j, lt in enumerate(lit_terms):
            if j == li:
                if is_neg(lt):
                    th = self._pair_false(goal_term, lt)
                else:
                    th = self._pair_false(lt, goal_term)
            else:
                th = self.refute(next(child_iter), path_terms + [goal_term])
            refuters[term_order_key(lt)] = th

        def falsify(d: Term) -> Theorem:
            if is_disj(d):
                l, r = dest_disj(d)
                return self.logic.disj_cases(assume(d), falsify(l), falsify(r))
            return refuters[term_order_key(d)]

        return prove_hyp(inst, falsify(inst.conclusion))


def _describe_steps(node, out: list[str], rebuild: _Rebuild, indent=0):
    pad = "  " * indent
    if node[0] == "red":
        _, goal, i = node
        out.append(f"{pad}reduce  {print_term(rebuild.lit_term(goal))} with ancestor {i}")
        return
    _, goal, ci, li, copy, children = node
    out.append(
        f"{pad}extend  {print_term(rebuild.lit_term(goal))} by clause {ci} literal {li}"
    )
    for ch in children:
        _describe_steps(ch, out, rebuild, indent + 1)


def meson(
    logic: Logic,
    problem: FirstOrderProblem,
    depth_bound: int = 20,
    want_trace: bool = False,
):
    """Prove `axioms |- goal` by refuting axioms + ~goal with bounded,
    iteratively deepened model elimination, then replaying the closed
    tableau through the kernel.  Raises DepthExhausted on failure."""
    lemmas = _NormLemmas.get(logic)
    cl = _Clausifier(logic, lemmas)
    clauses: list[Clause] = []

    def add_formula(t: Term, source: str):
        for th, universals, src in cl.clause_theorems(assume(t), source):
            uset = set(universals)
            lits = tuple(
                _lit_of(x, uset, cl.skolems, 0) for x in _flatten_disj(th.conclusion)
            )
            clauses.append(Clause(th, universals, lits, src))

    for i, ax in enumerate(problem.axioms):
        add_formula(ax, f"axiom {i}")
    n_axiom_clauses = len(clauses)
    add_formula(mk_neg(problem.goal), "negated goal")
    goal_clauses = list(range(n_axiom_clauses, len(clauses)))
    if not goal_clauses:
        raise OutOfFragment("the negated goal produced no clauses")

    trace = MesonTrace(
        clauses=[
            f"{c.source}: "
            + " \\/ ".join(print_term(t) for t in _flatten_disj(c.thm.conclusion))
            for c in clauses
        ],
        skolems=[print_term(s.witness) for s in cl.skolems],
        steps=[],
        depth_bound=depth_bound,
    )

    for depth in range(1, depth_bound + 1):
        for start_idx in goal_clauses:
            search = _Search(clauses, trace.steps)
            start = clauses[start_idx]
            copy = search.new_copy()
            goals = [(p, _fo_rename(a, copy)) for p, a in start.lits]
            for theta, nodes in search.prove_goals(goals, [], depth, {}, None):
                rebuild = _Rebuild(logic, clauses, cl.skolems, theta)
                mapping = {
                    v: rebuild.hol_of(("v", (v, copy))) for v in start.universals
                }
                inst = inst_rule(Substitution.of_terms(mapping), start.thm)
                refuters: dict[bytes, Theorem] = {}
                lit_terms = _flatten_disj(inst.conclusion)
                for lt, node in zip(lit_terms, nodes):
                    refuters[term_order_key(lt)] = rebuild.refute(node, [])

                def falsify(d: Term) -> Theorem:
                    if is_disj(d):
                        l, r = dest_disj(d)
                        return logic.disj_cases(assume(d), falsify(l), falsify(r))
                    return refuters[term_order_key(d)]

                contradiction = prove_hyp(inst, falsify(inst.conclusion))
                result = logic.ccontr(problem.goal, contradiction)
                trace.depth_used = depth
                for lt, node in zip(lit_terms, nodes):
                    _describe_steps(node, trace.steps, rebuild)
                if want_trace:
                    return result, trace
                return result
    raise DepthExhausted(depth_bound, trace)


# ---------------------------------------------------------------------------
# Equality axioms (congruence closure is out of scope; callers add these)


def add_equality_axioms(problem: FirstOrderProblem) -> FirstOrderProblem:
    """Append reflexivity/symmetry/transitivity plus congruence schemes
    for every function and predicate symbol used with equality's type."""
    eq_types: set[HolType] = set()
    fun_syms: dict[tuple, tuple] = {}
    pred_syms: dict[tuple, tuple] = {}

    def scan_formula(t: Term):
        if is_neg(t):
            scan_formula(t.rand)
        elif is_conj(t) or is_disj(t) or is_imp(t) or (is_eq(t) and t.rand.ty == BOOL):
            scan_formula(t.rator.rand)
            scan_formula(t.rand)
        elif is_forall(t) or is_exists(t):
            scan_formula(t.rand.body)
        else:
            if is_eq(t):
                eq_types.add(t.rand.ty)
            head, args = _strip_app(t)
            if args and not is_eq(t):
                pred_syms[(head.__class__.__name__, getattr(head, "name"), head.ty)] = (
                    head,
                    len(args),
                )
            for a in args:
                scan_term(a)

    def scan_term(t: Term):
        head, args = _strip_app(t)
        if args:
            fun_syms[(head.__class__.__name__, getattr(head, "name"), head.ty)] = (
                head,
                len(args),
            )
        for a in args:
            scan_term(a)

    for t in (*problem.axioms, problem.goal):
        scan_formula(t)
    if not eq_types:
        return problem

    extra: list[Term] = []
    for ty in sorted(eq_types, key=lambda t: term_order_key(Var("_", t))):
        x = Var("eqx", ty)
        y = Var("eqy", ty)
        z = Var("eqz", ty)
        extra.append(mk_forall(x, mk_eq(x, x)))
        extra.append(mk_forall(x, mk_forall(y, mk_imp(mk_eq(x, y), mk_eq(y, x)))))
        extra.append(
            mk_forall(
                x,
                mk_forall(
                    y,
                    mk_forall(
                        z,
                        mk_imp(
                            mk_conj(mk_eq(x, y), mk_eq(y, z)), mk_eq(x, z)
                        ),
                    ),
                ),
            )
        )

    def congruence(head: Term, arity: int, is_pred: bool) -> Optional[Term]:
        ty = head.ty
        doms = []
        cur = ty
        for _ in range(arity):
            doms.append(cur.args[0])
            cur = cur.args[1]
        if any(not _is_individual(d) for d in doms):
            return None
        xs = [Var(f"cx{i}", d) for i, d in enumerate(doms)]
        ys = [Var(f"cy{i}", d) for i, d in enumerate(doms)]
        eqs = None
        for a, b in zip(xs, ys):
            e = mk_eq(a, b)
            eqs = e if eqs is None else mk_conj(eqs, e)
        appx: Term = head
        appy: Term = head
        for a, b in zip(xs, ys):
            appx = mk_comb(appx, a)
            appy = mk_comb(appy, b)
        if is_pred:
            concl = mk_imp(appx, appy)
        else:
            concl = mk_eq(appx, appy)
        body = mk_imp(eqs, concl)
        for v in reversed(xs + ys):
            body = mk_forall(v, body)
        return body

    for head, arity in fun_syms.values():
        c = congruence(head, arity, is_pred=False)
        if c is not None:
            extra.append(c)
    for head, arity in pred_syms.values():
        c = congruence(head, arity, is_pred=True)
        if c is not None:
            extra.append(c)
    return FirstOrderProblem(problem.axioms + tuple(extra), problem.goal)


@dataclass
class Prover:
    """Bundles a Logic with the (re)usable clausification lemma base."""

    logic: Logic
    _lemmas: Optional[_NormLemmas] = field(default=None, repr=False)

    def taut(self, p: Term) -> Theorem:
        return taut(self.logic, p)

    def meson(self, problem: FirstOrderProblem, depth_bound: int = 20, **kw):
        return meson(self.logic, problem, depth_bound, **kw)

    def clausify(self, p: Term) -> ClauseSet:
        return clausify(self.logic, p)
