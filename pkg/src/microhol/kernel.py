"""The trusted core: theorems, the ten primitive inference rules, three
axioms, and the two definitional mechanisms.

Nothing outside this module can fabricate a ``Theorem``: the constructor
demands a module-private token, and the class cannot be subclassed.  In
Python this guard is conventional rather than absolute, but it makes any
accidental forgery impossible and any deliberate one loud and greppable.

Assumption lists are kept sorted by the canonical alpha-encoding and
deduplicated, so alpha-equivalent assumptions are considered equal when
sequents are combined (union) or discharged (removal).

The ``Theory`` is the only mutable object here.  Inference rules never
touch it; the definitional operations serialize on an internal lock.
"""

from __future__ import annotations

import hashlib
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

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
    TyApp,
    TyVar,
    Var,
    alpha_equiv,
    dest_eq,
    fn,
    free_vars,
    inst_type,
    is_eq,
    mk_abs,
    mk_comb,
    mk_eq,
    term_order_key,
    type_subst,
    type_vars_of_term,
    type_vars_of_type,
    vfree_in,
    vsubst,
)

__all__ = [
    "KernelViolation",
    "NotAnEquation",
    "MiddleMismatch",
    "VarFreeInHyps",
    "NotABetaRedex",
    "NotBoolean",
    "Mismatch",
    "NotClosed",
    "TypeVarEscape",
    "DuplicateName",
    "MissingDefinitions",
    "MalformedInhabitation",
    "Theorem",
    "DefinitionEvent",
    "Theory",
    "refl",
    "trans",
    "mk_comb_rule",
    "abs_rule",
    "beta",
    "assume",
    "eq_mp",
    "deduct_antisym",
    "inst_type_rule",
    "inst_rule",
    "axiom_extensionality",
    "axiom_choice",
    "axiom_infinity",
    "new_basic_definition",
    "new_basic_type_definition",
    "check_type",
    "check_term",
    "sequent_of",
    "tracing",
    "replay_trace",
    "PRIMITIVE_RULES",
]


class KernelViolation(HolError):
    """Attempted to construct a ``Theorem`` outside the kernel."""


class NotAnEquation(HolError):
    pass


class MiddleMismatch(HolError):
    pass


class VarFreeInHyps(HolError):
    pass


class NotABetaRedex(HolError):
    pass


class NotBoolean(HolError):
    pass


class Mismatch(HolError):
    pass


class NotClosed(HolError):
    pass


class TypeVarEscape(HolError):
    pass


class DuplicateName(HolError):
    pass


class MissingDefinitions(HolError):
    """An axiom was requested before bootstrap defined its constants."""


class MalformedInhabitation(HolError):
    pass


_RULE_TOKEN = object()

# Keyed assumption: (canonical encoding, term).  Lists of these stay sorted
# by key and duplicate-free.
_Keyed = tuple[bytes, Term]


def _keyed(t: Term) -> _Keyed:
    return (term_order_key(t), t)


def _union(a: tuple[_Keyed, ...], b: tuple[_Keyed, ...]) -> tuple[_Keyed, ...]:
    if not a:
        return b
    if not b:
        return a
    out: list[_Keyed] = []
    i = j = 0
    while i < len(a) and j < len(b):
        ka, kb = a[i][0], b[j][0]
        if ka < kb:
            out.append(a[i])
            i += 1
        elif kb < ka:
            out.append(b[j])
            j += 1
        else:
            out.append(a[i])
            i += 1
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _remove(hyps: tuple[_Keyed, ...], t: Term) -> tuple[_Keyed, ...]:
    key = term_order_key(t)
    return tuple(h for h in hyps if h[0] != key)


def _insert(hyps: tuple[_Keyed, ...], t: Term) -> tuple[_Keyed, ...]:
    return _union(hyps, (_keyed(t),))


class Theorem:
    """A sequent (assumptions |- conclusion) produced by the kernel.

    Instances are immutable and safe to share.  ``uses_infinity`` marks
    derivations that touched the infinity axiom; the flag is monotone
    under every rule and excludes a theorem from finite-model checks.
    """

    __slots__ = ("_hyps", "_concl", "_uses_infinity")

    def __init__(self, hyps, concl, uses_infinity=False, *, _token=None):
        if _token is not _RULE_TOKEN:
            raise KernelViolation(
                "Theorem values can only be made by kernel inference rules"
            )
        object.__setattr__(self, "_hyps", hyps)
        object.__setattr__(self, "_concl", concl)
        object.__setattr__(self, "_uses_infinity", uses_infinity)

    def __init_subclass__(cls, **kwargs):
        raise TypeError("Theorem cannot be subclassed")

    def __setattr__(self, name, value):
        raise AttributeError("Theorem is immutable")

    @property
    def assumptions(self) -> tuple[Term, ...]:
        return tuple(t for _, t in self._hyps)

    @property
    def conclusion(self) -> Term:
        return self._concl

    @property
    def uses_infinity(self) -> bool:
        return self._uses_infinity

    def __repr__(self):
        from .surface import print_sequent

        return f"<theorem {print_sequent(self.assumptions, self.conclusion)}>"


def _mk(hyps: tuple[_Keyed, ...], concl: Term, flag: bool) -> Theorem:
    return Theorem(hyps, concl, flag, _token=_RULE_TOKEN)


def sequent_of(th: Theorem) -> tuple[tuple[Term, ...], Term]:
    return th.assumptions, th.conclusion


def _check_theorem(th, what="argument"):
    if not isinstance(th, Theorem):
        raise KernelViolation(f"{what} is not a kernel Theorem: {th!r}")


# ---------------------------------------------------------------------------
# Derivation tracing (audit support; no effect when disabled)

_trace_log: Optional[list] = None


@contextmanager
def tracing():
    """Record every primitive rule call as (name, args, result)."""
    global _trace_log
    saved = _trace_log
    _trace_log = []
    try:
        yield _trace_log
    finally:
        _trace_log = saved


def _traced(fn_: Callable) -> Callable:
    name = fn_.__name__

    def wrapper(*args):
        result = fn_(*args)
        if _trace_log is not None:
            _trace_log.append((name, args, result))
        return result

    wrapper.__name__ = name
    wrapper.__doc__ = fn_.__doc__
    return wrapper


def replay_trace(log) -> bool:
    """Re-run a recorded trace; True iff every step reproduces its result."""
    for name, args, result in log:
        again = PRIMITIVE_RULES[name](*args)
        if not alpha_equiv(again.conclusion, result.conclusion):
            return False
        ka = [term_order_key(t) for t in again.assumptions]
        kb = [term_order_key(t) for t in result.assumptions]
        if ka != kb:
            return False
    return True


# ---------------------------------------------------------------------------
# The ten primitive inference rules


@_traced
def refl(a: Term) -> Theorem:
    """|- a = a."""
    if not isinstance(a, Term):
        raise IllTyped(f"refl expects a term, got {a!r}")
    return _mk((), mk_eq(a, a), False)


@_traced
def trans(th1: Theorem, th2: Theorem) -> Theorem:
    """From |- a = b and |- b' = c with b ~ b', conclude |- a = c."""
    _check_theorem(th1)
    _check_theorem(th2)
    if not (is_eq(th1.conclusion) and is_eq(th2.conclusion)):
        raise NotAnEquation("trans needs two equations")
    a, b = dest_eq(th1.conclusion)
    b2, c = dest_eq(th2.conclusion)
    if not alpha_equiv(b, b2):
        raise MiddleMismatch("middle terms are not alpha-equivalent")
    return _mk(
        _union(th1._hyps, th2._hyps),
        mk_eq(a, c),
        th1._uses_infinity or th2._uses_infinity,
    )


@_traced
def mk_comb_rule(th1: Theorem, th2: Theorem) -> Theorem:
    """From |- f = g and |- a = b, conclude |- f a = g b."""
    _check_theorem(th1)
    _check_theorem(th2)
    if not (is_eq(th1.conclusion) and is_eq(th2.conclusion)):
        raise NotAnEquation("mk_comb_rule needs two equations")
    f, g = dest_eq(th1.conclusion)
    a, b = dest_eq(th2.conclusion)
    return _mk(
        _union(th1._hyps, th2._hyps),
        mk_eq(mk_comb(f, a), mk_comb(g, b)),
        th1._uses_infinity or th2._uses_infinity,
    )


@_traced
def abs_rule(x: Var, th: Theorem) -> Theorem:
    """From |- a = b, conclude |- (\\x. a) = (\\x. b), x not free in hyps."""
    _check_theorem(th)
    if not isinstance(x, Var):
        raise IllTyped("abs_rule binder must be a variable")
    if not is_eq(th.conclusion):
        raise NotAnEquation("abs_rule needs an equation")
    for _, h in th._hyps:
        if vfree_in(x, h):
            raise VarFreeInHyps(f"{x.name} occurs free in an assumption")
    a, b = dest_eq(th.conclusion)
    return _mk(th._hyps, mk_eq(mk_abs(x, a), mk_abs(x, b)), th._uses_infinity)


@_traced
def beta(t: Term) -> Theorem:
    """|- (\\x. a) x = a, for a redex applying the abstraction to its own

    binder.  General beta-reduction is derived, not primitive."""
    if (
        isinstance(t, Comb)
        and isinstance(t.rator, Abs)
        and isinstance(t.rand, Var)
        and t.rand == t.rator.bvar
    ):
        return _mk((), mk_eq(t, t.rator.body), False)
    raise NotABetaRedex("beta needs a redex of shape (\\x. a) x")


@_traced
def assume(p: Term) -> Theorem:
    """{p} |- p."""
    if not isinstance(p, Term):
        raise IllTyped(f"assume expects a term, got {p!r}")
    if p.ty != BOOL:
        raise NotBoolean("assumptions must be boolean")
    return _mk((_keyed(p),), p, False)


@_traced
def eq_mp(th1: Theorem, th2: Theorem) -> Theorem:
    """From |- p and |- p' = q with p ~ p', conclude |- q."""
    _check_theorem(th1)
    _check_theorem(th2)
    if not is_eq(th2.conclusion):
        raise NotAnEquation("eq_mp needs an equation as second argument")
    p2, q = dest_eq(th2.conclusion)
    if not alpha_equiv(th1.conclusion, p2):
        raise Mismatch("eq_mp premise does not match the equation's left side")
    return _mk(
        _union(th1._hyps, th2._hyps), q, th1._uses_infinity or th2._uses_infinity
    )


@_traced
def deduct_antisym(th1: Theorem, th2: Theorem) -> Theorem:
    """From G |- p and D |- q, conclude (G \\ q) u (D \\ p) |- p = q."""
    _check_theorem(th1)
    _check_theorem(th2)
    hyps = _union(
        _remove(th1._hyps, th2.conclusion), _remove(th2._hyps, th1.conclusion)
    )
    return _mk(
        hyps,
        mk_eq(th1.conclusion, th2.conclusion),
        th1._uses_infinity or th2._uses_infinity,
    )


@_traced
def inst_type_rule(s: Substitution, th: Theorem) -> Theorem:
    """Substitute types in parallel throughout a sequent."""
    _check_theorem(th)
    concl = inst_type(s, th.conclusion)
    hyps: tuple[_Keyed, ...] = ()
    for _, h in th._hyps:
        hyps = _insert(hyps, inst_type(s, h))
    return _mk(hyps, concl, th._uses_infinity)


@_traced
def inst_rule(s: Substitution, th: Theorem) -> Theorem:
    """Substitute terms in parallel throughout a sequent."""
    _check_theorem(th)
    concl = vsubst(s, th.conclusion)
    hyps: tuple[_Keyed, ...] = ()
    for _, h in th._hyps:
        hyps = _insert(hyps, vsubst(s, h))
    return _mk(hyps, concl, th._uses_infinity)


PRIMITIVE_RULES = {
    "refl": refl,
    "trans": trans,
    "mk_comb_rule": mk_comb_rule,
    "abs_rule": abs_rule,
    "beta": beta,
    "assume": assume,
    "eq_mp": eq_mp,
    "deduct_antisym": deduct_antisym,
    "inst_type_rule": inst_type_rule,
    "inst_rule": inst_rule,
}


# ---------------------------------------------------------------------------
# Theory: signature plus the append-only definition log


@dataclass(frozen=True)
class DefinitionEvent:
    """One definitional extension; the ordered log replays to a Theory."""

    kind: str  # "constant-definition" | "type-definition"
    names: tuple[str, ...]
    term: Term  # defining rhs, or the carving predicate
    witness: Optional[Term] = None  # type definitions: the inhabitation witness


@dataclass(frozen=True)
class TypeDefInfo:
    """What semantics needs to interpret a defined type constructor."""

    tyvars: tuple[str, ...]
    rep_type: HolType
    predicate: Term
    abs_name: str
    rep_name: str


_A = TyVar("A")


class Theory:
    """Type constructors, term constants, and the definition log.

    Starts with exactly bool/ind/fun and the constants ``=`` (equality at
    A -> A -> bool) and ``@`` (choice at (A -> bool) -> A).  Names are
    never redefined.
    """

    def __init__(self):
        self._lock = threading.RLock()
        self.type_constructors: dict[str, int] = {"bool": 0, "ind": 0, "fun": 2}
        self.term_constants: dict[str, HolType] = {
            "=": fn(_A, fn(_A, BOOL)),
            "@": fn(fn(_A, BOOL), _A),
        }
        self.definition_log: list[DefinitionEvent] = []
        self.definitions: dict[str, Term] = {}
        self.typedefs: dict[str, TypeDefInfo] = {}

    def has_constant(self, name: str) -> bool:
        return name in self.term_constants

    def constant_type(self, name: str) -> HolType:
        try:
            return self.term_constants[name]
        except KeyError:
            raise HolError(f"unknown constant {name!r}") from None

    def mk_const(self, name: str, tyinst: dict[str, HolType] | None = None) -> Const:
        """The constant at an instance of its generic type."""
        generic = self.constant_type(name)
        return Const(name, type_subst(tyinst or {}, generic))

    def fingerprint(self) -> str:
        """Hash of the ordered definition log; pins articles to a signature."""
        h = hashlib.sha256(b"microhol-theory-v1")
        for ev in self.definition_log:
            h.update(b"\x00" + ev.kind.encode())
            for n in ev.names:
                h.update(b"\x01" + n.encode())
            h.update(b"\x02" + term_order_key(ev.term))
            if ev.witness is not None:
                h.update(b"\x03" + term_order_key(ev.witness))
        return h.hexdigest()

    # Registration is private to the definitional operations (and replay).

    def _register_constant(self, name: str, generic: HolType, rhs: Term):
        with self._lock:
            if name in self.term_constants:
                raise DuplicateName(f"constant {name!r} already defined")
            self.term_constants[name] = generic
            self.definitions[name] = rhs

    def _register_typedef(
        self, name: str, abs_name: str, rep_name: str, info: TypeDefInfo
    ):
        with self._lock:
            if name in self.type_constructors:
                raise DuplicateName(f"type {name!r} already defined")
            for cname in (abs_name, rep_name):
                if cname in self.term_constants:
                    raise DuplicateName(f"constant {cname!r} already defined")
            self.type_constructors[name] = len(info.tyvars)
            newty = TyApp(name, tuple(TyVar(a) for a in info.tyvars))
            self.term_constants[abs_name] = fn(info.rep_type, newty)
            self.term_constants[rep_name] = fn(newty, info.rep_type)
            self.typedefs[name] = info

    @classmethod
    def replay(cls, events: Iterable[DefinitionEvent]) -> "Theory":
        """Reconstruct the signature from a definition log."""
        thy = cls()
        for ev in events:
            if ev.kind == "constant-definition":
                (name,) = ev.names
                thy._register_constant(name, ev.term.ty, ev.term)
            elif ev.kind == "type-definition":
                name, abs_name, rep_name = ev.names
                info = TypeDefInfo(
                    tyvars=tuple(sorted(type_vars_of_term(ev.term))),
                    rep_type=ev.witness.ty,
                    predicate=ev.term,
                    abs_name=abs_name,
                    rep_name=rep_name,
                )
                thy._register_typedef(name, abs_name, rep_name, info)
            else:
                raise HolError(f"unknown definition event kind {ev.kind!r}")
            thy.definition_log.append(ev)
        return thy


# ---------------------------------------------------------------------------
# Axioms


def axiom_extensionality() -> Theorem:
    """|- (\\x. t x) = t (the eta form of extensionality)."""
    t = Var("t", fn(TyVar("A"), TyVar("B")))
    x = Var("x", TyVar("A"))
    return _mk((), mk_eq(mk_abs(x, mk_comb(t, x)), t), False)


def axiom_choice(theory: Theory) -> Theorem:
    """|- P x ==> P ((@) P)."""
    if not theory.has_constant("imp"):
        raise MissingDefinitions("axiom_choice needs the bootstrap constant 'imp'")
    a = TyVar("A")
    p = Var("P", fn(a, BOOL))
    x = Var("x", a)
    imp = theory.mk_const("imp")
    select = Const("@", fn(fn(a, BOOL), a))
    concl = mk_comb(mk_comb(imp, mk_comb(p, x)), mk_comb(p, mk_comb(select, p)))
    return _mk((), concl, False)


def axiom_infinity(theory: Theory) -> Theorem:
    """|- ?f:ind->ind. ONE_ONE f /\\ ~(ONTO f), flagged `uses-infinity`."""
    from .syntax import IND

    for name in ("exists", "and", "not", "ONE_ONE", "ONTO"):
        if not theory.has_constant(name):
            raise MissingDefinitions(f"axiom_infinity needs bootstrap constant {name!r}")
    ii = fn(IND, IND)
    inst = {"A": IND, "B": IND}
    f = Var("f", ii)
    one_one = mk_comb(theory.mk_const("ONE_ONE", inst), f)
    onto = mk_comb(theory.mk_const("ONTO", inst), f)
    body = mk_comb(
        mk_comb(theory.mk_const("and"), one_one),
        mk_comb(theory.mk_const("not"), onto),
    )
    concl = mk_comb(theory.mk_const("exists", {"A": ii}), mk_abs(f, body))
    return _mk((), concl, True)


# ---------------------------------------------------------------------------
# Definitional mechanisms


def new_basic_definition(theory: Theory, name: str, rhs: Term) -> Theorem:
    """Define a new constant equal to a closed term; returns |- name = rhs."""
    if free_vars(rhs):
        raise NotClosed(f"definition body for {name!r} has free variables")
    if not type_vars_of_term(rhs) <= type_vars_of_type(rhs.ty):
        raise TypeVarEscape(
            f"type variables of {name!r}'s body do not all occur in its type"
        )
    with theory._lock:
        if theory.has_constant(name):
            raise DuplicateName(f"constant {name!r} already defined")
        theory._register_constant(name, rhs.ty, rhs)
        theory.definition_log.append(
            DefinitionEvent("constant-definition", (name,), rhs)
        )
    return _mk((), mk_eq(Const(name, rhs.ty), rhs), False)


def new_basic_type_definition(
    theory: Theory,
    name: str,
    abs_name: str,
    rep_name: str,
    inhabitation: Theorem,
) -> tuple[Theorem, Theorem]:
    """Carve a new type from a provably nonempty predicate.

    Returns |- abs (rep a) = a and |- P r = (rep (abs r) = r).
    """
    _check_theorem(inhabitation, "inhabitation proof")
    if inhabitation.assumptions:
        raise MalformedInhabitation("inhabitation theorem must have no assumptions")
    concl = inhabitation.conclusion
    if not isinstance(concl, Comb):
        raise MalformedInhabitation("inhabitation conclusion must be P w")
    pred, witness = concl.rator, concl.rand
    if free_vars(pred):
        raise MalformedInhabitation("carving predicate must be closed")
    rep_ty = witness.ty
    tyvars = tuple(sorted(type_vars_of_term(pred)))
    info = TypeDefInfo(tyvars, rep_ty, pred, abs_name, rep_name)
    with theory._lock:
        theory._register_typedef(name, abs_name, rep_name, info)
        theory.definition_log.append(
            DefinitionEvent("type-definition", (name, abs_name, rep_name), pred, witness)
        )
    newty = TyApp(name, tuple(TyVar(a) for a in tyvars))
    abs_c = Const(abs_name, fn(rep_ty, newty))
    rep_c = Const(rep_name, fn(newty, rep_ty))
    flag = inhabitation.uses_infinity
    a = Var("a", newty)
    th1 = _mk((), mk_eq(mk_comb(abs_c, mk_comb(rep_c, a)), a), flag)
    r = Var("r", rep_ty)
    th2 = _mk(
        (),
        mk_eq(
            mk_comb(pred, r),
            mk_eq(mk_comb(rep_c, mk_comb(abs_c, r)), r),
        ),
        flag,
    )
    return th1, th2


# ---------------------------------------------------------------------------
# Well-formedness audits (used by tests and the article checker)


def check_type(theory: Theory, ty: HolType):
    """Raise unless every constructor is registered with matching arity."""
    if isinstance(ty, TyVar):
        return
    arity = theory.type_constructors.get(ty.con)
    if arity is None:
        raise HolError(f"unregistered type constructor {ty.con!r}")
    if arity != len(ty.args):
        raise IllTyped(
            f"type constructor {ty.con!r} expects {arity} arguments, "
            f"got {len(ty.args)}"
        )
    for a in ty.args:
        check_type(theory, a)


def _is_instance_of(generic: HolType, ty: HolType) -> bool:
    from .syntax import type_match

    return type_match(generic, ty) is not None


def check_term(theory: Theory, t: Term):
    """Full-tree audit: registered types, constant instances, local typing."""
    if isinstance(t, Var):
        check_type(theory, t.ty)
    elif isinstance(t, Const):
        check_type(theory, t.ty)
        if not theory.has_constant(t.name):
            raise HolError(f"unregistered constant {t.name!r}")
        if not _is_instance_of(theory.constant_type(t.name), t.ty):
            raise IllTyped(
                f"constant {t.name!r} at {t.ty!r} is not an instance of its "
                "generic type"
            )
    elif isinstance(t, Comb):
        check_term(theory, t.rator)
        check_term(theory, t.rand)
        if not (
            isinstance(t.rator.ty, TyApp)
            and t.rator.ty.con == "fun"
            and t.rator.ty.args[0] == t.rand.ty
        ):
            raise IllTyped("combination violates the domain-match invariant")
    else:
        check_term(theory, t.bvar)
        check_term(theory, t.body)


def check_theorem(theory: Theory, th: Theorem):
    """Audit a theorem: all parts well-typed, boolean where required."""
    _check_theorem(th)
    for part in (*th.assumptions, th.conclusion):
        check_term(theory, part)
        if part.ty != BOOL:
            raise NotBoolean("sequent part is not boolean")
