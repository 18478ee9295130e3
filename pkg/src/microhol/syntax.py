"""Simply typed lambda syntax: HOL types, terms, and the term operations
everything else is built on.

Terms carry their type intrinsically (computed once at construction), so
`type_of` is a field read and the node constructors can reject ill-typed
combinations immediately.  Two variables are the same variable exactly
when both name and type coincide; the same name at two types denotes two
unrelated variables.

Alpha-equivalence, the total term order, and assumption-set keys all go
through a de Bruijn canonical byte encoding provided by the accelerator
backend (compiled when available, pure Python otherwise).  Node classes
expose a small integer ``KIND`` tag so the backends can dispatch without
importing this module.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

from ._accel import alpha_canon

__all__ = [
    "HolError",
    "IllTyped",
    "HolType",
    "TyVar",
    "TyApp",
    "Term",
    "Var",
    "Const",
    "Comb",
    "Abs",
    "BOOL",
    "IND",
    "fn",
    "dest_fn",
    "mk_comb",
    "mk_abs",
    "mk_eq",
    "eq_const",
    "is_eq",
    "dest_eq",
    "dest_comb",
    "dest_abs",
    "type_of",
    "free_vars",
    "free_vars_list",
    "vfree_in",
    "variant",
    "type_vars_of_type",
    "type_vars_of_term",
    "type_subst",
    "type_match",
    "Substitution",
    "vsubst",
    "inst_type",
    "alpha_equiv",
    "term_compare",
    "term_order_key",
    "iter_subterms",
]


class HolError(Exception):
    """Base class for every error this package raises deliberately."""


class IllTyped(HolError):
    """A term construction violated the typing discipline."""


# ---------------------------------------------------------------------------
# Types


class HolType:
    __slots__ = ()

    def __repr__(self):
        from .surface import print_type

        return f"<hol_type {print_type(self)}>"


@dataclass(frozen=True, repr=False, eq=False, slots=True)
class TyVar(HolType):
    name: str
    _h: int | None = field(default=None, init=False, repr=False, compare=False)
    _enc: bytes | None = field(default=None, init=False, repr=False, compare=False)

    def __eq__(self, other):
        return self is other or (type(other) is TyVar and self.name == other.name)

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((TyVar, self.name))
            object.__setattr__(self, "_h", h)
        return h


TyVar.KIND = 0


@dataclass(frozen=True, repr=False, eq=False, slots=True)
class TyApp(HolType):
    con: str
    args: tuple[HolType, ...] = ()
    _h: int | None = field(default=None, init=False, repr=False, compare=False)
    _enc: bytes | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.args, tuple):
            object.__setattr__(self, "args", tuple(self.args))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is TyApp
            and hash(self) == hash(other)
            and self.con == other.con
            and self.args == other.args
        )

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((TyApp, self.con, self.args))
            object.__setattr__(self, "_h", h)
        return h


TyApp.KIND = 1

BOOL = TyApp("bool")
IND = TyApp("ind")


def fn(dom: HolType, cod: HolType) -> TyApp:
    """The function type dom -> cod."""
    return TyApp("fun", (dom, cod))


def dest_fn(ty: HolType) -> tuple[HolType, HolType]:
    if isinstance(ty, TyApp) and ty.con == "fun":
        return ty.args[0], ty.args[1]
    raise IllTyped(f"not a function type: {ty!r}")


def type_vars_of_type(ty: HolType) -> set[str]:
    out: set[str] = set()
    stack = [ty]
    while stack:
        t = stack.pop()
        if isinstance(t, TyVar):
            out.add(t.name)
        else:
            stack.extend(t.args)
    return out


def type_subst(mapping: Mapping[str, HolType], ty: HolType) -> HolType:
    """Substitute type variables; shares unchanged subtrees."""
    if isinstance(ty, TyVar):
        return mapping.get(ty.name, ty)
    changed = False
    args = []
    for a in ty.args:
        a2 = type_subst(mapping, a)
        changed = changed or a2 is not a
        args.append(a2)
    return TyApp(ty.con, tuple(args)) if changed else ty


def type_match(
    pattern: HolType,
    target: HolType,
    env: dict[str, HolType] | None = None,
) -> dict[str, HolType] | None:
    """First-order type matching: an assignment sending pattern to target.

    Returns the (possibly extended) environment, or None if no match.  On
    failure a passed-in env may hold partial bindings; callers that reuse
    environments must treat None as invalidating.
    """
    if env is None:
        env = {}
    if isinstance(pattern, TyVar):
        bound = env.get(pattern.name)
        if bound is None:
            env[pattern.name] = target
            return env
        return env if bound == target else None
    if (
        not isinstance(target, TyApp)
        or pattern.con != target.con
        or len(pattern.args) != len(target.args)
    ):
        return None
    for p, t in zip(pattern.args, target.args):
        if type_match(p, t, env) is None:
            return None
    return env


# ---------------------------------------------------------------------------
# Terms


class Term:
    __slots__ = ()

    def __repr__(self):
        from .surface import print_term

        return f"<term {print_term(self)}>"


@dataclass(frozen=True, eq=False, repr=False, slots=True)
class Var(Term):
    name: str
    ty: HolType
    _h: int | None = field(default=None, init=False, repr=False, compare=False)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is Var and self.name == other.name and self.ty == other.ty
        )

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((Var, self.name, self.ty))
            object.__setattr__(self, "_h", h)
        return h


Var.KIND = 0


@dataclass(frozen=True, eq=False, repr=False, slots=True)
class Const(Term):
    name: str
    ty: HolType
    _h: int | None = field(default=None, init=False, repr=False, compare=False)

    def __eq__(self, other):
        if self is other:
            return True
        return (
            type(other) is Const and self.name == other.name and self.ty == other.ty
        )

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((Const, self.name, self.ty))
            object.__setattr__(self, "_h", h)
        return h


Const.KIND = 1


class Comb(Term):
    __slots__ = ("rator", "rand", "ty", "_h", "_canon")

    def __init__(self, rator: Term, rand: Term):
        rty = rator.ty
        if not (isinstance(rty, TyApp) and rty.con == "fun"):
            raise IllTyped(f"rator is not a function: {rator!r}")
        if rty.args[0] != rand.ty:
            raise IllTyped(
                f"operand type {rand.ty!r} does not match domain {rty.args[0]!r}"
            )
        object.__setattr__(self, "rator", rator)
        object.__setattr__(self, "rand", rand)
        object.__setattr__(self, "ty", rty.args[1])
        object.__setattr__(self, "_h", None)
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, name, value):
        raise AttributeError("Comb is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Comb)
            and hash(self) == hash(other)
            and self.rator == other.rator
            and self.rand == other.rand
        )

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((Comb, self.rator, self.rand))
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        from .surface import print_term

        return f"<term {print_term(self)}>"


Comb.KIND = 2


class Abs(Term):
    __slots__ = ("bvar", "body", "ty", "_h", "_canon")

    def __init__(self, bvar: Var, body: Term):
        if not isinstance(bvar, Var):
            raise IllTyped("abstraction binder must be a variable")
        object.__setattr__(self, "bvar", bvar)
        object.__setattr__(self, "body", body)
        object.__setattr__(self, "ty", fn(bvar.ty, body.ty))
        object.__setattr__(self, "_h", None)
        object.__setattr__(self, "_canon", None)

    def __setattr__(self, name, value):
        raise AttributeError("Abs is immutable")

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Abs)
            and hash(self) == hash(other)
            and self.bvar == other.bvar
            and self.body == other.body
        )

    def __hash__(self):
        h = self._h
        if h is None:
            h = hash((Abs, self.bvar, self.body))
            object.__setattr__(self, "_h", h)
        return h

    def __repr__(self):
        from .surface import print_term

        return f"<term {print_term(self)}>"


Abs.KIND = 3


def type_of(t: Term) -> HolType:
    """The unique type of a term (total on constructed terms)."""
    return t.ty


# Smart constructors.  Comb/Abs already check their invariants; these are the
# public spellings used throughout.


def mk_comb(f: Term, a: Term) -> Comb:
    return Comb(f, a)


def mk_abs(v: Var, body: Term) -> Abs:
    return Abs(v, body)


def eq_const(ty: HolType) -> Const:
    """The equality constant instantiated at argument type `ty`."""
    return Const("=", fn(ty, fn(ty, BOOL)))


def mk_eq(lhs: Term, rhs: Term) -> Comb:
    if lhs.ty != rhs.ty:
        raise IllTyped(f"equation sides have types {lhs.ty!r} and {rhs.ty!r}")
    return Comb(Comb(eq_const(lhs.ty), lhs), rhs)


def is_eq(t: Term) -> bool:
    return (
        isinstance(t, Comb)
        and isinstance(t.rator, Comb)
        and isinstance(t.rator.rator, Const)
        and t.rator.rator.name == "="
    )


def dest_eq(t: Term) -> tuple[Term, Term]:
    if not is_eq(t):
        raise IllTyped(f"not an equation: {t!r}")
    return t.rator.rand, t.rand


def dest_comb(t: Term) -> tuple[Term, Term]:
    if not isinstance(t, Comb):
        raise IllTyped(f"not a combination: {t!r}")
    return t.rator, t.rand


def dest_abs(t: Term) -> tuple[Var, Term]:
    if not isinstance(t, Abs):
        raise IllTyped(f"not an abstraction: {t!r}")
    return t.bvar, t.body


# ---------------------------------------------------------------------------
# Free variables and fresh names


def free_vars(t: Term) -> set[Var]:
    """The variables with an unbound occurrence in t."""
    out: set[Var] = set()
    _collect_frees(t, out, [])
    return out


def _collect_frees(t: Term, out: set[Var], bound: list[Var]):
    if isinstance(t, Var):
        if t not in bound:
            out.add(t)
    elif isinstance(t, Comb):
        _collect_frees(t.rator, out, bound)
        _collect_frees(t.rand, out, bound)
    elif isinstance(t, Abs):
        bound.append(t.bvar)
        _collect_frees(t.body, out, bound)
        bound.pop()


def free_vars_list(t: Term) -> list[Var]:
    """Free variables in deterministic (name, type-encoding) order."""
    return sorted(free_vars(t), key=lambda v: (v.name, alpha_canon(v)))


def vfree_in(v: Var, t: Term) -> bool:
    """True iff v occurs free in t."""
    if isinstance(t, Var):
        return t == v
    if isinstance(t, Const):
        return False
    if isinstance(t, Comb):
        return vfree_in(v, t.rator) or vfree_in(v, t.rand)
    return t.bvar != v and vfree_in(v, t.body)


def variant(avoid: Iterable[Term], v: Var) -> Var:
    """Prime v's name (x, x', x'', ...) until it is free in nothing avoided."""
    avoid = list(avoid)
    while any(vfree_in(v, t) for t in avoid):
        v = Var(v.name + "'", v.ty)
    return v


def type_vars_of_term(t: Term) -> set[str]:
    out: set[str] = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, (Var, Const)):
            out |= type_vars_of_type(u.ty)
        elif isinstance(u, Comb):
            stack.append(u.rator)
            stack.append(u.rand)
        else:
            stack.append(u.bvar)
            stack.append(u.body)
    return out


# ---------------------------------------------------------------------------
# Substitution


@dataclass(frozen=True, eq=False)
class Substitution:
    """A parallel substitution: type variables to types, variables to terms.

    Each term image must have exactly the type of the variable it replaces
    after the type part is applied, so applying a well-formed substitution
    can never produce an ill-typed term.
    """

    type_part: dict[str, HolType]
    term_part: dict[Var, Term]

    def __post_init__(self):
        for v, image in self.term_part.items():
            if not isinstance(v, Var):
                raise IllTyped(f"substitution domain entry is not a variable: {v!r}")
            expected = type_subst(self.type_part, v.ty)
            if image.ty != expected:
                raise IllTyped(
                    f"substitution image for {v.name} has type {image.ty!r}, "
                    f"expected {expected!r}"
                )

    @classmethod
    def of_terms(cls, mapping: Mapping[Var, Term]) -> "Substitution":
        return cls({}, dict(mapping))

    @classmethod
    def of_types(cls, mapping: Mapping[str, HolType]) -> "Substitution":
        return cls(dict(mapping), {})


def vsubst(s: Substitution, t: Term) -> Term:
    """Simultaneous capture-avoiding substitution of terms for variables.

    Bound variables are renamed to primed variants exactly when a
    substitution image would otherwise capture them.  Unchanged subtrees
    are shared with the input.
    """
    if s.type_part:
        raise IllTyped("vsubst requires a substitution with empty type part")
    sub = {v: im for v, im in s.term_part.items() if v != im}
    if not sub:
        return t
    return _vsubst(sub, t)


def _vsubst(sub: dict[Var, Term], t: Term) -> Term:
    if isinstance(t, Var):
        return sub.get(t, t)
    if isinstance(t, Const):
        return t
    if isinstance(t, Comb):
        f = _vsubst(sub, t.rator)
        a = _vsubst(sub, t.rand)
        return t if f is t.rator and a is t.rand else Comb(f, a)
    v = t.bvar
    sub2 = {x: im for x, im in sub.items() if x != v}
    if not sub2:
        return t
    body = _vsubst(sub2, t.body)
    if body is t.body:
        return t
    # Renaming is needed exactly when some image brings in a free occurrence
    # of the binder while its own variable really occurs in the body.
    if any(vfree_in(v, im) and vfree_in(x, t.body) for x, im in sub2.items()):
        v2 = variant([body], v)
        sub2[v] = v2
        return Abs(v2, _vsubst(sub2, t.body))
    return Abs(v, body)


class _Clash(Exception):
    def __init__(self, var: Var):
        self.var = var


def inst_type(s: Substitution, t: Term) -> Term:
    """Apply a type substitution throughout a term.

    A binder is renamed when instantiation would identify it with a
    distinct free variable of the body (same name, types made equal).
    """
    if s.term_part:
        raise IllTyped("inst_type requires a substitution with empty term part")
    if not s.type_part:
        return t
    return _inst([], s.type_part, t)


def _inst(env: list[tuple[Var, Var]], tyin: Mapping[str, HolType], t: Term) -> Term:
    if isinstance(t, Var):
        ty2 = type_subst(tyin, t.ty)
        t2 = t if ty2 == t.ty else Var(t.name, ty2)
        for old, new in env:
            if new == t2:
                if old == t:
                    return t2
                raise _Clash(t2)
        return t2
    if isinstance(t, Const):
        ty2 = type_subst(tyin, t.ty)
        return t if ty2 == t.ty else Const(t.name, ty2)
    if isinstance(t, Comb):
        f = _inst(env, tyin, t.rator)
        a = _inst(env, tyin, t.rand)
        return t if f is t.rator and a is t.rand else Comb(f, a)
    y = t.bvar
    y2 = Var(y.name, type_subst(tyin, y.ty))
    env2 = [(y, y2)] + env
    try:
        body = _inst(env2, tyin, t.body)
        return t if body is t.body and y2 == y else Abs(y2, body)
    except _Clash as clash:
        if clash.var != y2:
            raise
        # The instantiated binder collided with an instantiated free variable:
        # rename the binder (at its pre-instantiation type) and retry.
        inst_frees = [_inst([], tyin, fv) for fv in free_vars(t.body)]
        fresh = variant(inst_frees, y2)
        z = Var(fresh.name, y.ty)
        renamed = Abs(z, _vsubst({y: z}, t.body))
        return _inst(env, tyin, renamed)


# ---------------------------------------------------------------------------
# Alpha-equivalence and term ordering


def alpha_equiv(t: Term, u: Term) -> bool:
    """True iff t and u differ only by consistent renaming of bound variables."""
    if t is u:
        return True
    return term_order_key(t) == term_order_key(u)


def term_order_key(t: Term) -> bytes:
    """Canonical de Bruijn encoding; equal keys iff alpha-equivalent terms.

    Cached on Comb/Abs nodes (the encoding is context-free), so repeated
    ordering and deduplication of shared structure costs one traversal."""
    canon = getattr(t, "_canon", None)
    if canon is None:
        canon = alpha_canon(t)
        if isinstance(t, (Comb, Abs)):
            object.__setattr__(t, "_canon", canon)
    return canon


def term_compare(t: Term, u: Term) -> int:
    """Total order on alpha-classes: negative, zero, or positive."""
    a, b = alpha_canon(t), alpha_canon(u)
    return -1 if a < b else (0 if a == b else 1)


def iter_subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        u = stack.pop()
        yield u
        if isinstance(u, Comb):
            stack.append(u.rator)
            stack.append(u.rand)
        elif isinstance(u, Abs):
            stack.append(u.body)
