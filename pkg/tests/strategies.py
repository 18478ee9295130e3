"""Hypothesis strategies for well-typed random terms."""

import hypothesis.strategies as st

from microhol.syntax import (
    BOOL,
    IND,
    Abs,
    Comb,
    Const,
    TyVar,
    Var,
    fn,
    mk_eq,
)

BASE_TYPES = (BOOL, IND, TyVar("A"), TyVar("B"))

base_types = st.sampled_from(BASE_TYPES)

hol_types = st.recursive(
    base_types, lambda sub: st.builds(fn, sub, sub), max_leaves=4
)

_VAR_NAMES = ("x", "y", "z", "u")


@st.composite
def typed_terms(draw, ty=None, depth=4):
    """A well-typed term of the given (or drawn) type."""
    if ty is None:
        ty = draw(hol_types)
    if depth <= 0:
        return Var(draw(st.sampled_from(_VAR_NAMES)), ty)
    choice = draw(st.integers(0, 5))
    if choice <= 1:
        return Var(draw(st.sampled_from(_VAR_NAMES)), ty)
    if choice == 2 and ty == BOOL:
        ety = draw(base_types)
        return mk_eq(
            draw(typed_terms(ty=ety, depth=depth - 1)),
            draw(typed_terms(ty=ety, depth=depth - 1)),
        )
    if choice == 3 and getattr(ty, "con", None) == "fun":
        v = Var(draw(st.sampled_from(_VAR_NAMES)), ty.args[0])
        return Abs(v, draw(typed_terms(ty=ty.args[1], depth=depth - 1)))
    if choice == 4:
        sel_ty = fn(fn(ty, BOOL), ty)
        pred = draw(typed_terms(ty=fn(ty, BOOL), depth=depth - 1))
        return Comb(Const("@", sel_ty), pred)
    arg_ty = draw(base_types)
    f = draw(typed_terms(ty=fn(arg_ty, ty), depth=depth - 1))
    a = draw(typed_terms(ty=arg_ty, depth=depth - 1))
    return Comb(f, a)


bool_terms = typed_terms(ty=BOOL)
