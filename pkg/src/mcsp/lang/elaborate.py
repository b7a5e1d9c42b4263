"""Elaboration of checked DSL definitions into kernel processes.

References elaborate to memoized suspensions that force the referenced
definition, so cyclic (guarded) definitions unfold productively. Operand
positions are forced exactly where the kernel operators need to inspect
them: external-choice operands, bind scrutinees, and fmap/addTick operands
eagerly; prefix continuations, internal-choice operands, and bind branches
lazily.
"""

from __future__ import annotations

from typing import Callable

from mcsp.choice import (
    Choice,
    ChoiceElem,
    InL,
    InR,
    cardinality,
    render_choice,
    swap_union,
)
from mcsp.kernel import (
    DeferredProcess,
    Process,
    Terminated,
    add_timed_tick,
    bind,
    ext_choice,
    fmap,
    int_choice_deferred,
    lazy,
    prefix,
    skip,
    stop,
    Label,
)
from mcsp.lang.check import check_env, fmap_operand_choice, infer, union_parts
from mcsp.lang.syntax import (
    AddTick,
    Ast,
    Bind,
    Env,
    ExtChoice,
    Fmap,
    IntChoice,
    Prefix,
    Ref,
    Skip,
    Stop,
    Term,
    pretty_ast,
)


class ElaborationError(Exception):
    pass


def fn_semantics(fn: str) -> Callable[[ChoiceElem], ChoiceElem]:
    if fn == "id":
        return lambda e: e
    if fn == "inl":
        return InL
    if fn == "inr":
        return InR
    if fn == "swap":
        return swap_union
    raise ValueError(f"unknown fmap function {fn!r}")


def _coerce(p: Process, target: Choice) -> Process:
    """Identity on matching choices; between distinct empty choices the
    retyping map is vacuously total."""
    if p.ret_choice == target:
        return p

    def impossible(e: ChoiceElem) -> ChoiceElem:
        raise AssertionError("element of an empty choice")

    if cardinality(p.ret_choice) != 0 or cardinality(target) != 0:
        raise ElaborationError(
            f"cannot coerce {render_choice(p.ret_choice)} to "
            f"{render_choice(target)}"
        )
    return fmap(impossible, p, target)


def _cache(env: Env) -> dict[str, Process]:
    cache = getattr(env, "_elab_cache", None)
    if cache is None:
        cache = {}
        env._elab_cache = cache
    return cache


def elaborate(env: Env, name: str) -> Process:
    """Elaborate one named definition; requires check_env(env) to be empty."""
    if name not in env.defs:
        raise ElaborationError(f"unknown process {name!r}")
    cache = _cache(env)
    if name not in cache:
        d = env.defs[name]
        cache[name] = elaborate_ast(env, d.body, d.annotation)
    return cache[name]


def elaborate_checked(env: Env, name: str) -> Process:
    diags = check_env(env)
    if diags:
        raise ElaborationError(
            "environment has diagnostics:\n" + "\n".join(map(str, diags))
        )
    return elaborate(env, name)


def elaborate_ast(env: Env, ast: Ast, expected: Choice) -> Process:
    """Elaborate an expression at an expected return Choice."""
    if isinstance(ast, Stop):
        return stop(expected)
    if isinstance(ast, Skip):
        return skip(expected, ast.value)
    if isinstance(ast, Term):
        return Terminated(expected, ast.value)
    if isinstance(ast, Prefix):
        cont = lazy(expected,
                    lambda: elaborate_ast(env, ast.cont, expected),
                    display=pretty_ast(ast.cont))
        return prefix(Label(ast.label), cont)
    if isinstance(ast, ExtChoice):
        left_c, right_c = union_parts(expected)
        p = elaborate_ast(env, ast.left, left_c)
        q = elaborate_ast(env, ast.right, right_c)
        return _coerce(ext_choice(p, q), expected)
    if isinstance(ast, IntChoice):
        left_c, right_c = union_parts(expected)
        dp = lazy(left_c, lambda: elaborate_ast(env, ast.left, left_c),
                  display=pretty_ast(ast.left))
        dq = lazy(right_c, lambda: elaborate_ast(env, ast.right, right_c),
                  display=pretty_ast(ast.right))
        return _coerce(int_choice_deferred(dp, dq), expected)
    if isinstance(ast, Fmap):
        operand_c = fmap_operand_choice(ast.fn, expected)
        p = elaborate_ast(env, ast.operand, operand_c)
        return fmap(fn_semantics(ast.fn), p, expected)
    if isinstance(ast, AddTick):
        return add_timed_tick(ast.value, elaborate_ast(env, ast.operand, expected))
    if isinstance(ast, Bind):
        scrut_c = ast.scrut_choice or infer(env, ast.scrutinee)
        if scrut_c is None:
            raise ElaborationError("bind scrutinee choice is not inferable")
        p = elaborate_ast(env, ast.scrutinee, scrut_c)
        bodies = dict(ast.branches)

        def k(v: ChoiceElem) -> DeferredProcess:
            body = bodies[v]
            return lazy(expected, lambda: elaborate_ast(env, body, expected),
                        display=pretty_ast(body))

        return bind(p, k, expected)
    if isinstance(ast, Ref):
        return _coerce(elaborate(env, ast.name), expected)
    raise TypeError(f"not an Ast: {ast!r}")
