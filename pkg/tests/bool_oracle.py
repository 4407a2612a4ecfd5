"""Independent oracles over ground boolean terms.

Terms are nested tuples ('T',), ('F',), ('n', x), ('a', x, y),
('o', x, y), rewritten by hand-rolled implementations of the boolean
theory's rules, kept deliberately separate from the kernel:

* `one_steps` enumerates every single rewrite step at every position;
  `exhaustive_nf` explores all rewrite sequences (memoized across
  calls) and fails unless every path ends in the same normal form.
* `innermost_nf` and `outermost_nf` are two fixed-strategy rewriters.
* `random_sequence_nf` follows one uniformly random reduction sequence.

Conversions to and from kernel terms live here too.
"""

from __future__ import annotations

import sys

from lpm.terms import App, Const, KTerm, app, spine

sys.setrecursionlimit(1_000_000)

T = ("T",)
F = ("F",)

TRUE = Const("bool.true")
FALSE = Const("bool.false")
NOTB = Const("bool.notb")
ANDB = Const("bool.andb")
ORB = Const("bool.orb")


def to_kterm(t: tuple) -> KTerm:
    op = t[0]
    if op == "T":
        return TRUE
    if op == "F":
        return FALSE
    if op == "n":
        return App(NOTB, to_kterm(t[1]))
    return app(ANDB if op == "a" else ORB, to_kterm(t[1]), to_kterm(t[2]))


def from_kterm(k: KTerm) -> tuple:
    if k == TRUE:
        return T
    if k == FALSE:
        return F
    head, args = spine(k)
    if head == NOTB:
        return ("n", from_kterm(args[0]))
    assert head in (ANDB, ORB) and len(args) == 2, k
    tag = "a" if head == ANDB else "o"
    return (tag, from_kterm(args[0]), from_kterm(args[1]))


def enumerate_terms(max_size: int) -> dict[int, list[tuple]]:
    """All ground terms over true/false/notb/andb/orb by node count."""
    by_size: dict[int, list[tuple]] = {1: [T, F]}
    for n in range(2, max_size + 1):
        row = [("n", x) for x in by_size[n - 1]]
        for i in range(1, n - 1):
            for x in by_size[i]:
                for y in by_size[n - 1 - i]:
                    row.append(("a", x, y))
                    row.append(("o", x, y))
        by_size[n] = row
    return by_size


def head_step(t: tuple):
    """First head rewrite in the theory's declaration order, or None."""
    op = t[0]
    if op == "n":
        x = t[1]
        if x == T:
            return F
        if x == F:
            return T
        if x[0] == "n":
            return x[1]
        if x[0] == "o":
            return ("a", ("n", x[1]), ("n", x[2]))
        if x[0] == "a":
            return ("o", ("n", x[1]), ("n", x[2]))
        return None
    if op == "a":
        x, y = t[1], t[2]
        if x == T:
            return y
        if y == T:
            return x
        if x == F or y == F:
            return F
        if x == y:
            return x
        if y[0] == "a":
            return ("a", ("a", x, y[1]), y[2])
        if x[0] == "o":
            return ("o", ("a", x[1], y), ("a", x[2], y))
        if y[0] == "o":
            return ("o", ("a", x, y[1]), ("a", x, y[2]))
        return None
    if op == "o":
        x, y = t[1], t[2]
        if x == T or y == T:
            return T
        if x == F:
            return y
        if y == F:
            return x
        if x == y:
            return x
        if y[0] == "o":
            return ("o", ("o", x, y[1]), y[2])
        return None
    return None


def _head_steps(t: tuple) -> list[tuple]:
    """Every head rewrite applicable to `t` (not just the first)."""
    out = []
    op = t[0]
    if op == "n":
        x = t[1]
        if x == T:
            out.append(F)
        elif x == F:
            out.append(T)
        elif x[0] == "n":
            out.append(x[1])
        elif x[0] == "o":
            out.append(("a", ("n", x[1]), ("n", x[2])))
        elif x[0] == "a":
            out.append(("o", ("n", x[1]), ("n", x[2])))
    elif op == "a":
        x, y = t[1], t[2]
        if x == T:
            out.append(y)
        if y == T:
            out.append(x)
        if x == F:
            out.append(F)
        if y == F:
            out.append(F)
        if x == y:
            out.append(x)
        if y[0] == "a":
            out.append(("a", ("a", x, y[1]), y[2]))
        if y[0] == "o":
            out.append(("o", ("a", x, y[1]), ("a", x, y[2])))
        if x[0] == "o":
            out.append(("o", ("a", x[1], y), ("a", x[2], y)))
    elif op == "o":
        x, y = t[1], t[2]
        if x == T:
            out.append(T)
        if y == T:
            out.append(T)
        if x == F:
            out.append(y)
        if y == F:
            out.append(x)
        if x == y:
            out.append(x)
        if y[0] == "o":
            out.append(("o", ("o", x, y[1]), y[2]))
    return out


def one_steps(t: tuple) -> list[tuple]:
    """All single rewrite steps anywhere inside `t`."""
    out = _head_steps(t)
    if t[0] == "n":
        out += [("n", s) for s in one_steps(t[1])]
    elif t[0] in ("a", "o"):
        out += [(t[0], s, t[2]) for s in one_steps(t[1])]
        out += [(t[0], t[1], s) for s in one_steps(t[2])]
    return out


class NotConfluent(AssertionError):
    pass


_exhaustive_memo: dict[tuple, tuple] = {}


def exhaustive_nf(t: tuple) -> tuple:
    """Normal form via exhaustive enumeration of all rewrite sequences.

    Explores the full reduction graph (iteratively, memoized across
    calls) and raises `NotConfluent` if two sequences end differently.
    """
    memo = _exhaustive_memo
    stack = [t]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        succs = one_steps(cur)
        if not succs:
            memo[cur] = cur
            stack.pop()
            continue
        pending = [s for s in succs if s not in memo]
        if pending:
            stack.extend(pending)
            continue
        nfs = {memo[s] for s in succs}
        if len(nfs) != 1:
            raise NotConfluent(f"{cur} reaches distinct normal forms {nfs}")
        memo[cur] = nfs.pop()
        stack.pop()
    return memo[t]


_innermost_memo: dict[tuple, tuple] = {}


def innermost_nf(t: tuple) -> tuple:
    r = _innermost_memo.get(t)
    if r is not None:
        return r
    if t[0] == "n":
        u = ("n", innermost_nf(t[1]))
    elif t[0] in ("a", "o"):
        u = (t[0], innermost_nf(t[1]), innermost_nf(t[2]))
    else:
        u = t
    while True:
        s = head_step(u)
        if s is None:
            break
        u = innermost_nf(s)
    _innermost_memo[t] = u
    return u


def outermost_nf(t: tuple) -> tuple:
    while True:
        s = head_step(t)
        if s is not None:
            t = s
            continue
        if t[0] == "n":
            x = outermost_nf(t[1])
            if x == t[1]:
                return t
            t = ("n", x)
        elif t[0] in ("a", "o"):
            x, y = outermost_nf(t[1]), outermost_nf(t[2])
            if x == t[1] and y == t[2]:
                return t
            t = (t[0], x, y)
        else:
            return t


def random_sequence_nf(t: tuple, rng) -> tuple:
    while True:
        succs = one_steps(t)
        if not succs:
            return t
        t = rng.choice(succs)
