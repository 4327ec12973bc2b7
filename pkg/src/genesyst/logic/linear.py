"""Linear integer constraints and a Fourier-Motzkin infeasibility test.

A constraint ``(coeffs, const, kind)`` reads ``sum(c*x) + const >= 0`` when
kind is ``"ge"`` and ``... == 0`` when kind is ``"eq"``.  ``infeasible``
answers True only when no integer point satisfies the system; False means
"not refuted".
"""

from __future__ import annotations

from functools import lru_cache, reduce
from math import gcd
from typing import Dict, Iterable, List, Optional, Tuple

from genesyst.logic.terms import Add, Int, Sub, Var

Lin = Tuple[Dict[str, int], int]
Constraint = Tuple[Tuple[Tuple[str, int], ...], int, str]

MAX_CONSTRAINTS = 400


def linearize(e) -> Optional[Lin]:
    """Linear form of an integer expression; None if it mentions enum literals."""
    match e:
        case Int(n):
            return {}, n
        case Var(n):
            return {n: 1}, 0
        case Add(l, r) | Sub(l, r):
            a = linearize(l)
            b = linearize(r)
            if a is None or b is None:
                return None
            sign = 1 if isinstance(e, Add) else -1
            coeffs = dict(a[0])
            for k, c in b[0].items():
                coeffs[k] = coeffs.get(k, 0) + sign * c
            return {k: c for k, c in coeffs.items() if c}, a[1] + sign * b[1]
    return None


def lin_sub(a: Lin, b: Lin) -> Lin:
    coeffs = dict(a[0])
    for k, c in b[0].items():
        coeffs[k] = coeffs.get(k, 0) - c
    return {k: c for k, c in coeffs.items() if c}, a[1] - b[1]


def lin_neg(a: Lin) -> Lin:
    return {k: -c for k, c in a[0].items()}, -a[1]


def comparison(op: str, l: Lin, r: Lin) -> List[Constraint]:
    """Constraints equivalent (over the integers) to ``l op r``.

    ``/=`` has no convex form and yields an empty list.
    """
    d = lin_sub(l, r)
    if op == "=":
        return [make(d, "eq")]
    if op == ">=":
        return [make(d, "ge")]
    if op == ">":
        return [make((d[0], d[1] - 1), "ge")]
    if op == "<=":
        return [make(lin_neg(d), "ge")]
    if op == "<":
        n = lin_neg(d)
        return [make((n[0], n[1] - 1), "ge")]
    return []


def make(lin: Lin, kind: str) -> Constraint:
    return tuple(sorted((k, c) for k, c in lin[0].items() if c)), lin[1], kind


def _normalize(coeffs: Dict[str, int], const: int, kind: str):
    """Divide by the coefficient gcd and tighten; returns None for a
    trivially true constraint, False for a trivially false one."""
    coeffs = {k: c for k, c in coeffs.items() if c}
    if not coeffs:
        ok = const >= 0 if kind == "ge" else const == 0
        return None if ok else False
    g = reduce(gcd, (abs(c) for c in coeffs.values()))
    if kind == "eq":
        if const % g:
            return False
        const //= g
    else:
        # sum >= -const  ==>  sum/g >= ceil(-const/g)
        const = const // g
    return tuple(sorted((k, c // g) for k, c in coeffs.items())), const, kind


def infeasible(constraints: Iterable[Constraint]) -> bool:
    return _infeasible(tuple(sorted(set(constraints))))


@lru_cache(maxsize=65536)
def _infeasible(constraints) -> bool:
    ges = set()
    eqs = []
    for coeffs, const, kind in constraints:
        n = _normalize(dict(coeffs), const, kind)
        if n is None:
            continue
        if n is False:
            return True
        if kind == "eq":
            eqs.append(n)
        else:
            ges.add(n)

    rows = [(dict(c), k) for c, k, _ in sorted(ges)]
    # eliminate equalities; rows are scaled by the pivot so everything stays integral
    while eqs:
        coeffs, const, _ = eqs.pop()
        coeffs = dict(coeffs)
        x = min(coeffs, key=lambda k: (abs(coeffs[k]), k))
        a = coeffs[x]
        if a < 0:
            coeffs = {k: -c for k, c in coeffs.items()}
            const, a = -const, -a

        def subst(row_c, row_k):
            f = row_c.get(x, 0)
            if not f:
                return row_c, row_k
            out = {k: a * c for k, c in row_c.items()}
            for k, c in coeffs.items():
                out[k] = out.get(k, 0) - f * c
            return out, a * row_k - f * const

        new_eqs = []
        for c2, k2, _ in eqs:
            rc, rk = subst(dict(c2), k2)
            n = _normalize(rc, rk, "eq")
            if n is False:
                return True
            if n is not None:
                new_eqs.append(n)
        eqs = new_eqs
        new_rows = []
        for rc, rk in rows:
            rc, rk = subst(rc, rk)
            n = _normalize(rc, rk, "ge")
            if n is False:
                return True
            if n is not None:
                new_rows.append((dict(n[0]), n[1]))
        rows = new_rows
    return _fm(rows)


def _fm(rows) -> bool:
    seen = set()
    uniq = []
    for rc, rk in rows:
        key = (tuple(sorted(rc.items())), rk)
        if key not in seen:
            seen.add(key)
            uniq.append((rc, rk))
    rows = uniq
    while True:
        variables = sorted({k for rc, _ in rows for k in rc})
        if not variables:
            return any(rk < 0 for _, rk in rows)
        if len(rows) > MAX_CONSTRAINTS:
            return False

        def cost(x):
            pos = sum(1 for rc, _ in rows if rc.get(x, 0) > 0)
            neg = sum(1 for rc, _ in rows if rc.get(x, 0) < 0)
            return pos * neg - pos - neg, x
        x = min(variables, key=cost)
        pos = [(rc, rk) for rc, rk in rows if rc.get(x, 0) > 0]
        neg = [(rc, rk) for rc, rk in rows if rc.get(x, 0) < 0]
        rest = [(rc, rk) for rc, rk in rows if rc.get(x, 0) == 0]
        out = {}
        for rc, rk in rest:
            out[(tuple(sorted(rc.items())), rk)] = (rc, rk)
        for pc, pk in pos:
            for nc, nk in neg:
                a = pc[x]
                b = -nc[x]
                coeffs = {}
                for k in set(pc) | set(nc):
                    if k == x:
                        continue
                    coeffs[k] = b * pc.get(k, 0) + a * nc.get(k, 0)
                n = _normalize(coeffs, b * pk + a * nk, "ge")
                if n is False:
                    return True
                if n is None:
                    continue
                rc2 = dict(n[0])
                out[(n[0], n[1])] = (rc2, n[1])
        rows = list(out.values())
