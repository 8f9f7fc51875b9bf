"""Real root isolation for univariate rational polynomials.

Dense coefficient lists (low degree first) over Fraction; isolation is
Descartes/bisection on the squarefree part, which is certifiably complete.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Coeffs = list[Fraction]


class ZeroPolynomial(ValueError):
    pass


def unormalize(c: Sequence) -> Coeffs:
    out = [x if isinstance(x, Fraction) else Fraction(x) for x in c]
    while out and out[-1] == 0:
        out.pop()
    return out


def udegree(p: Coeffs) -> int:
    return len(p) - 1


def ueval(p: Coeffs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def uderiv(p: Coeffs) -> Coeffs:
    return [c * k for k, c in enumerate(p)][1:]


def umul(p: Coeffs, q: Coeffs) -> Coeffs:
    if not p or not q:
        return []
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return unormalize(out)


def udivmod(p: Coeffs, d: Coeffs) -> tuple[Coeffs, Coeffs]:
    if not d:
        raise ZeroDivisionError("division by zero polynomial")
    rem = list(p)
    quot = [Fraction(0)] * max(0, len(p) - len(d) + 1)
    dd = udegree(d)
    lead = d[-1]
    while len(rem) - 1 >= dd and unormalize(rem):
        rem = unormalize(rem)
        if len(rem) - 1 < dd:
            break
        k = len(rem) - 1 - dd
        c = rem[-1] / lead
        quot[k] = c
        for i, dc in enumerate(d):
            rem[k + i] -= c * dc
        rem.pop()
    return unormalize(quot), unormalize(rem)


def ugcd(p: Coeffs, q: Coeffs) -> Coeffs:
    a, b = unormalize(p), unormalize(q)
    while b:
        _, r = udivmod(a, b)
        a, b = b, r
    if not a:
        return []
    return [c / a[-1] for c in a]


def usquarefree(p: Coeffs) -> Coeffs:
    p = unormalize(p)
    if not p:
        raise ZeroPolynomial("zero polynomial")
    if udegree(p) == 0:
        return [Fraction(1)]
    g = ugcd(p, uderiv(p))
    if udegree(g) == 0:
        out = p
    else:
        out, _ = udivmod(p, g)
    return [c / out[-1] for c in out]


def uroot_bound(p: Coeffs) -> Fraction:
    """Cauchy bound: all real roots lie in (-B, B)."""
    p = unormalize(p)
    if not p:
        raise ZeroPolynomial("zero polynomial")
    lead = abs(p[-1])
    m = max((abs(c) for c in p[:-1]), default=Fraction(0))
    return Fraction(1) + m / lead


def _taylor_shift(p: Coeffs, c: Fraction) -> Coeffs:
    """p(x + c) by repeated synthetic division."""
    out = list(p)
    n = len(out)
    for i in range(n - 1):
        for j in range(n - 2, i - 1, -1):
            out[j] += out[j + 1] * c
    return out


def _scale(p: Coeffs, s: Fraction) -> Coeffs:
    """p(s*x)."""
    out = []
    power = Fraction(1)
    for c in p:
        out.append(c * power)
        power *= s
    return out


def _sign_variations(p: Coeffs) -> int:
    signs = [1 if c > 0 else -1 for c in p if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def _descartes_01(p: Coeffs) -> int:
    """Upper bound (exact when 0 or 1) for roots of p in the open (0, 1)."""
    # x -> 1/(1+x) maps (0, inf) onto (0, 1): variations of (1+x)^d p(1/(1+x))
    rev = list(reversed(p))
    return _sign_variations(_taylor_shift(rev, Fraction(1)))


def isolate_roots(p: Coeffs) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals for all real roots of p, sorted ascending.

    Each interval (lo, hi) has rational non-root endpoints and contains
    exactly one root of p; a rational root r is returned as (r, r).
    """
    p = unormalize(p)
    if not p:
        raise ZeroPolynomial("zero polynomial")
    sf = usquarefree(p)
    if udegree(sf) == 0:
        return []
    bound = uroot_bound(sf)
    out: list[tuple[Fraction, Fraction]] = []

    def descartes_on(a: Fraction, b: Fraction) -> int:
        # roots of sf in (a, b) == roots of sf(a + (b-a) t) in t in (0,1)
        q = _scale(_taylor_shift(sf, a), b - a)
        return _descartes_01(q)

    stack = [(-bound, bound)]
    while stack:
        a, b = stack.pop()
        v = descartes_on(a, b)
        if v == 0:
            continue
        if v == 1:
            out.append((a, b))
            continue
        # split at a non-root point so interval endpoints are never roots
        m = (a + b) / 2
        step = (b - a) / 4
        while ueval(sf, m) == 0:
            m += step
            step /= 2
        stack.append((a, m))
        stack.append((m, b))

    out.sort(key=lambda iv: (iv[0], iv[1]))
    # tighten so intervals are pairwise disjoint
    changed = True
    while changed:
        changed = False
        for i in range(len(out) - 1):
            lo1, hi1 = out[i]
            lo2, hi2 = out[i + 1]
            if hi1 > lo2:
                out[i] = _bisect_once(sf, out[i])
                out[i + 1] = _bisect_once(sf, out[i + 1])
                changed = True
    return out


def _bisect_once(sf: Coeffs, iv: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    lo, hi = iv
    if lo == hi:
        return iv
    mid = (lo + hi) / 2
    vm = ueval(sf, mid)
    if vm == 0:
        return (mid, mid)
    if ueval(sf, lo) * vm < 0:
        return (lo, mid)
    return (mid, hi)


def refine_interval(sf: Coeffs, iv: tuple[Fraction, Fraction], width: Fraction) -> tuple[Fraction, Fraction]:
    lo, hi = iv
    while hi - lo > width:
        lo, hi = _bisect_once(sf, (lo, hi))
        if lo == hi:
            break
    return (lo, hi)


def count_roots_between(sf: Coeffs, a: Fraction, b: Fraction) -> int:
    """Number of roots of squarefree sf in the open interval (a, b); exact."""
    if a >= b:
        return 0
    q = _scale(_taylor_shift(sf, a), b - a)
    v = _descartes_01(q)
    if v <= 1:
        return v
    m = (a + b) / 2
    extra = 1 if ueval(sf, m) == 0 else 0
    return count_roots_between(sf, a, m) + extra + count_roots_between(sf, m, b)
