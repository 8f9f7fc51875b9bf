"""Subresultants, resultants, gcds and squarefree decomposition.

Everything works on `Polynomial` viewed as univariate in a chosen main
variable with polynomial coefficients; exact division keeps all arithmetic in
Z[vars] after a primitive-part normalization.
"""

from __future__ import annotations

from fractions import Fraction

from . import realroots as rr
from .polynomials import Polynomial, PolynomialError, grlex_key, merge_vars

_ZERO = Fraction(0)


def exact_div(p: Polynomial, d: Polynomial) -> Polynomial:
    """Exact polynomial division; raises PolynomialError if not divisible."""
    q = try_div(p, d)
    if q is None:
        raise PolynomialError("inexact polynomial division")
    return q


def try_div(p: Polynomial, d: Polynomial) -> Polynomial | None:
    if d.is_zero():
        raise PolynomialError("division by zero polynomial")
    if d.is_constant():
        return p * (1 / d.constant_value())
    p, d = Polynomial.unify(p, d)
    lt_e = max(d.terms, key=grlex_key)
    lt_c = d.terms[lt_e]
    dterms = [(e, c) for e, c in d.terms.items() if e != lt_e]
    quot: dict[tuple, Fraction] = {}
    rem = dict(p.terms)
    while rem:
        re = max(rem, key=grlex_key)
        diff = tuple(map(int.__sub__, re, lt_e))
        if any(x < 0 for x in diff):
            return None
        c = rem.pop(re) / lt_c
        quot[diff] = quot.get(diff, Fraction(0)) + c
        for e, dc in dterms:
            key = tuple(map(int.__add__, diff, e))
            s = rem.get(key, _ZERO) - c * dc
            if s:
                rem[key] = s
            elif key in rem:
                del rem[key]
    return Polynomial._raw(p.variables, {e: c for e, c in quot.items() if c})


def pseudo_remainder(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """prem(p, q) wrt var: lc(q)^(dp-dq+1) * p mod q."""
    dp, dq = p.degree_in(var), q.degree_in(var)
    if dq < 0:
        raise PolynomialError("pseudo-division by zero")
    if dp < dq:
        return p
    p, q = Polynomial.unify(p, q)
    lc_q = q.leading_coefficient_in(var).in_context(p.variables)
    xv = Polynomial.var(var, p.variables)
    rem = p
    for _ in range(dp - dq + 1):
        dr = rem.degree_in(var)
        if dr < dq:
            rem = rem * lc_q
            continue
        lc_r = rem.leading_coefficient_in(var).in_context(p.variables)
        rem = rem * lc_q - q * lc_r * xv ** (dr - dq)
    return rem


def content_in(p: Polynomial, var: str) -> Polynomial:
    """gcd of the coefficients of p as a polynomial in var."""
    coeffs = [c for c in p.coefficients_in(var) if not c.is_zero()]
    if not coeffs:
        return Polynomial.zero(())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant():
            break
    return g.primitive()


def _to_dense(p: Polynomial, var: str) -> rr.Coeffs:
    out = [Fraction(0)] * (p.degree_in(var) + 1)
    i = p.variables.index(var)
    for e, c in p.terms.items():
        out[e[i]] = c
    return out


def _from_dense(cs: rr.Coeffs, var: str) -> Polynomial:
    return Polynomial((var,), {(k,): c for k, c in enumerate(cs) if c})


def poly_gcd(p: Polynomial, q: Polynomial) -> Polynomial:
    """Multivariate gcd over Q, normalized primitive with positive lead."""
    if p.is_zero():
        return q.primitive()
    if q.is_zero():
        return p.primitive()
    if p.is_constant() or q.is_constant():
        return Polynomial.constant(1)
    p = p.drop_unused()
    q = q.drop_unused()
    common = [v for v in p.variables if v in q.variables]
    if not common:
        return Polynomial.constant(1)
    if len(p.variables) == 1 and len(q.variables) == 1:
        var = p.variables[0]
        g = rr.ugcd(_to_dense(p, var), _to_dense(q, var))
        return _from_dense(g, var).primitive()
    var = common[0]
    cp, cq = content_in(p, var), content_in(q, var)
    a = exact_div(p.primitive(), cp)
    b = exact_div(q.primitive(), cq)
    # primitive PRS in var
    if a.degree_in(var) < b.degree_in(var):
        a, b = b, a
    while not b.is_zero():
        r = pseudo_remainder(a, b, var)
        a, b = b, (Polynomial.zero(()) if r.is_zero() else exact_div(r.primitive(), content_in(r, var)))
    g = exact_div(a.primitive(), content_in(a, var))
    if g.degree_in(var) == 0:
        g = Polynomial.constant(1)
    return (g * poly_gcd(cp, cq)).primitive()


def squarefree_part(p: Polynomial) -> Polynomial:
    """Largest squarefree divisor (same zero set), primitive-normalized.

    Splits off the content with respect to one variable; the primitive part
    has all factors involving that variable, so one derivative gcd suffices,
    and the content recurses in fewer variables."""
    if p.is_zero() or p.is_constant():
        return p.primitive()
    p = p.primitive().drop_unused()
    if len(p.variables) == 1:
        var = p.variables[0]
        return _from_dense(rr.usquarefree(_to_dense(p, var)), var).primitive()
    var = p.variables[0]
    cont = content_in(p, var)
    pp = exact_div(p, cont)
    g = poly_gcd(pp, pp.derivative(var))
    sf_pp = pp if g.is_constant() else exact_div(pp, g)
    return (squarefree_part(cont) * sf_pp).primitive()


_chain_cache: dict[Polynomial, tuple[Polynomial, ...]] = {}


def squarefree_chain(p: Polynomial) -> list[Polynomial]:
    """Write p (up to a positive constant) as +/- prod(chain) with every
    entry squarefree and chain[0] carrying all roots of p."""
    prim = p.primitive()
    cached = _chain_cache.get(prim)
    if cached is not None:
        return list(cached)
    chain = []
    rest = prim
    while not rest.is_constant():
        s = squarefree_part(rest)
        chain.append(s)
        rest = exact_div(rest, s).primitive()
    _chain_cache[prim] = tuple(chain)
    return chain


def subresultant_prs(p: Polynomial, q: Polynomial, var: str) -> list[Polynomial]:
    """Subresultant polynomial remainder sequence (Brown's g-h algorithm).

    Returns [p, q, r_1, ..., r_k] ending at the last nonzero remainder; each
    r_i is the corresponding subresultant up to the documented sign
    convention, with coefficient growth controlled by exact divisions.
    """
    if p.degree_in(var) < 0 or q.degree_in(var) < 0:
        raise PolynomialError("zero polynomial in subresultant PRS")
    if p.degree_in(var) < q.degree_in(var):
        p, q = q, p
    p, q = Polynomial.unify(p, q)
    prs = [p, q]
    a, b = p, q
    g = Polynomial.constant(1, p.variables)
    h = Polynomial.constant(1, p.variables)
    while True:
        delta = a.degree_in(var) - b.degree_in(var)
        r = pseudo_remainder(a, b, var)
        if r.is_zero():
            return prs
        divisor = g * h ** delta
        r = exact_div(r, divisor)
        prs.append(r)
        g = b.leading_coefficient_in(var).in_context(p.variables)
        if delta >= 1:
            h = exact_div(g ** delta, h ** (delta - 1)) if delta > 1 else g
        a, b = b, r


def subresultant_coefficients(p: Polynomial, q: Polynomial, var: str) -> list[Polynomial]:
    """Principal subresultant coefficient chain psc_0..psc_n (n = min degree).

    Derived from the subresultant PRS with the defective-jump fill; each
    entry agrees with the corresponding Sylvester-submatrix determinant up to
    the documented sign convention. psc_0 is the resultant up to that sign.
    """
    m, n = p.degree_in(var), q.degree_in(var)
    if m < 0 or n < 0:
        raise PolynomialError("zero polynomial")
    if m < n:
        p, q = q, p
        m, n = n, m
    out = [Polynomial.zero(()) for _ in range(n + 1)]
    out[n] = q.leading_coefficient_in(var) ** (m - n) if m > n else Polynomial.constant(1)
    prs = subresultant_prs(p, q, var)
    for i in range(2, len(prs)):
        cur = prs[i]
        f = cur.degree_in(var)
        e = prs[i - 1].degree_in(var)
        lc = cur.leading_coefficient_in(var)
        if f == e - 1:
            if f <= n:
                out[f] = lc
        else:
            # defective jump: S_j = 0 for f < j < e-1, S_f similar to cur
            if f <= n:
                out[f] = lc ** (e - f)
    return out


def sylvester_matrix(p: Polynomial, q: Polynomial, var: str) -> list[list[Polynomial]]:
    m, n = p.degree_in(var), q.degree_in(var)
    if m < 0 or n < 0:
        raise PolynomialError("zero polynomial has no Sylvester matrix")
    pc = p.coefficients_in(var)
    qc = q.coefficients_in(var)
    size = m + n
    ctx: tuple[str, ...] = ()
    for c in pc + qc:
        ctx = merge_vars(ctx, c.variables)
    zero = Polynomial.zero(ctx)
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(pc)):
            row[i + k] = c.in_context(ctx)
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(qc)):
            row[i + k] = c.in_context(ctx)
        rows.append(row)
    return rows


def matrix_determinant(rows: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free (Bareiss) determinant of a square polynomial matrix."""
    n = len(rows)
    if n == 0:
        return Polynomial.constant(1)
    m = [row[:] for row in rows]
    sign = 1
    prev = Polynomial.constant(1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return Polynomial.zero(())
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = exact_div(num, prev)
            m[i][k] = Polynomial.zero(())
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Resultant wrt var with the Sylvester-determinant sign convention."""
    return matrix_determinant(sylvester_matrix(p, q, var))


def resultant_prs(p: Polynomial, q: Polynomial, var: str) -> Polynomial:
    """Fast resultant up to sign and content (for projection sets)."""
    dp, dq = p.degree_in(var), q.degree_in(var)
    if dp < 0 or dq < 0:
        raise PolynomialError("zero polynomial")
    if dp == 0 and dq == 0:
        return Polynomial.constant(1)
    if dp == 0:
        return p ** dq
    if dq == 0:
        return q ** dp
    prs = subresultant_prs(p, q, var)
    last = prs[-1]
    if last.degree_in(var) > 0:
        # nontrivial gcd: resultant vanishes identically
        return Polynomial.zero(())
    return last


def discriminant_prs(p: Polynomial, var: str) -> Polynomial:
    """Discriminant up to sign and content (projection use only)."""
    d = p.derivative(var)
    if d.is_zero() or d.degree_in(var) < 0:
        return Polynomial.zero(())
    return resultant_prs(p, d, var)
