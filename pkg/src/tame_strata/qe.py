"""Quantifier elimination and derived set queries.

The output formula is assembled from sign conditions on the projection
factor basis over the free variables. Distinct cells occasionally share a
sign vector; when a shared vector carries both truth values the run is
repeated with each free level closed under derivatives (Thom encodings),
after which cell sign vectors are provably unique and the disjunction of the
true sign conditions defines exactly the eliminated set.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import formulas as F
from .algebraic import AlgebraicPoint, Coord
from .cad import CadCell, CadConfig, CadProblem, DEFAULT_CONFIG, ResourceLimit
from .formulas import Atom, Formula, parse_formula
from .polynomials import Polynomial, merge_vars

SIGN_REL = {
    frozenset({-1}): "<",
    frozenset({0}): "=",
    frozenset({1}): ">",
    frozenset({-1, 0}): "<=",
    frozenset({0, 1}): ">=",
    frozenset({-1, 1}): "!=",
}


def _occurrence_order(free: Sequence[str], matrix: Formula) -> list[str]:
    """Default variable order: fewest occurrences last (projected first)."""
    counts = {v: 0 for v in free}
    for a in F.atoms_of(matrix):
        for v in a.poly.used_variables():
            if v in counts:
                counts[v] += 1
    return sorted(free, key=lambda v: (-counts[v], free.index(v)))


def _presimplify(prefix: list[tuple[str, str]], matrix: Formula) -> tuple[list, Formula]:
    """Substitute away innermost existential variables pinned by equations
    linear in them with constant coefficient, clause by clause."""
    prefix = list(prefix)
    while prefix:
        kind, v = prefix[-1]
        if v not in matrix.free_variables():
            prefix.pop()
            continue
        if kind != "E":
            break
        clauses = F.dnf(matrix)
        new_clauses = []
        ok = True
        for clause in clauses:
            done = None
            for i, a in enumerate(clause):
                if a.rel != "=" or a.poly.degree_in(v) != 1:
                    continue
                coeff = a.poly.coefficients_in(v)[1]
                if not coeff.is_constant():
                    continue
                rest = a.poly.coefficients_in(v)[0]
                expr = rest * (Fraction(-1) / coeff.constant_value())
                others = clause[:i] + clause[i + 1 :]
                done = [
                    Atom.make(b.poly.substitute({v: expr}), b.rel) for b in others
                ]
                break
            if done is None:
                ok = False
                break
            new_clauses.append(done)
        if not ok:
            break
        matrix = F.Or.of([F.And.of(c) for c in new_clauses])
        prefix.pop()
    return prefix, matrix


def _eval_quantified(problem: CadProblem, cell: CadCell, prefix: list[tuple[str, str]],
                     depth: int, matrix: Formula) -> bool:
    if depth == len(prefix):
        return problem.eval_formula(matrix, cell.factor_signs())
    kind, _ = prefix[depth]
    children = problem.cad.children(cell)
    if kind == "E":
        return any(_eval_quantified(problem, ch, prefix, depth + 1, matrix) for ch in children)
    return all(_eval_quantified(problem, ch, prefix, depth + 1, matrix) for ch in children)


def _free_leaves(problem: CadProblem, k: int) -> list[CadCell]:
    return list(problem.cad.cells_at_level(k))


def _sign_vector(cell: CadCell, coords: Sequence[int]) -> tuple[int, ...]:
    signs = cell.factor_signs()
    return tuple(signs[i] for i in coords)


def _minimize(true_vecs: set, false_vecs: set, m: int) -> list[tuple[frozenset, ...]]:
    """Cover all true sign vectors by products of per-coordinate sign sets,
    avoiding every false vector (unrealized vectors are don't-cares)."""
    full = frozenset({-1, 0, 1})

    def covers(prod, vec) -> bool:
        return all(vec[i] in prod[i] for i in range(m))

    def valid(prod) -> bool:
        return not any(covers(prod, fv) for fv in false_vecs)

    products = []
    for vec in sorted(true_vecs):
        prod = [frozenset({s}) for s in vec]
        # widen: drop coordinates entirely where possible (fixed order)
        for i in range(m):
            trial = prod[:i] + [full] + prod[i + 1 :]
            if valid(trial):
                prod = trial
        # widen remaining singletons to pairs
        for i in range(m):
            if prod[i] == full or len(prod[i]) > 1:
                continue
            for extra in (-1, 0, 1):
                if extra in prod[i]:
                    continue
                trial = prod[:i] + [frozenset(prod[i] | {extra})] + prod[i + 1 :]
                if valid(trial):
                    prod = trial
        products.append(tuple(prod))
    # deduplicate, then greedy cover
    uniq = sorted(set(products), key=lambda p: tuple(sorted(tuple(sorted(s)) for s in p)))
    remaining = set(true_vecs)
    chosen = []
    while remaining:
        best = None
        best_cov = -1
        for prod in uniq:
            cov = sum(1 for v in remaining if covers(prod, v))
            if cov > best_cov:
                best, best_cov = prod, cov
        chosen.append(best)
        remaining = {v for v in remaining if not covers(best, v)}
        uniq.remove(best)
    return chosen


def _solution_formula(problem: CadProblem, k: int, labels: list[tuple[CadCell, bool]]) -> Formula | None:
    """Exact formula for the union of true cells, or None on a sign-vector
    collision (caller re-runs with Thom augmentation)."""
    coords = []
    for level in range(1, k + 1):
        coords.extend(problem.basis.factors_at_level(level))
    true_vecs: set = set()
    false_vecs: set = set()
    for cell, truth in labels:
        vec = _sign_vector(cell, coords)
        (true_vecs if truth else false_vecs).add(vec)
    if true_vecs & false_vecs:
        return None
    if not true_vecs:
        return F.FALSE
    products = _minimize(true_vecs, false_vecs, len(coords))
    disjuncts = []
    for prod in products:
        conj = []
        for i, allowed in enumerate(prod):
            if len(allowed) == 3:
                continue
            rel = SIGN_REL[allowed]
            conj.append(Atom.make(problem.basis.factors[coords[i]], rel))
        disjuncts.append(F.And.of(conj))
    disjuncts.sort(key=F.format_formula)
    return F.Or.of(disjuncts)


def eliminate_quantifiers(
    f: Formula,
    var_order: Optional[Sequence[str]] = None,
    config: CadConfig = DEFAULT_CONFIG,
) -> Formula:
    """Quantifier-free formula defining the same subset of the free space,
    canonicalized as a sorted DNF of factor sign conditions."""
    free = list(f.free_variables())
    prefix, matrix = F.prenex(f)
    prefix, matrix = _presimplify(prefix, matrix)
    if isinstance(matrix, (F.TrueF, F.FalseF)):
        return matrix  # constants absorb any quantifier prefix
    if var_order is not None:
        missing = [v for v in free if v not in var_order]
        if missing:
            raise ValueError(f"var_order missing free variables {missing}")
        free = [v for v in var_order if v in free]
    else:
        free = _occurrence_order(free, matrix)
    bound = [v for _, v in prefix]
    order = free + bound
    polys = sorted({a.poly for a in F.atoms_of(matrix)}, key=lambda p: str(p))

    def attempt(thom_levels: int) -> Formula | None:
        problem = CadProblem(polys, order, config, thom_levels=thom_levels)

        def run():
            labels = []
            for cell in _free_leaves(problem, len(free)):
                truth = _eval_quantified(problem, cell, prefix, 0, matrix)
                labels.append((cell, truth))
            if not free:
                return F.TRUE if labels[0][1] else F.FALSE
            return _solution_formula(problem, len(free), labels)

        return problem.run_with_fallback(run)

    result = attempt(0)
    if result is None:
        result = attempt(len(free))
    if result is None:
        raise ResourceLimit("sign-vector collision persists under augmentation", "solution-formula")
    return result


def decide(f: Formula, config: CadConfig = DEFAULT_CONFIG) -> bool:
    """Decide a sentence (no free variables)."""
    if f.free_variables():
        raise ValueError("decide() requires a sentence")
    return isinstance(eliminate_quantifiers(f, config=config), F.TrueF)


def _qf_problem(f: Formula, variables: Sequence[str], config: CadConfig) -> tuple[CadProblem, Formula]:
    if not f.is_quantifier_free():
        f = eliminate_quantifiers(f, config=config)
    extra = [v for v in f.free_variables() if v not in variables]
    if extra:
        raise ValueError(f"formula uses variables outside the ambient space: {extra}")
    polys = sorted({a.poly for a in F.atoms_of(f)}, key=lambda p: str(p))
    problem = CadProblem(polys, tuple(variables), config)
    return problem, f


def true_cells(f: Formula, variables: Sequence[str], config: CadConfig = DEFAULT_CONFIG) -> list[CadCell]:
    problem, g = _qf_problem(f, variables, config)

    def run():
        out = []
        for cell in problem.cad.cells_at_level(len(variables)):
            if problem.eval_formula(g, cell.factor_signs()):
                out.append(cell)
        return out

    return problem.run_with_fallback(run)


def set_dimension(f: Formula, variables: Optional[Sequence[str]] = None,
                  config: CadConfig = DEFAULT_CONFIG) -> int:
    """Dimension of the solution set in the ambient space (-1 if empty)."""
    vs = tuple(variables) if variables is not None else f.free_variables()
    cells = true_cells(f, vs, config)
    return max((c.dimension() for c in cells), default=-1)


def sample_points(f: Formula, variables: Optional[Sequence[str]] = None,
                  config: CadConfig = DEFAULT_CONFIG) -> list[AlgebraicPoint]:
    """One exact sample per CAD cell satisfying f (empty iff the set is)."""
    vs = tuple(variables) if variables is not None else f.free_variables()
    out = []
    for cell in true_cells(f, vs, config):
        sample = cell.sample_point()
        out.append(AlgebraicPoint(vs, [sample[v] for v in vs]))
    return out


def is_empty(f: Formula, variables: Optional[Sequence[str]] = None,
             config: CadConfig = DEFAULT_CONFIG) -> bool:
    vs = tuple(variables) if variables is not None else f.free_variables()
    return not true_cells(f, vs, config)


def implies(f: Formula, g: Formula, variables: Optional[Sequence[str]] = None,
            config: CadConfig = DEFAULT_CONFIG) -> bool:
    vs = tuple(variables) if variables is not None else tuple(
        dict.fromkeys(f.free_variables() + g.free_variables())
    )
    return is_empty(f & ~g, vs, config)


def equivalent(f: Formula, g: Formula, variables: Optional[Sequence[str]] = None,
               config: CadConfig = DEFAULT_CONFIG) -> bool:
    """Semantic equivalence (decided over a joint CAD, not syntactically)."""
    if f == g:
        return True
    vs = tuple(variables) if variables is not None else tuple(
        dict.fromkeys(f.free_variables() + g.free_variables())
    )
    if not f.is_quantifier_free():
        f = eliminate_quantifiers(f, config=config)
    if not g.is_quantifier_free():
        g = eliminate_quantifiers(g, config=config)
    polys = sorted({a.poly for a in F.atoms_of(f)} | {a.poly for a in F.atoms_of(g)},
                   key=lambda p: str(p))
    if not vs:
        return True
    problem = CadProblem(polys, vs, config)

    def run():
        for cell in problem.cad.cells_at_level(len(vs)):
            signs = cell.factor_signs()
            if problem.eval_formula(f, signs) != problem.eval_formula(g, signs):
                return False
        return True

    return problem.run_with_fallback(run)


def project_image(f: Formula, keep: Sequence[str],
                  config: CadConfig = DEFAULT_CONFIG) -> Formula:
    """Coordinate projection of the solution set onto the `keep` variables."""
    if not f.is_quantifier_free():
        f = eliminate_quantifiers(f, config=config)
    free = f.free_variables()
    drop = [v for v in free if v not in keep]
    g = f
    for v in reversed(drop):
        g = F.Exists(v, g)
    return eliminate_quantifiers(g, var_order=list(keep), config=config)


_closure_cache: dict = {}


def closure(f: Formula, variables: Optional[Sequence[str]] = None,
            config: CadConfig = DEFAULT_CONFIG) -> Formula:
    """Topological closure in R^n via the epsilon-ball first-order definition
    (with a weak-inequality fast path for formulas that are already closed)."""
    vs = tuple(variables) if variables is not None else f.free_variables()
    key = (f, vs)
    if key in _closure_cache:
        return _closure_cache[key]
    g = F.nnf(f)
    if not g.is_quantifier_free():
        g = eliminate_quantifiers(g, config=config)
        g = F.nnf(g)
    if all(a.rel in ("=", "<=", ">=") for a in F.atoms_of(g)):
        _closure_cache[key] = g
        return g  # finite unions/intersections of closed sets are closed
    taken = set(vs) | set(g.free_variables())
    eps = F.fresh_name("eps", taken)
    taken.add(eps)
    primed = {v: F.fresh_name(v + "_c", taken) for v in vs}
    for p in primed.values():
        taken.add(p)
    moved = F.rename_variables(g, primed)
    dist = Polynomial.zero(())
    for v in vs:
        d = Polynomial.var(v) - Polynomial.var(primed[v])
        dist = dist + d * d
    epsp = Polynomial.var(eps)
    ball = Atom.make(dist - epsp * epsp, "<")
    body = moved & ball
    for v in reversed(list(primed.values())):
        body = F.Exists(v, body)
    quantified = F.Forall(eps, F.Or.of([Atom.make(epsp, "<="), body]))
    result = eliminate_quantifiers(quantified, var_order=list(vs), config=config)
    _closure_cache[key] = result
    return result


def interior(f: Formula, variables: Optional[Sequence[str]] = None,
             config: CadConfig = DEFAULT_CONFIG) -> Formula:
    """Interior = complement of the closure of the complement."""
    vs = tuple(variables) if variables is not None else f.free_variables()
    comp = F.Not.of(f)
    cl = closure(comp, vs, config)
    return eliminate_quantifiers(F.Not.of(cl), var_order=list(vs), config=config)


def point_formula(point: AlgebraicPoint, variables: Optional[Sequence[str]] = None) -> Formula:
    """Quantifier-free formula pinning exactly this point (per-coordinate
    defining polynomial plus isolating box)."""
    vs = tuple(variables) if variables is not None else point.variables
    parts = []
    for v, (poly, lo, hi) in zip(point.variables, point.pin_formulas()):
        x = Polynomial.var(v)
        if lo == hi:
            parts.append(Atom.make(x - lo, "="))
            continue
        defp = Polynomial((v,), {(k,): c for k, c in enumerate(poly)})
        parts.append(Atom.make(defp, "="))
        parts.append(Atom.make(x - lo, ">"))
        parts.append(Atom.make(x - hi, "<"))
    return F.And.of(parts)


def membership(point: AlgebraicPoint, f: Formula) -> bool:
    return F.evaluate(f, point.as_mapping())
