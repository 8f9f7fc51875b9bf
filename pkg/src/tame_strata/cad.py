"""Cylindrical algebraic decomposition.

Projection is McCallum-style (coefficients, discriminants, pairwise
resultants); if lifting detects a projection factor vanishing identically
over a positive-dimensional cell (the case McCallum's theorem excludes), the
decomposition restarts with the full Collins/Hong projection. Lifting uses
exact algebraic sample points throughout; every defining polynomial of a
sample coordinate stays univariate over Q.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .algebraic import AlgebraicNumber, Coord, roots_over_point, sign_at
from .formulas import Atom, Formula, rel_holds
from .polynomials import Polynomial
from .resultants import (
    discriminant_prs,
    resultant_prs,
    squarefree_chain,
    subresultant_prs,
)


class ResourceLimit(RuntimeError):
    """Raised when a decomposition exceeds the configured cell budget."""

    def __init__(self, message: str, stage: str = ""):
        super().__init__(message)
        self.stage = stage


class _NeedCollins(Exception):
    """Internal: nullification detected under McCallum projection."""


class CadConfig:
    def __init__(self, max_cells: int = 10 ** 6, use_mccallum: bool = True):
        self.max_cells = max_cells
        self.use_mccallum = use_mccallum


DEFAULT_CONFIG = CadConfig()


def poly_key(p: Polynomial) -> tuple:
    return (p.total_degree(), str(p))


class FactorBasis:
    """Squarefree factor decomposition shared by all atoms of a problem.

    Each input polynomial is written as sign * prod(factors); the factors are
    primitive and squarefree, deduplicated globally, and assigned to the CAD
    level of their highest variable.
    """

    def __init__(self, order: Sequence[str]):
        self.order = tuple(order)
        self.level_of_var = {v: i + 1 for i, v in enumerate(self.order)}
        self.factors: list[Polynomial] = []
        self._index: dict[Polynomial, int] = {}
        self.decomp: dict[Polynomial, tuple[int, tuple[int, ...]]] = {}

    def level_of(self, p: Polynomial) -> int:
        lv = 0
        for v in p.used_variables():
            lv = max(lv, self.level_of_var[v])
        return lv

    def add_factor(self, f: Polynomial) -> int:
        f = f.primitive().drop_unused()
        if f in self._index:
            return self._index[f]
        idx = len(self.factors)
        self.factors.append(f)
        self._index[f] = idx
        return idx

    def add_poly(self, p: Polynomial) -> None:
        if p in self.decomp:
            return
        prim = p.primitive()
        sign = p.monic_sign()
        chain = squarefree_chain(prim) if not prim.is_constant() else []
        idxs = tuple(self.add_factor(c) for c in chain)
        self.decomp[p] = (sign, idxs)

    def sign_of_poly(self, p: Polynomial, factor_signs: Mapping[int, int]) -> int:
        sign, idxs = self.decomp[p]
        for i in idxs:
            sign *= factor_signs[i]
            if sign == 0:
                return 0
        return sign

    def factors_at_level(self, level: int) -> list[int]:
        out = [i for i, f in enumerate(self.factors) if self.level_of(f) == level]
        out.sort(key=lambda i: poly_key(self.factors[i]))
        return out


def _nonconstant_factors(p: Polynomial) -> list[Polynomial]:
    if p.is_zero() or p.is_constant():
        return []
    return [c for c in squarefree_chain(p) if not c.is_constant()]


def mccallum_projection(polys: Sequence[Polynomial], var: str) -> list[Polynomial]:
    """McCallum projection set: all coefficients, discriminants, pairwise
    resultants (squarefree factors of them, constants dropped)."""
    out: list[Polynomial] = []
    active = [p for p in polys if p.degree_in(var) >= 1]
    for p in active:
        for c in p.coefficients_in(var):
            out.extend(_nonconstant_factors(c))
        if p.degree_in(var) >= 2:
            out.extend(_nonconstant_factors(discriminant_prs(p, var)))
    for i in range(len(active)):
        for j in range(i + 1, len(active)):
            out.extend(_nonconstant_factors(resultant_prs(active[i], active[j], var)))
    return out


def _reducta(p: Polynomial, var: str) -> list[Polynomial]:
    out = []
    coeffs = p.coefficients_in(var)
    for d in range(len(coeffs) - 1, -1, -1):
        if all(c.is_zero() for c in coeffs[: d + 1]):
            break
        q = Polynomial.from_coefficients(coeffs[: d + 1], var)
        if q.degree_in(var) == d and not q.is_zero():
            out.append(q)
    return [q for q in out if not q.is_constant()]


def _psc_chain(p: Polynomial, q: Polynomial, var: str) -> list[Polynomial]:
    """Principal subresultant coefficients via the subresultant PRS."""
    if p.degree_in(var) < 1 or q.degree_in(var) < 1:
        return []
    out = []
    prs = subresultant_prs(p, q, var)
    for r in prs[1:]:
        lc = r.leading_coefficient_in(var)
        if not lc.is_constant():
            out.append(lc)
        if r.degree_in(var) == 0 and not r.is_constant():
            out.append(r)
    return out


def hong_projection(polys: Sequence[Polynomial], var: str) -> list[Polynomial]:
    """Collins-Hong projection (PROJ1 + PROJ2) -- the sound fallback."""
    out: list[Polynomial] = []
    active = [p for p in polys if p.degree_in(var) >= 1]
    for f in active:
        for g in _reducta(f, var):
            out.extend(_nonconstant_factors(g.leading_coefficient_in(var)))
            dg = g.derivative(var)
            if dg.degree_in(var) >= 0 and g.degree_in(var) >= 1 and not dg.is_zero():
                for c in _psc_chain(g, dg, var):
                    out.extend(_nonconstant_factors(c))
    for i in range(len(active)):
        for j in range(i + 1, len(active)):
            for fr in _reducta(active[i], var):
                for c in _psc_chain(fr, active[j], var):
                    out.extend(_nonconstant_factors(c))
    return out


class CadCell:
    """One cell of the decomposition: `level` coordinates assigned."""

    __slots__ = ("parent", "level", "index", "sample", "signs", "children")

    def __init__(self, parent: Optional["CadCell"], index: tuple[int, ...],
                 sample: dict[str, Coord], signs: dict[int, int]):
        self.parent = parent
        self.level = len(index)
        self.index = index
        self.sample = sample
        self.signs = signs  # factor index -> sign, for this level's factors
        self.children: list[CadCell] | None = None

    def dimension(self) -> int:
        return sum(1 for i in self.index if i % 2 == 1)

    def factor_signs(self) -> dict[int, int]:
        out: dict[int, int] = {}
        cell: CadCell | None = self
        while cell is not None:
            out.update(cell.signs)
            cell = cell.parent
        return out

    def sample_point(self) -> dict[str, Coord]:
        return dict(self.sample)


class Cad:
    """A (partial) CAD of R^n for a factor basis, lifted on demand."""

    def __init__(self, basis: FactorBasis, config: CadConfig = DEFAULT_CONFIG):
        self.basis = basis
        self.config = config
        self.order = basis.order
        self.n = len(self.order)
        self.levels: dict[int, list[int]] = {
            k: basis.factors_at_level(k) for k in range(1, self.n + 1)
        }
        self.cell_count = 0
        self.root = CadCell(None, (), {}, {})

    def _budget(self, k: int = 1):
        self.cell_count += k
        if self.cell_count > self.config.max_cells:
            raise ResourceLimit(
                f"cell budget exceeded ({self.config.max_cells})", stage="lifting"
            )

    def children(self, cell: CadCell) -> list[CadCell]:
        if cell.children is None:
            cell.children = self._lift(cell)
        return cell.children

    def _lift(self, cell: CadCell) -> list[CadCell]:
        level = cell.level + 1
        if level > self.n:
            raise ValueError("cannot lift past the top level")
        var = self.order[level - 1]
        sample = cell.sample
        factor_ids = self.levels[level]
        roots: list[tuple[AlgebraicNumber, set[int]]] = []
        vanished: list[int] = []
        for fid in factor_ids:
            f = self.basis.factors[fid]
            rs = roots_over_point(f, var, sample)
            if rs is None:
                if self.config.use_mccallum and cell.dimension() > 0:
                    raise _NeedCollins()
                vanished.append(fid)
                continue
            for r in rs:
                placed = False
                for existing, owners in roots:
                    if existing.compare(r) == 0:
                        owners.add(fid)
                        placed = True
                        break
                if not placed:
                    roots.append((r, {fid}))
        roots.sort(key=lambda pair: pair[0])
        # disjoint isolating intervals so sector samples are easy to pick
        for i in range(len(roots) - 1):
            a, b = roots[i][0], roots[i + 1][0]
            while not (a.hi < b.lo):
                a.refine()
                b.refine()

        samples: list[tuple[Coord, int, set[int]]] = []  # (value, index, owners)
        if not roots:
            samples.append((Fraction(0), 1, set()))
        else:
            first = roots[0][0]
            samples.append((first.lo - 1, 1, set()))
            for i, (r, owners) in enumerate(roots):
                samples.append((r, 2 * i + 2, owners))
                if i + 1 < len(roots):
                    nxt = roots[i + 1][0]
                    samples.append(((r.hi + nxt.lo) / 2, 2 * i + 3, set()))
            samples.append((roots[-1][0].hi + 1, 2 * len(roots) + 1, set()))

        self._budget(len(samples))
        out = []
        for value, idx, owners in samples:
            child_sample = dict(sample)
            child_sample[var] = value if not (
                isinstance(value, AlgebraicNumber) and value.is_rational()
            ) else value.rational_value()
            signs: dict[int, int] = {fid: 0 for fid in vanished}
            for fid in factor_ids:
                if fid in signs:
                    continue
                if fid in owners:
                    signs[fid] = 0
                else:
                    signs[fid] = sign_at(self.basis.factors[fid], child_sample)
            out.append(CadCell(cell, cell.index + (idx,), child_sample, signs))
        return out

    def cells_at_level(self, level: int) -> Iterable[CadCell]:
        def walk(cell: CadCell, k: int):
            if k == level:
                yield cell
                return
            for ch in self.children(cell):
                yield from walk(ch, k + 1)

        yield from walk(self.root, 0)


def build_projection(
    basis: FactorBasis, config: CadConfig, use_mccallum: bool
) -> None:
    """Close the basis under the projection operator, top level down."""
    n = len(basis.order)
    for level in range(n, 1, -1):
        var = basis.order[level - 1]
        polys = [basis.factors[i] for i in basis.factors_at_level(level)]
        proj = (mccallum_projection if use_mccallum else hong_projection)(polys, var)
        if len(basis.factors) + len(proj) > config.max_cells:
            raise ResourceLimit("projection factor explosion", stage="projection")
        for p in proj:
            basis.add_factor(p)


class CadProblem:
    """CAD for a fixed atom set and variable order, with truth evaluation."""

    def __init__(
        self,
        polys: Sequence[Polynomial],
        order: Sequence[str],
        config: CadConfig = DEFAULT_CONFIG,
        thom_levels: int = 0,
    ):
        self.input_polys = list(polys)
        self.order = tuple(order)
        self.config = config
        self.thom_levels = thom_levels
        self.cad = self._build(use_mccallum=config.use_mccallum)

    def _build(self, use_mccallum: bool) -> Cad:
        basis = FactorBasis(self.order)
        for p in self.input_polys:
            basis.add_poly(p)
        if self.thom_levels:
            self._augment_derivatives(basis, self.thom_levels)
        build_projection(basis, self.config, use_mccallum)
        self.basis = basis
        self.used_mccallum = use_mccallum
        return Cad(basis, self.config)

    def _augment_derivatives(self, basis: FactorBasis, upto_level: int) -> None:
        # close each level <= upto_level under d/d(level var): Thom encodings
        # make distinct cells carry distinct sign vectors
        queue = list(basis.factors)
        while queue:
            f = queue.pop()
            lv = basis.level_of(f)
            if lv == 0 or lv > upto_level:
                continue
            var = basis.order[lv - 1]
            d = f.derivative(var)
            for g in _nonconstant_factors(d):
                if g not in basis._index:
                    basis.add_factor(g)
                    queue.append(g)

    def run_with_fallback(self, fn):
        """Run fn() over the current CAD; on McCallum nullification rebuild
        with the Collins/Hong projection and retry once."""
        try:
            return fn()
        except _NeedCollins:
            self.cad = self._build(use_mccallum=False)
            return fn()

    # -- truth evaluation ----------------------------------------------------

    def atom_sign(self, atom: Atom, factor_signs: Mapping[int, int]) -> int:
        return self.basis.sign_of_poly(atom.poly.primitive(), factor_signs) * (
            1 if atom.poly.monic_sign() == 1 else 1
        )

    def eval_formula(self, f: Formula, factor_signs: Mapping[int, int]) -> bool:
        from . import formulas as F

        if isinstance(f, F.TrueF):
            return True
        if isinstance(f, F.FalseF):
            return False
        if isinstance(f, Atom):
            sgn = self.basis.sign_of_poly(f.poly, factor_signs)
            return rel_holds(f.rel, sgn)
        if isinstance(f, F.And):
            return all(self.eval_formula(p, factor_signs) for p in f.parts)
        if isinstance(f, F.Or):
            return any(self.eval_formula(p, factor_signs) for p in f.parts)
        if isinstance(f, F.Not):
            return not self.eval_formula(f.part, factor_signs)
        raise ValueError("matrix must be quantifier-free")
