"""SOS constraints as semidefinite feasibility data.

An SOS polynomial is written ``Z^T Q Z`` with ``Q`` positive semidefinite
and ``Z`` a vector of monomials.  A constraint such as "``-(V - g) + (p - b) s``
is SOS" becomes the polynomial identity

    Z_C^T Q_C Z_C - (p - b) Z_s^T Q_s Z_s = -(V - g)

and equating coefficients monomial by monomial yields linear equalities in
the Gram entries.  Unknowns enter through :class:`GramVariable` objects and
linear maps applied to ``Z^T Q Z`` (multiplication by a fixed polynomial,
Lie derivative along a vector field, or sums of those).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .poly import DynamicalSystem, Monomial, Polynomial, grlex_key, polynomial_from_gram
from .sdp import SdpProblem, SdpSolution, tri_index, tri_len

MATCH_TOL = 1e-7


class StructuralInfeasibility(ValueError):
    """A target monomial that no Gram product can produce."""

    def __init__(self, monomial: Monomial, coefficient: float):
        self.monomial = monomial
        self.coefficient = coefficient
        super().__init__(
            f"monomial {_mono_str(monomial)} (coefficient {coefficient:g}) cannot be produced "
            "by any Gram product"
        )


def _mono_str(m: Monomial) -> str:
    parts = [f"x{k + 1}" + (f"^{e}" if e > 1 else "") for k, e in enumerate(m) if e]
    return "*".join(parts) or "1"


def monomials_of_degree(nvars: int, d: int) -> list:
    """All exponent tuples of total degree ``d``, x1-heavy first."""
    out = []
    for combo in itertools.combinations_with_replacement(range(nvars), d):
        e = [0] * nvars
        for k in combo:
            e[k] += 1
        out.append(tuple(e))
    return sorted(out, key=grlex_key)


@dataclass(frozen=True)
class MonomialBasis:
    nvars: int
    entries: tuple

    def __post_init__(self):
        if len(set(self.entries)) != len(self.entries):
            raise ValueError("duplicate monomials in basis")

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, k):
        return self.entries[k]

    @property
    def degrees(self) -> tuple:
        return tuple(sum(m) for m in self.entries)


def monomial_basis(nvars: int, min_deg: int, max_deg: int) -> MonomialBasis:
    """Gram basis for an SOS polynomial with degrees in ``[min_deg, max_deg]``.

    Uses every monomial of degree ``ceil(min_deg/2) .. floor(max_deg/2)``.
    """
    if nvars < 1 or min_deg < 0 or max_deg < min_deg:
        raise ValueError(f"invalid degree range [{min_deg}, {max_deg}]")
    lo, hi = (min_deg + 1) // 2, max_deg // 2
    if lo > hi:
        raise ValueError(f"degree range [{min_deg}, {max_deg}] admits no SOS basis")
    entries = []
    for d in range(lo, hi + 1):
        entries.extend(monomials_of_degree(nvars, d))
    return MonomialBasis(nvars, tuple(entries))


_ids = itertools.count()


@dataclass(frozen=True, eq=False)
class GramVariable:
    """Symmetric PSD matrix ``Q`` over ``basis``; represents ``Z^T Q Z``."""

    basis: MonomialBasis
    name: str = field(default_factory=lambda: f"G{next(_ids)}")

    @property
    def side(self) -> int:
        return len(self.basis)

    @property
    def nvars(self) -> int:
        return self.basis.nvars

    def pairs(self):
        b = self.basis.entries
        for j in range(len(b)):
            for i in range(j + 1):
                yield i, j, tuple(x + y for x, y in zip(b[i], b[j]))


# -- linear maps acting on Z^T Q Z ------------------------------------------

class LinearMap:
    """Linear map on polynomials, evaluated monomial by monomial with a cache."""

    def __init__(self):
        self._cache: dict = {}

    def _apply(self, m: Monomial) -> dict:
        raise NotImplementedError

    def image(self, m: Monomial) -> dict:
        out = self._cache.get(m)
        if out is None:
            out = self._cache[m] = self._apply(m)
        return out


class Multiply(LinearMap):
    """``q -> c * q`` for a fixed polynomial ``c``."""

    def __init__(self, c: Polynomial | float, nvars: int | None = None):
        super().__init__()
        if not isinstance(c, Polynomial):
            c = Polynomial.constant(nvars, c)
        self.c = c

    def _apply(self, m):
        return {tuple(a + b for a, b in zip(m, mc)): cc for mc, cc in self.c.items()}


class LieDerivative(LinearMap):
    """``q -> scale * (dq/dx) f``."""

    def __init__(self, sys: DynamicalSystem, scale: float = 1.0):
        super().__init__()
        self.sys = sys
        self.scale = scale

    def _apply(self, m):
        out: dict = {}
        for k, e in enumerate(m):
            if not e:
                continue
            base = list(m)
            base[k] -= 1
            for mf, cf in self.sys.f[k].items():
                mm = tuple(a + b for a, b in zip(base, mf))
                out[mm] = out.get(mm, 0.0) + self.scale * e * cf
        return out


class Sum(LinearMap):
    def __init__(self, *maps: LinearMap):
        super().__init__()
        self.maps = maps

    def _apply(self, m):
        out: dict = {}
        for op in self.maps:
            for mm, c in op.image(m).items():
                out[mm] = out.get(mm, 0.0) + c
        return out


@dataclass
class SosExpression:
    """``constant + sum_k op_k(Z_k^T Q_k Z_k)``, affine in the Gram entries."""

    nvars: int
    constant: Polynomial | None = None
    terms: list = field(default_factory=list)

    def __post_init__(self):
        if self.constant is None:
            self.constant = Polynomial.zero(self.nvars)

    def add(self, var: GramVariable, op: LinearMap | Polynomial | float = 1.0) -> "SosExpression":
        if not isinstance(op, LinearMap):
            op = Multiply(op, self.nvars)
        if var.nvars != self.nvars:
            raise ValueError("Gram variable lives in a different ring")
        self.terms.append((var, op))
        return self

    @property
    def variables(self) -> list:
        seen, out = set(), []
        for v, _ in self.terms:
            if id(v) not in seen:
                seen.add(id(v))
                out.append(v)
        return out

    def support(self) -> set:
        mons = set(m for m, _ in self.constant.items())
        for var, op in self.terms:
            for _, _, m in var.pairs():
                mons.update(op.image(m))
        return mons

    def value(self, grams: dict) -> Polynomial:
        """Substitute Gram values (name -> matrix)."""
        out: dict = dict(self.constant.items())
        for var, op in self.terms:
            Q = grams[var.name]
            for i, j, m in var.pairs():
                w = Q[i, j] if i == j else 2.0 * Q[i, j]
                if w == 0.0:
                    continue
                for mm, c in op.image(m).items():
                    out[mm] = out.get(mm, 0.0) + w * c
        return Polynomial(self.nvars, out)


@dataclass
class LinearEqualities:
    """Rows ``sum coef * Q[var][i, j] = rhs``, one per monomial."""

    monomials: list
    rows: list  # list of dict (var_name, i, j) -> coef
    rhs: list


def coefficient_match(expr: SosExpression, target: Polynomial) -> LinearEqualities:
    """Equate coefficients of ``expr`` and ``target``.

    Off-diagonal Gram entries appear once (upper triangle) with a factor 2.
    Raises :class:`StructuralInfeasibility` if ``target - constant`` has a
    monomial that no Gram term can generate.
    """
    if target.nvars != expr.nvars:
        raise ValueError("expression and target have different nvars")
    rows: dict = {}
    for var, op in expr.terms:
        for i, j, m in var.pairs():
            w = 1.0 if i == j else 2.0
            for mm, c in op.image(m).items():
                if c == 0.0:
                    continue
                row = rows.setdefault(mm, {})
                key = (var.name, i, j)
                row[key] = row.get(key, 0.0) + w * c
    resid = target - expr.constant
    for m, c in resid.items():
        if m not in rows or all(abs(v) < 1e-14 for v in rows[m].values()):
            raise StructuralInfeasibility(m, c)
    mons = sorted(set(rows) | set(m for m, _ in resid.items()), key=grlex_key)
    return LinearEqualities(mons, [rows.get(m, {}) for m in mons], [resid.coeff(m) for m in mons])


def gram_for(nvars: int, support: set, name: str | None = None) -> GramVariable:
    """Smallest full-degree Gram basis able to represent ``support``."""
    if not support:
        lo = hi = 0
    else:
        lo = min(sum(m) for m in support)
        hi = max(sum(m) for m in support)
    lo2, hi2 = (lo + 1) // 2, hi // 2
    if lo2 > hi2:
        lo2 = hi2
    entries = []
    for d in range(lo2, hi2 + 1):
        entries.extend(monomials_of_degree(nvars, d))
    basis = MonomialBasis(nvars, tuple(entries))
    return GramVariable(basis, name) if name else GramVariable(basis)


def sos_constraint(
    fixed: Polynomial, terms: Sequence = (), name: str | None = None
) -> tuple[SosExpression, Polynomial, GramVariable]:
    """Constraint "``fixed + sum op_k(Z_k' Q_k Z_k)`` is SOS".

    A slack Gram ``C`` with an automatically sized basis is introduced and
    the identity ``C - sum op_k(...) = fixed`` is returned as
    ``(expression, target, C)``.
    """
    n = fixed.nvars
    neg = SosExpression(n)
    for var, op in terms:
        if not isinstance(op, LinearMap):
            op = Multiply(op, n)
        neg.add(var, _Negate(op))
    support = neg.support() | set(m for m, _ in fixed.items())
    C = gram_for(n, support, name)
    expr = SosExpression(n)
    expr.add(C, 1.0)
    expr.terms.extend(neg.terms)
    return expr, fixed, C


class _Negate(LinearMap):
    def __init__(self, op: LinearMap):
        super().__init__()
        self.op = op

    def _apply(self, m):
        return {mm: -c for mm, c in self.op.image(m).items()}


@dataclass
class Assembled:
    problem: SdpProblem
    variables: dict  # name -> GramVariable
    equalities: list  # (expr, target) per constraint


def assemble(constraints: Sequence, objective: dict | None = None) -> Assembled:
    """Stack constraints ``(expr, target)`` into one :class:`SdpProblem`.

    ``objective`` maps Gram names to weight matrices ``W``; the cost is
    ``sum trace(W Q)``.
    """
    if not constraints:
        raise ValueError("no constraints")
    variables: dict = {}
    for expr, _ in constraints:
        for v in expr.variables:
            if v.name in variables and variables[v.name] is not v:
                raise ValueError(f"two Gram variables share the name {v.name!r}")
            variables.setdefault(v.name, v)
    blocks = tuple((name, v.side) for name, v in variables.items())
    offsets, k = {}, 0
    for name, side in blocks:
        offsets[name] = k
        k += tri_len(side)
    nv = k
    data, ri, ci, rhs = [], [], [], []
    r = 0
    for expr, target in constraints:
        eqs = coefficient_match(expr, target)
        for row, b in zip(eqs.rows, eqs.rhs):
            for (name, i, j), c in row.items():
                data.append(c)
                ri.append(r)
                ci.append(offsets[name] + tri_index(i, j))
            rhs.append(b)
            r += 1
    A = sp.csr_matrix((data, (ri, ci)), shape=(r, nv))
    c = None
    if objective:
        c = np.zeros(nv)
        for name, W in objective.items():
            W = np.asarray(W, dtype=float)
            side = variables[name].side
            for j in range(side):
                for i in range(j + 1):
                    c[offsets[name] + tri_index(i, j)] = W[i, j] if i == j else W[i, j] + W[j, i]
    return Assembled(SdpProblem(blocks, A, np.asarray(rhs, dtype=float), c), variables, list(constraints))


def extract(solution: SdpSolution, var: GramVariable) -> Polynomial:
    """``Z^T Q Z`` for the solved Gram matrix of ``var``."""
    if var.name not in solution.blocks:
        raise KeyError(f"solution has no block {var.name!r}")
    return polynomial_from_gram(solution.blocks[var.name], var.basis, var.nvars)


def match_residual(expr: SosExpression, target: Polynomial, grams: dict) -> float:
    """Max coefficient mismatch of the identity ``expr == target``."""
    diff = expr.value(grams) - target
    return max((abs(c) for _, c in diff.items()), default=0.0)


def is_sos(p: Polynomial, name: str = "C") -> tuple[bool, np.ndarray | None, GramVariable]:
    """Decide SOS membership of a fixed polynomial."""
    from .sdp import solve

    expr, target, C = sos_constraint(p, (), name)
    try:
        asm = assemble([(expr, target)])
    except StructuralInfeasibility:
        return False, None, C
    sol = solve(asm.problem)
    return sol.feasible, sol.blocks.get(C.name), C
