"""Sparse multivariate polynomials over the reals.

A polynomial in ``n`` variables is a map from exponent tuples to nonzero
float coefficients.  Values are immutable; every arithmetic operation
returns a new :class:`Polynomial`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Monomial = tuple  # tuple[int, ...] of nonnegative exponents
Number = Union[int, float]

PRUNE_TOL = 1e-14


class DimensionError(ValueError):
    """Operands live in polynomial rings with different variable counts."""


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def grlex_key(m: Monomial):
    """Ascending graded-lex key with x1 > x2 > ... within a degree."""
    return (sum(m), tuple(-e for e in m))


def _print_key(m: Monomial):
    # canonical print order: highest degree first
    return (-sum(m), tuple(-e for e in m))


def _prune(terms: Mapping[Monomial, float]) -> dict:
    return {m: float(c) for m, c in terms.items() if abs(c) >= PRUNE_TOL}


class Polynomial:
    """Immutable sparse polynomial ``sum_m c_m x^m``.

    Parameters
    ----------
    nvars : int
        Number of state variables.
    terms : mapping, optional
        Exponent tuple -> coefficient.  Coefficients with magnitude below
        ``1e-14`` are dropped.
    """

    __slots__ = ("nvars", "_terms", "__dict__")

    def __init__(self, nvars: int, terms: Mapping[Monomial, Number] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        self.nvars = int(nvars)
        clean = {}
        for m, c in (terms or {}).items():
            m = tuple(int(e) for e in m)
            if len(m) != nvars or any(e < 0 for e in m):
                raise ValueError(f"bad exponent vector {m} for {nvars} variables")
            clean[m] = clean.get(m, 0.0) + float(c)
        self._terms = _prune(clean)

    # -- constructors ---------------------------------------------------
    @classmethod
    def constant(cls, nvars: int, c: Number) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def variable(cls, nvars: int, k: int) -> "Polynomial":
        """The coordinate ``x_{k+1}`` (``k`` is zero based)."""
        e = [0] * nvars
        e[k] = 1
        return cls(nvars, {tuple(e): 1.0})

    @classmethod
    def variables(cls, nvars: int) -> list["Polynomial"]:
        return [cls.variable(nvars, k) for k in range(nvars)]

    @classmethod
    def quadratic_form(cls, M, center=None) -> "Polynomial":
        """``(x - c)^T M (x - c)`` for a square matrix ``M``."""
        M = np.asarray(M, dtype=float)
        n = M.shape[0]
        xs = cls.variables(n)
        if center is None:
            center = np.zeros(n)
        d = [xs[k] - float(center[k]) for k in range(n)]
        out = cls.zero(n)
        for i in range(n):
            for j in range(n):
                if M[i, j] != 0.0:
                    out = out + M[i, j] * d[i] * d[j]
        return out

    # -- accessors ------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, m: Monomial) -> float:
        return self._terms.get(tuple(m), 0.0)

    def monomials(self) -> list:
        return sorted(self._terms, key=grlex_key)

    @property
    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=0)

    @property
    def min_degree(self) -> int:
        return min((sum(m) for m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.nvars, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def allclose(self, other: "Polynomial", atol: float = 1e-9) -> bool:
        _check(self, other)
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coeff(k) - other.coeff(k)) <= atol for k in keys)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            _check(self, other)
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial.constant(self.nvars, float(other))
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0.0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial(self.nvars, {m: c * float(other) for m, c in self._terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = tuple(a + b for a, b in zip(ma, mb))
                out[m] = out.get(m, 0.0) + ca * cb
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (int, float, np.floating, np.integer)):
            raise TypeError("only division by scalars is supported")
        return self * (1.0 / float(other))

    def __pow__(self, k: int):
        if k < 0 or int(k) != k:
            raise ValueError("only nonnegative integer powers")
        out = Polynomial.constant(self.nvars, 1.0)
        base = self
        k = int(k)
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus -------------------------------------------------------
    def diff(self, k: int) -> "Polynomial":
        out = {}
        for m, c in self._terms.items():
            if m[k]:
                e = list(m)
                e[k] -= 1
                out[tuple(e)] = c * m[k]
        return Polynomial(self.nvars, out)

    def grad(self) -> list["Polynomial"]:
        return [self.diff(k) for k in range(self.nvars)]

    def homogeneous_part(self, d: int) -> "Polynomial":
        return Polynomial(self.nvars, {m: c for m, c in self._terms.items() if sum(m) == d})

    def substitute_scale(self, s) -> "Polynomial":
        """``p(s x)``; ``s`` is a scalar or one factor per variable."""
        s = np.broadcast_to(np.asarray(s, dtype=float), (self.nvars,))
        return Polynomial(
            self.nvars, {m: c * float(np.prod(s ** np.array(m))) for m, c in self._terms.items()}
        )

    # -- evaluation -----------------------------------------------------
    @cached_property
    def _dense(self):
        mons = self.monomials()
        if not mons:
            return np.zeros((0, self.nvars), dtype=np.int64), np.zeros(0)
        E = np.array(mons, dtype=np.int64).reshape(len(mons), self.nvars)
        c = np.array([self._terms[m] for m in mons])
        return E, c

    def __call__(self, x):
        """Evaluate at one point (shape ``(n,)``) or many (shape ``(m, n)``)."""
        X = np.asarray(x, dtype=float)
        single = X.ndim == 1
        X2 = np.atleast_2d(X)
        if X2.shape[-1] != self.nvars:
            raise DimensionError(f"expected {self.nvars} coordinates, got {X2.shape[-1]}")
        E, c = self._dense
        if len(c) == 0:
            out = np.zeros(X2.shape[0])
        else:
            maxd = int(E.max()) if E.size else 0
            # power table: pw[k][d] = X[:, k] ** d
            vals = np.ones((X2.shape[0], len(c)))
            for k in range(self.nvars):
                col = E[:, k]
                if not col.any():
                    continue
                powers = np.ones((X2.shape[0], maxd + 1))
                for d in range(1, maxd + 1):
                    powers[:, d] = powers[:, d - 1] * X2[:, k]
                vals *= powers[:, col]
            out = vals @ c
        return float(out[0]) if single else out

    evaluate = __call__

    # -- text form --------------------------------------------------------
    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_polynomial(self)!r})"


def _check(a: Polynomial, b: Polynomial) -> None:
    if a.nvars != b.nvars:
        raise DimensionError(f"nvars mismatch: {a.nvars} vs {b.nvars}")


def add(a: Polynomial, b: Polynomial) -> Polynomial:
    _check(a, b)
    return a + b


def mul(a: Polynomial, b: Polynomial) -> Polynomial:
    _check(a, b)
    return a * b


def evaluate(p: Polynomial, x) -> float:
    x = np.asarray(x, dtype=float)
    if x.shape != (p.nvars,):
        raise DimensionError(f"expected a point with {p.nvars} coordinates")
    return p(x)


def grad(p: Polynomial) -> list[Polynomial]:
    return p.grad()


def lie_derivative(V: Polynomial, sys: "DynamicalSystem") -> Polynomial:
    """Derivative of ``V`` along the vector field: ``sum_k dV/dx_k * f_k``."""
    if V.nvars != sys.nvars:
        raise DimensionError(f"V has {V.nvars} variables, system has {sys.nvars}")
    out = Polynomial.zero(V.nvars)
    for k, fk in enumerate(sys.f):
        dk = V.diff(k)
        if not dk.is_zero():
            out = out + dk * fk
    return out


# ---------------------------------------------------------------------------
# text serialization

def _format_coeff(c: float) -> str:
    r = repr(float(c))
    if r.endswith(".0") and "e" not in r:
        r = r[:-2]
    return r


def format_polynomial(p: Polynomial) -> str:
    """Canonical text, e.g. ``3*x1^2*x2 - 0.5*x2``, highest degree first."""
    if p.is_zero():
        return "0"
    parts = []
    for m in sorted(p._terms, key=_print_key):
        c = p._terms[m]
        factors = []
        for k, e in enumerate(m):
            if e == 1:
                factors.append(f"x{k + 1}")
            elif e > 1:
                factors.append(f"x{k + 1}^{e}")
        mag = abs(c)
        if factors:
            body = "*".join(factors) if mag == 1.0 else _format_coeff(mag) + "*" + "*".join(factors)
        else:
            body = _format_coeff(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)


_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TOKEN = re.compile(rf"\s*(?:(?P<num>{_NUM})|(?P<var>x(?P<idx>\d+))|(?P<op>[-+*^()]))")


class PolynomialSyntaxError(ValueError):
    pass


class _Parser:
    def __init__(self, text: str, nvars: int):
        self.toks = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PolynomialSyntaxError(f"unexpected input at {pos}: {text[pos:pos + 10]!r}")
            pos = m.end()
            if m.group("num") is not None:
                self.toks.append(("num", float(m.group("num"))))
            elif m.group("var") is not None:
                idx = int(m.group("idx"))
                if not 1 <= idx <= nvars:
                    raise PolynomialSyntaxError(f"variable x{idx} outside x1..x{nvars}")
                self.toks.append(("var", idx - 1))
            else:
                self.toks.append(("op", m.group("op")))
            # trailing whitespace
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0
        self.nvars = nvars

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expr(self) -> Polynomial:
        sign = 1.0
        kind, val = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            sign = -1.0 if val == "-" else 1.0
        out = sign * self.term()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                t = self.term()
                out = out + t if val == "+" else out - t
            else:
                return out

    def term(self) -> Polynomial:
        out = self.factor()
        while True:
            kind, val = self.peek()
            if kind == "op" and val == "*":
                self.take()
                out = out * self.factor()
            elif kind in ("num", "var") or (kind == "op" and val == "("):
                out = out * self.factor()  # implicit product
            else:
                return out

    def factor(self) -> Polynomial:
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            self.take()
            k, e = self.take()
            if k != "num" or e != int(e):
                raise PolynomialSyntaxError("exponent must be a nonnegative integer")
            base = base ** int(e)
        return base

    def atom(self) -> Polynomial:
        kind, val = self.take()
        if kind == "num":
            return Polynomial.constant(self.nvars, val)
        if kind == "var":
            return Polynomial.variable(self.nvars, val)
        if kind == "op" and val == "(":
            inner = self.expr()
            k, v = self.take()
            if (k, v) != ("op", ")"):
                raise PolynomialSyntaxError("missing ')'")
            return inner
        if kind == "op" and val == "-":
            return -self.factor()
        raise PolynomialSyntaxError(f"unexpected token {val!r}")


def parse_polynomial(text: str, nvars: int) -> Polynomial:
    """Inverse of :func:`format_polynomial`; also accepts parentheses."""
    p = _Parser(text, nvars)
    if not p.toks:
        raise PolynomialSyntaxError("empty polynomial")
    out = p.expr()
    if p.i != len(p.toks):
        raise PolynomialSyntaxError(f"trailing input after token {p.i}")
    return out


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DynamicalSystem:
    """Polynomial vector field ``xdot = f(x)`` with an equilibrium at the origin."""

    f: tuple
    name: str = "system"

    def __post_init__(self):
        f = tuple(self.f)
        object.__setattr__(self, "f", f)
        if not f:
            raise ValueError("empty vector field")
        n = f[0].nvars
        if len(f) != n:
            raise DimensionError(f"{len(f)} components for {n} variables")
        for fk in f:
            if fk.nvars != n:
                raise DimensionError("components disagree on nvars")
            if abs(fk.coeff((0,) * n)) > 1e-12:
                raise ValueError(f"{self.name}: origin is not an equilibrium (f(0) != 0)")

    @property
    def nvars(self) -> int:
        return len(self.f)

    @classmethod
    def from_strings(cls, exprs: Sequence[str], name: str = "system") -> "DynamicalSystem":
        n = len(exprs)
        return cls(tuple(parse_polynomial(e, n) for e in exprs), name)

    def __call__(self, x):
        """Vector field at points ``x`` of shape ``(n,)`` or ``(m, n)``."""
        X = np.asarray(x, dtype=float)
        return np.stack([fk(X) for fk in self.f], axis=-1)

    @property
    def degree(self) -> int:
        return max(fk.degree for fk in self.f)

    def rescaled(self, d) -> "DynamicalSystem":
        """Dynamics of ``z = x / d``: ``dz/dt = f(d z) / d``."""
        d = np.broadcast_to(np.asarray(d, dtype=float), (self.nvars,))
        return DynamicalSystem(
            tuple(fk.substitute_scale(d) / float(d[k]) for k, fk in enumerate(self.f)), self.name
        )

    def to_strings(self) -> list[str]:
        return [format_polynomial(fk) for fk in self.f]


def polynomial_from_gram(Q, basis: Iterable[Monomial], nvars: int) -> Polynomial:
    """Expand ``Z^T Q Z`` for a monomial vector ``Z``."""
    basis = list(basis)
    Q = np.asarray(Q, dtype=float)
    out: dict = {}
    for i, mi in enumerate(basis):
        for j in range(i, len(basis)):
            c = Q[i, j] if i == j else Q[i, j] + Q[j, i]
            if c == 0.0:
                continue
            m = tuple(a + b for a, b in zip(mi, basis[j]))
            out[m] = out.get(m, 0.0) + c
    return Polynomial(nvars, out)


def is_finite(p: Polynomial) -> bool:
    return all(math.isfinite(c) for _, c in p.items())
