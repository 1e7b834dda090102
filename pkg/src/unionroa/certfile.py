"""Plain-text certificate files.

Layout (one ``key value`` pair per line, polynomials in canonical form,
floats as ``repr`` so a write/read cycle is exact)::

    unionroa-certificate 1
    nvars 2
    system vdp
    f1 -x2
    f2 5*x1^2*x2 + x1 - 5*x2
    round 1
    iteration 87
    global_stability 0
    gamma 0.99997
    l1 1e-06*x1^2 + 1e-06*x2^2
    l2 ...
    V ...
    s0 ...
    shapes 3
    shape 1
    beta 1.47
    center 0.41 0.71
    N 1.0 0.0
    N 0.0 0.5
    s ...
    end
"""

from __future__ import annotations

import io
from pathlib import Path

import numpy as np

from .poly import DynamicalSystem, Polynomial, format_polynomial, parse_polynomial
from .shapes import ShapeFunction
from .vsiter import Certificate

MAGIC = "unionroa-certificate"
VERSION = 1


class CertificateFormatError(ValueError):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def dumps(cert: Certificate, sys: DynamicalSystem) -> str:
    out = io.StringIO()
    w = out.write
    n = cert.nvars
    w(f"{MAGIC} {VERSION}\n")
    w(f"nvars {n}\n")
    w(f"system {sys.name}\n")
    for k, fk in enumerate(sys.f):
        w(f"f{k + 1} {format_polynomial(fk)}\n")
    w(f"round {cert.round_index}\n")
    w(f"iteration {cert.iter_index}\n")
    w(f"global_stability {int(cert.global_stability)}\n")
    w(f"gamma {_num(cert.gamma)}\n")
    w(f"l1 {format_polynomial(cert.l1)}\n")
    w(f"l2 {format_polynomial(cert.l2)}\n")
    w(f"V {format_polynomial(cert.V)}\n")
    w(f"s0 {format_polynomial(cert.s0)}\n")
    w(f"shapes {len(cert.shapes)}\n")
    for i, (sf, beta, s) in enumerate(cert.shapes):
        w(f"shape {i + 1}\n")
        w(f"beta {_num(beta)}\n")
        w("center " + " ".join(_num(c) for c in sf.center) + "\n")
        for row in sf.N:
            w("N " + " ".join(_num(c) for c in row) + "\n")
        w(f"s {format_polynomial(s)}\n")
    w("end\n")
    return out.getvalue()


class _Lines:
    def __init__(self, text: str):
        self.lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        self.k = 0

    def take(self, key: str) -> str:
        if self.k >= len(self.lines):
            raise CertificateFormatError(f"unexpected end of file, expected {key!r}")
        line = self.lines[self.k]
        head, _, rest = line.partition(" ")
        if head != key:
            raise CertificateFormatError(f"line {self.k + 1}: expected {key!r}, found {head!r}")
        self.k += 1
        return rest.strip()


def loads(text: str) -> tuple[Certificate, DynamicalSystem]:
    ln = _Lines(text)
    try:
        version = int(ln.take(MAGIC))
    except CertificateFormatError:
        raise CertificateFormatError("not a certificate file (missing header)") from None
    if version != VERSION:
        raise CertificateFormatError(f"unsupported certificate version {version}")
    try:
        n = int(ln.take("nvars"))
        name = ln.take("system")
        f = [parse_polynomial(ln.take(f"f{k + 1}"), n) for k in range(n)]
        sys = DynamicalSystem(tuple(f), name)
        round_index = int(ln.take("round"))
        iter_index = int(ln.take("iteration"))
        glob = bool(int(ln.take("global_stability")))
        gamma = float(ln.take("gamma"))
        l1 = parse_polynomial(ln.take("l1"), n)
        l2 = parse_polynomial(ln.take("l2"), n)
        V = parse_polynomial(ln.take("V"), n)
        s0 = parse_polynomial(ln.take("s0"), n)
        shapes = []
        for i in range(int(ln.take("shapes"))):
            if int(ln.take("shape")) != i + 1:
                raise CertificateFormatError(f"shapes out of order at shape {i + 1}")
            beta = float(ln.take("beta"))
            center = np.array([float(t) for t in ln.take("center").split()])
            N = np.array([[float(t) for t in ln.take("N").split()] for _ in range(n)])
            s = parse_polynomial(ln.take("s"), n)
            shapes.append((ShapeFunction(N, center, beta), beta, s))
        ln.take("end")
    except CertificateFormatError:
        raise
    except ValueError as e:
        raise CertificateFormatError(str(e)) from e
    cert = Certificate(V, gamma, shapes, s0, round_index, iter_index, l1, l2, glob)
    return cert, sys


def save(path, cert: Certificate, sys: DynamicalSystem) -> None:
    Path(path).write_text(dumps(cert, sys))


def load(path) -> tuple[Certificate, DynamicalSystem]:
    return loads(Path(path).read_text())
