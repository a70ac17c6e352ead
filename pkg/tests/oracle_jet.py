"""Independent straight-line jet calculus built on sympy.

Used as an oracle: total derivatives and the Euler operator are implemented
here from scratch on sympy symbols, with no code shared with the package.
Jet coordinates map to symbols jet_a_b for d_t^a d_x^b u.
"""

from fractions import Fraction

import sympy as sp

MAX_T = 8
MAX_X = 12

T, X = sp.symbols("t x")
JET = {(a, b): sp.Symbol("jet_%d_%d" % (a, b))
       for a in range(MAX_T) for b in range(MAX_X)}
UU = JET[(0, 0)]


def total_t(expr):
    out = sp.diff(expr, T)
    for (a, b), sym in JET.items():
        if a + 1 < MAX_T:
            out += sp.diff(expr, sym) * JET[(a + 1, b)]
    return sp.expand(out)


def total_x(expr):
    out = sp.diff(expr, X)
    for (a, b), sym in JET.items():
        if b + 1 < MAX_X:
            out += sp.diff(expr, sym) * JET[(a, b + 1)]
    return sp.expand(out)


def euler(expr):
    out = sp.Integer(0)
    for (a, b), sym in JET.items():
        d = sp.diff(expr, sym)
        if d == 0:
            continue
        for _ in range(a):
            d = total_t(d)
        for _ in range(b):
            d = total_x(d)
        out += (-1) ** (a + b) * d
    return sp.expand(out)


def to_sympy(e):
    """Convert a package expression to the oracle's sympy form."""
    out = sp.Integer(0)
    for (mono, atoms), c in e.terms.items():
        term = sp.Rational(c.numerator, c.denominator)
        for k, p in mono:
            if k == "t":
                term *= T ** p
            elif k == "x":
                term *= X ** p
            else:
                term *= JET[k] ** p
        for a, p in atoms:
            alpha = sp.Rational(Fraction(a[1]).numerator, Fraction(a[1]).denominator)
            beta = sp.Rational(Fraction(a[2]).numerator, Fraction(a[2]).denominator)
            arg = alpha * UU + beta
            if a[0] == "exp":
                term *= sp.exp(arg) ** p
            elif a[0] == "sin":
                term *= sp.sin(arg) ** p
            elif a[0] == "cos":
                term *= sp.cos(arg) ** p
            elif a[0] == "pow":
                r = sp.Rational(Fraction(a[3]).numerator, Fraction(a[3]).denominator)
                term *= (arg ** r) ** p
            else:
                raise ValueError("formal atom %r has no oracle image" % (a,))
        out += term
    return sp.expand(out)


def same(e, sym_expr) -> bool:
    """Structural zero test for (package expression) - (oracle expression)."""
    return sp.simplify(to_sympy(e) - sym_expr) == 0
