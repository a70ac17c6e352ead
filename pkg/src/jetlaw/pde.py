"""Scalar PDEs in solved form, with linearization operators.

A PdeSpec stores G = 0 as leading = rhs, where leading is one of u_t, u_tt,
u_tx and the right-hand side is free of the leading derivative and its
differential consequences.  Three charts of solution-space coordinates come
with the three shapes:

  u_t  leading: t, x, u and pure x-derivatives;
  u_tt leading: everything of t-order at most one;
  u_tx leading: t, x, u, pure x-derivatives and pure t-derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import JetExpression, ExprError, UT, UX, coord_name, is_jet
from .parser import parse_expression

LEADINGS = ((2, 0), (1, 1), (1, 0))


class PdeError(ExprError):
    pass


def on_chart(leading, k) -> bool:
    """Whether jet coordinate k is a solution-space coordinate for the shape."""
    a, b = k
    if leading == (1, 0):
        return a == 0
    if leading == (2, 0):
        return a <= 1
    if leading == (1, 1):
        return a == 0 or b == 0
    raise PdeError("unsupported leading derivative %s" % coord_name(leading))


@dataclass(frozen=True)
class PdeSpec:
    """A PDE G = leading - rhs = 0 in solved form."""

    leading: tuple
    rhs: JetExpression
    name: str = ""
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.leading not in LEADINGS:
            raise PdeError("leading derivative must be u_t, u_tt or u_tx")
        for k in self.rhs.jets():
            if not on_chart(self.leading, k):
                raise PdeError(
                    "rhs contains %s, excluded for leading %s"
                    % (coord_name(k), coord_name(self.leading)))
        if self.leading == (1, 1):
            if any(k[0] > 0 for k in self.rhs.jets()):
                raise PdeError("u_tx-leading rhs must be free of t-derivatives")

    def gee(self) -> JetExpression:
        """The expression G = leading - rhs."""
        return JetExpression.coordinate(self.leading) - self.rhs

    def __str__(self):
        return "%s = %s" % (coord_name(self.leading), self.rhs)


def parse_pde(text: str, params=None, name: str = "") -> PdeSpec:
    """Parse '<lhs> = <rhs>' or '<expr> = 0' into a validated PdeSpec."""
    if "=" not in text:
        raise PdeError("PDE text must contain '='")
    lhs_text, rhs_text = text.split("=", 1)
    params = {k: Fraction(v) for k, v in (params or {}).items()}
    lhs = parse_expression(lhs_text, params)
    rhs = parse_expression(rhs_text, params)
    g = lhs - rhs
    leading = None
    for cand in LEADINGS:
        if cand in g.jets():
            leading = cand
            break
    if leading is None:
        raise PdeError("no admissible leading derivative (u_t, u_tt, u_tx) found")
    coeff = None
    for (mono, atoms), c in g.terms.items():
        if dict(mono).get(leading, 0) == 0:
            continue
        if mono != ((leading, 1),) or atoms:
            raise PdeError("leading derivative must appear alone and linearly")
        coeff = c
    rhs_expr = (JetExpression.coordinate(leading) - g * (Fraction(1) / coeff))
    return PdeSpec(leading=leading, rhs=rhs_expr, name=name, params=params)


def linearization(pde: PdeSpec, eta: JetExpression) -> JetExpression:
    """Frechet derivative of G applied to eta: sum_v dG/dv D^v eta."""
    g = pde.gee()
    out = JetExpression.zero()
    for v in sorted(g.jets()):
        coeff = g.partial(v)
        term = eta
        a, b = v
        for _ in range(a):
            term = term.total("t")
        for _ in range(b):
            term = term.total("x")
        out = out + coeff * term
    return out


def adjoint_linearization(pde: PdeSpec, omega: JetExpression) -> JetExpression:
    """Formal adjoint of the linearization: sum_v (-D)^v (dG/dv * omega)."""
    g = pde.gee()
    out = JetExpression.zero()
    for v in sorted(g.jets()):
        term = g.partial(v) * omega
        a, b = v
        for _ in range(a):
            term = term.total("t")
        for _ in range(b):
            term = term.total("x")
        out = out + term * Fraction((-1) ** (a + b))
    return out
