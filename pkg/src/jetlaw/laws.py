"""Conserved densities from multipliers: homotopy reconstruction, flux
recovery, trivial-part normalization, and full symbolic verification.

Density construction by PDE shape:

  u_t  leading: Phi^t = int_0^1 (u - utilde) Lam[lam*u + (1-lam)*utilde] dlam
  u_tx leading: Phi^t = int_0^1 (u_x - utilde_x) Lam[...] dlam
  u_tt leading: the reduced two-point formula for first-order multipliers,
                plus the t * int_0^1 K(lam*t, lam*x) dlam correction, which
                vanishes for constant reference states.

The scaling substitution requires the multiplier to be polynomial in the
scaled coordinates (kernel atoms of u are rejected there); the two-point
formula has no such restriction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .expr import ExprError, JetExpression, U, UT, UX, is_indep, is_kernel_atom
from .pde import PdeSpec, on_chart
from .calculus import (
    NotXDerivative,
    ibp_normal_form,
    invert_total_x_derivative,
    restricted_euler,
    solution_total_derivative,
)
from .detsys import ArityError, check_admissible, determining_expression


class HomotopyError(ExprError):
    pass


EULER_BASE = {(1, 0): "U_fullX", (2, 0): "U_t", (1, 1): "U_x"}


@dataclass(frozen=True)
class ConservationLaw:
    pde: PdeSpec
    multiplier: JetExpression
    density_t: JetExpression
    density_x: JetExpression
    utilde: JetExpression
    verified: bool = False

    def to_record(self) -> dict:
        from .parser import render
        return {
            "pde": str(self.pde),
            "lambda": render(self.multiplier),
            "phi_t": render(self.density_t),
            "phi_x": render(self.density_x),
            "utilde": render(self.utilde),
            "verified": self.verified,
        }


def _as_reference(utilde) -> JetExpression:
    if utilde is None:
        return JetExpression.zero()
    if isinstance(utilde, (int, Fraction)):
        return JetExpression.rational(utilde)
    return utilde


def _reference_jet(utilde: JetExpression, order: int) -> JetExpression:
    out = utilde
    for _ in range(order):
        out = out.total("x")
    return out


# -- polynomial-in-lambda machinery -----------------------------------------

def _lp_add(a: dict, b: dict) -> dict:
    out = dict(a)
    for d, e in b.items():
        out[d] = out.get(d, JetExpression.zero()) + e
    return out


def _lp_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for d1, e1 in a.items():
        for d2, e2 in b.items():
            d = d1 + d2
            prod = e1 * e2
            out[d] = out.get(d, JetExpression.zero()) + prod
    return out


def _lp_integrate(a: dict) -> JetExpression:
    out = JetExpression.zero()
    for d, e in a.items():
        out = out + e * Fraction(1, d + 1)
    return out


def _scaled_multiplier(lam: JetExpression, substitutions: dict) -> dict:
    """lam with each coordinate k replaced by lam*k + (1-lam)*ref_k, as a
    polynomial in the homotopy parameter."""
    for (mono, atoms), _ in lam.terms.items():
        for a, _p in atoms:
            if is_kernel_atom(a) and a[1] != 0:
                raise HomotopyError(
                    "non-polynomial dependence on the homotopy parameter "
                    "(kernel atom %s in the multiplier)" % (a,))
            if a[0] in ("lam", "gee"):
                raise HomotopyError("formal atom in a concrete multiplier")
    result: dict = {}
    for (mono, atoms), c in lam.terms.items():
        piece = {0: JetExpression({((), atoms): c})}
        for k, p in mono:
            if k in substitutions:
                factor = substitutions[k]
            else:
                factor = {0: JetExpression.coordinate(k)}
            for _ in range(p):
                piece = _lp_mul(piece, factor)
        result = _lp_add(result, piece)
    return result


def homotopy_density(pde: PdeSpec, lam: JetExpression,
                     utilde=None) -> JetExpression:
    """Reconstruct Phi^t from a multiplier via the shape's homotopy formula."""
    check_admissible(pde, lam)
    ref = _as_reference(utilde)
    if any(k for k in ref.jets()):
        raise HomotopyError("reference state must not involve jet coordinates")
    leading = pde.leading
    if leading == (2, 0):
        return _wave_two_point_density(pde, lam, ref)
    if any(k[0] > 0 for k in lam.jets()):
        raise HomotopyError("homotopy implemented for the pure-x multiplier chart")
    order = lam.maximal_order()[1]
    subs = {}
    for b in range(order + 1):
        k = (0, b)
        ref_k = _reference_jet(ref, b)
        subs[k] = {1: JetExpression.coordinate(k) - ref_k, 0: ref_k}
    scaled = _scaled_multiplier(lam, subs)
    if leading == (1, 0):
        lead_factor = JetExpression.coordinate(U) - ref
    else:
        lead_factor = JetExpression.coordinate(UX) - _reference_jet(ref, 1)
    integrand = {d: lead_factor * e for d, e in scaled.items()}
    return _lp_integrate(integrand)


def _state_substitute(expr: JetExpression, ref: JetExpression) -> JetExpression:
    """Evaluate an expression on the reference state u = ref(t, x)."""
    const = ref.is_constant()
    if const:
        return expr.at_constant_state(ref.as_fraction())
    out = expr
    jets = sorted(out.jets(), reverse=True)
    for k in jets:
        if k == U:
            continue
        a, b = k
        value = ref
        for _ in range(a):
            value = value.total("t")
        for _ in range(b):
            value = value.total("x")
        out = out.substitute(k, value)
    if U in out.jets():
        out = out.substitute(U, ref)
    return out


def _wave_two_point_density(pde: PdeSpec, lam: JetExpression,
                            ref: JetExpression) -> JetExpression:
    """Reduced two-point construction for first-order u_tt multipliers."""
    order = lam.maximal_order()
    if order[0] + order[1] > 1:
        raise HomotopyError("u_tt homotopy supports first-order multipliers")
    csq = pde.rhs.partial((0, 2))
    if not (pde.rhs - csq * JetExpression.coordinate((0, 2))
            - csq.partial(U) * JetExpression.coordinate(UX) ** 2 * Fraction(1, 2)).is_zero():
        raise HomotopyError("u_tt homotopy expects wave-speed structure "
                            "rhs = c^2 u_xx + c c' u_x^2")
    u = JetExpression.coordinate(U)
    ut = JetExpression.coordinate(UT)
    ux = JetExpression.coordinate(UX)
    def at_ref(e):
        return _state_substitute(e, ref)
    lam_u = lam.partial(U)
    lam_t = lam.partial("t")
    lam_ut = lam.partial(UT)
    lam_ux = lam.partial(UX)
    half = Fraction(1, 2)
    first = ut * (lam + at_ref(lam) + ((u - ref) * at_ref(lam_ux)).total("x")) * half
    second = (ref - u) * (lam_t + at_ref(lam_t) + ut * at_ref(lam_u)) * half
    third = ux ** 2 * csq * at_ref(lam_ut) * half
    correction = _k_correction(pde, lam, ref)
    return first + second + third + correction


def _k_correction(pde: PdeSpec, lam: JetExpression, ref: JetExpression) -> JetExpression:
    """t * int_0^1 K(lam t, lam x) dlam with K = G[ref] * Lam[ref]."""
    if ref.is_constant():
        return JetExpression.zero()
    ref_tt = ref.total("t").total("t")
    gee_at_ref = ref_tt - _state_substitute(pde.rhs, ref)
    k_expr = gee_at_ref * _state_substitute(lam, ref)
    if k_expr.is_zero():
        return JetExpression.zero()
    scaled: dict = {}
    for (mono, atoms), c in k_expr.terms.items():
        if any(is_kernel_atom(a) and a[1] != 0 for a, _ in atoms):
            raise HomotopyError("K correction outside the polynomial fragment")
        degree = sum(p for k, p in mono if is_indep(k))
        term = JetExpression({(mono, atoms): c})
        scaled[degree] = scaled.get(degree, JetExpression.zero()) + term
    return JetExpression.coordinate("t") * _lp_integrate(scaled)


def flux_density(pde: PdeSpec, lam: JetExpression,
                 density_t: JetExpression) -> JetExpression:
    """Phi^x with D_t Phi^t + D_x Phi^x == 0 on solutions."""
    rate = solution_total_derivative(pde, density_t)
    try:
        return invert_total_x_derivative(-rate)
    except NotXDerivative as err:
        raise NotXDerivative(err.residual) from None


def multiplier_from_density(pde: PdeSpec, density_t: JetExpression) -> JetExpression:
    """Shape-appropriate restricted Euler operator applied to Phi^t."""
    return restricted_euler(density_t, EULER_BASE[pde.leading])


def build_law(pde: PdeSpec, lam: JetExpression, utilde=None,
              normalize: bool = True) -> ConservationLaw:
    """Construct, normalize and verify the conservation law of a multiplier."""
    ref = _as_reference(utilde)
    density = homotopy_density(pde, lam, ref)
    cl = ConservationLaw(
        pde=pde, multiplier=lam, density_t=density,
        density_x=flux_density(pde, lam, density),
        utilde=ref)
    if normalize:
        cl = normalize_density(cl)
    return replace(cl, verified=verify(cl))


def normalize_density(cl: ConservationLaw) -> ConservationLaw:
    """Replace Phi^t by its canonical representative modulo D_x images.

    Discarding an exact part can change the multiplier recovered through the
    restricted Euler operator (on the u_tx chart D_x theta may pair with a
    flux that leaves the pure-x coordinates); in that case the density is
    kept as constructed.
    """
    core, _theta = ibp_normal_form(cl.density_t)
    if core == cl.density_t:
        return cl
    recovered = multiplier_from_density(cl.pde, cl.density_t)
    if multiplier_from_density(cl.pde, core) != recovered:
        return cl
    try:
        flux = flux_density(cl.pde, cl.multiplier, core)
    except NotXDerivative:
        return cl
    return replace(cl, density_t=core, density_x=flux)


def densities_match(pde: PdeSpec, a: JetExpression, b: JetExpression) -> bool:
    """Equality of densities modulo trivial ones (image of D_x)."""
    core, _ = ibp_normal_form(a - b)
    return core.is_zero()


def verify(cl: ConservationLaw) -> bool:
    """Multiplier condition, exact divergence identity, and multiplier
    recovery from the density (modulo trivial densities)."""
    try:
        if not determining_expression(cl.pde, cl.multiplier).is_zero():
            return False
        residual = solution_total_derivative(cl.pde, cl.density_t) \
            + cl.density_x.total("x")
        if not residual.is_zero():
            return False
        recovered = multiplier_from_density(cl.pde, cl.density_t)
        delta = recovered - cl.multiplier
        if delta.is_zero():
            return True
        if not determining_expression(cl.pde, delta).is_zero():
            return False
        core, _ = ibp_normal_form(homotopy_density(cl.pde, delta, cl.utilde))
        return core.is_zero()
    except (ArityError, NotXDerivative, HomotopyError):
        return False
