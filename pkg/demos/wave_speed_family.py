"""Which amplitude-dependent wave speeds admit extra first-order laws?

For u_tt = c(u)^2 u_xx + c(u) c'(u) u_x^2 every speed admits energy,
momentum, and a dilation law.  Exactly the speeds c = c0 (u - u0)^-2 admit
three more (two conformal, one boost-like); this script reproduces that
classification at c0 = 1, u0 = 0 and prints the conformal densities.
"""

from fractions import Fraction

from jetlaw import (
    AnsatzBounds,
    build_law,
    parse_expression,
    parse_pde,
    render,
    solve_multipliers,
)
from jetlaw.expr import exp_atom

CASES = [
    ("c(u) = u^-2", "u_tt = pow(u,-4)*u_xx - 2*pow(u,-5)*u_x^2", ()),
    ("c(u) = u", "u_tt = u^2*u_xx + u*u_x^2", ()),
    # for c = e^u the candidate family a u_t + b u_x + h(t,x) c^-1/2 needs
    # the atom exp(-u/2) in the basis; it still yields nothing extra
    ("c(u) = e^u", "u_tt = exp(2*u)*u_xx + exp(2*u)*u_x^2",
     (exp_atom(Fraction(-1, 2)),)),
]

for label, text, atoms in CASES:
    pde = parse_pde(text)
    bounds = AnsatzBounds(order=1, deg_tx=2, deg_u=1, atoms=atoms)
    _, multipliers = solve_multipliers(pde, bounds)
    print("\n== %s: %d independent multipliers" % (label, len(multipliers)))
    for lam in multipliers:
        print("   ", render(lam))

print("\nDensities of the three extra laws at c = u^-2 (reference state 0):")
pde = parse_pde("u_tt = pow(u,-4)*u_xx - 2*pow(u,-5)*u_x^2")
for s in ("t^2*u_t - t*u", "x^2*u_x + x*u", "t*u_t - x*u_x - u"):
    law = build_law(pde, parse_expression(s))
    print("  lambda = %-22s verified=%s" % (s, law.verified))
    print("    phi_t = %s" % render(law.density_t))
    print("    phi_x = %s" % render(law.density_x))
