"""Second-order conservation laws single out the integrable Klein-Gordon
interactions.

For u_tx = g(u) with multipliers depending on x, u and x-derivatives up to
third order, only sin u, e^u + e^-u, and e^u (up to scalings and shifts)
admit anything beyond the translation multiplier u_x.  The Liouville case
e^u carries a whole family parameterized by a free function f(x, xi) with
xi = u_xx - u_x^2/2; each polynomial slice of that family shows up as extra
nullspace dimensions.
"""

from jetlaw import (
    AnsatzBounds,
    build_law,
    parse_expression,
    parse_pde,
    render,
    solve_multipliers,
)

INTERACTIONS = [
    ("sine-Gordon", "u_tx = sin(u)"),
    ("sinh-Gordon", "u_tx = exp(u) + exp(-u)"),
    ("Liouville", "u_tx = exp(u)"),
    ("quadratic", "u_tx = u^2"),
    ("cubic", "u_tx = u^3"),
]

bounds = AnsatzBounds(order=3, deg_tx=1, deg_u=3)
for name, text in INTERACTIONS:
    pde = parse_pde(text)
    _, multipliers = solve_multipliers(pde, bounds)
    print("\n== %-12s %s  ->  %d multipliers" % (name, text, len(multipliers)))
    for lam in multipliers:
        print("   ", render(lam))

print("\nLiouville multipliers are f-family instances, Lam = D_x f + u_x f:")
lv = parse_pde("u_tx = exp(u)")
for f_label, lam_text in [
    ("f = 1", "u_x"),
    ("f = x", "1 + x*u_x"),
    ("f = xi", "u_xxx - u_x^3/2"),
    ("f = x*xi", "u_xx - u_x^2/2 + x*u_xxx - x*u_x^3/2"),
]:
    law = build_law(lv, parse_expression(lam_text))
    print("  %-9s lambda = %-40s verified=%s" % (f_label, lam_text, law.verified))
    print("            phi_t = %s" % render(law.density_t))

print("\nsine-Gordon second-order density (normal form):")
sg = parse_pde("u_tx = sin(u)")
law = build_law(sg, parse_expression("u_xxx + u_x^3/2"))
print("  phi_t = %s" % render(law.density_t))
print("  phi_x = %s" % render(law.density_x))
