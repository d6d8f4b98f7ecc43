"""Tour of the power-transform engine and its supporting special functions.

Four short checks, each printing analytic value next to an independent
route to the same number:

  1. closed-form transforms vs the quadrature engine on shared cases,
  2. moments extracted by differentiating the transform at zero vs the
     direct moment formulas,
  3. the Euler-summation inverter on transforms with known densities,
  4. the incomplete-gamma / hypergeometric identities the closed forms
     lean on.

Output: four result blocks on stdout (no files).
"""

import numpy as np

from udnjt import laplace, mgf, moments, specfun
from udnjt.model import AggregateKind, ChannelModel, NetworkParams, Scheme

P_S_MW = 10.0 ** 1.7
INTERFERENCE = AggregateKind.INTERFERENCE


def params(alpha_s):
    return NetworkParams(lambda_b=1e-2, r_l=0.1, r_m=60.0, k_s=1.0,
                         alpha_s=alpha_s, p_s=P_S_MW, n_0=0.0)


def main():
    # ---- 1: closed forms vs the quadrature engine ----
    print("closed form vs quadrature engine, annulus power sum")
    z_grid = np.geomspace(0.01, 2.0, 5)
    for case, alpha in (("rayleigh-alpha2", 2.0),
                        ("rayleigh-alpha4", 4.0),
                        ("nakagami-m2-alpha2", 2.0)):
        p = params(alpha)
        closed = mgf.mgf_closed_form(p, case)
        engine = closed.quadrature_twin()
        worst = max(abs(closed.eval(z) - engine.eval(z)) / engine.eval(z)
                    for z in z_grid)
        print(f"  {case:<22} worst relative gap {worst:.2e}")

    # ---- 2: transform derivatives vs direct moments ----
    print("\nmoments from the transform slope at zero")
    p = params(3.5)
    for scheme in (Scheme.nojt(), Scheme.cd(3.0)):
        for channel in (ChannelModel.constant(2.0), ChannelModel.rayleigh()):
            fn = mgf.mgf(p, scheme, channel, INTERFERENCE)
            slope = mgf.derivative_moment(fn, 1)
            direct = moments.mean_power(p, scheme, channel, INTERFERENCE)
            print(f"  {scheme.key:>4} / {channel.key:<8} "
                  f"slope {slope:.6f}  direct {direct:.6f}  "
                  f"rel {abs(slope - direct) / direct:.1e}")

    # ---- 3: inverter on textbook transforms ----
    print("\ninverter against known densities on [0.1, 5]")
    grid = np.linspace(0.1, 5.0, 50)
    exp_err = np.max(np.abs(
        laplace.invert(lambda z: 1.0 / (1.0 + z), grid).density
        - np.exp(-grid)))
    erl_err = np.max(np.abs(
        laplace.invert(lambda z: (1.0 / (1.0 + z)) ** 2, grid).density
        - grid * np.exp(-grid)))
    print(f"  unit exponential: max error {exp_err:.2e}")
    print(f"  erlang-2:         max error {erl_err:.2e}")

    # ---- 4: special-function identities ----
    print("\nspecial-function spot checks")
    s, a, b, c = -2.0 / 3.5, 0.5, 2.0, 4.0
    add = abs(specfun.inc_gamma(s, a, c)
              - specfun.inc_gamma(s, a, b) - specfun.inc_gamma(s, b, c))
    print(f"  generalized incomplete gamma additivity gap {add:.2e}")
    lhs = specfun.hyp2f1(1.0, 0.5, 1.5, 0.25)
    rhs = np.arctanh(0.5) / 0.5
    print(f"  2F1(1, 1/2; 3/2; z^2) = atanh(z)/z gap {abs(lhs - rhs):.2e}")
    print(f"  Ei(1) = {specfun.expint_ei(1.0):.12f} "
          f"(reference 1.895117816356)")


if __name__ == "__main__":
    main()
