"""Exact oracles: Berezin normalization, the Hankel monomial rule and closed-form norms."""
import math

import numpy as np

from besov import (OperatorConfig, PolySeries, SpaceParams, Symbol, berezin_apply, besov_norm,
                   hankel_apply, lp_norm, weight_from_config)
from besov.operators import hankel_monomial_oracle

# B^alpha_1(1) = 1 everywhere, including close to the boundary
for alpha in (0.0, 0.5, 1.0):
    cfg = OperatorConfig([alpha], Symbol.constant(1.0), "berezin")
    vals = [berezin_apply(PolySeries.constant(1.0), cfg, [r]) for r in (0.0, 0.5, 0.9, 0.99)]
    print(f"alpha={alpha}: B(1) at r=0,0.5,0.9,0.99 ->", np.round(np.real(vals), 12))

# h^alpha_1 maps conj(zeta)^k to pi/(alpha+1) conj(z)^k and kills holomorphic monomials
z = 0.6 * np.exp(0.4j)
for alpha in (0.0, 2.5):
    cfg = OperatorConfig([alpha], Symbol.constant(1.0), "hankel")
    for k in (1, 3):
        got = hankel_apply(PolySeries.monomial((k,), conjugated=True), cfg, [z])
        want = hankel_monomial_oracle(k, alpha) * np.conj(z) ** k
        hol = hankel_apply(PolySeries.monomial((k,)), cfg, [z])
        print(f"alpha={alpha}, k={k}: |h - oracle| = {abs(got - want):.1e}, |h(z^k)| = {abs(hol):.1e}")

flat = SpaceParams(2.0, weight_from_config([{"family": "power", "a": 0.0}]))
print("||z||_B2 =", besov_norm(PolySeries.monomial((1,)), flat), "vs sqrt(2 pi) =", math.sqrt(2 * math.pi))
sq = SpaceParams(1.0, weight_from_config([{"family": "power", "a": 2.0}]))
print("||1||_L1(t^2) =", lp_norm(lambda z: np.ones_like(z[0]), sq), "vs", 2 * math.pi * (math.log(2) - 0.5))
