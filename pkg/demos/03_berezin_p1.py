"""Berezin-type operator on B_1(w): two ways to compute the output norm, then a divergence sweep."""
import numpy as np

from besov import OperatorConfig, PolySeries, SpaceParams, symbol_g_r, weight_from_config
from besov.operators import berezin_output_norm
from besov.verify import ExperimentSpec, run

f = PolySeries.random((5,), np.random.default_rng(1))
cfg = OperatorConfig([2.0], symbol_g_r(f), "berezin")
sp = SpaceParams(1.0, weight_from_config([{"family": "power", "a": 1.5}]))
for method in ("fubini", "modes"):
    print(f"{method:>7}: ||B f||_L1 =", berezin_output_norm(f, cfg, sp, level=2, method=method))

rep = run(ExperimentSpec(target="T6", p=1.0, weight=[{"family": "power", "a": 2.5}], alpha=0.3), threads=4)
for row in rep.rows:
    if row["metric"] == "ratio":
        print(f"r={row['point']}: ratio {row['value']:.4f}")
print("verdict:", rep.verdict, "slope", round(rep.metrics["slope"], 3))
