"""Weighted kernel integral profile and the pointwise reproducing estimate."""
from besov.verify import ExperimentSpec, run

moduli = [0.0, 0.5, 0.9, 0.95, 0.99]
for b in (4.0, 3.2):
    rep = run(ExperimentSpec(target="L2", weight=[{"family": "power", "a": 0.5}], a=1.0, b=b, z_moduli=moduli))
    print(f"b={b} ({rep.mode}):", [round(v, 3) for v in rep.metrics["profile"]], rep.verdict)

rep = run(ExperimentSpec(target="L1", p=1.0, weight=[{"family": "power", "a": 0.5}]), threads=4)
print("pointwise estimate sup ratios by degree:", [round(s, 3) for s in rep.metrics["sups"]], rep.verdict)
