"""Little Hankel operator for p < 1: a bounded configuration and a divergent one.

The necessity sweep uses the extremal family f_r with the phase-canceling
symbol; the ratio tracks the predictor (1-r)^((alpha+2)p) / w(1-r).
"""
from besov.verify import ExperimentSpec, run

ok = run(ExperimentSpec(target="T1", p=0.5, weight=[{"family": "power", "a": 0.8}], alpha=2.0), threads=4)
print("sufficiency:", ok.verdict, {k: round(ok.metrics[k], 4) for k in ("head_max", "tail_max")})

bad = run(ExperimentSpec(target="T1", p=0.5, weight=[{"family": "power", "a": 2.0}], alpha=0.0), threads=4)
rows = {}
for row in bad.rows:
    rows.setdefault(row["point"], {})[row["metric"]] = row["value"]
print(f"{'r':>6} {'ratio':>10} {'predictor':>10} {'||f_r||':>8} {'degree':>7}")
for r, m in rows.items():
    print(f"{r:>6} {m['ratio']:>10.4f} {m['predictor']:>10.2f} {m['input_norm']:>8.4f} {m['truncation_degree']:>7}")
print("necessity:", bad.verdict, "slope", round(bad.metrics["slope"], 3), "spearman", bad.metrics["spearman"])
