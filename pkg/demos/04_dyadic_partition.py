"""Dyadic quadrangles: comparability bands, the measure ratio per level and Delta* overlaps."""
import math

from besov import build_partition, check_proposition1, covering_multiplicity

rep = check_proposition1(build_partition(1, 10))
print("radial band:", rep.metrics["radial_band"])
for row in rep.rows:
    if row["metric"] == "measure_ratio":
        print(f"level {row['point']:>2}: (1-|c|)^2/|cell| = {row['value']:.6f}")
print("limit 9/(8 pi) =", 9 / (8 * math.pi))
for K in (2, 3, 6):
    print(f"K={K}: Delta* multiplicity {covering_multiplicity(build_partition(1, K))},"
          f" Delta multiplicity {covering_multiplicity(build_partition(1, K), enlarged=False)}")
print(build_partition(1, 1).to_csv())
