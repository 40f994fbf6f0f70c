"""How many geodesics does a two-valued environment carry?

With weights in {1, 2} ties are everywhere, so the number of optimal paths
from (0,0) to (N,0) grows exponentially in N while the set of edges every
geodesic must use (the pivotal edges) still grows linearly.  This script
samples a handful of replicas per N and prints both.

    python3 demos/geodesic_growth.py
"""
import math
from fractions import Fraction as F

from fpp.env import DistributionSpec
from fpp.experiments import ExperimentConfig, aggregate, run_experiment

spec = DistributionSpec.from_atoms([(1, F(1, 2)), (2, F(1, 2))], pc_table={2: (F(1, 2), F(6447, 10000))})
cfg = ExperimentConfig(spec=spec, N_grid=(4, 8, 12, 16), replicas=40, seed=1)
stats = run_experiment(cfg)

print(f"{'N':>3} {'t/N':>7} {'log2 count/N':>13} {'pivotal/N':>10} {'union/N':>8}")
report = aggregate(stats)
for N in cfg.N_grid:
    row = report.per_N[N]
    print(f"{N:>3} {row['mu_hat'].mean:7.3f} {row['log2_count_per_N'].mean:13.3f} "
          f"{row['pivotal_per_N'].mean:10.3f} {row['union_per_N'].mean:8.3f}")

# one replica up close: the exact integer count, not just its logarithm
s = max((s for s in stats if s.N == 16), key=lambda s: s.count or 0)
print(f"\nbusiest N=16 replica: t={s.t}, {s.count} geodesics (2^{math.log2(s.count):.1f}),"
      f" {s.pivotal_size} pivotal of {s.union_size} used edges")
