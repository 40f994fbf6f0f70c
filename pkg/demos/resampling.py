"""Resampling a box: gray boxes versus G-turn boxes.

A box is gray when some geodesic crosses it.  After resampling every weight
touching the box, it becomes a G-turn box when every optimizer of the
attached passage time turns inside it.  The ratio of the two frequencies is
what the resampling argument bounds from below.

    python3 demos/resampling.py
"""
from fractions import Fraction as F

from fpp.cubes import NBox
from fpp.env import DistributionSpec
from fpp.experiments import ExperimentConfig, resampling_experiment

spec = DistributionSpec.from_atoms([(1, F(1, 2)), (2, F(1, 2))], pc_table={2: (F(1, 2), F(6447, 10000))})
cfg = ExperimentConfig(spec=spec, N_grid=(10,), replicas=100, seed=0)

# a J-box of side 4 sitting just below the segment (0,0)-(10,0)
B = NBox.j_box((0, -2), 4, 1)
rep = resampling_experiment(cfg, B)
print(f"box bounds         {B.bounds}")
print(f"replicas           {rep.replicas}")
print(f"gray               {rep.gray}")
print(f"G-turn after swap  {rep.g_turn}")
print(f"ratio              {rep.ratio} ~ {float(rep.ratio or 0):.3f}")
