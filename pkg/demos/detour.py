"""Build a deep detour path through a large box and audit it.

The long-regime constructor walks from one large face of a J-box to the
opposite one as a staircase that dives deep into the box, keeps its turns
spread out and never runs straight for too long.  The checker reports each
numbered condition with a witness on failure.  At n=64 the depth
requirement and the run-length cap contradict each other, so construction
there is refused.

    python3 demos/detour.py
"""
from fpp.cubes import NBox
from fpp.detour import DetourThresholds, construct_detour_path, detour_conditions
from fpp.errors import InfeasibleGeometry

B = NBox.j_box((0, 0), 125, 1)
th = DetourThresholds.of(125, 2)
print("thresholds at n=125:", th)

a, b = (124, 60), (251, 120)
p = construct_detour_path(a, b, B)
turns = sum(1 for i in range(1, len(p.vertices) - 1)
            if (p.vertices[i][0] - p.vertices[i - 1][0]) != (p.vertices[i + 1][0] - p.vertices[i][0]))
print(f"path {a} -> {b}: {len(p)} steps, {turns} turns")
for key, res in detour_conditions(p, a, b, B).items():
    print(f"  condition {key}: {'ok' if res.ok else 'FAIL ' + str(res.witness)}")

try:
    construct_detour_path((63, 40), (129, 70), NBox.j_box((0, 0), 64, 1))
except InfeasibleGeometry as exc:
    print(f"\nn=64 refused: {exc}")
