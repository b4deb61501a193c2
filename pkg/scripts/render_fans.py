"""Draw the linearity cones of every rank-2 catalog system, plus the orthogonal case."""

import sys
from pathlib import Path

from langret.fan import fan_svg_rank2
from langret.root_data import ObtuseBasis, make_system

out = Path(sys.argv[1] if len(sys.argv) > 1 else "fans")
out.mkdir(exist_ok=True)
systems = [make_system(n) for n in ("A2", "B2", "G2")]
systems.append(ObtuseBasis([[1, 0], [0, 1]], name="orthogonal"))
for B in systems:
    path = out / f"{B.name}.svg"
    path.write_text(fan_svg_rank2(B))
    print(path)
