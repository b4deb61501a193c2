"""Rewrite goldens/ from the reference oracles.  A clean checkout should show no diff afterwards."""

import sys
from pathlib import Path

from langret.goldens import GOLDEN_SETS, regenerate_goldens

out = Path(__file__).resolve().parent.parent / "goldens"
sets = sys.argv[1:] or GOLDEN_SETS
for path in regenerate_goldens(out, sets):
    print(path.relative_to(out.parent))
