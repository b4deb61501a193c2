"""Full property sweep over the seven desk-scale catalog systems.

    python scripts/flagship_verify.py [trials] [seed] [workers]
"""

import sys

from langret.verify import VerifyPlan, run_verify

SYSTEMS = ["A2", "B2", "G2", "A3", "C3", "D4", "F4"]

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
seed = int(sys.argv[2]) if len(sys.argv) > 2 else 42
workers = int(sys.argv[3]) if len(sys.argv) > 3 else 1

report = run_verify(VerifyPlan.make(SYSTEMS, trials=trials, seed=seed, workers=workers))
for s in report.systems:
    bad = {k: c["status"] for k, c in s["checks"].items() if c["status"] not in ("pass", "not-applicable")}
    total = sum(c["passed"] for c in s["checks"].values())
    print(f"{s['name']:>4}  {total:7d} assertions  fallbacks={s['fallbacks']}  {bad or 'all pass'}")
print(f"elapsed {report.elapsed:.1f}s  ok={report.ok()}")
sys.exit(0 if report.ok() else 2)
