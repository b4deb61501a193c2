"""Run the order-theoretic checks on an acute basis, where they are expected to fail.

The metric retraction still exists and is still certified; what breaks is
monotonicity and the least-element description.
"""

import sys

from langret.root_data import ObtuseBasis
from langret.verify import VerifyPlan, run_verify

trials = int(sys.argv[1]) if len(sys.argv) > 1 else 10_000
acute = ObtuseBasis([["1", "1/2"], ["1/2", "1"]], name="acute")
plan = VerifyPlan.make([acute], trials=trials, seed=42,
                       checks="order_preserving,least_element,infimum_closure,wellknown,certificate,oracle_agreement")
report = run_verify(plan)
for name, c in report.systems[0]["checks"].items():
    print(f"{name:>18}: {c['status']:<20} failed {c['failed']}/{c['passed'] + c['failed']}")
    if c["counterexample"]:
        print(f"{'':>20}first counterexample {c['counterexample']}")
print(f"growth fallbacks: {report.systems[0]['fallbacks']}")
