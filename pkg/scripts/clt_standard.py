"""Normal-limit check at t=1 for the standard scenario.

Regression 2 with X ~ T(4), eps ~ U[-0.5, 0.5], n=4000, h = n^(-1/9)/4 and
500 replications of the ideal VB estimator.  Pass ``--estimator true_vb``
for the two-stage estimator.
"""

import argparse
import json

from vbkreg.estimators import BandwidthPlan
from vbkreg.simulate import builtin_scenario, clt_check, scenario_model


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--reps", type=int, default=500)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--estimator", default="ideal_vb", choices=("ideal_vb", "true_vb", "nw"))
    args = ap.parse_args()
    cfg, _ = builtin_scenario("table1-row1")
    h = BandwidthPlan.default(args.n).h2
    res = clt_check(scenario_model(cfg), cfg.x_dist, cfg.eps_dist, 1.0, args.n, h, args.reps, args.seed, args.estimator)
    print(json.dumps(res, indent=2))


if __name__ == "__main__":
    main()
