"""Log-log bias slope of the ideal VB and NW estimators.

Noiseless model ``r(x) = 2 + sin(0.75 x)`` on a standard normal quantile
design (n=20000) at ``t = 1``.  Prints bias and ``bias / h^p`` for the
acceptance grid and for a finer grid of smaller bandwidths.
"""

import numpy as np
from scipy.stats import norm

from vbkreg.simulate import Distribution, bias_curve
from vbkreg.theory import TrueModel, theta_coefficient

GRIDS = {
    "acceptance": (0.5, 0.35, 0.25, 0.18, 0.12),
    "small-h": (0.18, 0.12, 0.08, 0.05),
}


def main():
    model = TrueModel(
        f=norm.pdf,
        r=lambda x: 2.0 + np.sin(0.75 * x),
        rprime=lambda x: 0.75 * np.cos(0.75 * x),
        sigma2=lambda x: np.zeros(np.shape(x)),
    )
    print(f"theta(1) = {float(theta_coefficient(model, 1.0)):.6f}")
    for label, grid in GRIDS.items():
        for kind, power in (("ideal_vb", 4), ("nw", 2)):
            curve = bias_curve(model, Distribution.normal(0, 1), 1.0, grid, 20000, 1, 0, kind, design="quantile")
            print(f"\n{label} grid, {kind}: slope {curve.slope:.3f}")
            for h, b in zip(curve.h, curve.bias):
                print(f"  h={h:<5} bias={b:+.4e}  bias/h^{power}={b / h**power:+.4f}")


if __name__ == "__main__":
    main()
