"""Frozen oracle constants, each derived independently of the package.

Every value here was computed with the plain ``math`` module (entropies by
direct summation, inverses by bisection) so the test suite compares the
package against arithmetic that shares none of its code.  The small helpers
at the bottom are those independent recipes; tests may call them to extend
a frozen grid, but the frozen literals are the contract.

Derivations:

* ``HB_QUARTER``           -(1/4)log2(1/4) - (3/4)log2(3/4).
* ``HB_INV_HALF``          bisection of the binary entropy on [0, 1/2].
* ``LOG2_3``               math.log2(3).
* ``ADDER_SUM_CAPACITY``   closed form (1-p) + p*hb(t) + 2^(1/p)/(1+2^(1/p))
                           with t = 1/(1+2^(1/p)), the optimal two-point
                           parameter of the adder-erasure channel.
* ``P2_STAR_06``           t above at p = 0.6.
* ``RZ_STAR_06``           (1-p)*(1-hb(t)) at p = 0.6: the stochastic
                           receiver's rate at the max-sum-rate point.
* ``BOUNDARY_GRID_06``     10 evenly spaced R_Z in [RZ*, 0.4] paired with
                           R_Y = 2 - R_Z/0.4 - hb_inv(1 - R_Z/0.4).
* ``SIDE_INFO_GAP_06``     I(U;Y) - I(U;Z) of the two-point family at
                           parameter p2: H of the Y-mixture minus
                           H([q, q, p2]) minus 0.4*(1-hb(p2)), q=(1-p2)/2.
* ``KAPPA_06``             the p2 where that gap crosses zero (bisection).
* ``BSC_QUARTER_*``        1 - hb(1/4) and 2 - hb(1/4) for the binary pair
                           with crossover 1/4 at the uniform input.
"""

import math

HB_QUARTER = 0.8112781244591328
HB_INV_HALF = 0.11002786443835955
LOG2_3 = 1.584962500721156

# max sum rate of the adder-erasure channel with full MSI at Y, by closed form
ADDER_SUM_CAPACITY = {
    0.3: 1.7409411204985874,
    0.5: 1.6609640474436813,
    0.6: 1.6370246871120733,
    0.8: 1.6050769831595326,
    1.0: LOG2_3,
}

P2_STAR_06 = 0.23953231197644204
RZ_STAR_06 = 0.08229533394098994
RY_AT_RZ_STAR_06 = 1.554729353171083

# (R_Z, R_Y) pairs on the no-MSI boundary at p = 0.6
BOUNDARY_GRID_06 = [
    (0.08229533394098994, 1.554729353171083),
    (0.11759585239199105, 1.5138300174226795),
    (0.15289637084299218, 1.4645718975880848),
    (0.1881968892939933, 1.4094566614748054),
    (0.22349740774499444, 1.3498169914634777),
    (0.25879792619599556, 1.2864315089686502),
    (0.29409844464699664, 1.2197564171258233),
    (0.32939896309799777, 1.1500066537431086),
    (0.3646994815489989, 1.0771125298854816),
    (0.4, 1.0),
]

# I(U;Y) - I(U;Z) of the two-point family at p = 0.6, by direct entropy sums
SIDE_INFO_GAP_06 = {
    0.01: 0.06645198250811496,
    0.02: 0.04484711622771781,
    0.03: 0.027715575115664914,
}
KAPPA_06 = 0.05122229514190926

# binary pair with crossover 1/4 at the uniform input
BSC_QUARTER_CORNERS = (1.0, 1.0 - HB_QUARTER, 1.0)
BSC_QUARTER_MAX_SUM = 2.0 - HB_QUARTER


def entropy_bits(probs) -> float:
    """Direct -sum p log2 p over the positive entries."""
    return -sum(q * math.log2(q) for q in probs if q > 0.0)


def hb(q: float) -> float:
    return entropy_bits([q, 1.0 - q]) if 0.0 < q < 1.0 else 0.0


def hb_inv(y: float) -> float:
    """Inverse of hb on [0, 1/2] by 200 bisection steps."""
    lo, hi = 0.0, 0.5
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if hb(mid) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def adder_boundary_ry(r_z: float, p: float = 0.6) -> float:
    """R_Y on the no-MSI boundary: 2 - R_Z/(1-p) - hb_inv(1 - R_Z/(1-p))."""
    s = r_z / (1.0 - p)
    return 2.0 - s - hb_inv(1.0 - s)
