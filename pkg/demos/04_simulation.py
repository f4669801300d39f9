"""
Simulation and the skew Brownian limit
======================================
"""

import numpy as np

import skewwalk as sw
from skewwalk.rng import RngContract
from skewwalk.simulate import chisquare_vs_pmf, ks_statistic, sample_endpoints, up_fraction_at_zero

# one long path: departures from 0 go up about 70% of the time
path = sw.sample_path_direct(0.7, 200_000, RngContract(5))
print(up_fraction_at_zero(path))

# the excursion sampler builds |S| first, then signs each excursion
ends = sample_endpoints(0.7, 20, 200_000, RngContract(5, 1), "excursion")
print("chi-square p-value vs exact law:", chisquare_vs_pmf(ends, sw.exact_pmf(0.7, 20))[1])

# the law of S_n / sqrt(n) approaches skew Brownian motion at time 1
for n in (100, 1_000, 10_000):
    print(n, round(ks_statistic(0.7, n), 5))

y = np.array([-1.0, 0.0, 1.0])
print(sw.skew_bm_cdf(0.7, 1.0, y))
