"""
Exact law of the skew walk
==========================

The walk moves up with probability alpha at the origin and flips a fair coin
everywhere else. Its law after k steps can be computed exactly.
"""

import numpy as np

import skewwalk as sw

# two steps from 0: the first step is skewed, the second is fair
pmf = sw.exact_pmf(0.7, 2)
print(pmf.to_dict())

# the modulus |S_k| behaves like a reflected fair walk, and each excursion
# away from 0 is positive with probability alpha
k = 200
step_chain = sw.exact_pmf(0.7, k)
split = sw.factorized_pmf(0.7, k)
print("max gap between the two constructions:", step_chain.max_abs_diff(split))

# flipping alpha mirrors the law
mirror = sw.exact_pmf(0.3, k)
print("mirror gap:", np.max(np.abs(step_chain.weights - mirror.weights[::-1])))

# only the drift at 0 depends on alpha
print(sw.conditional_increment_moments(step_chain, 0.7))
