"""
Return probabilities and their partial sums
===========================================
"""

import numpy as np

from skewwalk.asymptotics import g_seq, lemma_constant, mu_seq, nu_seq, tauberian_ratio

m = 20_000
g, mu, nu = g_seq(m), mu_seq(m), nu_seq(m)

# g*g is 1 on even indices, the fourfold convolution is i + 1
print(mu.values[:8])
print(nu.values[:8])

# partial sums grow like c n^theta / Gamma(theta + 1)
for seq, theta, c in ((g, 0.5, 1 / np.sqrt(2)), (mu, 1.0, 0.5), (nu, 2.0, 0.25)):
    r = tauberian_ratio(seq, theta, c)
    print(f"{seq.label:>3}: ratio at n=100 {r[100]:.4f}, at n={m} {r[m]:.6f}")

# the triple and quadruple index sums stay below C d^2 with C = 1
C, sup = lemma_constant([0.1, 0.5, 0.9], 4096)
print("C =", C, " sup ratio =", round(sup, 4))
