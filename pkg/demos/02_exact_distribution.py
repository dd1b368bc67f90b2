"""Exact distribution of the statistic under the null.

The law depends on the nuisance parameters only through ``kappa``. We
tabulate its distribution function and compare it with chi-square on
``p - 1`` degrees of freedom, the reference the test uses.
"""

# %%
import numpy as np

from meanprop.specfun import chi2_cdf
from meanprop.wishart import NoncentralSpec, lambda2_cdf, lambda2_mean, noncentral_marginal_density

grid = np.array([0.1, 0.5, 1.0, 2.0, 4.0, 8.0])

# %% The distribution function falls toward chi-square as kappa grows
for p in (2, 5):
    print(f"p = {p}")
    print("  lambda2  " + "  ".join(f"{x:7.2f}" for x in grid))
    for kappa in (0.0, 5.0, 20.0):
        cdf = lambda2_cdf(NoncentralSpec(p, kappa), grid)
        print(f"  kappa={kappa:4.0f} " + "  ".join(f"{v:7.4f}" for v in cdf))
    print("  chi2     " + "  ".join(f"{v:7.4f}" for v in chi2_cdf(p - 1, grid)))

# %% Densities and means
spec = NoncentralSpec(3, 5.0)
print("density at 1:", noncentral_marginal_density(spec, 1.0))
print("mean:", lambda2_mean(spec), "vs chi2 mean", spec.p - 1)

# for p = 3 and kappa = 0 the statistic is exponential with mean 1
print("p=3 central density at 2:", noncentral_marginal_density(NoncentralSpec(3, 0.0), 2.0), np.exp(-2.0))
