"""Testing whether two mean vectors are proportional.

Run with ``python demos/01_testing_proportionality.py``.
"""

# %%
import numpy as np

from meanprop import Sample, fieller_interval, proportionality_test
from meanprop.core import pivot

rng = np.random.default_rng(2024)
p = 6
mu_x = rng.normal(0, 2, p)

# %% Under the null: Y's mean is 1.5 times X's mean
x = mu_x + rng.standard_normal(p)
y = 1.5 * mu_x + rng.standard_normal(p)
sample = Sample(x, y)
outcome = proportionality_test(sample, alpha=0.05)
print("null holds:", outcome)

# the statistic is the smallest value of the pivot over all slopes
slopes = np.linspace(-5, 5, 20001)
print("grid minimum of the pivot:", min(pivot(sample, b) for b in slopes))
print("beta_hat:", outcome.beta_hat)

# %% Away from the null: an unrelated mean for Y
y_alt = rng.normal(0, 2, p) + rng.standard_normal(p)
print("null fails:", proportionality_test(Sample(x, y_alt)))

# %% Known covariance: whitening first
a = rng.standard_normal((p, p))
sigma = a @ a.T + p * np.eye(p)
chol = np.linalg.cholesky(sigma)
xs = chol @ x
ys = chol @ y
print("with sigma:", proportionality_test(Sample(xs, ys, sigma)))

# %% Fieller confidence set for the slope
interval = fieller_interval(sample, level=0.95)
print(interval)
print("1.5 covered:", 1.5 in interval)

# a weak X direction gives an unbounded set
weak = Sample(0.3 * rng.standard_normal(p), mu_x + rng.standard_normal(p))
print(fieller_interval(weak, level=0.95))
