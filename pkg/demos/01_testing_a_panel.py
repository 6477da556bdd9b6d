"""
Testing a panel for serial correlation
======================================

Simulate a few panels, run the white-noise test on each and read the report.
"""

import numpy as np

import hdwhite as hw

rng = np.random.default_rng(2024)
p, T = 40, 120
cov = hw.identity_cov(p)

# %%
# Independent Gaussian vectors: the test should usually accept.
x = hw.gen_null(cov, "gaussian", T, rng)
report = hw.run_test(x)
for a, r in report.orders.items():
    print(f"order {a}: u = {r.u_raw:+.4e}  sigma_hat = {r.sigma_hat:.4e}  z = {r.z:+.3f}")
print(f"adaptive z = {report.adaptive_z:+.3f}, p-value {report.adaptive_p:.3f}")

# %%
# A moving average x_t = z_t + z_{t-1} is strongly serially correlated.
ma = hw.gen_vma1(cov, hw.coeff_matrix("identity", p), "gaussian", T, rng)
report = hw.run_test(ma)
print(f"moving average: adaptive z = {report.adaptive_z:.1f}, reject = {report.adaptive_reject}")

# %%
# Larger lag caps pick up dependence at more lags; each order needs
# T >= a*q + a, so with q = 3 the order-6 statistic needs 24 observations.
cfg = hw.TestConfig(q=3, orders=(2, 4, 6))
print("q = 3, min T =", cfg.min_T())
print({a: round(r.z, 3) for a, r in hw.run_test(ma, cfg).orders.items()})

# %%
# When the null covariance is known the exact null standard deviation can
# replace the estimate.
report = hw.run_test(x, null_cov=cov)
print("standardizer:", report.standardizer, {a: round(r.z, 3) for a, r in report.orders.items()})
