"""
The tuple dynamic program
=========================

The statistic sums products over time tuples whose consecutive gaps exceed
``q``. Enumerating them costs ``O(T^a)``; a prefix-sum recursion gets the
same number in ``O(aT)``.
"""

import time

import numpy as np

import hdwhite as hw

# %%
# The admissible tuples for a tiny case, and their count C(T - aq, a).
print(list(hw.enumerate_tuples(7, 1, 2)))
print("count:", hw.tuple_count(7, 1, 2))

# %%
# Brute force and the recursion agree.
rng = np.random.default_rng(0)
s = rng.standard_normal(14)
print(hw.brute_tuple_product_sum(s, 2, 4), hw.dp_tuple_product_sum(s, 2, 4))

# %%
# With every term equal to one the sum is just the number of tuples.
print(hw.dp_tuple_product_sum(np.ones(30), 1, 6), hw.tuple_count(30, 1, 6))

# %%
# Runtime grows linearly in T.
for T in (1000, 2000, 4000, 8000):
    s = rng.standard_normal(T)
    start = time.perf_counter()
    hw.dp_tuple_product_sum(s, 1, 6)
    print(f"T = {T:5d}: {1e3 * (time.perf_counter() - start):.3f} ms")
