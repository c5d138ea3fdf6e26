# %% [markdown]
# # The finite-sample deviation bound
#
# The winsorized-mean bound has a statistical term that shrinks like
# `1/sqrt(n)` and a floor driven by the contamination rate. It only carries
# a probability guarantee when `delta > 24 delta*(n, eps*)`.

# %%
from robustmean import BoundParams, DistributionSpec, check_validity, minimal_eps_star, theorem41_bound

c1, c2 = DistributionSpec.gaussian().quantile_constants()
print(f"N(0,1): C1 = {c1:.4f}, C2 = {c2:.4f}")

for n in (10**3, 10**4, 10**5, 10**6):
    for eps in (0.0, 0.02):
        es = max(2 * eps, minimal_eps_star(n, 0.05))
        p = BoundParams(n, 0.05, eps, es, c1=c1, c2=c2)
        r = theorem41_bound(p)
        print(f"n={n:<8d} eps={eps:<5} eps*={es:.4f} bound={r.value:.4f} valid={r.valid}")

# %% [markdown]
# How large must `n` be before the guarantee applies at a given `eps*`?

# %%
for es in (0.01, 0.05, 0.1):
    v = check_validity(BoundParams(100, 0.05, 0.0, es))
    print(f"eps*={es}: need n >= {v.min_n}")
