# %% [markdown]
# # Efficiency on clean data
#
# Robustness usually costs precision. Standard errors relative to the
# sample mean: the median pays about `sqrt(pi/2)` on Gaussian data while the
# winsorized mean at `beta = 3` is nearly free. On Student t(2) data the
# mean itself has no variance and loses outright.

# %%
from robustmean import DistributionSpec, EstimatorSpec, efficiency_comparison

rivals = [EstimatorSpec("median"), EstimatorSpec("winsorized"), EstimatorSpec("catoni"), EstimatorSpec("mom")]
for dist in (DistributionSpec.gaussian(), DistributionSpec.student_t(2.0)):
    rep = efficiency_comparison(dist, 1000, 2000, rivals, seed=3)
    print(dist.family, dict(dist.parameters))
    for row in rep.rows:
        print(f"  {row.estimator.label:40s} se ratio {row.se_ratio:.3f}")
