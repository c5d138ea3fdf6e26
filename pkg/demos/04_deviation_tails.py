# %% [markdown]
# # Deviation tails
#
# Repeat the estimate over many independent samples and look at
# `P(|T - target| > r)`. A sub-Gaussian estimator gives a straight line in
# `log P` against `r**2`; a heavy-tailed one does not.

# %%
from pathlib import Path

from robustmean import DistributionSpec, EstimatorSpec, deviation_experiment, tail_fit
from robustmean.report import tail_svg

gauss = DistributionSpec.gaussian()
w = deviation_experiment(EstimatorSpec("winsorized"), gauss, 1000, 2000, seed=1)
fit = tail_fit(w)
print(f"winsorized: 95% deviation {w.quantile_at_delta:.4f}, slope {fit.slope:.0f}, r2 {fit.r_squared:.3f}")

pareto = DistributionSpec.pareto(1.5)
m = deviation_experiment(EstimatorSpec("mean"), pareto, 1000, 2000, seed=1)
print(f"mean on Pareto(1.5): r2 {tail_fit(m).r_squared:.3f}")

# %% [markdown]
# Contamination: 2% of each sample replaced by 1e6. The mean is ruined, the
# winsorized mean barely moves.

# %%
for kind in ("mean", "winsorized"):
    r = deviation_experiment(EstimatorSpec(kind), gauss, 1000, 500, eps=0.02, seed=2)
    print(f"{kind:10s} 95% deviation under 2% contamination: {r.quantile_at_delta:.4g}")

Path("winsorized_tail.svg").write_text(tail_svg(w))
