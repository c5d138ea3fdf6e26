# %% [markdown]
# # Robust location estimators on a small sample
#
# A single gross outlier is enough to drag the sample mean anywhere. The
# winsorized mean pulls such points back to `median +/- beta * MAD` before
# averaging, so it stays close to the bulk of the data.

# %%
import numpy as np

from robustmean import (
    catoni_mean,
    lm_trimmed_mean,
    mean,
    median,
    mom,
    winsorized_fit,
)

x = np.array([1.0, 2.0, 3.0, 4.0, 100.0])
fit = winsorized_fit(x, beta=2.0)
print(f"mean {mean(x)}  median {median(x)}  winsorized {fit.estimate}")
print(f"clip levels ({fit.lower}, {fit.upper}), clipped high: {fit.clipped_high}")

# %% [markdown]
# `beta` interpolates between the median (`beta = 0`) and the mean (`beta`
# larger than every point's outlyingness).

# %%
for beta in (0.0, 1.0, 2.0, 10.0, 1e9):
    print(f"beta={beta:<6g} {winsorized_fit(x, beta).estimate:.4f}")

# %% [markdown]
# The competitors. Catoni's estimator solves a monotone score equation,
# median-of-means averages within groups then takes the median, and the
# two-sample trimmed mean clips one sample at order statistics of another.

# %%
print("catoni (alpha=1)", catoni_mean(x, alpha=1.0))
print("catoni (alpha=0.1)", catoni_mean(x, alpha=0.1))
print("median of means, k=3", mom(np.arange(1.0, 7.0), k=3))
y = np.arange(1.0, 11.0)
print("two-sample trimmed, eps=0.2", lm_trimmed_mean(y, y, 0.2))

# %% [markdown]
# Catoni's estimator shifts with the data but does not rescale with it.

# %%
s = [0.0, 0.0, 10.0]
print(catoni_mean([2 * v for v in s], 0.5), 2 * catoni_mean(s, 0.5))
