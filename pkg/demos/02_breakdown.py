# %% [markdown]
# # How many bad points does it take?
#
# For each estimator we replace `m` points of a clean N(0, 1) sample with
# values growing from 1e3 to 1e12 and watch whether the estimate follows.
# The smallest such `m`, divided by the sample size, is the empirical
# replacement breakdown point.

# %%
from robustmean import EstimatorSpec, breakdown_probe, empirical_rbp

specs = [
    EstimatorSpec("mean"),
    EstimatorSpec("catoni"),
    EstimatorSpec.make("mom", k=10),
    EstimatorSpec.make("lm_trimmed", epsilon=0.2),
    EstimatorSpec("winsorized"),
]
for spec in specs:
    r = empirical_rbp(spec, n=20)
    print(f"{spec.label:40s} empirical {str(r.empirical_rbp):6s} theory {r.theoretical_rbp}")

# %% [markdown]
# A closer look at the winsorized mean just below and at half the sample.

# %%
w = EstimatorSpec("winsorized")
for m in (9, 10):
    diverged, trace = breakdown_probe(w, 20, m)
    print(m, diverged, [f"{e:.3g}" for e in trace.estimates])
