# %% [markdown]
# # Normality constants and positive operators

# %%
import numpy as np

from conelat import (
    PropertyFlavor,
    absolute_monotonicity_experiment,
    lorentz_space,
    normality_check,
    operator_norm,
    positively_attained_check,
    quasi_abs,
    random_positive_operator,
    robinson_norm,
    standard_space,
)

# %% [markdown]
# ## Max-normality of the Euclidean plane
# The pair below gives the ratio sqrt(2), so the constant 1 fails.

# %%
sp = standard_space(2)
rep = normality_check(sp, PropertyFlavor("max-normal", 1.0), [((-1.0, 0.0), (-1.0, 1.0), (0.0, 1.0))])
print(rep.alpha_lower_bound, np.sqrt(2))

# %% [markdown]
# ## The absolute value keeps the Euclidean norm in Lorentz cones

# %%
rng = np.random.default_rng(0)
gap = max(
    abs(np.linalg.norm(quasi_abs(lorentz_space(n), x)) - np.linalg.norm(x))
    for n in range(2, 9)
    for x in rng.standard_normal((50, n))
)
print("worst norm change", gap)

# %% [markdown]
# ## Positive operators on the ice-cream cone

# %%
L = lorentz_space(3)
T = random_positive_operator(L, L, rng)
print("operator norm", operator_norm(T))
print("robinson lower bound", robinson_norm(T))
print("gap", positively_attained_check(T).positively_attained_gap)

# %%
mono = absolute_monotonicity_experiment(L, L, n_trials=200, seed=0)
print("max ratio", mono.max_ratio)
