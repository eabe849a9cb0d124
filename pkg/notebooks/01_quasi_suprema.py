# %% [markdown]
# # Quasi-suprema in a few cones
#
# The quasi-supremum of x and y is the upper bound closest to both, measured by
# sigma(z) = |z - x| + |z - y|. In a lattice cone it is the ordinary supremum.
# In other cones it may be a different point, or the minimum may be flat.

# %%
import numpy as np

from conelat import (
    Status,
    SolverOptions,
    four_ray_space,
    half_lorentz_space,
    is_minimal_upper_bound,
    lorentz_space,
    polynomial_space,
    quasi_sup,
    standard_space,
)

# %% [markdown]
# ## Ice-cream cone
# Closed form and the splitting solver agree.

# %%
L3 = lorentz_space(3)
for method in ("closed_form", "splitting"):
    r = quasi_sup(L3, [0, 0, 0], [0, 0, 2], SolverOptions(method=method))
    print(method, np.round(r.z, 8), r.status.name)

# %% [markdown]
# ## Flat minima
# With the sup-norm on the standard cone, many upper bounds tie.

# %%
for sp, x, y in [
    (standard_space(3, np.inf), [1, -1, 0], [0, 0, 0]),
    (four_ray_space(), [0, 0, 0], [2, 0, 0]),
]:
    r = quasi_sup(sp, x, y)
    print(r.status.name, len(r.witnesses), "witnesses")
    assert r.status is Status.FLAT_MINIMUM

# %% [markdown]
# ## Polynomial cone
# The quasi-supremum need not be a minimal upper bound.

# %%
P = polynomial_space()
x, y = np.array([0.0, 1.0, 0.0]), np.array([0.0, -1.0, 1.0])
r = quasi_sup(P, x, y)
print(np.round(r.z, 6), is_minimal_upper_bound(P, x, y, r.z).minimal)

# %% [markdown]
# ## Half-Lorentz cone
# Here the operation is not associative.

# %%
H = half_lorentz_space()
a, b, c = np.zeros(3), np.array([0.0, -1.0, 1.0]), np.array([0.0, -1.0, -1.0])
left = quasi_sup(H, quasi_sup(H, a, b).z, c).z
right = quasi_sup(H, a, quasi_sup(H, b, c).z).z
print(np.round(left, 6), np.round(right, 6), np.linalg.norm(left - right))
