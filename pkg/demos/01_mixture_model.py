# %% [markdown]
# # Per-pixel mixture of Gaussians
#
# Each pixel keeps K weighted Gaussians.  A new value either matches one of
# them (within 2.5 standard deviations on every channel) or replaces the
# weakest.  Components that together carry more than 70% of the weight are
# the background.

# %%
import numpy as np

from bgbench import Frame, MixtureModel, MogParams, gaussian_density
from bgbench.synth import constant_sequence

# %% [markdown]
# The density of a single component at its own mean is the closed-form peak.

# %%
print(gaussian_density([0.0], [0.0], [1.0]), 1 / np.sqrt(2 * np.pi))

# %% [markdown]
# Feed a static, slightly noisy scene.  The first frame seeds the model, and
# after that nothing is foreground.

# %%
model = MixtureModel(MogParams())
frames = constant_sequence(120, frames=30, width=32, height=32, noise=2.0, seed=0)
fractions = [model.observe(f).mean() for f in frames]
print("foreground fraction per frame:", np.round(fractions, 4))

# %% [markdown]
# A bright intruder lands in the scene.  Its pixels are far from any
# component, so they come back as foreground.

# %%
px = frames[-1].pixels[:, :, 0].copy()
px[10:16, 10:20] = 250
mask = model.observe(Frame(px))
print("foreground pixels:", int(mask.sum()), "(expected 60)")

# %% [markdown]
# Inspect one pixel's components, kept in fitness order (weight over standard
# deviation, highest first).

# %%
for c in model.pixel(12, 12):
    print(f"w={c.weight:.4f} mean={c.mean[0]:6.1f} var={c.variance[0]:7.2f}")
