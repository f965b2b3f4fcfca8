# %% [markdown]
# # Densities against counted cars
#
# Synthetic sequences stand in for hand-labelled webcam images: a fixed
# textured scene with 0-5 rectangles per frame and an exact count for each
# frame.  All three background models run through the same cleanup and
# density stages, and each is scored by Pearson r and by the mean absolute
# error of a least-squares count fit.

# %%
from bgbench import evaluate, run_sequence
from bgbench.synth import SynthConfig, generate


def score(seq):
    for algo in ("framediff", "staticbg", "mog"):
        rep = evaluate(run_sequence(seq.frames, algo), seq.truth)
        print(f"  {algo:<10} r={rep.pearson_r:.3f}  mae={rep.mae:.2f} cars"
              f"  count ~ {rep.fit_slope:.1f}*density + {rep.fit_intercept:.2f}")


# %% [markdown]
# Snapshot-style traffic: cars change every frame, as at a low capture rate.

# %%
print("snapshot traffic")
score(generate(SynthConfig(frames=200, seed=11)))

# %% [markdown]
# Slow crawl: each set of cars lingers ten frames and moves a tenth of a
# pixel per frame.  Differencing consecutive frames sees almost nothing.

# %%
print("slow crawl")
score(generate(SynthConfig(frames=200, seed=11, hold=10, speed=0.1)))
