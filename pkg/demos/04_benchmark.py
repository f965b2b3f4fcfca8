# %% [markdown]
# # Processing time and scalability
#
# Sequences are the unit of parallel work: a mixture model depends on frame
# order, so each worker owns whole cameras.  The report holds per-frame
# timing (best of several repeats, decode excluded), frames per second at
# each worker count, and accuracy when counts are available.

# %%
import tempfile
from pathlib import Path

from bgbench.bench import BenchConfig, emit_report, run_benchmark
from bgbench.evaluation import load_ground_truth
from bgbench.imaging import load_manifest
from bgbench.synth import SynthConfig, generate, write_sequence

outdir = Path(tempfile.mkdtemp(prefix="bgbench-demo-"))
truth = {}
manifests = []
for i in range(4):
    cfg = SynthConfig(frames=40, seed=100 + i, camera_id=f"cam{i}")
    path = write_sequence(generate(cfg), outdir)
    manifests.append(load_manifest(path))
    truth.update(load_ground_truth(outdir / f"cam{i}_truth.csv"))

# %%
report = run_benchmark(manifests, BenchConfig(repeats=3, worker_counts=(1, 2, 4)), truth)
for a in report.algorithms.values():
    fps = ", ".join(f"{p}w {v:.0f} fps" for p, v in a.fps.items())
    print(f"{a.algorithm:<10} median {a.median_us:8.0f} us  p95 {a.p95_us:8.0f} us  "
          f"r={a.accuracy.pearson_r:.3f}  {fps}")

# %% [markdown]
# The TSV next to the JSON has columns algorithm, metric, x, y and loads
# directly into a plotting tool.

# %%
json_path, tsv_path = emit_report(report, outdir / "report.json")
print(tsv_path.read_text().splitlines()[:5])
