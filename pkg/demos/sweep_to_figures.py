"""Run a small benchmark sweep and leave a CSV ready for plotting.

The sweep varies the pilot-length ratio L/N at three points, three seeds
each, for the trained decoder and two classical baselines.  Results land
in sweep_demo.csv next to this script; render panels with the plotting
package:

    cd ../plots && npm run build
    ./render --csv ../demos/sweep_demo.csv --figure err-vs-L --out fig.svg
    ./render --csv ../demos/sweep_demo.csv --figure time-vs-L --out t.png
"""

import os

import numpy as np

from jssr.bench import ModelCache, SweepSpec, run_sweep

spec = SweepSpec(
    name="sweep-demo",
    N=40, L=8, M=4, G=8, p1=0.15, p2=0.05, sigma2=0.1,
    axis="L_over_N", values=(0.15, 0.2, 0.3),
    schemes=("proposed", "glasso", "amp", "oracle"),
    seeds=(0, 1, 2),
    train_count=3000, val_count=500, test_count=500,
    max_epochs=40, patience=8, lambda_split=300,
    timing_count=100, timing_reps=3,
)

out = os.path.join(os.path.dirname(os.path.abspath(__file__)),
                   "sweep_demo.csv")
cache = ModelCache()        # set JSSR_MODEL_CACHE to keep models on disk
records, problems = run_sweep(spec, out_csv=out, cache=cache,
                              progress=lambda msg: print("  " + msg))
assert not problems, problems

print(f"\nwrote {out} ({len(records)} rows)")
print(f"{'scheme':<10} {'L/N':>6} {'median err':>11}")
for scheme in spec.schemes:
    for v in spec.values:
        errs = [r.error_rate for r in records
                if r.scheme == scheme and r.axis_value == v
                and r.error_rate is not None]
        print(f"{scheme:<10} {v:>6.2f} {np.median(errs):>11.4f}")
