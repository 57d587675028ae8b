"""Robustness to the number of multipath components.

Sweeps the per-user path count at fixed total channel energy. The
strongest-path baseline degrades steadily as more energy hides in the
paths it discards; the aligned scheme recombines all of them and holds
its rate nearly flat.

CLI equivalent:

    damsim sweep-paths --values 1,2,4,8 --trials 100 --out paths.csv
"""

import numpy as np

from damsim.experiments import SweepSpec, default_config, run_sweep

spec = SweepSpec(
    variable="num_paths",
    values=(1, 2, 4, 6, 8, 10),
    base=default_config(),
    trials=25,
    master_seed=6,
    schemes=("DAM-ZF", "SP-ZF"),
)
result = run_sweep(spec)

print("mean sum rate (bits/s/Hz) over %d trials\n" % spec.trials)
print("%-8s %9s %9s %9s" % ("paths", "DAM-ZF", "SP-ZF", "gap"))
for gi, value in enumerate(spec.values):
    dam = float(np.mean(result.scheme_trials(gi, "DAM-ZF")))
    sp = float(np.mean(result.scheme_trials(gi, "SP-ZF")))
    print("%-8d %9.3f %9.3f %9.3f" % (int(value), dam, sp, dam - sp))

print("\nwith one path the two schemes coincide; the gap opens as the")
print("baseline throws away a growing share of the channel energy")
