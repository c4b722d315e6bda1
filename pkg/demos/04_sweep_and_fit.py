# A small sweep: ratio to the main term, the error exponent, the choice of K and the bound chain.
# Counts are cached when NEARCURVE_CACHE points at a directory.

from nearcurve import builtin
from nearcurve.asymptotics import RegimeParams, bound_chain, choose_K, error_bound, exponent_fit
from nearcurve.harness import SweepConfig, emit_plot_data, run_sweep

cfg = SweepConfig("parabola", Q_base=256, Q_factor=2, Q_count=5, delta_schedule="fixed", delta_c=0.1, mode="tilde")
recs = run_sweep(cfg)
for r in recs:
    print(int(r.Q), r.count, round(r.ratio, 4), round(r.error), r.K, round(r.error / r.bound_value, 3))

fit = exponent_fit(recs, cfg.describe_schedule())
print("slope", fit.slope)  # regime-one bound gives 5/3 up to logs; main term is 2

emit_plot_data(recs, "error-loglog", "error.dat", cfg.describe_schedule())

kc = choose_K(RegimeParams(0.75, 1e4, 0.01))
print(kc)
print(error_bound(RegimeParams(0.75, 1e4, 0.01)))

bc = bound_chain(builtin("parabola"), 128, 0.1, 8)
for name, ratio in bc.ratios().items():
    print(name, round(ratio, 4))
