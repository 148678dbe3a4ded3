"""
Target-count and power sweeps
=============================

Runs both comparison sweeps from configs/ and prints the per-point means.
Each takes roughly ten seconds.
"""

from pathlib import Path

from jrcswarm import emit_csv, emit_summary_csv, load_config, load_sweep, run_sweep, summarize

root = Path(__file__).resolve().parent.parent / "configs"
base = load_config(root / "reference_3targets.json")

for name in ("sweep_targets", "sweep_power"):
    spec = load_sweep(root / f"{name}.json")
    records = run_sweep(base, spec)
    emit_csv(records, f"{name}.csv")
    emit_summary_csv(records, f"{name}_summary.csv")
    print(f"\n{spec.kind.value}")
    for row in summarize(records):
        print(f"  {row['method']:5s} {row['sweep_value']:>5g}  "
              f"eta {row['eta_total_mean']:10.4g}  rate {row['rate_total_bps_mean'] / 1e6:7.3f} Mbit/s  "
              f"converged {row['converged_fraction']:.0%}")

# Every UAV owns its own p_t, so total SNR grows with the number of targets
# while staying ordered DJRC > ORFC and DJRC > FROC at each point.
