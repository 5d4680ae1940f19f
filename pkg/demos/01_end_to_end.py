"""End-to-end walkthrough: synthetic world -> panels -> forecasts -> report.

Generates a one-country world with a planted sentiment signal, runs every
pipeline stage, and prints the three report tables. Takes ~10 seconds.
"""

import json
import tempfile
from pathlib import Path

from newsmacro.pipeline import run_pipeline
from newsmacro.synthetic import WorldConfig, generate_world

workdir = Path(tempfile.mkdtemp(prefix="newsmacro_demo_"))
print(f"working in {workdir}\n")

config_path = generate_world(WorldConfig.small(seed=7), workdir / "world")
truth = json.loads((workdir / "world" / "truth.json").read_text())
print(f"world: {truth['n_records']} articles over {len(truth['months'])} months,"
      f" classes {truth['class_counts']}")

manifest = run_pipeline(config_path, workdir / "out")
print(f"pipeline done, manifest at {manifest}\n")

out = workdir / "out"
for table in ("rmse_ip.csv", "dm_ip.csv", "granger_counts_ip.csv"):
    print(f"--- report/{table}")
    print((out / "report" / table).read_text())

forecast = json.loads((out / "forecast" / "ip_US.json").read_text())
print("factor p-values (MODEL):",
      [round(p, 4) for p in forecast["variants"]["MODEL"]["factor_p_values"]])

radar = out / "report" / "emotions_ip_US.json"
if radar.exists():
    payload = json.loads(radar.read_text())
    print(f"\nemotion radar: {len(payload['series'])} significant component(s)")
    for series in payload["series"]:
        pairs = sorted(zip(payload["axes"], series["values"]),
                       key=lambda kv: -abs(kv[1]))[:3]
        print(f"  component {series['component']}: dominated by "
              + ", ".join(f"{k} ({v:+.2f})" for k, v in pairs))
