"""Emotion profiles: grouping factor loadings into Ekman's seven families."""

import json
import tempfile
from pathlib import Path

import numpy as np

from newsmacro.econometrics import fit_simpls
from newsmacro.emotions import default_emotion_map, emit_radar, profile_components
from newsmacro.synthetic import count_score_keys

rng = np.random.default_rng(1)
emap = default_emotion_map()
names = tuple(f"{k}_mean" for k in count_score_keys())

latent = rng.normal(0, 1, 80)
loadings = np.array([0.3 if emap.emotion_of(n) in ("happiness", "anger")
                     else -0.2 for n in names])
X = latent[:, None] * loadings[None, :] + rng.normal(0, 0.3, (80, len(names)))
y = latent + rng.normal(0, 0.4, 80)

pls = fit_simpls(X, y, 3, score_names=names)
profiles = profile_components(pls, emap, significance=[0.001, 0.2, 0.5])
print(f"{len(profiles)} significant component(s) of 3")
for prof in profiles:
    ordered = sorted(prof.sums.items(), key=lambda kv: -abs(kv[1]))
    print(f"component {prof.component} (p={prof.significance}):")
    for emotion, value in ordered:
        bar = "#" * int(12 * abs(value) / (abs(ordered[0][1]) + 1e-12))
        print(f"  {emotion:10s} {value:+8.3f} {bar}")
    print(f"  unmapped mass: {prof.unmapped_mass:+.3f}")

out = Path(tempfile.mkdtemp()) / "radar.json"
emit_radar(profiles, out)
payload = json.loads(out.read_text())
print(f"\nradar JSON written: {out} (axes: {', '.join(payload['axes'])})")
