"""Synthetic lane-following samples standing in for recorded vehicle traces.

Two lanes share the left half of the square: a straight one at y = -0.2 and a
branch curving up to the right. Columns: x, y, vx, vy (speed 0.5 along the
lane). Deterministic (fixed seed); rerun to regenerate lane_samples.csv.
"""

import csv
import pathlib

import numpy as np

rng = np.random.default_rng(7)
rows = []
for lane in range(2):
    for _ in range(200):
        x = rng.uniform(-1.0, 1.0)
        if lane == 0:
            y, slope = -0.2, 0.0
        else:
            y = -0.2 + 0.6 * max(x, 0.0) ** 2
            slope = 1.2 * max(x, 0.0)
        direction = np.array([1.0, slope]) / np.hypot(1.0, slope)
        noise = rng.normal(0.0, 0.03, size=2)
        rows.append((x + noise[0], y + noise[1], *(0.5 * direction)))

out = pathlib.Path(__file__).with_name("lane_samples.csv")
with out.open("w", newline="") as f:
    w = csv.writer(f)
    w.writerow(["x", "y", "vx", "vy"])
    for r in rows:
        w.writerow([f"{v:.6f}" for v in r])
