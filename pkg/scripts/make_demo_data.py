"""Regenerate data/demo_survey.csv, the synthetic demo used in the README and tests."""
from pathlib import Path

import numpy as np

from ordsurvey.dataset import OrdinalDataset, SyntheticSpec, generate_synthetic, serialize_dataset

N_LABELED, N_UNLABELED = 110, 12

spec = SyntheticSpec(
    N_LABELED + N_UNLABELED,
    ("performance", "performance", "basic", "basic", "excitement", "excitement", "noise", "noise"),
    (None, None, 3, 3, 3, 3, None, None),
    noise=0.1,
    names=tuple(f"q{i}" for i in range(1, 9)),
)
ds = generate_synthetic(spec, seed=2024)
rng = np.random.default_rng(2024)
X = ds.X.copy()
X[rng.random(X.shape) < 0.03] = np.nan
y = ds.y.copy()
y[N_LABELED:] = np.nan
ids = [f"unit{i:03d}" for i in range(1, ds.n + 1)]
demo = OrdinalDataset(ds.attribute_names, ds.scales, "satisfaction", ds.response_scale, X, y, ids, "unit")
out = Path(__file__).resolve().parent.parent / "data" / "demo_survey.csv"
out.write_text(serialize_dataset(demo), encoding="utf-8")
print(f"wrote {out}")
