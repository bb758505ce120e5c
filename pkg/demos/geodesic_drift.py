"""Drift of the conserved quantities C_k for a few step sizes."""

import numpy as np

from bochner.geodesic_ode import conserved_drift, integrate
from bochner.structure_space import random_point

rng = np.random.default_rng(1)
p = random_point(rng, 3, 0.5)
w = rng.normal(size=3) + 1j * rng.normal(size=3)
w /= np.linalg.norm(w)
prev = None
for h in [4e-2, 2e-2, 1e-2, 5e-3]:
    d = np.max(conserved_drift(integrate(p, w, 1.0, h=h)))
    ratio = "" if prev is None else f"  ratio {d / prev:.4f}"
    print(f"h = {h:7.4f}  drift {d:.3e}{ratio}")
    prev = d
