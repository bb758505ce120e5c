"""Bochner residuals of the explicit families next to the weighted-reduction control."""

import numpy as np

from bochner.curvature_verifier import curvature_report
from bochner.explicit_metrics import RotSymParams, grho_metric, reduction_metric, rotsym_metric, wps_metric

z = np.array([0.25 + 0.1j, -0.15j])
fields = [
    (rotsym_metric(RotSymParams(2, 8.0, 0.0)), z),
    (rotsym_metric(RotSymParams(2, -8.0, 1.0)), z),
    (rotsym_metric(RotSymParams(2, -3.0, 1.0, "type_two")), np.array([0.8, 0])),
    (grho_metric([1.0, 2.0]), 4 * z),
    (wps_metric([1, 2, 3]), 4 * z),
    (reduction_metric([1, 1, 1]), z),
    (reduction_metric([1, 1, 2]), z),
]
print(f"{'field':45s} {'residual':>10s} {'scalar':>12s}")
for field, pt in fields:
    rep = curvature_report(field, pt)
    print(f"{field.name:45s} {rep.bochner_residual:10.2e} {rep.scalar:12.6f}")
