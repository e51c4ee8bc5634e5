"""Formal curvature of a Jordan structure, its Berger certificate, and a
quadratic metric whose curvature at the origin reproduces it."""
import numpy as np

from secto import JordanBlock, JordanSpec
from secto.holonomy import berger_certificate, curvature_at, formal_curvature, realize_metric, verify_realization

spec = JordanSpec((JordanBlock(0.0, 2), JordanBlock(0.0, 2)))
fc = formal_curvature(spec)
print("formal curvature:\n", np.round(fc.rep.matrix, 6))
print("Berger:", berger_certificate(spec))

metric = realize_metric(spec)
print("g(0) =\n", metric.metric(np.zeros(4)))
x = np.array([0.02, -0.01, 0.03, 0.0])
print("g(x) =\n", np.round(metric.metric(x), 6))
print("|R(0) - formal| =", np.linalg.norm(curvature_at(metric, np.zeros(4)).matrix - fc.rep.matrix))

rep = verify_realization(spec)
for name, ok in rep["checks"].items():
    print(f"  {name:16s} {'ok' if ok else 'FAILED'}")
