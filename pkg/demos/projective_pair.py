"""Two projectively equivalent metrics on a box: the comparison tensor, the
compatibility system, the curvature check and the geodesic oracle."""
import numpy as np

from secto.projective import (
    MetricField,
    bmk_check,
    comparison_tensor,
    compatibility_residual,
    curvature_operator,
    dini_pair,
    geodesic_coincidence,
    sphere_patch,
)

g, gbar = dini_pair()
x = np.array([2.5, 1.5])
A = comparison_tensor(g, gbar, x)
print("A at", x, "\n", A)
print("compatibility residual", compatibility_residual(g, gbar, x))
rep = bmk_check(g, gbar, x)
print("curvature/Hessian sectional residual", rep["sectional_residual"])

geo = geodesic_coincidence(g, gbar, x, directions=20, length=0.3)
print("max Hausdorff distance between geodesics", geo["max_hausdorff"])

# a conformal rescaling is not projectively equivalent
other = MetricField.from_expressions(["x", "y"], [["(x - y)*(1 + x**2)", "0"], ["0", "(x - y)*(1 + x**2)"]])
print("conformal rescaling: compatibility", compatibility_residual(g, other, x),
      " Hausdorff", geodesic_coincidence(g, other, x, directions=8)["max_hausdorff"])

print("unit sphere curvature operator", curvature_operator(sphere_patch(), [1.0, 0.2]).matrix)
