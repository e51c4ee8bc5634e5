"""Euler flow of the so(3) rigid body and the n = 4 generalization: RK4
conservation of the shift integrals and their fourth-order drift."""
import numpy as np

from secto import MatrixPolynomial, build_rep
from secto.flow import integrate, lax_residual, shift_integrals

A = np.diag([1.0, 2.0, 3.0])
p = MatrixPolynomial([0.0, 0.0, 1.0])
R = build_rep(A, p, np.eye(3))
x0 = R.basis.matrix(np.array([5.0, 0.0, 5.0]))

for h in (2e-3, 1e-3, 5e-4):
    d = integrate(x0, R, h, 10.0, A=A).diagnostics
    print(f"h={h:.0e}  integral drift {d['max_integral_drift']:.3e}  energy {d['energy_drift']:.3e}"
          f"  casimir {d['casimir_drift']:.3e}")

res = integrate(x0, R, 1e-3, 10.0, A=A, subsample=10)
for t, x in zip(res.times, res.states):
    print(f"t={t:5.2f}  coords {np.round(R.basis.coords(x), 6)}")

A4 = np.diag([1.0, 2.0, 3.0, 4.0])
R4 = build_rep(A4, p, np.eye(4))
rng = np.random.default_rng(0)
K = rng.uniform(-1, 1, (4, 4))
x = K - K.T
res = integrate(x, R4, 1e-3, 5.0, A=A4)
F0, F1 = shift_integrals(x, A4), shift_integrals(res.states[-1], A4)
print("n=4 integrals at t=0 and t=5:")
for key in sorted(F0):
    print(f"  F{key}: {F0[key]: .10f}  {F1[key]: .10f}")
print("Lax residual at lambda=0.7:", lax_residual(x, R4, A4, A4 @ A4, 0.7))
