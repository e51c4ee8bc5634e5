"""Build a sectional operator from a Jordan structure and a polynomial, then
check the identity, the Bianchi identity and the predicted spectrum."""
import numpy as np

from secto import JordanBlock, JordanSpec, MatrixPolynomial, build_rep, realize_jordan
from secto.sectional import bianchi_residual, centralizer, sectional_residual, spectrum_verify

# J2(0) + J1(1) with a Lorentzian adapted form
spec = JordanSpec((JordanBlock(0.0, 2), JordanBlock(1.0, 1, -1)))
A, g = realize_jordan(spec)
p = MatrixPolynomial([0.0, 1.0, 1.0])  # t + t^2
print("A =\n", A)
print("g =\n", g.matrix, " signature", g.signature)

R = build_rep(A, p, g)
print("R in the wedge basis:\n", np.round(R.matrix, 6))
print("sectional residual", sectional_residual(R, A, p(A)))
print("Bianchi residual  ", bianchi_residual(R, n_random=200, seed=1))
print("self-adjointness  ", R.symmetry_residual())

rep = spectrum_verify(A, p, g, spec)
print("predicted eigenvalues", rep["predicted"])
print("dense spectrum       ", [(round(c["value"], 12), c["multiplicity"]) for c in rep["dense_clusters"]])
print("centralizer dim", centralizer(A, g).dim, " rank of R", np.linalg.matrix_rank(R.matrix, tol=1e-10))
