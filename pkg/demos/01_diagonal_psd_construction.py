"""Build a PSD matrix with a prescribed diagonal whose quadratic image stays
below the identity, using only linear algebra.

Given unit-norm columns v_1..v_n and targets alpha_i in [0,1], we want
X >= 0 with X_ii = alpha_i and V X V^T <= I.  The constructor removes one
column per recursion level, either through a kernel vector (invisible to
V X V^T) or through the inverse Gram matrix (a projection contribution).
"""

import numpy as np

from vecbal import solve_komlos

rng = np.random.default_rng(1)

n = m = 10
V = rng.standard_normal((m, n))
V /= np.linalg.norm(V, axis=0)
alpha = rng.uniform(0.0, 1.0, n)

sol = solve_komlos(V, alpha)

print("targets alpha:     ", np.round(alpha, 3))
print("diagonal of X:     ", np.round(np.diag(sol.X), 3))
print("diag error:         %.2e" % np.max(np.abs(np.diag(sol.X) - alpha)))
print("lambda_min(X):      %.2e" % np.linalg.eigvalsh(sol.X)[0])
print("lambda_max(VXV^T):  %.9f  (must be <= 1)" % sol.eig_max_VXVt)
print("recursion depth:    %d  (one column removed per level)" % sol.depth)

# the factor U with U U^T = X drives the random walk's steps
err = np.linalg.norm(sol.U @ sol.U.T - sol.X)
print("factor residual:    %.2e" % err)

# degenerate corner: duplicated columns route through the kernel branch
V2 = np.column_stack([V[:, 0], V[:, 0]])
sol2 = solve_komlos(V2, np.array([1.0, 1.0]))
print("\nduplicated column pair:")
print(sol2.X)
print("lambda_max(V X V^T) = %.2e (the difference vector cancels)" % sol2.eig_max_VXVt)
