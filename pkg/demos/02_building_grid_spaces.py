# Growing finite pieces of a universal grid-valued space
#
# Start from one point. Every round looks at all subsets of at most `budget`
# points and adds a new point for each admissible distance profile that no
# existing point realizes yet.

from fractions import Fraction as F

from urysohn.builder import build_approx, check_extension, forbidden_triangles, rado_failures
from urysohn.discretize import ceil_metric, collapse_value, fine_order

halves = [F(1, 2), F(1)]
A = build_approx(halves, rounds=6, budget=2)
print(A.n, "points, added per round:", A.added_per_round, "closed at round", A.closed_at)

# Nothing is missing over pairs any more.
print(len(check_extension(A, 2)))

# With distances 1/2 and 1 the space is a graph (1/2 = edge). Every single
# vertex and every pair of vertices is separated the way a random graph would
# separate them.
print(len(rado_failures(A.space, 2)))

# Over thirds the triangle (1/3, 1/3, 1) never shows up.
thirds = [F(1, 3), F(2, 3), F(1)]
B = build_approx(thirds, rounds=2, budget=2)
print(B.n, forbidden_triangles(B.space, [F(1, 3), F(1, 3), F(1)]))

# Rounding distances up to the grid keeps the triangle inequality.
X = ceil_metric(B.space, 2)
print([str(v) for v in sorted(X.distances())])

# The collapse map sends the fine grid onto the coarse one.
m = 2
N = fine_order(m)
print([str(collapse_value(F(k, N), m)) for k in range(N + 1)])
