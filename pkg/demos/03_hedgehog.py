# The graph Z: a coarse grid space with branches of a fine metric attached
#
# Points are the coarse space X_m, nodes are index tuples whose induced map is
# an isometry of X_m. Comparable nodes are joined with the fine distance,
# each node hangs at 1/m from its projection, and the path metric (capped at
# 1) has to agree with every label.

import random
from fractions import Fraction as F

from urysohn.core_metric import random_metric_space
from urysohn.hedgehog import branch_of, build_Z, maximal_nodes, verify

fine = random_metric_space(6, [F(k, 12) for k in range(1, 13)], random.Random(1))
G = build_Z(fine, m=2, max_tree_size=3)
print(G.n_points, "points,", len(G.nodes), "tree nodes")

report = verify(G)
print(report.summary())

# A maximal chain in the tree carries an exact copy of the fine metric.
b = branch_of(G, maximal_nodes(G)[-1])
print([G.label(v) for v in b])
print([[str(report.metric(u, v)) for v in b] for u in b])
