# Looking for monochromatic copies
#
# Color a finite space and ask whether some color class (or its eps-neighbourhood)
# still contains an isometric copy of a small target.

import itertools
from fractions import Fraction as F

from urysohn.builder import build_approx
from urysohn.core_metric import FiniteMetricSpace, is_metric
from urysohn.ramsey import experiment, find_mono_copy, lambda_curve, parity_coloring, success_rates

thirds = [F(1, 3), F(2, 3), F(1)]
X = build_approx(thirds, rounds=2, budget=2).space

targets = []
for a, b, c in itertools.combinations_with_replacement(thirds, 3):
    T = FiniteMetricSpace([[0, a, b], [a, 0, c], [b, c, 0]])
    if is_metric(T):
        targets.append(T)

print(find_mono_copy(X, parity_coloring(X.n), targets[0]))

rows = experiment(X, targets, eps=0, k=2, seeds=range(20))
for (kind, tid), rate in success_rates(rows).items():
    if rate < 1:
        print(kind, tid, rate)

# On a finite space the chain span drops to 0 once eps is below the
# smallest distance; the curve above that is the informative part.
print([(str(e), str(v)) for e, v in lambda_curve(X, 0, [F(1), F(2, 3), F(1, 3), F(1, 6)])])
