# Similarity classes of small distance sets
#
# Two sets of positive numbers of the same size are similar when every
# comparison s_i <= s_j + s_k comes out the same way. Only the pattern of
# these comparisons matters for which triangles can occur.

from urysohn.distance_sets import classify, four_values_counterexample, pattern_of, similar

print(similar([1, 2], [2, 4]), similar([1, 2], [1, 3]))

# The pattern is a cube of booleans. For {1, 3, 7} the entry for
# 7 <= 3 + 3 is the one that fails.
p = pattern_of([1, 3, 7])
print(p.bits[2][1][1])

# Enumerating every class of size 3: each candidate pattern is kept only if
# an exact linear feasibility check finds integers realizing it.
report = classify(3)
for c in report.classes:
    print(c.representative, "four-values" if c.four_values else "fails four-values")

# The one class that fails comes with a witness quadruple.
print(four_values_counterexample([1, 2, 4]))

# Size 4 is still quick.
rep4 = classify(4)
print(rep4.total, "classes,", rep4.four_values_count, "satisfy the condition")
