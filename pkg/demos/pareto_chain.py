"""
Where the fair pair sits among the Pareto fronts
================================================

Every pair of applicants has a utility vector (sum of IQ/10, sum of grade).
The fairest no-regret pair, the theta-optimal pairs, the convex front, the
Pareto front, the weak front and the full space are nested; each step adds
new pairs.
"""

from fractions import Fraction

from noregret import (
    FairnessSpec,
    ObjectiveSpec,
    ThetaDomain,
    convex_pareto_front,
    front_report,
    pareto_front,
    students,
    utility_points,
)

pop = students()
obj = ObjectiveSpec.mixture(pop.schema, "IQ", "grade")
domain = ThetaDomain.interval(Fraction(1, 3), Fraction(2, 3))

report = front_report(pop, obj, domain, 2, FairnessSpec.mismatch("m", "f"))

for name, added in report.residuals():
    pairs = ", ".join("+".join(s.labels) for s in added)
    print(f"{name:>15}: {pairs}")

print("\nall inclusions strict:", all(report.strict))

# With a single place the convex front can be strictly smaller than the
# Pareto front: Isa is undominated, yet no positive weighting ranks her first.
single = utility_points(pop, obj, 1)
print("\nk=1 Pareto front:", sorted(p.selection.labels[0] for p in pareto_front(single)))
print("k=1 convex front:", sorted(p.selection.labels[0] for p in convex_pareto_front(single)))
