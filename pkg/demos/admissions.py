"""
Admissions without regret
=========================

Six applicants, two places. The committee ranks by a mix of IQ (divided by
10) and grade, but cannot agree on the mixing weight theta beyond "somewhere
between 1/3 and 2/3". Compare a gender quota with picking the fairest
selection that is still optimal for some admissible theta.
"""

from fractions import Fraction

from noregret import (
    FairnessSpec,
    ObjectiveSpec,
    ThetaDomain,
    enumerate_optimal_set,
    fairest_optimal,
    regret,
    score_item,
    students,
)

pop = students()
obj = ObjectiveSpec.mixture(pop.schema, "IQ", "grade")

# Scores at three weights. Everything is exact: 0.35 is 7/20.
for theta in ("1/2", "0.35", "0.2"):
    row = ", ".join(f"{it.label} {float(score_item(it, obj, theta)):g}" for it in pop)
    print(f"theta={theta:>4}: {row}")

# At theta = 1/2 the best pair is two men. A 30% quota for women costs utility.
quota = FairnessSpec(labels=("m", "f"), quota_label="f", quota="0.3")
rep = regret(pop, obj, Fraction(1, 2), 2, quota)
print("\nunconstrained:", [s.labels for s in rep.optimum], "U =", rep.utility)
print("with quota:   ", len(rep.fair_optimum), "tied pairs at U =", rep.fair_utility)
print("regret:", rep.regret)

# Instead, collect every pair that is optimal for some theta in [1/3, 2/3] ...
domain = ThetaDomain.interval(Fraction(1, 3), Fraction(2, 3))
entries = enumerate_optimal_set(pop, obj, domain, 2)
for e in entries:
    lo, hi = e.region
    print(f"\n{e.selection.labels} optimal on [{lo}, {hi}]", end="")

# ... and take the most gender-balanced one. It is optimal at its own theta,
# so nothing is sacrificed there.
best = fairest_optimal(entries, FairnessSpec.mismatch("m", "f"))
print(f"\n\nfairest optimal pair: {best.selection.labels}")
lo, hi = best.region
print(f"mismatch {best.fairness}, optimal for theta in [{lo}, {hi}], e.g. theta = {best.theta}")
