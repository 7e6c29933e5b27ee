"""
Fairness by imputation is not fairness
======================================

Suppose Bob's IQ is only known to lie in [140, 160] and Eve's grade in
[5, 7]. Choosing the values that make the selected pair fairest does produce
a balanced pair, but it gets there by reading the uncertainty against the men
and in favour of the women. The audit makes that visible.
"""

from fractions import Fraction

from noregret import FairnessSpec, ObjectiveSpec, student_intervals
from noregret.uncertain import fairest_completion

records = student_intervals()
obj = ObjectiveSpec.mixture(records.schema, "IQ", "grade")

result = fairest_completion(records, obj, Fraction(1, 2), 2, FairnessSpec.mismatch("m", "f"))
print(result.warning)
print("\nselected:", result.selection.labels, "mismatch", result.fairness)
print("Bob's IQ imputed as", result.completion.value("B", "IQ"))
print("Eve's grade imputed as", result.completion.value("E", "grade"))

# Position 0 is the low end of an interval, 1 the high end.
for group, mean in result.audit.group_means:
    print(f"group {group}: mean position {mean}")
print("asymmetry:", result.audit.asymmetry)
