#!/usr/bin/env python3
# Confusion matrices, class-wise F1, macro-F1, and ranked comparison of
# several runs.

from claimcheck import Label, compare_runs, evaluate
from claimcheck.metrics import macro_average, render_report

gold = [Label.TRUE] * 6 + [Label.FALSE] * 8 + [Label.CONFLICTING] * 6
predicted = (
    [Label.TRUE] * 5 + [Label.CONFLICTING]          # one True missed
    + [Label.FALSE] * 7 + [Label.TRUE]              # one False missed
    + [Label.CONFLICTING] * 3 + [Label.FALSE] * 3   # Conflicting is hardest
)

report = evaluate(gold, predicted, metadata={"run": "demo-a", "strategy": "top_k_bm25"})
print(render_report(report))

# Macro-F1 is the unweighted mean of the three class F1 scores.
class_f1 = [m.f1 for m in report.per_class]
print("macro check:", report.macro_f1 == macro_average(class_f1))

# A second, weaker run for comparison.
worse = evaluate(
    gold,
    [Label.FALSE] * 20,
    metadata={"run": "demo-constant-false", "strategy": "full_document"},
)

table = compare_runs([report, worse])
print(table.render())
