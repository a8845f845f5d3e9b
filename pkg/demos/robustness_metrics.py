"""
Reading a classifier's confusion matrix
=======================================

Accuracy flatters a classifier on imbalanced data; balanced accuracy and the
Matthews correlation coefficient do not.
"""

from auscult.metrics import ConfusionMatrix, MetricsReport, aggregate_subject, compute_metrics

print(MetricsReport.header())
for cm in (ConfusionMatrix(tp=52, fp=3, tn=21, fn=5),      # a reasonable classifier
           ConfusionMatrix(tp=90, fp=10, tn=0, fn=0)):     # says "abnormal" to everyone
    print(compute_metrics(cm).row())

# Metrics are undefined (NaN) when a denominator is empty, never silently 0.
print(compute_metrics(ConfusionMatrix(tp=10, fp=0, tn=0, fn=0)).to_json())

# A subject's decision averages its 1.5 s fragment scores.
print("fragments [0.9, 0.4, 0.3] ->", aggregate_subject([0.9, 0.4, 0.3]))
