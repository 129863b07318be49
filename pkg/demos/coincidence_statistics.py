"""
Coincidence statistics on tiny samples
======================================

Two training samples, one test sample, and the two count-based rules that
decide which training source produced the test sample.
"""

from sparse_classify import Histogram, JointCounts, classify_f, classify_t, f_statistic, t_statistic

# symbol 0 repeats in X, symbol 1 repeats in Y, the test sample repeats symbol 1
counts = JointCounts(Histogram([2, 0, 1]), Histogram([0, 2, 1]), Histogram([0, 2, 0]))
print("F statistic:", f_statistic(counts), "-> decides", classify_f(counts))
print("T statistic:", t_statistic(counts), "-> decides", classify_t(counts))

# swapping the training samples flips the sign exactly
swapped = counts.swapped()
print("after swap: ", f_statistic(swapped), t_statistic(swapped))

# no coincidence anywhere: T is zero and ties go to Y (label 1)
quiet = JointCounts(Histogram([1, 1, 0, 0, 0, 0]), Histogram([0, 0, 1, 1, 0, 0]), Histogram([0, 0, 0, 0, 1, 1]))
print("no coincidences:", t_statistic(quiet), classify_t(quiet))
