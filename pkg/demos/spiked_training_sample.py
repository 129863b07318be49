"""
One heavy symbol defeats the squared-count rule
===============================================

Pin one symbol of the uniform training sample to floor(4n/sqrt(m)) copies.
The squared-count rule then sends a test sample from that same uniform source
to the other side almost every time, so the overall error can only decay as
fast as the spike becomes unlikely.
"""

from sparse_classify import conditional_false_alarm_experiment

for m, n in ((1024, 128), (4096, 512)):
    res = conditional_false_alarm_experiment(m, n, n, epsilon=0.5, trials=5000, seed=3)
    print(f"m={m} n={n} spike={res.k}: misattributed {res.p_cond:.3f} "
          f"[{res.ci_low:.3f}, {res.ci_high:.3f}], other leg {res.p_false_alarm:.3f}")
    print(f"   log P(spike) = {res.log_prob_cn:.1f}, so log P_e >= {res.log_pe_bound:.1f}")
