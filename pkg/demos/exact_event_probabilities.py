"""
Exact probabilities of coincidence-free samples
===============================================

Log-space elementary symmetric polynomials give the probability that a
sample never repeats a symbol, even when the alphabet has a million symbols.
"""

import math

from sparse_classify import bi_uniform, prob_all_distinct, prob_all_distinct_uniform, prob_event_A, uniform
from sparse_classify.exact_analysis import lemma_A_rate, prob_C_n

# the birthday problem
print("23 people, all birthdays distinct:", math.exp(prob_all_distinct_uniform(365, 23)))
print("same via the polynomial DP:       ", math.exp(prob_all_distinct(uniform(365), 23)))

# both training samples repeat nothing, against its leading-order rate
for m in (10**5, 10**6):
    exact = prob_event_A(uniform(m), bi_uniform(m, 0.5), 1000)
    print(f"m={m}: log P = {exact:.4f}, leading term {lemma_A_rate(0.5, 1000, m):.4f}")

# one symbol showing up floor(4n/sqrt(m)) times in a uniform training sample
cn = prob_C_n(4096, 512, 512)
print(f"spike of height {cn.k}: log P = {cn.log_prob:.2f} (asymptotic form {cn.asymptote:.2f})")
