"""
Recovering planted topics
=========================

Draw a corpus from five known topics, fit the sampler and compare the
estimated topics with the planted ones after matching labels.
"""

import matplotlib.pyplot as plt
import numpy as np
from scipy.optimize import linear_sum_assignment

from topicmap import lda
from topicmap.synthetic import planted_lda

planted = planted_lda(K=5, V=100, D=500, doc_length=50, alpha=0.1, seed=0)
enc = planted.corpus
print(f"{enc.num_docs} documents, {enc.total_tokens} tokens")

trace = []
hp = lda.Hyperparams(5, alpha=0.1, beta=0.01, iterations=400, burn_in=100, seed=0)
model, _ = lda.train(enc, hp, callback=lambda s, ll: trace.append((s, ll)),
                     report_every=10)

# total variation between every planted and every fitted topic
tv = 0.5 * np.abs(planted.phi[:, None, :] - model.phi[None, :, :]).sum(axis=2)
rows, cols = linear_sum_assignment(tv)
print("matched TV per topic:", np.round(tv[rows, cols], 3))

fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 3.5))
ax1.plot(*zip(*trace))
ax1.axvline(hp.burn_in, color="grey", linestyle=":")
ax1.set_xlabel("sweep")
ax1.set_ylabel("log-likelihood per token")
ax2.imshow(tv[:, cols], cmap="viridis_r")
ax2.set_xlabel("fitted topic (matched order)")
ax2.set_ylabel("planted topic")
ax2.set_title("total variation")
fig.tight_layout()
plt.show()
