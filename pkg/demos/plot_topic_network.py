"""
Topic similarity network and communities
========================================

Fit seven topics, connect topics whose word distributions have cosine
similarity of at least 0.2, group them with Louvain and write the graph
as GEXF for a graph viewer.
"""

import tempfile
from pathlib import Path

from topicmap import community, lda, report, topicnet
from topicmap.synthetic import planted_lda

enc = planted_lda(K=7, V=150, D=400, topic_concentration=0.3, seed=1).corpus
model, _ = lda.train(enc, lda.Hyperparams(7, alpha=0.1, iterations=300, burn_in=100))

sim = topicnet.topic_similarity(model)  # word-based for K <= 10
graph = topicnet.build_graph(sim, threshold=0.2)
print(f"{sim.mode.value}: {len(graph.edges)} edges")
for i, j, w in graph.edges:
    print(f"  {i} -- {j}  {w:.3f}")

if graph.edges:
    part = community.louvain(graph, seed=0)
    print("communities:", part.communities(), f"Q={part.modularity:.3f}")
    if graph.num_nodes <= community.MAX_EXACT_NODES:
        best = community.exact_best_partition(graph)
        print(f"best possible Q={best.modularity:.3f}")
else:
    part = None

out = Path(tempfile.mkdtemp()) / "topics.gexf"
report.export_graph(graph, out, part)
print("wrote", out)
