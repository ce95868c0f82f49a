"""
Two topics from three sentences
================================

Preprocess a three-sentence corpus, fit two topics and read off the
mixture of the sentence that talks about both kittens and kippers.
"""

import numpy as np

from topicmap import lda
from topicmap.corpus import Corpus, RawDocument
from topicmap.preprocess import preprocess_corpus

texts = [
    "I like to eat kippers for breakfast.",
    "I love all animals, but kittens are the cutest.",
    "My kitten eats kippers too.",
]
corpus = Corpus(tuple(RawDocument(str(i), t) for i, t in enumerate(texts)))

# stopwords go, the rest is stemmed
enc = preprocess_corpus(corpus)
for tokens in enc.decode():
    print(tokens)

# sparse priors suit a corpus this small
model, state = lda.train(enc, lda.Hyperparams(2, alpha=0.1, beta=0.01, seed=0))
for k, words in enumerate(lda.top_words(model, 4)):
    print(f"topic {k}:", ", ".join(words))

np.set_printoptions(precision=2, suppress=True)
print("document-topic mixtures:")
print(model.theta)
print("primary topic counts:", lda.primary_topic_counts(model))
