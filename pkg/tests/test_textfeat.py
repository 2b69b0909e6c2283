import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from feedfilter.textfeat import (
    EMPTY_VECTOR,
    FeatureConfig,
    SparseVector,
    build_vocabulary,
    tokenize,
    vectorize,
)


class TestTokenize:
    def test_empty(self):
        assert tokenize("") == []

    def test_urls_mentions_and_case(self):
        assert tokenize("RT @bob http://t.co/x This is BAD!!") == ["rt", "this", "is", "bad"]

    def test_hashtag_keeps_word(self):
        assert tokenize("#hate u 2") == ["hate", "u", "2"]

    def test_www_prefix_removed(self):
        assert tokenize("see www.example.com/a?b=c now") == ["see", "now"]

    def test_underscore_splits(self):
        assert tokenize("snake_case") == ["snake", "case"]

    def test_stopword_switch(self):
        assert tokenize("this is the plan", stopwords=True) == ["plan"]

    def test_stem_switch(self):
        assert tokenize("troll trolls trolling", stem=True) == ["troll", "troll", "troll"]

    @given(st.text(max_size=80))
    def test_idempotent_on_joined_output(self, text):
        tokens = tokenize(text)
        assert tokenize(" ".join(tokens)) == tokens


class TestSparseVector:
    def test_indices_strictly_increasing(self):
        with pytest.raises(ValueError):
            SparseVector(indices=(2, 1), values=(1.0, 1.0))

    def test_zero_weight_rejected(self):
        with pytest.raises(ValueError):
            SparseVector(indices=(0,), values=(0.0,))

    def test_from_mapping_drops_zeros_and_sorts(self):
        v = SparseVector.from_mapping({3: 1.0, 1: 2.0, 2: 0.0})
        assert v.indices == (1, 3) and v.values == (2.0, 1.0)


class TestVocabulary:
    def test_empty(self):
        vocab = build_vocabulary([])
        assert len(vocab) == 0 and vocab.total_documents == 0

    def test_document_frequencies(self):
        vocab = build_vocabulary([["a", "b"], ["b", "c"]])
        assert len(vocab) == 3
        assert vocab.doc_freq[vocab.index["a"]] == 1
        assert vocab.doc_freq[vocab.index["b"]] == 2
        assert vocab.doc_freq[vocab.index["c"]] == 1

    def test_min_df_prunes(self):
        vocab = build_vocabulary([["a", "b"], ["b", "c"]], min_df=2)
        assert list(vocab.index) == ["b"]

    def test_first_seen_order(self):
        vocab = build_vocabulary([["z", "a"], ["a", "m"]])
        assert list(vocab.index) == ["z", "a", "m"]

    @given(
        st.lists(
            st.lists(st.sampled_from("abcdef"), max_size=6), max_size=10
        )
    )
    def test_rebuild_is_identical(self, docs):
        v1 = build_vocabulary(docs)
        v2 = build_vocabulary(docs)
        assert v1 == v2


class TestVectorize:
    def test_out_of_vocabulary_dropped(self):
        vocab = build_vocabulary([["a"]])
        assert vectorize(["x", "y"], vocab, "counts") == EMPTY_VECTOR

    def test_counts_mode(self):
        vocab = build_vocabulary([["a", "b", "c"]])
        v = vectorize(["b", "b", "a"], vocab, "counts")
        assert dict(v.items()) == {vocab.index["a"]: 1.0, vocab.index["b"]: 2.0}

    def test_single_term_tfidf_unit_weight(self):
        vocab = build_vocabulary([["a", "b"], ["b"]])
        v = vectorize(["a"], vocab, "tfidf")
        assert v.indices == (vocab.index["a"],)
        assert v.values == (1.0,)

    def test_unknown_mode_rejected(self):
        vocab = build_vocabulary([["a"]])
        with pytest.raises(ValueError):
            vectorize(["a"], vocab, "binary")

    @given(st.lists(st.sampled_from("abcd"), min_size=1, max_size=20))
    def test_tfidf_l2_norm_one(self, tokens):
        vocab = build_vocabulary([list("abcd"), list("ab")])
        v = vectorize(tokens, vocab, "tfidf")
        if len(v):
            norm = math.sqrt(sum(w * w for w in v.values))
            assert abs(norm - 1.0) <= 1e-12

    @given(st.lists(st.sampled_from("abcd"), max_size=20))
    def test_counts_are_positive_integers(self, tokens):
        vocab = build_vocabulary([list("abcd")])
        v = vectorize(tokens, vocab, "counts")
        assert all(w > 0 and w == int(w) for w in v.values)


def test_feature_config_validation():
    with pytest.raises(ValueError):
        FeatureConfig(mode="bow")
    with pytest.raises(ValueError):
        FeatureConfig(min_df=0)
