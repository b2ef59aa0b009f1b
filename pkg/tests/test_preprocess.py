import numpy as np
import pytest
from hypothesis import given, strategies as st

from dodge.data import DataError, Dataset, TextCorpus
from dodge.preprocess import (
    IncompatibleData,
    PreprocKind,
    PreprocSpec,
    apply,
    fit,
    lda_fit_transform,
    minkowski_distances,
    smote,
    stop_words,
    tokenize,
    tokenize_and_stem,
)
from dodge.preprocess.text import build_vocabulary

from conftest import make_blobs

P = PreprocKind
NUMERIC = [P.STANDARD_SCALER, P.MINMAX, P.MAXABS, P.ROBUST, P.KERNEL_CENTERER, P.QUANTILE_TRANSFORMER,
           P.NORMALIZER, P.BINARIZER, P.SMOTE, P.NO_PREPROC]


def ds(X, y=None, loc=None):
    X = np.asarray(X, dtype=float)
    y = [i % 2 == 0 for i in range(len(X))] if y is None else y
    return Dataset("t", tuple(f"f{i}" for i in range(X.shape[1])), X, y, loc)


def test_minmax_stats_and_range():
    d = ds([[0.0], [10.0], [5.0]])
    ft = fit(PreprocSpec(P.MINMAX), d)
    assert ft.stats["center"].tolist() == [0.0] and ft.stats["scale"].tolist() == [10.0]
    out = apply(ft, d).rows
    assert out.min() >= 0 and out.max() <= 1


def test_binarizer_and_normalizer_examples():
    d = ds([[10.0], [60.0]])
    assert apply(fit(PreprocSpec(P.BINARIZER, {"threshold": 50}), d), d).rows.ravel().tolist() == [0, 1]
    r = ds([[3.0, 4.0]])
    assert apply(fit(PreprocSpec(P.NORMALIZER, {"norm": "l2"}), r), r).rows.ravel() == pytest.approx([0.6, 0.8])


@pytest.mark.parametrize("kind,params", [(P.BINARIZER, {"threshold": 0.5}), (P.NORMALIZER, {"norm": "l1"}),
                                         (P.NORMALIZER, {"norm": "max"})])
def test_idempotent_transforms(blobs, kind, params):
    ft = fit(PreprocSpec(kind, params), blobs)
    once = apply(ft, blobs)
    twice = apply(fit(PreprocSpec(kind, params), once), once)
    assert np.allclose(once.rows, twice.rows)


@pytest.mark.parametrize("kind", NUMERIC)
def test_numeric_kinds_pass_labels_and_loc(blobs, kind):
    ft = fit(PreprocSpec(kind), blobs, seed=1)
    other = make_blobs(seed=7)
    out = apply(ft, other)
    assert out.rows.shape == other.rows.shape
    assert np.array_equal(out.labels, other.labels) and np.array_equal(out.loc, other.loc)
    with pytest.raises(ValueError):
        apply(ft, make_blobs(p=4))


def test_fit_only_on_train():
    tr, te = ds([[0.0], [1.0]]), ds([[5.0]])
    assert apply(fit(PreprocSpec(P.MINMAX), tr), te).rows.ravel().tolist() == [5.0]


def test_kernel_centerer_centers_columns(blobs):
    out = apply(fit(PreprocSpec(P.KERNEL_CENTERER), blobs), blobs).rows
    assert np.allclose(out.mean(axis=0), 0)
    K = out @ out.T
    n = len(K)
    H = np.eye(n) - np.ones((n, n)) / n
    raw = blobs.rows @ blobs.rows.T
    assert np.allclose(K, H @ raw @ H)


def test_quantile_uniform_and_normal(blobs):
    u = apply(fit(PreprocSpec(P.QUANTILE_TRANSFORMER, {"n_quantiles": 100}), blobs), blobs).rows
    assert u.min() >= 0 and u.max() <= 1
    nrm = apply(fit(PreprocSpec(P.QUANTILE_TRANSFORMER, {"n_quantiles": 100, "output_distribution": "normal"}),
                    blobs), blobs).rows
    assert np.all(np.isfinite(nrm)) and abs(np.median(nrm)) < 0.3


def test_robust_uses_quantile_range():
    X = np.arange(101, dtype=float).reshape(-1, 1)
    ft = fit(PreprocSpec(P.ROBUST, {"q_lo": 10, "q_hi": 90}), ds(X))
    assert ft.stats["center"][0] == pytest.approx(50) and ft.stats["scale"][0] == pytest.approx(80)


def test_spec_validation():
    with pytest.raises(ValueError):
        PreprocSpec(P.ROBUST, {"q_lo": 60})
    with pytest.raises(ValueError):
        PreprocSpec(P.SMOTE, {"m": 75})
    with pytest.raises(ValueError):
        PreprocSpec(P.MINMAX, {"bogus": 1})


def test_kind_compatibility(blobs):
    with pytest.raises(IncompatibleData):
        fit(PreprocSpec(P.COUNT_VEC), blobs)
    with pytest.raises(IncompatibleData):
        fit(PreprocSpec(P.MINMAX), TextCorpus("c", ["a b"], [True]))


# SMOTE -------------------------------------------------------------------


def minority(d):
    return d.rows[d.labels]


def test_smote_adds_exactly_m(blobs):
    for m in (50, 100, 200, 400):
        out = smote(blobs, k=5, m=m, r=2.0, seed=0)
        assert int(out.labels.sum()) == int(blobs.labels.sum()) + m
        assert len(out) == len(blobs) + m
        assert np.array_equal(out.rows[: len(blobs)], blobs.rows)
        assert np.array_equal(out.labels[: len(blobs)], blobs.labels)


def test_smote_identical_minority():
    d = ds([[1.0, 2.0], [1.0, 2.0], [5.0, 5.0], [6.0, 6.0], [7.0, 7.0]], [True, True, False, False, False])
    out = smote(d, k=3, m=50, r=2.0, seed=0)
    assert np.all(out.rows[5:] == [1.0, 2.0])


def test_smote_needs_two_minority_rows():
    d = ds([[1.0], [2.0], [3.0]], [True, False, False])
    with pytest.raises(DataError):
        smote(d, 1, 50, 2.0, 0)


def on_segment(p, a, b):
    d = b - a
    if np.allclose(d, 0):
        return np.allclose(p, a)
    t = np.dot(p - a, d) / np.dot(d, d)
    return -1e-12 <= t <= 1 + 1e-12 and np.allclose(a + t * d, p)


@given(st.integers(0, 10**6), st.sampled_from([0.5, 1.0, 2.0, 3.0]))
def test_smote_points_lie_between_neighbours(seed, r):
    rng = np.random.default_rng(seed)
    mino = rng.random((5, 2)) * 10
    majo = rng.random((8, 2)) * 10
    d = ds(np.vstack([mino, majo]), [True] * 5 + [False] * 8)
    out = smote(d, k=2, m=50, r=r, seed=seed)
    # brute-force neighbour oracle, Minkowski-r
    D = np.array([[np.sum(np.abs(a - b) ** r) ** (1 / r) for b in mino] for a in mino])
    np.fill_diagonal(D, np.inf)
    nbrs = {i: set(np.argsort(D[i], kind="stable")[:2]) for i in range(5)}
    for pnt in out.rows[13:]:
        assert any(on_segment(pnt, mino[i], mino[j]) for i in range(5) for j in nbrs[i])


def test_minkowski_distances():
    A = np.array([[0.0, 0.0]])
    B = np.array([[3.0, 4.0]])
    assert minkowski_distances(A, B, 2.0)[0, 0] == pytest.approx(5.0)
    assert minkowski_distances(A, B, 1.0)[0, 0] == pytest.approx(7.0)


def test_smote_fit_returns_oversampled_train(blobs):
    ft = fit(PreprocSpec(P.SMOTE, {"m": 50}), blobs, seed=3)
    assert len(ft.train_output) == len(blobs) + 50
    assert apply(ft, blobs) is blobs or len(apply(ft, blobs)) == len(blobs)


# text ---------------------------------------------------------------------


def test_tokenize_examples():
    assert tokenize("the connection") == ["connect"]
    assert tokenize("") == []
    assert tokenize("Connecting connected") == ["connect", "connect"]
    assert tokenize("connections, connective!") == ["connect", "connect"]


def test_stop_word_list():
    sw = stop_words()
    assert len(sw) == 170
    assert {"the", "and", "of"} <= sw


def text_corpus(docs, labels=None):
    return TextCorpus("c", docs, labels if labels is not None else [i % 2 == 0 for i in range(len(docs))])


def test_tokenize_deterministic_order_preserving():
    c = text_corpus(["zebra apple", "apple zebra"])
    t1, t2 = tokenize_and_stem(c), tokenize_and_stem(c)
    assert t1.tokens == t2.tokens
    assert list(t1.tokens[0]) == ["zebra", "appl"] and list(t1.tokens[1]) == ["appl", "zebra"]


def test_count_vec_min_df():
    toks = tokenize_and_stem(text_corpus(["alpha beta", "alpha gamma"]))
    assert set(build_vocabulary(toks, min_df=2)) == {"alpha"}
    with pytest.raises(DataError):
        build_vocabulary(toks, min_df=3)


def test_hashing_dimension():
    c = text_corpus(["crash in parser", "minor typo", "segfault crash"])
    ft = fit(PreprocSpec(P.HASHING_VEC, {"n_features": 1000}), c)
    assert ft.train_output.n_features == 1000
    assert np.all(ft.train_output.rows >= 0)


def test_tfidf_unit_rows():
    c = text_corpus(["crash in parser", "minor typo", "segfault crash", "the of"])
    ft = fit(PreprocSpec(P.TFIDF_VEC, {"norm": "l2"}), c)
    norms = np.linalg.norm(ft.train_output.rows, axis=1)
    assert np.allclose(norms[:3], 1.0) and norms[3] == 0.0
    assert np.all(ft.train_output.rows >= 0)
    out = apply(ft, text_corpus(["unseen words only"]))
    assert out.n_features == ft.train_output.n_features


def lda_corpus():
    docs = ["apple banana cherry " * 5, "engine piston turbine " * 5]
    return text_corpus(docs)


def test_lda_rows_are_distributions():
    out = lda_fit_transform(lda_corpus(), n_topics=10, doc_topic_prior=0.1, topic_word_prior=0.01,
                            iterations=50, seed=0)
    assert out.n_features == 10
    assert np.allclose(out.rows.sum(axis=1), 1.0, atol=1e-9)
    assert np.all(out.rows >= 0)


def test_lda_separates_disjoint_documents():
    out = lda_fit_transform(lda_corpus(), n_topics=2, doc_topic_prior=0.1, topic_word_prior=0.01,
                            iterations=300, seed=1)
    assert out.rows[0].argmax() != out.rows[1].argmax()


def test_lda_spec_through_fit():
    c = text_corpus(["apple banana cherry"] * 3 + ["engine piston turbine"] * 3)
    ft = fit(PreprocSpec(P.LDA, {"n_components": 10, "iterations": 30}), c, seed=0)
    assert ft.train_output.n_features == 10
    online = fit(PreprocSpec(P.LDA, {"n_components": 10, "method": "online", "batch_size": 150}), c, seed=0)
    assert np.allclose(online.train_output.rows.sum(axis=1), 1.0)
