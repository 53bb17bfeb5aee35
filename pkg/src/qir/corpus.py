"""Corpus ingestion and the term-space constructions.

Turns raw documents into the information-need vector space: one
dimension per vocabulary term, one unit vector per paragraph, document
relevance observables as paragraph spans, query observables via
pseudo-relevance feedback or term/paragraph union, and the start-of-
session density operator.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    EmptyDocumentError,
    EmptyVectorError,
    IngestError,
    ParameterError,
    UnanchorableQueryError,
    UnknownDocumentError,
)
from .qprob import (
    DEFAULT_TOLERANCES,
    Ensemble,
    StateVector,
    Subspace,
    Tolerances,
    span_rows,
)

INDEX_VERSION = "qir-index-v1"

_TOKEN_RE = re.compile(r"[a-z0-9]+")

DEFAULT_STOPWORDS = frozenset(
    """
    a about after all also an and any are as at be because been before but by
    can could did do does during each few for from had has have he her him his
    how i if in into is it its just me more most my no nor not now of off on
    once only or other our out over own s she so some such t than that the
    their them then there these they this those through to too under until up
    very was we were what when where which while who why will with would you
    your
    """.split()
)


def tokenize(text: str, stopwords: frozenset[str] = DEFAULT_STOPWORDS) -> list[str]:
    """Lowercase alphanumeric word tokens with stopwords removed."""
    return [t for t in _TOKEN_RE.findall(text.lower()) if t not in stopwords]


@dataclass(frozen=True)
class IngestConfig:
    min_df: int = 1
    stopwords: frozenset[str] = DEFAULT_STOPWORDS

    def __post_init__(self):
        if self.min_df < 1:
            raise ParameterError(f"min_df must be >= 1, got {self.min_df!r}")


@dataclass(frozen=True)
class Paragraph:
    para_id: str
    text: str
    term_counts: Mapping[str, int]


@dataclass(frozen=True)
class Document:
    doc_id: str
    title: str
    paragraphs: tuple[Paragraph, ...]


@dataclass(frozen=True)
class IngestReport:
    documents: int
    paragraphs: int
    excluded_paragraphs: tuple[str, ...]
    vocabulary_size: int

    def to_dict(self) -> dict:
        return {
            "documents": self.documents,
            "paragraphs": self.paragraphs,
            "excluded_paragraph_count": len(self.excluded_paragraphs),
            "excluded_paragraphs": list(self.excluded_paragraphs),
            "vocabulary_size": self.vocabulary_size,
        }


class Corpus:
    """Immutable ingested corpus plus the derived vector-space structures.

    Paragraph vectors are precomputed and stacked row-wise; document
    observables are built lazily and cached per orthonormalization
    tolerance.
    """

    def __init__(
        self,
        documents: Sequence[Document],
        vocabulary: Sequence[str],
        term_weights: np.ndarray,
        report: IngestReport,
        config: IngestConfig,
    ):
        if len(set(vocabulary)) != len(vocabulary):
            raise IngestError("vocabulary contains duplicate terms")
        self.documents = tuple(documents)
        self.vocabulary = tuple(vocabulary)
        self.term_weights = np.asarray(term_weights, dtype=np.float64)
        self.term_weights.setflags(write=False)
        self.report = report
        self.config = config

        self.term_index = {t: i for i, t in enumerate(self.vocabulary)}
        self.doc_index = {d.doc_id: i for i, d in enumerate(self.documents)}
        if len(self.doc_index) != len(self.documents):
            raise IngestError("duplicate doc_id in corpus")

        rows: list[np.ndarray] = []
        self.para_rows: list[tuple[str, str]] = []  # (doc_id, para_id) per row
        self._doc_rows: dict[str, list[int]] = {d.doc_id: [] for d in self.documents}
        for doc in self.documents:
            for para in doc.paragraphs:
                vec = _tfidf_unit(para.term_counts, self)
                if vec is None:
                    continue
                self._doc_rows[doc.doc_id].append(len(rows))
                self.para_rows.append((doc.doc_id, para.para_id))
                rows.append(vec)
        if rows:
            matrix = np.vstack(rows).astype(np.complex128)
        else:
            matrix = np.zeros((0, self.dim), dtype=np.complex128)
        self.paragraph_matrix = np.ascontiguousarray(matrix)
        self.paragraph_matrix.setflags(write=False)

        means = np.zeros((len(self.documents), self.dim))
        for i, doc in enumerate(self.documents):
            idx = self._doc_rows[doc.doc_id]
            if idx:
                means[i] = self.paragraph_matrix[idx].real.mean(axis=0)
        self._doc_means = means

        self._observable_cache: dict[tuple[str, float], Subspace] = {}

    @property
    def dim(self) -> int:
        return len(self.vocabulary)

    def tokenize(self, text: str) -> list[str]:
        return tokenize(text, self.config.stopwords)

    def document(self, doc_id: str) -> Document:
        idx = self.doc_index.get(doc_id)
        if idx is None:
            raise UnknownDocumentError(f"unknown doc_id {doc_id!r}")
        return self.documents[idx]

    def usable_rows(self, doc_id: str) -> list[int]:
        """Row indices into paragraph_matrix for a document's usable paragraphs."""
        if doc_id not in self._doc_rows:
            raise UnknownDocumentError(f"unknown doc_id {doc_id!r}")
        return list(self._doc_rows[doc_id])


def _tfidf_unit(term_counts: Mapping[str, int], corpus: Corpus) -> np.ndarray | None:
    """Unit-norm tf-idf vector over the corpus vocabulary, or None if empty."""
    vec = np.zeros(corpus.dim)
    hit = False
    for term, count in term_counts.items():
        idx = corpus.term_index.get(term)
        if idx is not None:
            vec[idx] = count * corpus.term_weights[idx]
            hit = True
    if not hit:
        return None
    return vec / np.linalg.norm(vec)


def ingest(
    raw_documents: Sequence[tuple[str, str, Sequence[str]]],
    config: IngestConfig = IngestConfig(),
) -> Corpus:
    """Tokenize, build the vocabulary, and precompute paragraph vectors.

    The vocabulary keeps every non-stopword term whose document
    frequency is >= min_df, in lexicographic order; idf weights are
    ln(1 + N/df). Paragraphs with no in-vocabulary term are excluded
    from vector construction and listed in the report.
    """
    if not raw_documents:
        raise IngestError("empty corpus input")

    documents: list[Document] = []
    doc_terms: list[set[str]] = []
    for doc_id, title, para_texts in raw_documents:
        if not para_texts:
            raise IngestError(f"document {doc_id!r} has no paragraphs")
        paragraphs = []
        terms: set[str] = set()
        for j, text in enumerate(para_texts):
            tokens = tokenize(text, config.stopwords)
            counts: dict[str, int] = {}
            for t in tokens:
                counts[t] = counts.get(t, 0) + 1
            terms.update(counts)
            paragraphs.append(Paragraph(f"{doc_id}:p{j}", text, counts))
        documents.append(Document(doc_id, title, tuple(paragraphs)))
        doc_terms.append(terms)

    df: dict[str, int] = {}
    for terms in doc_terms:
        for t in terms:
            df[t] = df.get(t, 0) + 1
    vocabulary = sorted(t for t, f in df.items() if f >= config.min_df)
    if not vocabulary:
        raise IngestError("no term survives stopword and min_df filtering")

    n_docs = len(documents)
    idf = np.array([math.log(1.0 + n_docs / df[t]) for t in vocabulary])

    total_paras = sum(len(d.paragraphs) for d in documents)
    vocab_set = set(vocabulary)
    excluded = tuple(
        p.para_id
        for d in documents
        for p in d.paragraphs
        if not (set(p.term_counts) & vocab_set)
    )
    if len(excluded) == total_paras:
        report = IngestReport(n_docs, total_paras, excluded, len(vocabulary))
        raise IngestError(
            "no usable paragraph in corpus; report: "
            + json.dumps(report.to_dict(), sort_keys=True)
        )
    report = IngestReport(n_docs, total_paras, excluded, len(vocabulary))
    return Corpus(documents, vocabulary, idf, report, config)


def paragraph_vector(p: Paragraph, c: Corpus) -> StateVector:
    """The paragraph's pure information need: unit tf-idf direction."""
    vec = _tfidf_unit(p.term_counts, c)
    if vec is None:
        raise EmptyVectorError(f"paragraph {p.para_id!r} has no in-vocabulary term")
    return StateVector(vec.astype(np.complex128))


def document_observable(
    d: Document, c: Corpus, tol: Tolerances = DEFAULT_TOLERANCES
) -> Subspace:
    """Relevance observable of a document: span of its paragraph needs."""
    cached = None
    if d.doc_id in c.doc_index and c.documents[c.doc_index[d.doc_id]] is d:
        cached = c._observable_cache.get((d.doc_id, tol.ortho_eps))
        if cached is not None:
            return cached
        rows = c.usable_rows(d.doc_id)
        if not rows:
            raise EmptyDocumentError(f"document {d.doc_id!r} has no usable paragraph")
        obs = span_rows(c.paragraph_matrix[rows], tol)
        c._observable_cache[(d.doc_id, tol.ortho_eps)] = obs
        return obs

    vectors = []
    for p in d.paragraphs:
        vec = _tfidf_unit(p.term_counts, c)
        if vec is not None:
            vectors.append(vec)
    if not vectors:
        raise EmptyDocumentError(f"document {d.doc_id!r} has no usable paragraph")
    return span_rows(np.vstack(vectors).astype(np.complex128), tol)


def _query_weights(query_terms: Sequence[str], c: Corpus) -> np.ndarray | None:
    counts: dict[str, int] = {}
    for t in query_terms:
        counts[t] = counts.get(t, 0) + 1
    return _tfidf_unit(counts, c)


def baseline_rank(query_terms: Sequence[str], c: Corpus, k: int) -> list[str]:
    """Standard retrieval baseline: cosine between the query tf-idf vector
    and each document's mean paragraph vector. Ties break by doc_id; only
    documents with positive similarity are returned."""
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k!r}")
    q = _query_weights(query_terms, c)
    if q is None:
        return []
    scored = []
    for i, doc in enumerate(c.documents):
        mean = c._doc_means[i]
        nrm = np.linalg.norm(mean)
        if nrm == 0.0:
            continue
        sim = float(np.dot(q, mean) / nrm)
        if sim > 0.0:
            scored.append((-sim, doc.doc_id))
    scored.sort()
    return [doc_id for _, doc_id in scored[:k]]


def query_observable_prf(
    query_terms: Sequence[str],
    c: Corpus,
    k: int,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Subspace:
    """Query observable via pseudo-relevance feedback: the join of the
    relevance observables of the top-k baseline documents."""
    top = baseline_rank(query_terms, c, k)
    if not top:
        raise UnanchorableQueryError(
            f"no baseline document matches query terms {list(query_terms)!r}"
        )
    bases = [
        document_observable(c.documents[c.doc_index[doc_id]], c, tol).basis
        for doc_id in top
    ]
    return span_rows(np.vstack(bases), tol)


def query_observable_terms(
    query_terms: Sequence[str],
    c: Corpus,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Subspace:
    """Query observable without a baseline ranker: the span of every
    paragraph need in which at least one query term occurs."""
    wanted = {t for t in query_terms if t in c.term_index}
    if not wanted:
        raise UnanchorableQueryError(
            f"no query term of {list(query_terms)!r} is in the vocabulary"
        )
    para_by_id = {p.para_id: p for d in c.documents for p in d.paragraphs}
    rows = [
        idx
        for idx, (_, para_id) in enumerate(c.para_rows)
        if set(para_by_id[para_id].term_counts) & wanted
    ]
    if not rows:
        raise UnanchorableQueryError(
            f"query terms {list(query_terms)!r} occur in no usable paragraph"
        )
    return span_rows(c.paragraph_matrix[rows], tol)


def initial_density(
    c: Corpus, doc_priors: Mapping[str, float] | None = None
) -> Ensemble:
    """Start-of-session belief: a mixture over every paragraph need.

    Uniform over paragraphs by default. When per-document priors are
    supplied (the popularity hook), each document's prior is split
    evenly across its usable paragraphs; missing documents get zero.
    """
    n = c.paragraph_matrix.shape[0]
    if n == 0:
        raise IngestError("corpus has no usable paragraph")
    if doc_priors is None:
        weights = np.full(n, 1.0 / n)
    else:
        weights = np.zeros(n)
        for idx, (doc_id, _) in enumerate(c.para_rows):
            prior = float(doc_priors.get(doc_id, 0.0))
            if prior < 0.0:
                raise ParameterError(f"negative prior for doc {doc_id!r}")
            if prior > 0.0:
                weights[idx] = prior / len(c.usable_rows(doc_id))
        total = weights.sum()
        if total <= 0.0:
            raise IngestError("document priors assign zero mass to every paragraph")
        weights = weights / total
        keep = weights > 0.0
        return Ensemble(weights[keep], c.paragraph_matrix[keep])
    return Ensemble(weights, c.paragraph_matrix)


# -- corpus I/O -------------------------------------------------------------


def read_jsonl(path: str) -> list[tuple[str, str, list[str]]]:
    """Parse the corpus interchange format: one JSON document per line."""
    raw: list[tuple[str, str, list[str]]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                doc_id = obj["doc_id"]
                title = obj.get("title", "")
                paragraphs = obj["paragraphs"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise IngestError(f"line {lineno}: malformed document ({exc})") from exc
            if not isinstance(paragraphs, list) or not all(
                isinstance(p, str) for p in paragraphs
            ):
                raise IngestError(f"line {lineno}: 'paragraphs' must be a list of strings")
            raw.append((str(doc_id), str(title), paragraphs))
    if not raw:
        raise IngestError("corpus file contains no documents")
    return raw


def _sparse_vector(row: np.ndarray, c: Corpus) -> dict[str, float]:
    out = {}
    for idx in np.nonzero(row.real)[0]:
        out[c.vocabulary[int(idx)]] = float(row[idx].real)
    return out


def save_index(c: Corpus, path: str) -> None:
    """Write the index file: vocabulary, idf weights, documents, and the
    sparse unit paragraph vectors. Output bytes are deterministic."""
    para_vectors = {}
    for idx, (_, para_id) in enumerate(c.para_rows):
        para_vectors[para_id] = _sparse_vector(c.paragraph_matrix[idx], c)
    payload = {
        "version": INDEX_VERSION,
        "config": {
            "min_df": c.config.min_df,
            "stopwords": sorted(c.config.stopwords),
        },
        "vocabulary": list(c.vocabulary),
        "idf": [float(w) for w in c.term_weights],
        "documents": [
            {
                "doc_id": d.doc_id,
                "title": d.title,
                "paragraphs": [
                    {
                        "para_id": p.para_id,
                        "text": p.text,
                        "term_counts": dict(sorted(p.term_counts.items())),
                    }
                    for p in d.paragraphs
                ],
            }
            for d in c.documents
        ],
        "paragraph_vectors": para_vectors,
        "report": c.report.to_dict(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")


def load_index(path: str) -> Corpus:
    """Rebuild a corpus from an index file, verifying the version tag and
    that the stored sparse vectors match the recomputed ones."""
    with open(path, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    version = payload.get("version")
    if version != INDEX_VERSION:
        raise IngestError(f"unsupported index version {version!r}")

    config = IngestConfig(
        min_df=int(payload["config"]["min_df"]),
        stopwords=frozenset(payload["config"]["stopwords"]),
    )
    documents = tuple(
        Document(
            doc["doc_id"],
            doc.get("title", ""),
            tuple(
                Paragraph(p["para_id"], p["text"], {k: int(v) for k, v in p["term_counts"].items()})
                for p in doc["paragraphs"]
            ),
        )
        for doc in payload["documents"]
    )
    report = IngestReport(
        documents=int(payload["report"]["documents"]),
        paragraphs=int(payload["report"]["paragraphs"]),
        excluded_paragraphs=tuple(payload["report"]["excluded_paragraphs"]),
        vocabulary_size=int(payload["report"]["vocabulary_size"]),
    )
    corpus = Corpus(
        documents,
        payload["vocabulary"],
        np.array(payload["idf"], dtype=np.float64),
        report,
        config,
    )
    stored = payload["paragraph_vectors"]
    for idx, (_, para_id) in enumerate(corpus.para_rows):
        entry = stored.get(para_id)
        if entry is None:
            raise IngestError(f"index is missing the vector for {para_id!r}")
        rebuilt = corpus.paragraph_matrix[idx]
        for term, value in entry.items():
            col = corpus.term_index.get(term)
            if col is None or abs(rebuilt[col].real - value) > 1e-12:
                raise IngestError(
                    f"stored vector for {para_id!r} disagrees with recomputation"
                )
    return corpus
