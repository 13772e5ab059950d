import numpy as np
import pytest

from ccs.datasets import (
    load_ebm_nlp,
    load_evidence_inference,
    pio_checksum,
    relevance_checksum,
)
from ccs.errors import MissingFiles, SchemaMismatch
from ccs.pio import PioLabel

from synthetic import make_ebm_nlp, make_evidence_inference


@pytest.fixture(scope="module")
def ei_root(tmp_path_factory):
    return make_evidence_inference(tmp_path_factory.mktemp("ei"), n_articles=30, seed=7)


@pytest.fixture(scope="module")
def ebm_root(tmp_path_factory):
    return make_ebm_nlp(tmp_path_factory.mktemp("ebm"), n_crowd=12, n_expert=3, seed=11)


class TestEvidenceInferenceLoader:
    def test_counts_and_split(self, ei_root):
        corpus = load_evidence_inference(ei_root)
        assert corpus.n_articles == 30
        assert len(corpus.test.articles) == 6
        assert len(corpus.train.articles) == 24

    def test_split_hygiene(self, ei_root):
        corpus = load_evidence_inference(ei_root)
        train_ids = {a.article_id for a in corpus.train.articles}
        test_ids = {a.article_id for a in corpus.test.articles}
        assert not train_ids & test_ids

    def test_every_article_has_relevant_and_irrelevant(self, ei_root):
        corpus = load_evidence_inference(ei_root)
        for article in corpus.train.articles + corpus.test.articles:
            assert any(article.labels)
            assert not all(article.labels)

    def test_labels_align_with_generated_spans(self, ei_root):
        # generator marks a contiguous block: labels must be contiguous too
        corpus = load_evidence_inference(ei_root)
        for article in corpus.train.articles:
            idx = [i for i, l in enumerate(article.labels) if l]
            assert idx == list(range(idx[0], idx[-1] + 1))

    def test_article_without_evidence_all_irrelevant(self, tmp_path):
        root = make_evidence_inference(tmp_path, n_articles=4, seed=1)
        # strip all annotations for one article
        csv_path = root / "annotations_merged.csv"
        lines = csv_path.read_text().splitlines()
        keep = [l for l in lines if not l.split(",")[2].startswith("9000001")]
        csv_path.write_text("\n".join(keep) + "\n")
        corpus = load_evidence_inference(root)
        target = [
            a
            for a in corpus.train.articles + corpus.test.articles
            if a.article_id == "9000001"
        ]
        assert target and not any(target[0].labels)

    def test_missing_column_named(self, tmp_path):
        root = make_evidence_inference(tmp_path, n_articles=3, seed=2)
        csv_path = root / "annotations_merged.csv"
        content = csv_path.read_text().replace("Evidence End", "Evidence Stop")
        csv_path.write_text(content)
        with pytest.raises(SchemaMismatch, match="Evidence End"):
            load_evidence_inference(root)

    def test_missing_id_list(self, tmp_path):
        with pytest.raises(MissingFiles):
            load_evidence_inference(tmp_path)

    def test_missing_article_text(self, tmp_path):
        root = make_evidence_inference(tmp_path, n_articles=3, seed=3)
        (root / "txt_files" / "PMC9000000.txt").unlink()
        with pytest.raises(MissingFiles, match="PMC9000000"):
            load_evidence_inference(root)

    def test_overlap_fraction_parameter_tightens(self, ei_root):
        loose = load_evidence_inference(ei_root, min_overlap_fraction=0.0)
        strict = load_evidence_inference(ei_root, min_overlap_fraction=0.99)
        n_loose = sum(sum(a.labels) for a in loose.train.articles)
        n_strict = sum(sum(a.labels) for a in strict.train.articles)
        assert n_strict <= n_loose

    def test_checksum_stable(self, ei_root):
        a = load_evidence_inference(ei_root)
        b = load_evidence_inference(ei_root)
        assert relevance_checksum(a.train) == relevance_checksum(b.train)


class TestEbmNlpLoader:
    def test_partition_counts(self, ebm_root):
        corpus = load_ebm_nlp(ebm_root)
        assert corpus.n_abstracts == 15
        assert len(corpus.expert_test.abstracts) == 3
        assert corpus.n_crowd == 12
        expected_val = int(round(0.1 * 12))
        assert len(corpus.crowd_val.abstracts) == expected_val

    def test_expert_never_in_crowd(self, ebm_root):
        corpus = load_ebm_nlp(ebm_root)
        expert = {a.abstract_id for a in corpus.expert_test.abstracts}
        crowd = {
            a.abstract_id
            for a in corpus.crowd_train.abstracts + corpus.crowd_val.abstracts
        }
        assert not expert & crowd

    def test_seeded_split_reproducible(self, ebm_root):
        a = load_ebm_nlp(ebm_root, seed=5)
        b = load_ebm_nlp(ebm_root, seed=5)
        assert [x.abstract_id for x in a.crowd_val.abstracts] == [
            x.abstract_id for x in b.crowd_val.abstracts
        ]

    def test_labels_collapsed_to_four(self, ebm_root):
        corpus = load_ebm_nlp(ebm_root)
        seen = set()
        for abstract in corpus.crowd_train.abstracts:
            assert len(abstract.tokens) == len(abstract.labels)
            seen.update(abstract.labels)
        assert seen <= {PioLabel.PATIENT, PioLabel.INTERVENTION, PioLabel.OUTCOME, PioLabel.NONE}
        assert PioLabel.PATIENT in seen and PioLabel.OUTCOME in seen

    def test_all_none_abstract_retained(self, tmp_path):
        root = make_ebm_nlp(tmp_path, n_crowd=3, n_expert=1, seed=4)
        pmid = "8100000"
        base = root / "annotations" / "aggregated" / "starting_spans"
        tokens = (root / "documents" / f"{pmid}.tokens").read_text().split()
        for entity in ("participants", "interventions", "outcomes"):
            (base / entity / "train" / f"{pmid}.AGGREGATED.ann").write_text(
                ",".join("0" for _ in tokens)
            )
        corpus = load_ebm_nlp(root)
        match = [
            a
            for a in corpus.crowd_train.abstracts + corpus.crowd_val.abstracts
            if a.abstract_id == pmid
        ]
        assert match and set(match[0].labels) == {PioLabel.NONE}

    def test_length_mismatch_names_file(self, tmp_path):
        root = make_ebm_nlp(tmp_path, n_crowd=2, n_expert=1, seed=5)
        base = root / "annotations" / "aggregated" / "starting_spans"
        path = base / "participants" / "train" / "8100000.AGGREGATED.ann"
        path.write_text("1,0,1")
        with pytest.raises(SchemaMismatch, match="8100000"):
            load_ebm_nlp(root)

    def test_missing_layout(self, tmp_path):
        with pytest.raises(MissingFiles):
            load_ebm_nlp(tmp_path)

    def test_checksum_stable(self, ebm_root):
        a = load_ebm_nlp(ebm_root)
        b = load_ebm_nlp(ebm_root)
        assert pio_checksum(a.expert_test) == pio_checksum(b.expert_test)
