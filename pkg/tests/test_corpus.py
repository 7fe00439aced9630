import json
import random

import pytest

import capweight as cw
from capweight.errors import CorpusError


def write_lines(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))


class TestLoadCorpus:
    def test_single_record(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(p, [{"t": "sw2001", "s": 0, "i": 0, "w": "yeah", "imp": 0.05}])
        corpus = cw.load_corpus(p)
        assert len(corpus) == 1
        (sent,) = corpus
        assert sent.transcript_id == "sw2001"
        assert sent.tokens[0].surface == "yeah"
        assert sent.tokens[0].importance == 0.05

    def test_token_index_gap_rejected(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(
            p,
            [
                {"t": "a", "s": 0, "i": 0, "w": "x"},
                {"t": "a", "s": 0, "i": 2, "w": "y"},
            ],
        )
        with pytest.raises(CorpusError, match="line 2"):
            cw.load_corpus(p)

    def test_importance_out_of_range(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(p, [{"t": "a", "s": 0, "i": 0, "w": "x", "imp": 1.2}])
        with pytest.raises(CorpusError, match="outside"):
            cw.load_corpus(p)

    def test_blank_line_rejected(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"t":"a","s":0,"i":0,"w":"x"}\n\n')
        with pytest.raises(CorpusError, match="blank"):
            cw.load_corpus(p)

    def test_sentence_must_start_at_zero(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(p, [{"t": "a", "s": 0, "i": 1, "w": "x"}])
        with pytest.raises(CorpusError, match="start"):
            cw.load_corpus(p)

    def test_sentence_run_cannot_reappear(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(
            p,
            [
                {"t": "a", "s": 0, "i": 0, "w": "x"},
                {"t": "a", "s": 1, "i": 0, "w": "y"},
                {"t": "a", "s": 0, "i": 1, "w": "z"},
            ],
        )
        with pytest.raises(CorpusError, match="more than one run"):
            cw.load_corpus(p)

    def test_bad_json_reports_line(self, tmp_path):
        p = tmp_path / "c.jsonl"
        p.write_text('{"t":"a","s":0,"i":0,"w":"x"}\nnot json\n')
        with pytest.raises(CorpusError, match="line 2"):
            cw.load_corpus(p)

    def test_bool_importance_rejected(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(p, [{"t": "a", "s": 0, "i": 0, "w": "x", "imp": True}])
        with pytest.raises(CorpusError, match="wrong type"):
            cw.load_corpus(p)

    def test_missing_key_rejected(self, tmp_path):
        p = tmp_path / "c.jsonl"
        write_lines(p, [{"t": "a", "s": 0, "i": 0}])
        with pytest.raises(CorpusError, match="'w'"):
            cw.load_corpus(p)


def test_round_trip(tmp_path, tiny_corpus):
    out = tmp_path / "copy.jsonl"
    cw.save_corpus(tiny_corpus, out)
    assert cw.load_corpus(out) == tiny_corpus


def test_fixture_has_unannotated_tokens(tiny_corpus):
    missing = [t for t in cw.iter_tokens(tiny_corpus) if t.importance is None]
    assert len(missing) == 2


class TestDiscretize:
    def test_interior_value(self):
        assert cw.discretize(0.60) == 4

    @pytest.mark.parametrize(
        "score,label",
        [(0.0, 1), (1.0, 6), (0.1, 2), (0.3, 3), (0.5, 4), (0.7, 5), (0.9, 6), (0.05, 1)],
    )
    def test_boundaries(self, score, label):
        assert cw.discretize(score) == label

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            cw.discretize(-0.01)
        with pytest.raises(ValueError):
            cw.discretize(1.01)

    def test_every_score_falls_in_its_bin(self):
        # left-closed bins; class 6 closed on the right
        rng = random.Random(1)
        bounds = cw.CLASS_LOWER_BOUNDS + (1.0,)
        for _ in range(1000):
            s = rng.random()
            c = cw.discretize(s)
            assert bounds[c - 1] <= s
            assert s < bounds[c] or (c == 6 and s <= 1.0)


class TestSplit:
    def test_deterministic(self, tiny_corpus):
        a = cw.split(tiny_corpus, 42)
        b = cw.split(tiny_corpus, 42)
        assert (a.train, a.dev, a.test) == (b.train, b.dev, b.test)

    def test_different_seed_changes_assignment(self, tiny_corpus):
        a = cw.split(tiny_corpus, 42)
        b = cw.split(tiny_corpus, 43)
        assert (a.train, a.dev, a.test) != (b.train, b.dev, b.test)

    def test_partition(self, tiny_corpus):
        a = cw.split(tiny_corpus, 7)
        n = sum(len(s.tokens) for s in tiny_corpus)
        assert a.train | a.dev | a.test == set(range(n))
        assert not (a.train & a.dev) and not (a.train & a.test) and not (a.dev & a.test)

    def test_proportions_on_uniform_corpus(self):
        sentences = [
            cw.Sentence(f"t{k:03d}", 0, tuple(cw.Token(f"t{k:03d}", 0, i, "w", 0.5) for i in range(10)))
            for k in range(100)
        ]
        a = cw.split(sentences, 42)
        assert abs(len(a.train) - 800) <= 20
        assert abs(len(a.dev) - 100) <= 20
        assert abs(len(a.test) - 100) <= 20

    def test_proportions_hold_over_seeds(self):
        # 80/10/10 within 2 percentage points for sentence-sized quanta
        rng = random.Random(5)
        sentences = []
        for k in range(150):
            n = rng.randint(3, 9)
            tid = f"t{k:03d}"
            sentences.append(
                cw.Sentence(tid, 0, tuple(cw.Token(tid, 0, i, "w", 0.5) for i in range(n)))
            )
        total = sum(len(s.tokens) for s in sentences)
        for seed in range(20):
            a = cw.split(sentences, seed)
            assert abs(len(a.train) / total - 0.8) <= 0.02
            assert abs(len(a.dev) / total - 0.1) <= 0.02
            assert abs(len(a.test) / total - 0.1) <= 0.02

    def test_sentences_do_not_straddle(self, tiny_corpus):
        a = cw.split(tiny_corpus, 3)
        start = 0
        for sent in tiny_corpus:
            idxs = set(range(start, start + len(sent.tokens)))
            start += len(sent.tokens)
            assert any(idxs <= part for part in (a.train, a.dev, a.test))

    def test_too_few_sentences(self):
        two = [
            cw.Sentence("a", 0, (cw.Token("a", 0, 0, "x", 0.1),)),
            cw.Sentence("a", 1, (cw.Token("a", 1, 0, "y", 0.2),)),
        ]
        with pytest.raises(ValueError, match="fewer than 3"):
            cw.split(two, 42)
