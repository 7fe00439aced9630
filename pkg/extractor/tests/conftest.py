import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer

from capweight.corpus import load_corpus

from corpusgen import SENTENCES, VOCAB, write_corpus


@pytest.fixture(scope="session")
def corpus_path(tmp_path_factory):
    return write_corpus(tmp_path_factory.mktemp("corpus") / "tiny.jsonl", SENTENCES)


@pytest.fixture(scope="session")
def corpus(corpus_path):
    return load_corpus(corpus_path)


@pytest.fixture(scope="session")
def model_dir(tmp_path_factory):
    """A small randomly initialized checkpoint saved to disk."""
    out = tmp_path_factory.mktemp("checkpoint")
    (out / "vocab.txt").write_text("\n".join(VOCAB) + "\n")

    config = BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=32,
        num_hidden_layers=4,
        num_attention_heads=4,
        intermediate_size=64,
        max_position_embeddings=48,
    )
    torch.manual_seed(20240818)
    model = BertModel(config)
    model.save_pretrained(out)
    tokenizer = BertTokenizer(str(out / "vocab.txt"), do_lower_case=True)
    tokenizer.save_pretrained(out)
    return str(out)
