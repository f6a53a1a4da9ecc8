"""Shared fixtures: corpus file writers and seeded random aligned corpora."""

import random
from typing import Callable, List

import pytest

from app.models import AlignedSentencePair, LabelMap, LabelMaps, Vocabulary


def _random_pair(rng: random.Random, max_len: int, src_vocab: int, tgt_vocab: int, link_prob: float):
    source = tuple(rng.randrange(src_vocab) for _ in range(rng.randint(1, max_len)))
    target = tuple(rng.randrange(tgt_vocab) for _ in range(rng.randint(1, max_len)))
    links = frozenset(
        (j, i)
        for j in range(len(source))
        for i in range(len(target))
        if rng.random() < link_prob
    )
    return AlignedSentencePair(source=source, target=target, links=links)


@pytest.fixture
def random_corpus() -> Callable[..., List[AlignedSentencePair]]:
    """Factory: random_corpus(seed, pairs, max_len=6, src_vocab=30, tgt_vocab=30, link_prob=0.3)."""
    def make(seed: int, pairs: int, max_len: int = 6, src_vocab: int = 30, tgt_vocab: int = 30,
             link_prob: float = 0.3) -> List[AlignedSentencePair]:
        rng = random.Random(seed)
        return [_random_pair(rng, max_len, src_vocab, tgt_vocab, link_prob) for _ in range(pairs)]
    return make


@pytest.fixture
def write_lines(tmp_path) -> Callable[[str, List[str]], str]:
    """Factory writing UTF-8 lines under tmp_path; returns the path as a string."""
    def write(name: str, lines: List[str]) -> str:
        path = tmp_path / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
        return str(path)
    return write


@pytest.fixture
def numbered_vocab() -> Callable[[str, int], Vocabulary]:
    def make(prefix: str, size: int) -> Vocabulary:
        vocab = Vocabulary()
        for n in range(size):
            vocab.add(f"{prefix}{n}")
        return vocab
    return make


@pytest.fixture
def identity_maps() -> Callable[[int, int], LabelMaps]:
    def make(src_size: int, tgt_size: int) -> LabelMaps:
        return LabelMaps(LabelMap.identity(src_size), LabelMap.identity(tgt_size))
    return make


@pytest.fixture
def three_word_pair() -> AlignedSentencePair:
    """Three-word phrase pair: f1-e1, f3-e2, f3-e3, f2 unaligned (0-based ids 0..2 per side)."""
    return AlignedSentencePair(
        source=(0, 1, 2),
        target=(0, 1, 2),
        links=frozenset({(0, 0), (2, 1), (2, 2)}),
    )
