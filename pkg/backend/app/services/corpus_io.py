"""
Parallel corpus ingestion
=========================
Reads tokenized parallel text plus Pharaoh "j-i" word alignments, builds one
vocabulary per side and returns sentence pairs in file order.
"""

import logging
import math
import re
from pathlib import Path
from typing import List, NamedTuple, Optional, Sequence, Union

from app.core.errors import CorpusFormatError, EmptyInputError
from app.models import AlignedSentencePair, Vocabulary

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

LINK_PATTERN = re.compile(r"^(\d+)-(\d+)$")


class ParallelCorpus(NamedTuple):
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    pairs: List[AlignedSentencePair]


def read_lines(path: PathLike) -> List[str]:
    """Read a UTF-8 file into lines without their newline."""
    lines = []
    with open(path, "rb") as f:
        for line_number, raw in enumerate(f, start=1):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise CorpusFormatError(f"{path}:{line_number}: invalid UTF-8") from None
            lines.append(line.rstrip("\n").rstrip("\r"))
    return lines


def tokenize_line(line: str) -> List[str]:
    """Split on the ASCII space only; runs of spaces count as one separator."""
    return [token for token in line.split(" ") if token]


def load_sentences(path: PathLike) -> List[List[str]]:
    return [tokenize_line(line) for line in read_lines(path)]


def build_vocabulary(sentences: Sequence[Sequence[str]]) -> Vocabulary:
    vocab = Vocabulary()
    for sentence in sentences:
        for token in sentence:
            vocab.add(token)
    return vocab


def encode_sentences(sentences: Sequence[Sequence[str]], vocab: Vocabulary) -> List[List[int]]:
    return [[vocab.index[token] for token in sentence] for sentence in sentences]


def parse_alignment_line(
    line: str,
    source_len: int,
    target_len: int,
    path: PathLike = "<alignment>",
    line_number: int = 1
) -> frozenset:
    """Parse one Pharaoh line ("0-0 1-2") into a set of (j, i) links."""
    links = set()
    for token in tokenize_line(line):
        match = LINK_PATTERN.match(token)
        if not match:
            raise CorpusFormatError(
                f"{path}:{line_number}: malformed alignment link '{token}' (expected uint-uint)"
            )
        j, i = int(match.group(1)), int(match.group(2))
        if j >= source_len:
            raise CorpusFormatError(
                f"{path}:{line_number}: link '{token}' source index {j} out of range "
                f"(source length {source_len})"
            )
        if i >= target_len:
            raise CorpusFormatError(
                f"{path}:{line_number}: link '{token}' target index {i} out of range "
                f"(target length {target_len})"
            )
        links.add((j, i))
    return frozenset(links)


def format_alignment(links) -> str:
    return " ".join(f"{j}-{i}" for j, i in sorted(links))


def prefix_size(total: int, fraction: float) -> int:
    """Number of leading sentences kept by a subsample fraction (nested for growing fractions)."""
    if fraction >= 1.0:
        return total
    return min(total, math.ceil(total * fraction))


def _check_line_counts(named_lines: Sequence[tuple]) -> None:
    counts = [len(lines) for _, lines in named_lines]
    if len(set(counts)) > 1:
        shortest = min(counts)
        names = ", ".join(f"{name} has {len(lines)}" for name, lines in named_lines)
        raise CorpusFormatError(
            f"line-count mismatch at line {shortest + 1}: {names} lines"
        )


def load_parallel_corpus(
    source_path: PathLike,
    target_path: PathLike,
    alignment_path: PathLike,
    subsample: float = 1.0
) -> ParallelCorpus:
    """Load source/target/alignment files line by line.

    `subsample` keeps the leading fraction of sentence pairs; vocabularies are
    built from the kept pairs only.
    """
    source_lines = read_lines(source_path)
    target_lines = read_lines(target_path)
    alignment_lines = read_lines(alignment_path)
    _check_line_counts([
        (str(source_path), source_lines),
        (str(target_path), target_lines),
        (str(alignment_path), alignment_lines),
    ])

    keep = prefix_size(len(source_lines), subsample)
    source_vocab = Vocabulary()
    target_vocab = Vocabulary()
    pairs: List[AlignedSentencePair] = []

    for n in range(keep):
        source = tuple(source_vocab.add(t) for t in tokenize_line(source_lines[n]))
        target = tuple(target_vocab.add(t) for t in tokenize_line(target_lines[n]))
        links = parse_alignment_line(
            alignment_lines[n], len(source), len(target), alignment_path, n + 1
        )
        pairs.append(AlignedSentencePair(source=source, target=target, links=links))

    logger.info(
        f"[CORPUS] Loaded {len(pairs)} of {len(source_lines)} sentence pairs "
        f"(source vocab {len(source_vocab)}, target vocab {len(target_vocab)})"
    )
    return ParallelCorpus(source_vocab, target_vocab, pairs)


def oov_rate_of_sentences(sentences: Sequence[Sequence[str]], vocab: Vocabulary) -> float:
    total = 0
    unknown = 0
    for sentence in sentences:
        for token in sentence:
            total += 1
            if token not in vocab:
                unknown += 1
    if total == 0:
        raise EmptyInputError("test set has no running words; OOV rate undefined")
    return unknown / total


def oov_rate(test_path: PathLike, vocab: Vocabulary) -> float:
    """Fraction of test running words missing from the training vocabulary."""
    rate = oov_rate_of_sentences(load_sentences(test_path), vocab)
    logger.info(f"[CORPUS] OOV rate of {test_path}: {rate:.6f}")
    return rate


# ========== Vocabulary dumps ==========

def write_vocabulary(vocab: Vocabulary, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for word_id, token in enumerate(vocab.entries):
            f.write(f"{token}\t{word_id}\t{vocab.frequency[word_id]}\n")


def load_vocabulary(path: PathLike) -> Vocabulary:
    vocab = Vocabulary()
    for line_number, line in enumerate(read_lines(path), start=1):
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusFormatError(f"{path}:{line_number}: expected token<TAB>id<TAB>count")
        token, word_id, count = fields[0], int(fields[1]), int(fields[2])
        if word_id != len(vocab):
            raise CorpusFormatError(
                f"{path}:{line_number}: id {word_id} out of order (expected {len(vocab)})"
            )
        vocab.add(token, count)
    return vocab


def load_corpus_side(path: PathLike, subsample: float = 1.0, vocab: Optional[Vocabulary] = None):
    """Monolingual load used by clustering: (vocabulary, encoded sentences)."""
    sentences = load_sentences(path)
    sentences = sentences[:prefix_size(len(sentences), subsample)]
    if vocab is None:
        vocab = build_vocabulary(sentences)
    return vocab, encode_sentences(sentences, vocab)
