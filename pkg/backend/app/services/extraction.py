"""
Phrase Extraction Service
=========================
Extracts alignment-consistent phrase pairs from word-aligned sentence pairs
and accumulates N(f,e), N(e), N(f) with majority-vote in-phrase alignments.

Both spans of an extracted pair are tight: their first and last words carry
links. Unaligned words are only ever included in the interior of a span.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Union

from app.core.config import settings
from app.models import AlignedSentencePair, PhraseCountTable, PhrasePair, Vocabulary
from app.services.corpus_io import format_alignment

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def extract_phrases(pair: AlignedSentencePair, max_len: int = settings.MAX_PHRASE_LENGTH) -> List[PhrasePair]:
    """All consistent (source span, target span) rectangles with both lengths <= max_len."""
    if not pair.links:
        return []

    source_links = [[] for _ in pair.source]
    target_links = [[] for _ in pair.target]
    for j, i in pair.links:
        source_links[j].append(i)
        target_links[i].append(j)

    phrases = []
    for j1 in range(len(pair.source)):
        if not source_links[j1]:
            continue
        i_min, i_max = len(pair.target), -1
        for j2 in range(j1, min(len(pair.source), j1 + max_len)):
            if source_links[j2]:
                i_min = min(i_min, min(source_links[j2]))
                i_max = max(i_max, max(source_links[j2]))
            else:
                continue
            if i_max - i_min + 1 > max_len:
                # the target span only grows with j2
                break
            consistent = all(
                j1 <= j <= j2
                for i in range(i_min, i_max + 1)
                for j in target_links[i]
            )
            if not consistent:
                continue
            align = tuple(sorted(
                (j - j1, i - i_min)
                for j in range(j1, j2 + 1)
                for i in source_links[j]
            ))
            phrases.append(PhrasePair(
                src=pair.source[j1:j2 + 1],
                tgt=pair.target[i_min:i_max + 1],
                align=align
            ))
    return phrases


def accumulate_shard(corpus: Sequence[AlignedSentencePair], max_len: int) -> PhraseCountTable:
    table = PhraseCountTable()
    for pair in corpus:
        for phrase in extract_phrases(pair, max_len):
            table.add(phrase)
    return table


def accumulate(
    corpus: Sequence[AlignedSentencePair],
    max_len: int = settings.MAX_PHRASE_LENGTH,
    workers: Optional[int] = None
) -> PhraseCountTable:
    """Count every extracted occurrence.

    With several workers the corpus is cut into contiguous shards whose tables
    are merged; alignment votes are merged before any canonical choice is made.
    """
    workers = workers or settings.NUM_WORKERS
    corpus = list(corpus)
    if workers <= 1 or len(corpus) < 2 * workers:
        table = accumulate_shard(corpus, max_len)
    else:
        size = -(-len(corpus) // workers)
        shards = [corpus[start:start + size] for start in range(0, len(corpus), size)]
        table = PhraseCountTable()
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for shard_table in executor.map(accumulate_shard, shards, [max_len] * len(shards)):
                table.merge(shard_table)

    logger.info(
        f"[EXTRACT] {len(table)} distinct phrase pairs from {len(corpus)} sentence pairs "
        f"(max length {max_len})"
    )
    return table


def write_count_table(
    table: PhraseCountTable,
    source_vocab: Vocabulary,
    target_vocab: Vocabulary,
    path: PathLike
) -> int:
    """Dump `src ||| tgt ||| count ||| alignment` lines in (src, tgt) byte order."""
    rows = []
    for phrase in table.pairs():
        src = " ".join(source_vocab.decode(phrase.src))
        tgt = " ".join(target_vocab.decode(phrase.tgt))
        rows.append((src.encode("utf-8"), tgt.encode("utf-8"), src, tgt, phrase))
    rows.sort(key=lambda row: (row[0], row[1]))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for _, _, src, tgt, phrase in rows:
            f.write(f"{src} ||| {tgt} ||| {table.count(phrase.key)} ||| {format_alignment(phrase.align)}\n")
    return len(rows)
