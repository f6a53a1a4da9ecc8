"""
Word and class lexicons plus the phrase-level lexical weighting features.
Unaligned words are paired with EMPTY_WORD.
"""

import logging
from typing import Sequence

from app.models import (
    EMPTY_WORD,
    AlignedSentencePair,
    Direction,
    LabelMaps,
    LexiconCounts,
    LexiconTables,
    PhrasePair,
)

logger = logging.getLogger(__name__)


def lexicon_probs(corpus: Sequence[AlignedSentencePair], labelmaps: LabelMaps) -> LexiconTables:
    """Count link events over the aligned corpus at word and at class level."""
    words = LexiconCounts()
    classes = LexiconCounts()
    source_map, target_map = labelmaps
    for sentence in corpus:
        linked_source = set()
        linked_target = set()
        for j, i in sentence.links:
            f, e = sentence.source[j], sentence.target[i]
            words.add(f, e)
            classes.add(source_map[f], target_map[e])
            linked_source.add(j)
            linked_target.add(i)
        for j, f in enumerate(sentence.source):
            if j not in linked_source:
                words.add(f, EMPTY_WORD)
                classes.add(source_map[f], EMPTY_WORD)
        for i, e in enumerate(sentence.target):
            if i not in linked_target:
                words.add(EMPTY_WORD, e)
                classes.add(EMPTY_WORD, target_map[e])

    logger.info(
        f"[LEXICON] {len(words.pair_count)} word events, {len(classes.pair_count)} class events"
    )
    return LexiconTables(words=words, classes=classes, labelmaps=labelmaps)


def lexicon_probability(counts: LexiconCounts, f: int, e: int, direction: Direction = Direction.S2T) -> float:
    """p(f|e) for s2t, p(e|f) for t2s. Unobserved events score 0."""
    n = counts.pair_count.get((f, e), 0)
    if not n:
        return 0.0
    if Direction(direction) == Direction.S2T:
        return n / counts.tgt_count[e]
    return n / counts.src_count[f]


def lexical_weight(
    pair: PhrasePair,
    lexicon: LexiconTables,
    direction: Direction = Direction.S2T,
    classes: bool = False
) -> float:
    """Lexical weighting of a phrase pair under its in-phrase alignment.

    s2t: product over source words of the mean p(f_j|e_i) over the aligned e_i,
    or p(f_j|empty) when f_j is unaligned. t2s mirrors this over target words.
    With `classes` both phrases are mapped to labels and scored against the
    class lexicon.
    """
    direction = Direction(direction)
    counts = lexicon.classes if classes else lexicon.words
    src, tgt = pair.src, pair.tgt
    if classes:
        src = tuple(lexicon.labelmaps.source[f] for f in src)
        tgt = tuple(lexicon.labelmaps.target[e] for e in tgt)

    score = 1.0
    if direction == Direction.S2T:
        for j, f in enumerate(src):
            linked = sorted(pair.aligned_targets(j))
            if not linked:
                score *= lexicon_probability(counts, f, EMPTY_WORD, direction)
            else:
                score *= sum(lexicon_probability(counts, f, tgt[i], direction) for i in linked) / len(linked)
    else:
        for i, e in enumerate(tgt):
            linked = sorted(pair.aligned_sources(i))
            if not linked:
                score *= lexicon_probability(counts, EMPTY_WORD, e, direction)
            else:
                score *= sum(lexicon_probability(counts, src[j], e, direction) for j in linked) / len(linked)
    return score
