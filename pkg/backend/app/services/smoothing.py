"""
Phrase Table Smoothing Service
==============================
Scores every phrase pair of a count table with

- p_std:  relative frequency N(f,e) / N(e)
- p_all:  the same ratio after mapping every word of both phrases to its label
- p_each: a weighted average over source positions j of the ratio obtained by
          mapping only f_j and the target words aligned to it (a_j); weights
          are the normalized counts of those generalized pairs

in both directions. Class tokens and word tokens live in separate namespaces
(TokenKind), so a generalized key never collides with a literal phrase.
"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from app.core.errors import UnseenPairError
from app.models import (
    Direction,
    GeneralizedCountTables,
    GeneralizedIds,
    GeneralizedKey,
    GeneralizedToken,
    LabelMap,
    LabelMaps,
    LexiconTables,
    PairKey,
    PhraseCountTable,
    PhrasePair,
    SmoothedScores,
    TokenKind,
    WeightScheme,
    WordIds,
)
from app.services.lexicon import lexical_weight

logger = logging.getLogger(__name__)


# ========== Generalization ==========

def generalize_side(ids: WordIds, positions: Iterable[int], labelmap: LabelMap) -> GeneralizedIds:
    positions = set(positions)
    return tuple(
        GeneralizedToken(TokenKind.CLASS, labelmap[w]) if n in positions
        else GeneralizedToken(TokenKind.WORD, w)
        for n, w in enumerate(ids)
    )


def generalize(
    pair: PhrasePair,
    positions_src: Iterable[int],
    positions_tgt: Iterable[int],
    labelmaps: LabelMaps
) -> GeneralizedKey:
    """Replace the listed positions by class tokens, keep every other word."""
    return (
        generalize_side(pair.src, positions_src, labelmaps.source),
        generalize_side(pair.tgt, positions_tgt, labelmaps.target),
    )


def aligned_targets(pair: PhrasePair, j: int) -> FrozenSet[int]:
    """a_j: target positions linked to source position j (0-based)."""
    return pair.aligned_targets(j)


def aligned_sources(pair: PhrasePair, i: int) -> FrozenSet[int]:
    return pair.aligned_sources(i)


def _each_positions(pair: PhrasePair, direction: Direction) -> List[Tuple[FrozenSet[int], FrozenSet[int]]]:
    """(source positions, target positions) replaced by each summand of map-each."""
    if direction == Direction.S2T:
        return [(frozenset([j]), aligned_targets(pair, j)) for j in range(len(pair.src))]
    return [(aligned_sources(pair, i), frozenset([i])) for i in range(len(pair.tgt))]


def build_generalized_tables(table: PhraseCountTable, labelmaps: LabelMaps) -> GeneralizedCountTables:
    """Regroup the phrase counts under the label maps.

    Denominators of map-each count every distinct (phrase, replaced positions)
    once with the phrase's own count, however many pairs induce that form.
    """
    gt = GeneralizedCountTables(labelmaps=labelmaps, table=table)
    tgt_forms = set()
    src_forms = set()

    for pair in table.pairs():
        n = table.count(pair.key)
        key = generalize(pair, range(len(pair.src)), range(len(pair.tgt)), labelmaps)
        gt.all_pair[key] = gt.all_pair.get(key, 0) + n

        for positions_src, positions_tgt in _each_positions(pair, Direction.S2T):
            key = generalize(pair, positions_src, positions_tgt, labelmaps)
            gt.each_pair_s2t[key] = gt.each_pair_s2t.get(key, 0) + n
            tgt_forms.add((pair.tgt, positions_tgt))
        for positions_src, positions_tgt in _each_positions(pair, Direction.T2S):
            key = generalize(pair, positions_src, positions_tgt, labelmaps)
            gt.each_pair_t2s[key] = gt.each_pair_t2s.get(key, 0) + n
            src_forms.add((pair.src, positions_src))

    for tgt, n in table.tgt_count.items():
        form = generalize_side(tgt, range(len(tgt)), labelmaps.target)
        gt.all_tgt[form] = gt.all_tgt.get(form, 0) + n
    for src, n in table.src_count.items():
        form = generalize_side(src, range(len(src)), labelmaps.source)
        gt.all_src[form] = gt.all_src.get(form, 0) + n
    for tgt, positions in tgt_forms:
        form = generalize_side(tgt, positions, labelmaps.target)
        gt.each_tgt[form] = gt.each_tgt.get(form, 0) + table.tgt_count[tgt]
    for src, positions in src_forms:
        form = generalize_side(src, positions, labelmaps.source)
        gt.each_src[form] = gt.each_src.get(form, 0) + table.src_count[src]

    logger.info(
        f"[SMOOTH] Generalized tables: {len(gt.all_pair)} map-all keys, "
        f"{len(gt.each_pair_s2t)} / {len(gt.each_pair_t2s)} map-each keys (s2t / t2s)"
    )
    return gt


# ========== Scores ==========

def _require_seen(key: PairKey, table: PhraseCountTable) -> None:
    if key not in table:
        raise UnseenPairError(f"phrase pair {key} was never extracted")


def p_std(pair: PhrasePair, table: PhraseCountTable, direction: Direction = Direction.S2T) -> float:
    _require_seen(pair.key, table)
    n = table.count(pair.key)
    if Direction(direction) == Direction.S2T:
        return n / table.tgt_count[pair.tgt]
    return n / table.src_count[pair.src]


def p_all(pair: PhrasePair, gt: GeneralizedCountTables, direction: Direction = Direction.S2T) -> float:
    _require_seen(pair.key, gt.table)
    key = generalize(pair, range(len(pair.src)), range(len(pair.tgt)), gt.labelmaps)
    n = gt.all_pair.get(key)
    if n is None:
        raise UnseenPairError(f"generalized key of {pair.key} was never counted")
    if Direction(direction) == Direction.S2T:
        return n / gt.all_tgt[key[1]]
    return n / gt.all_src[key[0]]


def _canonical(pair: PhrasePair, table: PhraseCountTable) -> PhrasePair:
    _require_seen(pair.key, table)
    align = table.canonical_alignment(pair.key)
    if align == pair.align:
        return pair
    return PhrasePair(src=pair.src, tgt=pair.tgt, align=align)


def each_summands(
    pair: PhrasePair,
    gt: GeneralizedCountTables,
    direction: Direction = Direction.S2T,
    scheme: WeightScheme = WeightScheme.COUNT
) -> List[Tuple[float, int, int]]:
    """(weight, numerator count, denominator count) of every map-each summand."""
    direction = Direction(direction)
    pair = _canonical(pair, gt.table)
    if direction == Direction.S2T:
        pair_counts, denominators = gt.each_pair_s2t, gt.each_tgt
    else:
        pair_counts, denominators = gt.each_pair_t2s, gt.each_src

    parts = []
    for positions_src, positions_tgt in _each_positions(pair, direction):
        key = generalize(pair, positions_src, positions_tgt, gt.labelmaps)
        numerator = pair_counts.get(key)
        if numerator is None:
            raise UnseenPairError(f"map-each key of {pair.key} was never counted")
        denominator = denominators[key[1] if direction == Direction.S2T else key[0]]
        parts.append((numerator, denominator))

    if WeightScheme(scheme) == WeightScheme.UNIFORM:
        weights = [1.0 / len(parts)] * len(parts)
    else:
        total = sum(numerator for numerator, _ in parts)
        weights = [numerator / total for numerator, _ in parts]
    return [(w, numerator, denominator) for w, (numerator, denominator) in zip(weights, parts)]


def weight(
    pair: PhrasePair,
    j: int,
    gt: GeneralizedCountTables,
    direction: Direction = Direction.S2T,
    scheme: WeightScheme = WeightScheme.COUNT
) -> float:
    """w_j: normalized count of the pair generalized at position j."""
    return each_summands(pair, gt, direction, scheme)[j][0]


def p_each(
    pair: PhrasePair,
    gt: GeneralizedCountTables,
    direction: Direction = Direction.S2T,
    scheme: WeightScheme = WeightScheme.COUNT
) -> float:
    return sum(w * numerator / denominator for w, numerator, denominator in each_summands(pair, gt, direction, scheme))


# ========== Table scoring ==========

def score_pair(
    pair: PhrasePair,
    gt: GeneralizedCountTables,
    lexicon: Optional[LexiconTables] = None,
    scheme: WeightScheme = WeightScheme.COUNT
) -> SmoothedScores:
    table = gt.table
    scores = SmoothedScores(
        p_std_s2t=p_std(pair, table, Direction.S2T),
        p_std_t2s=p_std(pair, table, Direction.T2S),
        p_all_s2t=p_all(pair, gt, Direction.S2T),
        p_all_t2s=p_all(pair, gt, Direction.T2S),
        p_each_s2t=p_each(pair, gt, Direction.S2T, scheme),
        p_each_t2s=p_each(pair, gt, Direction.T2S, scheme),
    )
    if lexicon is not None:
        scores.lex_s2t = lexical_weight(pair, lexicon, Direction.S2T)
        scores.lex_t2s = lexical_weight(pair, lexicon, Direction.T2S)
        scores.lex_all_s2t = lexical_weight(pair, lexicon, Direction.S2T, classes=True)
        scores.lex_all_t2s = lexical_weight(pair, lexicon, Direction.T2S, classes=True)
    return scores


def score_table(
    gt: GeneralizedCountTables,
    lexicon: Optional[LexiconTables] = None,
    scheme: WeightScheme = WeightScheme.COUNT
) -> Dict[PairKey, SmoothedScores]:
    """Scores for every pair of the count table (read-only over the tables)."""
    scores = {pair.key: score_pair(pair, gt, lexicon, scheme) for pair in gt.table.pairs()}
    logger.info(f"[SMOOTH] Scored {len(scores)} phrase pairs ({WeightScheme(scheme).value} weights)")
    return scores
