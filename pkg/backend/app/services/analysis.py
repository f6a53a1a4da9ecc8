"""
Translation Analysis Service
============================
Sentence-level TER with greedy block shifts, corpus BLEU from sufficient
statistics, paired bootstrap resampling and the top-K TER-improved overlap
analysis used to compare smoothing variants.

All inputs are pre-tokenized token lists; comparisons are case-sensitive.
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from sacrebleu.metrics.bleu import BLEU

from app.core.config import settings
from app.core.errors import EmptyInputError, EvaluationError
from app.schemas import BootstrapResult, OverlapReport, SentenceEval

logger = logging.getLogger(__name__)

Tokens = Sequence[str]

NGRAM_ORDER = 4
MAX_SHIFT_SIZE = 10


# ========== TER ==========

def edit_distance(hyp: Tokens, ref: Tokens) -> int:
    """Levenshtein distance with unit substitution, insertion and deletion costs."""
    previous = list(range(len(ref) + 1))
    for n, h in enumerate(hyp, start=1):
        current = [n] + [0] * len(ref)
        for m, r in enumerate(ref, start=1):
            current[m] = min(
                previous[m] + 1,
                current[m - 1] + 1,
                previous[m - 1] + (h != r),
            )
        previous = current
    return previous[-1]


def apply_shift(words: Tokens, start: int, length: int, dest: int) -> List[str]:
    """Move words[start:start+length] so it begins at `dest` of the remaining words."""
    block = list(words[start:start + length])
    rest = list(words[:start]) + list(words[start + length:])
    return rest[:dest] + block + rest[dest:]


def _best_shift(hyp: List[str], ref: Tokens, distance: int):
    """Shift with the lowest resulting edit distance, or None if none improves.

    Every block of up to MAX_SHIFT_SIZE words is tried at every destination.
    Candidates are scanned by start, then length, then destination, and only a
    strictly lower distance replaces the current best.
    """
    best = None
    for start in range(len(hyp)):
        for length in range(1, min(MAX_SHIFT_SIZE, len(hyp) - start) + 1):
            for dest in range(len(hyp) - length + 1):
                if dest == start:
                    continue
                shifted = apply_shift(hyp, start, length, dest)
                shifted_distance = edit_distance(shifted, ref)
                if shifted_distance < distance:
                    best, distance = shifted, shifted_distance
    return best, distance


def ter_stats(hyp: Tokens, ref: Tokens) -> Tuple[int, int]:
    """(edits, reference length) with every block shift costing one edit."""
    if not ref:
        raise EvaluationError("TER is undefined for an empty reference")
    hyp = list(hyp)
    distance = edit_distance(hyp, ref)
    shifts = 0
    while distance > 0:
        shifted, shifted_distance = _best_shift(hyp, ref, distance)
        if shifted is None:
            break
        hyp, distance = shifted, shifted_distance
        shifts += 1
    return shifts + distance, len(ref)


def ter(hyp: Tokens, ref: Tokens) -> float:
    edits, ref_len = ter_stats(hyp, ref)
    return edits / ref_len


def _check_lengths(**corpora: Sequence) -> int:
    lengths = {name: len(corpus) for name, corpus in corpora.items()}
    if len(set(lengths.values())) > 1:
        detail = ", ".join(f"{name} has {n}" for name, n in lengths.items())
        raise EvaluationError(f"sentence-count mismatch: {detail}")
    return next(iter(lengths.values()))


def _ter_stats_pair(args) -> Tuple[int, int]:
    return ter_stats(*args)


def corpus_ter_stats(
    hyps: Sequence[Tokens],
    refs: Sequence[Tokens],
    workers: Optional[int] = None
) -> np.ndarray:
    """Per-sentence (edits, ref_len) rows; sentences are scored in parallel when workers > 1."""
    _check_lengths(hypotheses=hyps, references=refs)
    workers = workers or settings.NUM_WORKERS
    pairs = list(zip(hyps, refs))
    if workers > 1 and len(pairs) > workers:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            rows = list(executor.map(_ter_stats_pair, pairs, chunksize=64))
    else:
        rows = [ter_stats(hyp, ref) for hyp, ref in pairs]
    return np.array(rows, dtype=np.int64).reshape(len(rows), 2)


def ter_from_stats(stats: np.ndarray) -> float:
    edits, ref_len = stats.sum(axis=0)
    return float(edits) / float(ref_len)


def corpus_ter(hyps: Sequence[Tokens], refs: Sequence[Tokens]) -> float:
    """Total edits over total reference words."""
    return ter_from_stats(corpus_ter_stats(hyps, refs))


# ========== BLEU ==========

def ngram_counts(tokens: Tokens, order: int) -> Counter:
    return Counter(tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1))


def bleu_stats(hyp: Tokens, ref: Tokens) -> List[int]:
    """[correct_1..4, total_1..4, hyp_len, ref_len] for one sentence."""
    correct = []
    total = []
    for order in range(1, NGRAM_ORDER + 1):
        hyp_ngrams = ngram_counts(hyp, order)
        ref_ngrams = ngram_counts(ref, order)
        correct.append(sum((hyp_ngrams & ref_ngrams).values()))
        total.append(sum(hyp_ngrams.values()))
    return correct + total + [len(hyp), len(ref)]


def corpus_bleu_stats(hyps: Sequence[Tokens], refs: Sequence[Tokens]) -> np.ndarray:
    _check_lengths(hypotheses=hyps, references=refs)
    rows = [bleu_stats(hyp, ref) for hyp, ref in zip(hyps, refs)]
    return np.array(rows, dtype=np.int64).reshape(len(rows), 2 * NGRAM_ORDER + 2)


def bleu_from_stats(stats: np.ndarray, warn: bool = True) -> float:
    """Corpus BLEU (percentage) from summed sufficient statistics.

    Orders for which the hypotheses contain no n-grams at all are left out of
    the geometric mean; an order with n-grams but no match yields 0.0.
    """
    summed = [int(x) for x in stats.sum(axis=0)]
    correct = summed[:NGRAM_ORDER]
    total = summed[NGRAM_ORDER:2 * NGRAM_ORDER]
    sys_len, ref_len = summed[-2], summed[-1]
    if sys_len == 0:
        return 0.0

    for order, (c, t) in enumerate(zip(correct, total), start=1):
        if t and not c:
            if warn:
                logger.warning(f"[ANALYSIS] No {order}-gram matches in the corpus; BLEU is 0.0")
            return 0.0

    score = BLEU.compute_bleu(
        correct=correct,
        total=total,
        sys_len=sys_len,
        ref_len=ref_len,
        smooth_method="none",
        effective_order=True,
    ).score
    return min(score, 100.0)


def bleu(hyps: Sequence[Tokens], refs: Sequence[Tokens]) -> float:
    if not hyps:
        raise EvaluationError("empty hypothesis corpus")
    stats = corpus_bleu_stats(hyps, refs)
    if not stats[:, -2].sum():
        raise EmptyInputError("hypothesis corpus has no tokens; BLEU undefined")
    return bleu_from_stats(stats)


# ========== Paired bootstrap ==========

def _win(a: float, b: float, higher_is_better: bool) -> float:
    if a == b:
        return 0.5
    return 1.0 if (a > b) == higher_is_better else 0.0


def paired_bootstrap(
    hyps_a: Sequence[Tokens],
    hyps_b: Sequence[Tokens],
    refs: Sequence[Tokens],
    samples: int = settings.BOOTSTRAP_SAMPLES,
    seed: int = settings.BOOTSTRAP_SEED
) -> BootstrapResult:
    """Fraction of resampled test sets on which A beats B, for BLEU and for TER.

    Every resample draws its indices from its own generator spawned from
    `seed`, so the result does not depend on evaluation order. Ties count 0.5.
    """
    n = _check_lengths(system_a=hyps_a, system_b=hyps_b, references=refs)
    if samples < 1:
        raise EvaluationError("bootstrap needs at least one sample")
    if n == 0:
        raise EvaluationError("empty test set")

    bleu_a_stats = corpus_bleu_stats(hyps_a, refs)
    bleu_b_stats = corpus_bleu_stats(hyps_b, refs)
    ter_a_stats = corpus_ter_stats(hyps_a, refs)
    ter_b_stats = corpus_ter_stats(hyps_b, refs)

    bleu_wins = 0.0
    ter_wins = 0.0
    for child in np.random.SeedSequence(seed).spawn(samples):
        index = np.random.default_rng(child).integers(0, n, size=n)
        bleu_wins += _win(
            bleu_from_stats(bleu_a_stats[index], warn=False),
            bleu_from_stats(bleu_b_stats[index], warn=False),
            higher_is_better=True,
        )
        ter_wins += _win(
            ter_from_stats(ter_a_stats[index]),
            ter_from_stats(ter_b_stats[index]),
            higher_is_better=False,
        )

    result = BootstrapResult(
        samples=samples,
        seed=seed,
        bleu_a=bleu_from_stats(bleu_a_stats),
        bleu_b=bleu_from_stats(bleu_b_stats),
        ter_a=ter_from_stats(ter_a_stats),
        ter_b=ter_from_stats(ter_b_stats),
        bleu_win_fraction=bleu_wins / samples,
        ter_win_fraction=ter_wins / samples,
    )
    logger.info(
        f"[ANALYSIS] Bootstrap ({samples} samples): BLEU win {result.bleu_win_fraction:.3f}, "
        f"TER win {result.ter_win_fraction:.3f}"
    )
    return result


# ========== Top-K overlap ==========

def top_k_ter_improved(
    baseline_hyps: Sequence[Tokens],
    system_hyps: Sequence[Tokens],
    refs: Sequence[Tokens],
    k: int = settings.TOP_K
) -> List[SentenceEval]:
    """The k sentences whose TER improves most over the baseline (ties: lower index)."""
    n = _check_lengths(baseline=baseline_hyps, system=system_hyps, references=refs)
    if k > n:
        raise EvaluationError(f"top-K of {k} requested from a test set of {n} sentences")

    evals = []
    for index, (hyp_baseline, hyp_system, ref) in enumerate(zip(baseline_hyps, system_hyps, refs)):
        ter_baseline = ter(hyp_baseline, ref)
        ter_system = ter(hyp_system, ref)
        evals.append(SentenceEval(
            index=index,
            ter_baseline=ter_baseline,
            ter_system=ter_system,
            delta=ter_baseline - ter_system,
            hyp_baseline=list(hyp_baseline),
            hyp_system=list(hyp_system),
        ))
    evals.sort(key=lambda e: (-e.delta, e.index))
    return evals[:k]


def overlap(
    list_a: Sequence[SentenceEval],
    list_b: Sequence[SentenceEval],
    system_a: str = "",
    system_b: str = ""
) -> OverlapReport:
    """Common-input fraction over K; same-translation fraction over the common inputs."""
    if len(list_a) != len(list_b):
        raise EvaluationError(f"top-K lists differ in size: {len(list_a)} vs {len(list_b)}")
    k = len(list_a)
    if k == 0:
        raise EvaluationError("top-K lists are empty")

    hyps_a = {e.index: e.hyp_system for e in list_a}
    hyps_b = {e.index: e.hyp_system for e in list_b}
    common = hyps_a.keys() & hyps_b.keys()
    same = None
    if common:
        same = sum(hyps_a[i] == hyps_b[i] for i in common) / len(common)
    return OverlapReport(
        system_a=system_a,
        system_b=system_b,
        k=k,
        common_input_fraction=len(common) / k,
        same_translation_fraction=same,
    )


def overlap_matrix(top_lists: Dict[str, Sequence[SentenceEval]]) -> List[OverlapReport]:
    """Every ordered pair of systems, diagonal included, in name order."""
    names = sorted(top_lists)
    reports = []
    for a, b in product(names, repeat=2):
        report = overlap(top_lists[a], top_lists[b], system_a=a, system_b=b)
        if a < b:
            logger.info(
                f"[ANALYSIS] Overlap {a} / {b}: common input {report.common_input_fraction:.3f}, "
                f"same translation {format_fraction(report.same_translation_fraction)}"
            )
        reports.append(report)
    return reports


# ========== Reports ==========

UNDEFINED = "undefined"


def format_fraction(value: Optional[float]) -> str:
    return UNDEFINED if value is None else f"{value:.4f}"


def format_metrics_report(
    scores: Dict[str, Tuple[float, float]],
    bootstrap: Dict[str, BootstrapResult]
) -> str:
    """system, BLEU, TER and win fractions against the baseline, with markers."""
    lines = ["system\tBLEU\tTER\tBLEU_win\tTER_win"]
    for name in sorted(scores):
        bleu_score, ter_score = scores[name]
        result = bootstrap.get(name)
        if result is None:
            bleu_win = ter_win = "-"
        else:
            bleu_win = f"{result.bleu_win_fraction:.4f}{result.bleu_marker}"
            ter_win = f"{result.ter_win_fraction:.4f}{result.ter_marker}"
        lines.append(f"{name}\t{bleu_score:.2f}\t{100 * ter_score:.2f}\t{bleu_win}\t{ter_win}")
    return "\n".join(lines) + "\n"


def format_top_k_report(evals: Sequence[SentenceEval]) -> str:
    lines = ["index\tter_baseline\tter_system\tdelta\thyp_baseline\thyp_system"]
    for e in evals:
        lines.append(
            f"{e.index}\t{e.ter_baseline:.6f}\t{e.ter_system:.6f}\t{e.delta:.6f}\t"
            f"{' '.join(e.hyp_baseline)}\t{' '.join(e.hyp_system)}"
        )
    return "\n".join(lines) + "\n"


def format_overlap_report(reports: Sequence[OverlapReport]) -> str:
    lines = ["system_a\tsystem_b\tK\tCommon Input\tSame Translation"]
    for r in reports:
        lines.append(
            f"{r.system_a}\t{r.system_b}\t{r.k}\t{format_fraction(r.common_input_fraction)}\t"
            f"{format_fraction(r.same_translation_fraction)}"
        )
    return "\n".join(lines) + "\n"
