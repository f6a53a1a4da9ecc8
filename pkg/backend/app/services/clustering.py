"""
Word Clustering Service
=======================
Learns a hard word -> class mapping with the exchange algorithm, maximizing
the log-likelihood of a class bigram model:

    sum over tokens of  log p(c(w_i) | c(w_{i-1})) + log p(w_i | c(w_i))

The first token of every sentence conditions on a boundary class that is not
one of the K classes. No end-of-sentence event is counted, so each running
word contributes exactly one transition and one emission.

Also loads externally supplied label files (POS tags, lemmas) as label maps.
"""

import logging
from collections import Counter
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import xlogy

from app.core.config import settings
from app.core.errors import ConfigurationError, LabelConflictError
from app.models import InitMethod, LabelFallback, LabelMap, Vocabulary
from app.services.corpus_io import read_lines

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
IterationCallback = Callable[[int, LabelMap, float], None]


def _xlogx(x):
    return xlogy(x, x)


def frequency_order(frequency: Sequence[int]) -> List[int]:
    """Word-ids by descending frequency, ties by word-id."""
    return sorted(range(len(frequency)), key=lambda w: (-frequency[w], w))


# ========== Initialization ==========

def _repair_by_largest_class(assignment: List[int], num_classes: int) -> None:
    sizes = Counter(assignment)
    for empty in range(num_classes):
        if sizes[empty]:
            continue
        largest = min(range(num_classes), key=lambda k: (-sizes[k], k))
        donor = max(w for w, k in enumerate(assignment) if k == largest)
        assignment[donor] = empty
        sizes[largest] -= 1
        sizes[empty] += 1


def _repair_by_median_split(assignment: List[int], num_classes: int, frequency: Sequence[int]) -> None:
    while True:
        sizes = Counter(assignment)
        empty = [k for k in range(num_classes) if not sizes[k]]
        if not empty:
            return
        largest = min(range(num_classes), key=lambda k: (-sizes[k], k))
        members = sorted(
            (w for w, k in enumerate(assignment) if k == largest),
            key=lambda w: (frequency[w], w)
        )
        for w in members[len(members) // 2:]:
            assignment[w] = empty[0]


def init_classes(
    vocab: Vocabulary,
    num_classes: int,
    method: InitMethod = InitMethod.TOP_FREQUENT,
    seed: int = settings.CLUSTER_SEED
) -> LabelMap:
    """Initial class mapping with no empty class."""
    size = len(vocab)
    if num_classes < 1:
        raise ConfigurationError(f"number of classes must be positive, got {num_classes}")
    if num_classes > size:
        raise ConfigurationError(
            f"number of classes {num_classes} exceeds vocabulary size {size}"
        )
    method = InitMethod(method)
    frequency = vocab.frequency
    order = frequency_order(frequency)
    assignment = [0] * size

    if method == InitMethod.RANDOM:
        rng = np.random.default_rng(seed)
        assignment = [int(k) for k in rng.integers(0, num_classes, size=size)]
        _repair_by_largest_class(assignment, num_classes)

    elif method == InitMethod.TOP_FREQUENT:
        for rank, w in enumerate(order):
            assignment[w] = min(rank, num_classes - 1)

    elif method == InitMethod.SAME_COUNTSUM:
        sums = [0] * num_classes
        for w in order:
            k = min(range(num_classes), key=lambda c: (sums[c], c))
            assignment[w] = k
            sums[k] += frequency[w]

    elif method == InitMethod.SAME_WORDS:
        for rank, w in enumerate(order):
            assignment[w] = rank % num_classes

    elif method == InitMethod.COUNT_BINS:
        logs = np.log(np.asarray(frequency, dtype=np.float64))
        low, high = float(logs.min()), float(logs.max())
        width = (high - low) / num_classes
        for w in range(size):
            if width > 0:
                assignment[w] = min(int((logs[w] - low) / width), num_classes - 1)
        _repair_by_median_split(assignment, num_classes, frequency)

    logger.debug(f"[CLUSTER] Initialized {size} words into {num_classes} classes ({method.value})")
    return LabelMap(assignment=assignment, num_classes=num_classes)


# ========== Class bigram state ==========

class ClusteringState:
    """Class unigram/bigram counts of a corpus under a label map, kept current across moves.

    Rows of `class_bigram` are histories (index K is the sentence boundary),
    columns are successors.
    """

    def __init__(self, sentences: Sequence[Sequence[int]], labelmap: LabelMap):
        self.num_words = len(labelmap)
        self.num_classes = labelmap.num_classes
        self.boundary = self.num_words

        bigrams: Counter = Counter()
        word_count = np.zeros(self.num_words, dtype=np.float64)
        for sentence in sentences:
            previous = self.boundary
            for w in sentence:
                bigrams[(previous, w)] += 1
                word_count[w] += 1
                previous = w
        self.word_count = word_count
        self._word_bigrams = bigrams

        predecessors: List[Dict[int, int]] = [dict() for _ in range(self.num_words)]
        successors: List[Dict[int, int]] = [dict() for _ in range(self.num_words)]
        self.self_loops = np.zeros(self.num_words, dtype=np.float64)
        for (u, v), n in bigrams.items():
            if u == v:
                self.self_loops[v] += n
                continue
            predecessors[v][u] = n
            if u != self.boundary:
                successors[u][v] = n
        self._pred_ids = [np.fromiter(p.keys(), dtype=np.int64, count=len(p)) for p in predecessors]
        self._pred_counts = [np.fromiter(p.values(), dtype=np.float64, count=len(p)) for p in predecessors]
        self._succ_ids = [np.fromiter(s.keys(), dtype=np.int64, count=len(s)) for s in successors]
        self._succ_counts = [np.fromiter(s.values(), dtype=np.float64, count=len(s)) for s in successors]
        self.history = np.array(
            [self._succ_counts[w].sum() + self.self_loops[w] for w in range(self.num_words)]
        )

        # class of every word, plus the boundary pseudo-word mapped to row K
        self.class_of = np.append(np.asarray(labelmap.assignment, dtype=np.int64), self.num_classes)
        self.class_unigram, self.class_bigram, self.class_history = self._count(self.class_of)
        self.word_term = float(_xlogx(self.word_count).sum())
        self.objective = self.compute_objective()

    # ----- counting -----

    def _count(self, class_of: np.ndarray):
        K = self.num_classes
        unigram = np.bincount(class_of[:-1], weights=self.word_count, minlength=K).astype(np.float64)
        bigram = np.zeros((K + 1, K), dtype=np.float64)
        for (u, v), n in self._word_bigrams.items():
            bigram[class_of[u], class_of[v]] += n
        history = bigram.sum(axis=1)
        return unigram, bigram, history

    def compute_objective(self) -> float:
        """Objective from the current class counts."""
        return float(
            _xlogx(self.class_bigram).sum()
            - _xlogx(self.class_history).sum()
            + self.word_term
            - _xlogx(self.class_unigram).sum()
        )

    def recompute_objective(self) -> float:
        """Objective recounted from the corpus under the current assignment."""
        unigram, bigram, history = self._count(self.class_of)
        return float(
            _xlogx(bigram).sum() - _xlogx(history).sum() + self.word_term - _xlogx(unigram).sum()
        )

    def labelmap(self) -> LabelMap:
        return LabelMap(assignment=[int(k) for k in self.class_of[:-1]], num_classes=self.num_classes)

    # ----- moves -----

    def _neighbour_classes(self, w: int) -> Tuple[np.ndarray, np.ndarray]:
        K = self.num_classes
        left = np.bincount(self.class_of[self._pred_ids[w]], weights=self._pred_counts[w], minlength=K + 1)
        right = np.bincount(self.class_of[self._succ_ids[w]], weights=self._succ_counts[w], minlength=K)
        return left.astype(np.float64), right.astype(np.float64)

    def _local_terms(self, k: int) -> float:
        M = self.class_bigram
        return float(
            _xlogx(M[:, k]).sum() + _xlogx(M[k, :]).sum() - _xlogx(M[k, k])
            - _xlogx(self.class_history[k]) - _xlogx(self.class_unigram[k])
        )

    def _shift(self, w: int, k: int, left: np.ndarray, right: np.ndarray, sign: float) -> None:
        M = self.class_bigram
        M[:, k] += sign * left
        M[k, :] += sign * right
        M[k, k] += sign * self.self_loops[w]
        self.class_history[k] += sign * self.history[w]
        self.class_unigram[k] += sign * self.word_count[w]

    def _insertion_gains(self, w: int, left: np.ndarray, right: np.ndarray) -> np.ndarray:
        """Objective change of inserting a currently unassigned w into each class."""
        K = self.num_classes
        M = self.class_bigram
        column = (_xlogx(M + left[:, None]) - _xlogx(M)).sum(axis=0)
        row = (_xlogx(M[:K, :] + right[None, :]) - _xlogx(M[:K, :])).sum(axis=1)
        diag = M[np.arange(K), np.arange(K)]
        counted = (_xlogx(diag + left[:K]) - _xlogx(diag)) + (_xlogx(diag + right) - _xlogx(diag))
        actual = _xlogx(diag + left[:K] + right + self.self_loops[w]) - _xlogx(diag)
        history = _xlogx(self.class_history[:K] + self.history[w]) - _xlogx(self.class_history[:K])
        unigram = _xlogx(self.class_unigram + self.word_count[w]) - _xlogx(self.class_unigram)
        return column + row - counted + actual - history - unigram

    def move_word(self, w: int, target: int) -> float:
        """Move w into `target`, update counts and objective, return the objective delta."""
        source = int(self.class_of[w])
        if source == target:
            return 0.0
        # neighbour classes exclude w itself, so they survive the move unchanged
        left, right = self._neighbour_classes(w)
        before = self._local_terms(source)
        self._shift(w, source, left, right, -1.0)
        delta = self._local_terms(source) - before
        self.class_of[w] = target
        before = self._local_terms(target)
        self._shift(w, target, left, right, 1.0)
        delta += self._local_terms(target) - before
        self.objective += delta
        return delta

    def best_move(self, w: int, tolerance: float = settings.EXCHANGE_TOLERANCE) -> Optional[int]:
        """Class giving the largest strict improvement for w, or None (ties: lowest class-id)."""
        source = int(self.class_of[w])
        left, right = self._neighbour_classes(w)
        self._shift(w, source, left, right, -1.0)
        try:
            gains = self._insertion_gains(w, left, right)
        finally:
            self._shift(w, source, left, right, 1.0)
        improvement = gains - gains[source]
        improvement[source] = 0.0
        best = int(np.argmax(improvement))
        if improvement[best] > tolerance:
            return best
        return None


def objective(state: ClusteringState) -> float:
    """Class bigram log-likelihood of the state's counts (natural log)."""
    return state.compute_objective()


def exchange_pass(
    state: ClusteringState,
    tolerance: float = settings.EXCHANGE_TOLERANCE
) -> Tuple[ClusteringState, int]:
    """Visit every word once by descending frequency and apply its best improving move."""
    moves = 0
    for w in frequency_order(state.word_count.tolist()):
        target = state.best_move(w, tolerance)
        if target is not None:
            state.move_word(w, target)
            moves += 1
    return state, moves


def cluster(
    sentences: Sequence[Sequence[int]],
    vocab: Vocabulary,
    num_classes: int,
    iterations: int = settings.CLUSTER_ITERATIONS,
    method: InitMethod = InitMethod.TOP_FREQUENT,
    seed: int = settings.CLUSTER_SEED,
    on_iteration: Optional[IterationCallback] = None
) -> Tuple[LabelMap, List[float]]:
    """Initialize, then run up to `iterations` exchange passes.

    The trace has one entry per iteration, entry 0 being the initialization.
    After a pass without moves the map is final; later iterations repeat it.
    """
    if iterations < 0:
        raise ConfigurationError(f"iterations must be non-negative, got {iterations}")
    labelmap = init_classes(vocab, num_classes, method, seed)
    state = ClusteringState(sentences, labelmap)
    trace = [state.objective]
    if on_iteration:
        on_iteration(0, state.labelmap(), state.objective)

    converged = False
    for iteration in range(1, iterations + 1):
        if not converged:
            _, moves = exchange_pass(state)
            converged = moves == 0
            logger.info(
                f"[CLUSTER] Iteration {iteration}: {moves} moves, objective {state.objective:.6f}"
            )
        trace.append(state.objective)
        if on_iteration:
            on_iteration(iteration, state.labelmap(), state.objective)

    empty = state.labelmap().class_sizes().count(0)
    if empty:
        logger.warning(f"[CLUSTER] {empty} of {num_classes} classes ended empty")
    return state.labelmap(), trace


# ========== Label files ==========

def identity_label_map(vocab: Vocabulary) -> LabelMap:
    return LabelMap.identity(len(vocab))


def load_label_map(
    path: PathLike,
    vocab: Vocabulary,
    fallback: LabelFallback = LabelFallback.UNKNOWN_CLASS
) -> LabelMap:
    """Read `word<TAB>label` lines (POS tags, lemmas, class ids) into a total label map.

    Labels are numbered densely by first appearance. With the unknown-class
    fallback, class id `n_labels` holds every unlabeled word (it may be empty).
    """
    labels: Dict[str, int] = {}
    word_label: Dict[str, str] = {}
    for line_number, line in enumerate(read_lines(path), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise ConfigurationError(f"{path}:{line_number}: expected word<TAB>label")
        word, label = fields
        previous = word_label.get(word)
        if previous is not None and previous != label:
            raise LabelConflictError(
                f"{path}:{line_number}: word '{word}' has conflicting labels '{previous}' and '{label}'"
            )
        word_label[word] = label
        labels.setdefault(label, len(labels))

    unknown_words = [w for w in word_label if w not in vocab]
    if unknown_words:
        logger.debug(f"[CLUSTER] {len(unknown_words)} labeled words are not in the vocabulary")

    fallback = LabelFallback(fallback)
    next_class = len(labels)
    if fallback == LabelFallback.UNKNOWN_CLASS:
        num_classes = len(labels) + 1
    assignment = []
    for token in vocab.entries:
        label = word_label.get(token)
        if label is not None:
            assignment.append(labels[label])
        elif fallback == LabelFallback.UNKNOWN_CLASS:
            assignment.append(len(labels))
        else:
            assignment.append(next_class)
            next_class += 1
    if fallback == LabelFallback.WORD:
        num_classes = max(next_class, 1)

    unlabeled = sum(1 for token in vocab.entries if token not in word_label)
    logger.info(
        f"[CLUSTER] Loaded {len(labels)} labels from {path}; {unlabeled} words without a label"
    )
    return LabelMap(assignment=assignment, num_classes=num_classes)


def write_label_map(labelmap: LabelMap, vocab: Vocabulary, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for word_id, token in enumerate(vocab.entries):
            f.write(f"{token}\t{labelmap[word_id]}\n")


def write_trace(trace: Sequence[float], path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for iteration, value in enumerate(trace):
            f.write(f"{iteration}\t{value:.10f}\n")
