from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterator, List, NamedTuple, Optional, Tuple
import enum


WordIds = Tuple[int, ...]
Link = Tuple[int, int]
Alignment = Tuple[Link, ...]
PairKey = Tuple[WordIds, WordIds]

# Stands for the empty word in lexicon events; never a valid word-id or class-id.
EMPTY_WORD = -1


class Direction(str, enum.Enum):
    S2T = "s2t"  # p(f|e), normalized by the target phrase
    T2S = "t2s"  # p(e|f), normalized by the source phrase


class InitMethod(str, enum.Enum):
    RANDOM = "random"
    TOP_FREQUENT = "top-frequent"
    SAME_COUNTSUM = "same-countsum"
    SAME_WORDS = "same-#words"
    COUNT_BINS = "count-bins"


class WeightScheme(str, enum.Enum):
    COUNT = "count"
    UNIFORM = "uniform"


class LabelFallback(str, enum.Enum):
    UNKNOWN_CLASS = "unknown-class"
    WORD = "word"


class TokenKind(str, enum.Enum):
    WORD = "word"
    CLASS = "class"


class GeneralizedToken(NamedTuple):
    kind: TokenKind
    id: int


GeneralizedIds = Tuple[GeneralizedToken, ...]
GeneralizedKey = Tuple[GeneralizedIds, GeneralizedIds]


@dataclass
class Vocabulary:
    """Bijective token <-> word-id mapping with training frequencies.

    Ids are handed out in order of first occurrence.
    """
    entries: List[str] = field(default_factory=list)
    index: Dict[str, int] = field(default_factory=dict)
    frequency: List[int] = field(default_factory=list)

    def add(self, token: str, count: int = 1) -> int:
        word_id = self.index.get(token)
        if word_id is None:
            word_id = len(self.entries)
            self.entries.append(token)
            self.index[token] = word_id
            self.frequency.append(0)
        self.frequency[word_id] += count
        return word_id

    def decode(self, word_ids: WordIds) -> List[str]:
        return [self.entries[w] for w in word_ids]

    @property
    def running_words(self) -> int:
        return sum(self.frequency)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, token: str) -> bool:
        return token in self.index


@dataclass(frozen=True)
class AlignedSentencePair:
    source: WordIds
    target: WordIds
    links: FrozenSet[Link] = frozenset()


@dataclass
class LabelMap:
    """Total hard mapping word-id -> class-id in [0, num_classes)."""
    assignment: List[int]
    num_classes: int

    @classmethod
    def identity(cls, size: int) -> "LabelMap":
        return cls(assignment=list(range(size)), num_classes=size)

    def class_sizes(self) -> List[int]:
        sizes = [0] * self.num_classes
        for k in self.assignment:
            sizes[k] += 1
        return sizes

    def __getitem__(self, word_id: int) -> int:
        return self.assignment[word_id]

    def __len__(self) -> int:
        return len(self.assignment)


class LabelMaps(NamedTuple):
    source: LabelMap
    target: LabelMap


@dataclass(frozen=True)
class PhrasePair:
    src: WordIds
    tgt: WordIds
    align: Alignment

    @property
    def key(self) -> PairKey:
        return (self.src, self.tgt)

    def aligned_targets(self, j: int) -> FrozenSet[int]:
        return frozenset(i for jj, i in self.align if jj == j)

    def aligned_sources(self, i: int) -> FrozenSet[int]:
        return frozenset(j for j, ii in self.align if ii == i)


@dataclass
class PhraseCountTable:
    """N(f,e), N(e), N(f) plus the alignment votes of every distinct pair."""
    pair_count: Dict[PairKey, int] = field(default_factory=dict)
    tgt_count: Dict[WordIds, int] = field(default_factory=dict)
    src_count: Dict[WordIds, int] = field(default_factory=dict)
    align_votes: Dict[PairKey, Counter] = field(default_factory=dict)

    def add(self, pair: PhrasePair, count: int = 1) -> None:
        key = pair.key
        self.pair_count[key] = self.pair_count.get(key, 0) + count
        self.tgt_count[pair.tgt] = self.tgt_count.get(pair.tgt, 0) + count
        self.src_count[pair.src] = self.src_count.get(pair.src, 0) + count
        self.align_votes.setdefault(key, Counter())[pair.align] += count

    def merge(self, other: "PhraseCountTable") -> None:
        for key, count in other.pair_count.items():
            self.pair_count[key] = self.pair_count.get(key, 0) + count
        for tgt, count in other.tgt_count.items():
            self.tgt_count[tgt] = self.tgt_count.get(tgt, 0) + count
        for src, count in other.src_count.items():
            self.src_count[src] = self.src_count.get(src, 0) + count
        for key, votes in other.align_votes.items():
            self.align_votes.setdefault(key, Counter()).update(votes)

    def canonical_alignment(self, key: PairKey) -> Alignment:
        # most votes first, then the lexicographically smallest link set
        votes = self.align_votes[key]
        return min(votes.items(), key=lambda item: (-item[1], item[0]))[0]

    @property
    def canonical_align(self) -> Dict[PairKey, Alignment]:
        return {key: self.canonical_alignment(key) for key in self.pair_count}

    def pairs(self) -> Iterator[PhrasePair]:
        """Distinct pairs in (src, tgt) id order, each with its canonical alignment."""
        for key in sorted(self.pair_count):
            yield PhrasePair(src=key[0], tgt=key[1], align=self.canonical_alignment(key))

    def count(self, key: PairKey) -> int:
        return self.pair_count.get(key, 0)

    def __contains__(self, key: PairKey) -> bool:
        return key in self.pair_count

    def __len__(self) -> int:
        return len(self.pair_count)


@dataclass
class GeneralizedCountTables:
    """Class-generalized counts behind map-all and map-each.

    `each_pair_s2t` keys replace one source position and its aligned targets;
    `each_pair_t2s` keys replace one target position and its aligned sources.
    """
    labelmaps: LabelMaps
    table: PhraseCountTable
    all_pair: Dict[GeneralizedKey, int] = field(default_factory=dict)
    all_tgt: Dict[GeneralizedIds, int] = field(default_factory=dict)
    all_src: Dict[GeneralizedIds, int] = field(default_factory=dict)
    each_pair_s2t: Dict[GeneralizedKey, int] = field(default_factory=dict)
    each_tgt: Dict[GeneralizedIds, int] = field(default_factory=dict)
    each_pair_t2s: Dict[GeneralizedKey, int] = field(default_factory=dict)
    each_src: Dict[GeneralizedIds, int] = field(default_factory=dict)


@dataclass
class LexiconCounts:
    """Aligned word-link events (f, e); EMPTY_WORD stands in for unaligned partners."""
    pair_count: Counter = field(default_factory=Counter)
    src_count: Counter = field(default_factory=Counter)
    tgt_count: Counter = field(default_factory=Counter)

    def add(self, f: int, e: int, count: int = 1) -> None:
        self.pair_count[(f, e)] += count
        self.src_count[f] += count
        self.tgt_count[e] += count


@dataclass
class LexiconTables:
    words: LexiconCounts
    classes: LexiconCounts
    labelmaps: LabelMaps


@dataclass
class SmoothedScores:
    p_std_s2t: float
    p_std_t2s: float
    p_all_s2t: float
    p_all_t2s: float
    p_each_s2t: float
    p_each_t2s: float
    lex_s2t: Optional[float] = None
    lex_t2s: Optional[float] = None
    lex_all_s2t: Optional[float] = None
    lex_all_t2s: Optional[float] = None
