import logging
from typing import Optional, Sequence

from app.core.errors import ConfigurationError
from app.models import InitMethod, LabelFallback, LabelMap, LabelMaps, Vocabulary, WeightScheme
from app.schemas import FeatureGroup, RunConfig
from app.services.clustering import cluster, identity_label_map, load_label_map, write_label_map
from app.services.corpus_io import load_parallel_corpus, write_vocabulary
from app.services.extraction import accumulate, write_count_table
from app.services.lexicon import lexicon_probs
from app.services.smoothing import build_generalized_tables, score_table
from app.services.table_emit import emit_table
from app.cli.common import add_output_argument, build_config, feature_list, prepare_output

logger = logging.getLogger(__name__)

PHRASE_TABLE_NAME = "phrase-table.txt"
COUNT_TABLE_NAME = "counts.txt"


def register(subparsers) -> None:
    parser = subparsers.add_parser("build", help="Extract, smooth and emit a phrase table")
    parser.add_argument("--source", required=True, help="Tokenized source side")
    parser.add_argument("--target", required=True, help="Tokenized target side")
    parser.add_argument("--alignment", required=True, help="Pharaoh j-i alignments")
    parser.add_argument("--source-labels", help="word<TAB>label file for the source side")
    parser.add_argument("--target-labels", help="word<TAB>label file for the target side")
    parser.add_argument("--label-fallback", choices=[f.value for f in LabelFallback])
    parser.add_argument("--identity-labels", action="store_true", default=None,
                        help="Map every word to its own class (p_all reduces to p_std)")
    parser.add_argument("--num-classes-source", type=int, help="Classes learned for the source side")
    parser.add_argument("--num-classes-target", type=int, help="Classes learned for the target side")
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--init-method", choices=[m.value for m in InitMethod])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--max-len", type=int, help="Maximum phrase length on either side")
    parser.add_argument("--features", type=feature_list,
                        help="Comma list of feature groups: std,lex,all,each,lex-all")
    parser.add_argument("--weighting", choices=[w.value for w in WeightScheme])
    parser.add_argument("--subsample", type=float, help="Leading fraction of sentence pairs to use")
    parser.add_argument("--workers", type=int, help="Extraction processes")
    add_output_argument(parser)
    parser.set_defaults(handler=lambda args: cmd_build(build_config("build", args)))


def _side_labels(
    side: str,
    vocab: Vocabulary,
    sentences: Sequence[Sequence[int]],
    labels_path: Optional[str],
    num_classes: int,
    config: RunConfig
) -> LabelMap:
    if config.identity_labels:
        return identity_label_map(vocab)
    if labels_path:
        return load_label_map(labels_path, vocab, config.label_fallback)
    logger.info(f"[CLI] Clustering the {side} side into {num_classes} classes")
    labelmap, _ = cluster(
        sentences,
        vocab,
        num_classes,
        iterations=config.iterations,
        method=config.init_method,
        seed=config.seed,
    )
    return labelmap


def cmd_build(config: RunConfig) -> None:
    """Corpus -> counts -> generalized tables -> scores -> phrase table, plus vocabularies and class maps."""
    if not (config.source and config.target and config.alignment):
        raise ConfigurationError("build needs --source, --target and --alignment")
    if config.identity_labels and (config.source_labels or config.target_labels):
        raise ConfigurationError("--identity-labels cannot be combined with label files")
    output_dir = prepare_output(config)

    corpus = load_parallel_corpus(config.source, config.target, config.alignment, config.subsample)
    labelmaps = LabelMaps(
        source=_side_labels(
            "source", corpus.source_vocab, [p.source for p in corpus.pairs],
            config.source_labels, config.num_classes_source, config,
        ),
        target=_side_labels(
            "target", corpus.target_vocab, [p.target for p in corpus.pairs],
            config.target_labels, config.num_classes_target, config,
        ),
    )

    table = accumulate(corpus.pairs, config.max_len, config.workers)
    tables = build_generalized_tables(table, labelmaps)
    lexicon = None
    if FeatureGroup.LEX in config.features or FeatureGroup.LEX_ALL in config.features:
        lexicon = lexicon_probs(corpus.pairs, labelmaps)
    scores = score_table(tables, lexicon, config.weighting)

    records = emit_table(
        table, scores, output_dir / PHRASE_TABLE_NAME,
        corpus.source_vocab, corpus.target_vocab, config.features,
    )
    write_count_table(table, corpus.source_vocab, corpus.target_vocab, output_dir / COUNT_TABLE_NAME)
    write_vocabulary(corpus.source_vocab, output_dir / "vocab.source.txt")
    write_vocabulary(corpus.target_vocab, output_dir / "vocab.target.txt")
    write_label_map(labelmaps.source, corpus.source_vocab, output_dir / "classes.source.txt")
    write_label_map(labelmaps.target, corpus.target_vocab, output_dir / "classes.target.txt")
    logger.info(f"[CLI] build: {records} phrase pairs from {len(corpus.pairs)} sentence pairs")
