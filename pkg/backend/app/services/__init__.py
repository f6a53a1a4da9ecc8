from app.services.corpus_io import (
    ParallelCorpus,
    load_parallel_corpus,
    load_corpus_side,
    parse_alignment_line,
    oov_rate,
    write_vocabulary,
    load_vocabulary
)
from app.services.clustering import (
    ClusteringState,
    init_classes,
    exchange_pass,
    objective,
    cluster,
    identity_label_map,
    load_label_map,
    write_label_map,
    write_trace
)
from app.services.extraction import extract_phrases, accumulate, write_count_table
from app.services.lexicon import lexicon_probs, lexical_weight
from app.services.smoothing import (
    build_generalized_tables,
    p_std,
    p_all,
    p_each,
    weight,
    score_table
)
from app.services.table_emit import emit_table, emit_manifest, load_manifest
from app.services.analysis import (
    ter,
    corpus_ter,
    bleu,
    paired_bootstrap,
    top_k_ter_improved,
    overlap,
    overlap_matrix
)

__all__ = [
    "ParallelCorpus",
    "load_parallel_corpus",
    "load_corpus_side",
    "parse_alignment_line",
    "oov_rate",
    "write_vocabulary",
    "load_vocabulary",
    "ClusteringState",
    "init_classes",
    "exchange_pass",
    "objective",
    "cluster",
    "identity_label_map",
    "load_label_map",
    "write_label_map",
    "write_trace",
    "extract_phrases",
    "accumulate",
    "write_count_table",
    "lexicon_probs",
    "lexical_weight",
    "build_generalized_tables",
    "p_std",
    "p_all",
    "p_each",
    "weight",
    "score_table",
    "emit_table",
    "emit_manifest",
    "load_manifest",
    "ter",
    "corpus_ter",
    "bleu",
    "paired_bootstrap",
    "top_k_ter_improved",
    "overlap",
    "overlap_matrix"
]
