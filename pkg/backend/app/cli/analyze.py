import logging

from app.core.config import settings
from app.core.errors import ConfigurationError
from app.schemas import RunConfig
from app.services.analysis import (
    bleu,
    corpus_ter,
    format_metrics_report,
    format_overlap_report,
    format_top_k_report,
    overlap_matrix,
    paired_bootstrap,
    top_k_ter_improved,
)
from app.services.corpus_io import load_sentences
from app.cli.common import add_output_argument, build_config, named_path, prepare_output

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="BLEU/TER, paired bootstrap and top-K overlap reports")
    parser.add_argument("--reference", required=True, help="Tokenized reference translations")
    parser.add_argument("--baseline", required=True, help="Tokenized baseline hypotheses")
    parser.add_argument("--system", type=named_path, action="append", metavar="NAME=PATH",
                        help="Hypotheses of a compared system (repeatable)")
    parser.add_argument("--bootstrap-samples", type=int,
                        help=f"Resampled test sets (default {settings.BOOTSTRAP_SAMPLES})")
    parser.add_argument("--bootstrap-seed", type=int)
    parser.add_argument("--top-k", type=int, help=f"Size of the TER-improved lists (default {settings.TOP_K})")
    add_output_argument(parser)
    parser.set_defaults(handler=lambda args: cmd_analyze(build_config("analyze", args)))


def _write(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)


def cmd_analyze(config: RunConfig) -> None:
    """metrics.tsv (BLEU, TER, bootstrap wins over the baseline), topk_<name>.tsv and overlap.tsv."""
    if not (config.reference and config.baseline):
        raise ConfigurationError("analyze needs --reference and --baseline")
    output_dir = prepare_output(config)

    refs = load_sentences(config.reference)
    baseline = load_sentences(config.baseline)
    systems = {name: load_sentences(path) for name, path in sorted(config.systems.items())}

    scores = {"baseline": (bleu(baseline, refs), corpus_ter(baseline, refs))}
    bootstrap = {}
    top_lists = {}
    for name, hyps in systems.items():
        scores[name] = (bleu(hyps, refs), corpus_ter(hyps, refs))
        bootstrap[name] = paired_bootstrap(
            hyps, baseline, refs, samples=config.bootstrap_samples, seed=config.bootstrap_seed
        )
        top_lists[name] = top_k_ter_improved(baseline, hyps, refs, config.top_k)
        _write(output_dir / f"topk_{name}.tsv", format_top_k_report(top_lists[name]))

    _write(output_dir / "metrics.tsv", format_metrics_report(scores, bootstrap))
    _write(output_dir / "overlap.tsv", format_overlap_report(overlap_matrix(top_lists)))
    logger.info(f"[CLI] analyze: {len(systems)} systems against the baseline on {len(refs)} sentences")
