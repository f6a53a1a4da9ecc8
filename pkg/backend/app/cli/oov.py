import logging

from app.core.errors import ConfigurationError
from app.schemas import RunConfig
from app.services.corpus_io import load_corpus_side, load_sentences, oov_rate_of_sentences
from app.cli.common import add_output_argument, build_config, fraction_list, prepare_output

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("oov", help="OOV rate of a test set for growing training prefixes")
    parser.add_argument("--corpus", required=True, help="Tokenized training side")
    parser.add_argument("--test", required=True, help="Tokenized test side")
    parser.add_argument("--fractions", type=fraction_list,
                        help="Comma list of increasing prefix fractions (default: --subsample)")
    parser.add_argument("--subsample", type=float)
    add_output_argument(parser)
    parser.set_defaults(handler=lambda args: cmd_oov(build_config("oov", args)))


def cmd_oov(config: RunConfig) -> None:
    """oov.tsv: one row per training fraction with sentences, vocabulary size and OOV rate."""
    if not (config.corpus and config.test):
        raise ConfigurationError("oov needs --corpus and --test")
    output_dir = prepare_output(config)

    test_sentences = load_sentences(config.test)
    rows = ["fraction\tsentences\tvocabulary\toov_rate"]
    for fraction in config.fractions or [config.subsample]:
        vocab, sentences = load_corpus_side(config.corpus, fraction)
        rate = oov_rate_of_sentences(test_sentences, vocab)
        rows.append(f"{fraction:g}\t{len(sentences)}\t{len(vocab)}\t{rate:.6f}")
        logger.info(f"[CLI] oov: fraction {fraction:g}, vocabulary {len(vocab)}, OOV rate {rate:.6f}")

    with open(output_dir / "oov.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write("\n".join(rows) + "\n")
