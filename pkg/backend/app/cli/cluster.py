import logging

from app.core.config import settings
from app.core.errors import ConfigurationError
from app.models import InitMethod
from app.schemas import RunConfig
from app.services.clustering import cluster, write_label_map, write_trace
from app.services.corpus_io import load_corpus_side, write_vocabulary
from app.cli.common import add_output_argument, build_config, prepare_output

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("cluster", help="Learn word classes with the exchange algorithm")
    parser.add_argument("--corpus", required=True, help="Tokenized monolingual text, one sentence per line")
    parser.add_argument("--num-classes", type=int, help=f"Number of classes (default {settings.NUM_CLASSES})")
    parser.add_argument("--iterations", type=int, help="Number of exchange passes")
    parser.add_argument("--init-method", choices=[m.value for m in InitMethod])
    parser.add_argument("--seed", type=int, help="Seed of the random initialization")
    parser.add_argument("--dump-every", type=int, help="Write the class map every N iterations (0: never)")
    parser.add_argument("--subsample", type=float, help="Leading fraction of the corpus to use")
    add_output_argument(parser)
    parser.set_defaults(handler=lambda args: cmd_cluster(build_config("cluster", args)))


def cmd_cluster(config: RunConfig) -> None:
    """Cluster one corpus side; writes classes.txt, trace.txt, vocab.txt and optional per-iteration dumps."""
    if not config.corpus:
        raise ConfigurationError("cluster needs --corpus")
    output_dir = prepare_output(config)
    vocab, sentences = load_corpus_side(config.corpus, config.subsample)

    def dump(iteration, labelmap, value):
        if config.dump_every and iteration % config.dump_every == 0:
            write_label_map(labelmap, vocab, output_dir / f"classes.iter{iteration:03d}.txt")

    labelmap, trace = cluster(
        sentences,
        vocab,
        config.num_classes,
        iterations=config.iterations,
        method=config.init_method,
        seed=config.seed,
        on_iteration=dump,
    )
    write_vocabulary(vocab, output_dir / "vocab.txt")
    write_label_map(labelmap, vocab, output_dir / "classes.txt")
    write_trace(trace, output_dir / "trace.txt")
    logger.info(f"[CLI] cluster: {len(vocab)} words, final objective {trace[-1]:.6f}")
