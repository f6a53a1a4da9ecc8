from app.cli.cluster import register as register_cluster, cmd_cluster
from app.cli.build import register as register_build, cmd_build
from app.cli.analyze import register as register_analyze, cmd_analyze
from app.cli.oov import register as register_oov, cmd_oov

__all__ = [
    "register_cluster",
    "register_build",
    "register_analyze",
    "register_oov",
    "cmd_cluster",
    "cmd_build",
    "cmd_analyze",
    "cmd_oov"
]
