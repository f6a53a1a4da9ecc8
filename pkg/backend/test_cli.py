"""
End-to-end tests of the phrasesmooth command line: exit codes, output files,
determinism and manifest replay.
"""

import random

import pytest

from app.cli import cmd_build
from app.main import main
from app.models import InitMethod
from app.services.clustering import init_classes, write_label_map
from app.services.corpus_io import format_alignment, load_corpus_side
from app.services.table_emit import load_manifest


@pytest.fixture
def parallel_files(write_lines):
    """60 random sentence pairs over small vocabularies, written as src/tgt/aln files."""
    rng = random.Random(17)
    source, target, alignment = [], [], []
    for _ in range(60):
        src = [f"s{rng.randrange(12)}" for _ in range(rng.randint(1, 6))]
        tgt = [f"t{rng.randrange(12)}" for _ in range(rng.randint(1, 6))]
        links = {(j, i) for j in range(len(src)) for i in range(len(tgt)) if rng.random() < 0.3}
        source.append(" ".join(src))
        target.append(" ".join(tgt))
        alignment.append(format_alignment(links))
    return write_lines("train.src", source), write_lines("train.tgt", target), write_lines("train.aln", alignment)


def build_args(files, output_dir, *extra):
    src, tgt, aln = files
    return ["build", "--source", src, "--target", tgt, "--alignment", aln,
            "--output-dir", str(output_dir), *extra]


CLUSTERED = ["--num-classes-source", "3", "--num-classes-target", "3", "--iterations", "2"]


def table_lines(output_dir):
    return (output_dir / "phrase-table.txt").read_text(encoding="utf-8").splitlines()


# ========== Exit codes ==========

def test_successful_build_exits_zero(tmp_path, parallel_files):
    assert main(build_args(parallel_files, tmp_path / "out", *CLUSTERED)) == 0
    for name in ["phrase-table.txt", "counts.txt", "manifest.txt", "vocab.source.txt",
                 "vocab.target.txt", "classes.source.txt", "classes.target.txt"]:
        assert (tmp_path / "out" / name).exists()


def test_missing_input_file_exits_one(tmp_path, parallel_files, capsys):
    src, tgt, _ = parallel_files
    assert main(build_args((src, tgt, str(tmp_path / "missing.aln")), tmp_path / "out")) == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_utf8_input_exits_one(tmp_path, parallel_files, capsys):
    _, tgt, aln = parallel_files
    src = tmp_path / "latin1.src"
    src.write_bytes(b"caf\xe9\n")
    assert main(build_args((str(src), tgt, aln), tmp_path / "out")) == 1
    err = capsys.readouterr().err
    assert f"error: {src}:1: invalid UTF-8" in err
    assert "Traceback" not in err


def test_line_count_mismatch_exits_one(tmp_path, write_lines, capsys):
    files = (write_lines("a.src", ["a", "b"]), write_lines("a.tgt", ["x"]), write_lines("a.aln", ["0-0", "0-0"]))
    assert main(build_args(files, tmp_path / "out", "--identity-labels")) == 1
    assert "line-count mismatch" in capsys.readouterr().err


def test_too_many_classes_exits_one(tmp_path, parallel_files, capsys):
    assert main(build_args(parallel_files, tmp_path / "out", "--num-classes-source", "500")) == 1
    assert "error:" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["build", "--source", "a", "--target", "b", "--alignment", "c"],
    ["build", "--source", "a", "--target", "b", "--alignment", "c", "--output-dir", "o", "--features", "bogus"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_invalid_flag_values_exit_one(tmp_path, parallel_files):
    assert main(build_args(parallel_files, tmp_path / "out", "--max-len", "0")) == 1


def test_empty_feature_selection_exits_one(tmp_path, parallel_files, capsys):
    assert main(build_args(parallel_files, tmp_path / "out", "--features", "")) == 1
    assert "select at least one feature group" in capsys.readouterr().err


# ========== cluster ==========

def cluster_args(corpus, output_dir, *extra):
    return ["cluster", "--corpus", corpus, "--output-dir", str(output_dir), "--num-classes", "3", *extra]


def test_zero_iterations_dump_the_initialization(tmp_path, parallel_files):
    corpus = parallel_files[0]
    out = tmp_path / "out"
    assert main(cluster_args(corpus, out, "--iterations", "0", "--dump-every", "1",
                             "--init-method", "same-#words")) == 0

    vocab, _ = load_corpus_side(corpus)
    write_label_map(init_classes(vocab, 3, InitMethod.SAME_WORDS), vocab, tmp_path / "init.txt")
    assert (out / "classes.iter000.txt").read_bytes() == (tmp_path / "init.txt").read_bytes()
    assert (out / "classes.txt").read_bytes() == (tmp_path / "init.txt").read_bytes()
    assert len((out / "trace.txt").read_text(encoding="utf-8").splitlines()) == 1


def test_dump_every_iteration(tmp_path, parallel_files):
    out = tmp_path / "out"
    assert main(cluster_args(parallel_files[0], out, "--iterations", "3", "--dump-every", "1")) == 0
    assert sorted(p.name for p in out.glob("classes.iter*.txt")) == [
        "classes.iter000.txt", "classes.iter001.txt", "classes.iter002.txt", "classes.iter003.txt",
    ]
    trace = [float(line.split("\t")[1]) for line in (out / "trace.txt").read_text(encoding="utf-8").splitlines()]
    assert len(trace) == 4
    assert all(later >= earlier - 1e-9 for earlier, later in zip(trace, trace[1:]))


def test_identical_seeds_give_identical_cluster_outputs(tmp_path, parallel_files):
    for run in ["first", "second"]:
        assert main(cluster_args(parallel_files[1], tmp_path / run, "--iterations", "2",
                                 "--init-method", "random", "--seed", "5")) == 0
    for name in ["classes.txt", "trace.txt", "vocab.txt"]:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()

    def manifest(run):
        lines = (tmp_path / run / "manifest.txt").read_text(encoding="utf-8").splitlines()
        return [line for line in lines if not line.startswith("output_dir = ")]

    assert manifest("first") == manifest("second")


# ========== build ==========

def test_build_is_byte_identical_across_runs(tmp_path, parallel_files):
    for run in ["first", "second"]:
        assert main(build_args(parallel_files, tmp_path / run, *CLUSTERED, "--workers", "2")) == 0
    for name in ["phrase-table.txt", "counts.txt", "classes.source.txt", "classes.target.txt"]:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_subsampling_never_adds_pairs(tmp_path, parallel_files):
    assert main(build_args(parallel_files, tmp_path / "full", "--identity-labels")) == 0
    assert main(build_args(parallel_files, tmp_path / "part", "--identity-labels", "--subsample", "0.1")) == 0
    full, part = table_lines(tmp_path / "full"), table_lines(tmp_path / "part")
    assert len(part) <= len(full)
    assert "subsample = 0.1" in (tmp_path / "part" / "manifest.txt").read_text(encoding="utf-8").splitlines()


def test_manifest_replays_the_same_table(tmp_path, parallel_files):
    assert main(build_args(parallel_files, tmp_path / "first", *CLUSTERED,
                           "--features", "std,each,lex-all", "--max-len", "3")) == 0
    config = load_manifest(tmp_path / "first" / "manifest.txt")
    cmd_build(config.model_copy(update={"output_dir": str(tmp_path / "replay")}))
    assert (tmp_path / "first" / "phrase-table.txt").read_bytes() == \
        (tmp_path / "replay" / "phrase-table.txt").read_bytes()


def test_identity_labels_make_smoothed_columns_equal(tmp_path, parallel_files):
    assert main(build_args(parallel_files, tmp_path / "out", "--identity-labels", "--features", "std,all,each")) == 0
    lines = table_lines(tmp_path / "out")
    assert lines[0] == "#features: p_std_s2t p_std_t2s p_all_s2t p_all_t2s p_each_s2t p_each_t2s"
    for line in lines[1:]:
        values = line.split(" ||| ")[2].split()
        assert values[0] == values[2] == values[4]
        assert values[1] == values[3] == values[5]


def test_toy_corpus_golden_table(tmp_path, write_lines):
    files = (write_lines("toy.src", ["a b", "a"]), write_lines("toy.tgt", ["x y", "y"]),
             write_lines("toy.aln", ["0-0 1-1", "0-0"]))
    assert main(build_args(files, tmp_path / "out", "--identity-labels")) == 0
    assert table_lines(tmp_path / "out") == [
        "#features: p_std_s2t p_std_t2s lex_s2t lex_t2s p_all_s2t p_all_t2s p_each_s2t p_each_t2s",
        "a ||| x ||| 1 0.5 1 0.5 1 0.5 1 0.5 ||| 0-0",
        "a ||| y ||| 0.5 0.5 0.5 0.5 0.5 0.5 0.5 0.5 ||| 0-0",
        "a b ||| x y ||| 1 1 0.5 0.5 1 1 1 1 ||| 0-0 1-1",
        "b ||| y ||| 0.5 1 0.5 1 0.5 1 0.5 1 ||| 0-0",
    ]
    assert (tmp_path / "out" / "counts.txt").read_text(encoding="utf-8").splitlines() == [
        "a ||| x ||| 1 ||| 0-0",
        "a ||| y ||| 1 ||| 0-0",
        "a b ||| x y ||| 1 ||| 0-0 1-1",
        "b ||| y ||| 1 ||| 0-0",
    ]


def test_label_files_are_used_for_both_sides(tmp_path, write_lines, parallel_files):
    src_labels = write_lines("src.tags", [f"s{n}\tS{n % 2}" for n in range(12)])
    tgt_labels = write_lines("tgt.tags", [f"t{n}\tT{n % 3}" for n in range(12)])
    out = tmp_path / "out"
    assert main(build_args(parallel_files, out, "--source-labels", src_labels, "--target-labels", tgt_labels)) == 0
    source_classes = {line.split("\t")[1] for line in (out / "classes.source.txt").read_text(encoding="utf-8").splitlines()}
    target_classes = {line.split("\t")[1] for line in (out / "classes.target.txt").read_text(encoding="utf-8").splitlines()}
    assert source_classes == {"0", "1"}
    assert target_classes == {"0", "1", "2"}


def test_identity_labels_conflict_with_label_files(tmp_path, write_lines, parallel_files):
    labels = write_lines("src.tags", ["s0\tA"])
    assert main(build_args(parallel_files, tmp_path / "out", "--identity-labels", "--source-labels", labels)) == 1


# ========== analyze ==========

@pytest.fixture
def translations(write_lines):
    rng = random.Random(23)
    vocab = [f"w{n}" for n in range(8)]
    refs = [[rng.choice(vocab) for _ in range(rng.randint(4, 9))] for _ in range(30)]

    def noisy(seed, rate):
        noise = random.Random(seed)
        return [" ".join(w if noise.random() > rate else noise.choice(vocab) for w in ref) for ref in refs]

    return {
        "reference": write_lines("ref.txt", [" ".join(ref) for ref in refs]),
        "baseline": write_lines("base.txt", noisy(1, 0.5)),
        "all": write_lines("all.txt", noisy(2, 0.3)),
        "each": write_lines("each.txt", noisy(3, 0.3)),
        "lex": write_lines("lex.txt", noisy(4, 0.4)),
    }


def analyze_args(files, output_dir, systems, *extra):
    argv = ["analyze", "--reference", files["reference"], "--baseline", files["baseline"],
            "--output-dir", str(output_dir), "--bootstrap-samples", "30", "--top-k", "5", *extra]
    for name in systems:
        argv += ["--system", f"{name}={files[name]}"]
    return argv


def test_system_equal_to_baseline_has_zero_deltas(tmp_path, translations):
    translations = dict(translations, same=translations["baseline"])
    out = tmp_path / "out"
    assert main(analyze_args(translations, out, ["same"])) == 0
    metrics = (out / "metrics.tsv").read_text(encoding="utf-8").splitlines()
    baseline_row = metrics[1].split("\t")
    same_row = metrics[2].split("\t")
    assert baseline_row[0] == "baseline" and same_row[0] == "same"
    assert baseline_row[1:3] == same_row[1:3]
    assert same_row[3:] == ["0.5000", "0.5000"]
    for line in (out / "topk_same.tsv").read_text(encoding="utf-8").splitlines()[1:]:
        assert float(line.split("\t")[3]) == 0.0


def test_overlap_report_has_unit_diagonal(tmp_path, translations):
    out = tmp_path / "out"
    assert main(analyze_args(translations, out, ["all", "each", "lex"])) == 0
    rows = [line.split("\t") for line in (out / "overlap.tsv").read_text(encoding="utf-8").splitlines()[1:]]
    assert len(rows) == 9
    for system_a, system_b, k, common, same in rows:
        assert k == "5"
        if system_a == system_b:
            assert common == "1.0000" and same == "1.0000"


def test_analysis_is_byte_identical_for_fixed_seeds(tmp_path, translations):
    for run in ["first", "second"]:
        assert main(analyze_args(translations, tmp_path / run, ["all", "each"], "--bootstrap-seed", "9")) == 0
    for name in ["metrics.tsv", "overlap.tsv", "topk_all.tsv", "topk_each.tsv"]:
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_analyze_without_systems_exits_one(tmp_path, translations):
    assert main(analyze_args(translations, tmp_path / "out", [])) == 1


def test_duplicate_system_names_exit_one(tmp_path, translations):
    argv = analyze_args(translations, tmp_path / "out", ["all"]) + ["--system", f"all={translations['each']}"]
    assert main(argv) == 1


def test_system_path_with_comma_exits_one(tmp_path, translations):
    argv = analyze_args(translations, tmp_path / "out", ["all"]) + ["--system", "each=runs/a,b.txt"]
    assert main(argv) == 1


def test_top_k_larger_than_test_set_exits_one(tmp_path, translations):
    assert main(analyze_args(translations, tmp_path / "out", ["all"], "--top-k", "31")) == 1


# ========== oov ==========

def test_oov_report(tmp_path, write_lines):
    corpus = write_lines("train.txt", ["a b c", "d e", "f g h", "i j"])
    test = write_lines("test.txt", ["a d f i", "z"])
    out = tmp_path / "out"
    assert main(["oov", "--corpus", corpus, "--test", test, "--fractions", "0.25,0.5,1.0",
                 "--output-dir", str(out)]) == 0
    assert (out / "oov.tsv").read_text(encoding="utf-8").splitlines() == [
        "fraction\tsentences\tvocabulary\toov_rate",
        "0.25\t1\t3\t0.800000",
        "0.5\t2\t5\t0.600000",
        "1\t4\t10\t0.200000",
    ]


def test_decreasing_fractions_exit_one(tmp_path, write_lines):
    corpus = write_lines("train.txt", ["a"])
    assert main(["oov", "--corpus", corpus, "--test", corpus, "--fractions", "0.5,0.25",
                 "--output-dir", str(tmp_path / "out")]) == 1
