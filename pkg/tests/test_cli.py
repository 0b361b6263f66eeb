import json

import pytest

from conftest import make_tarball_from_files
from seqscan.classifier import CorpusRecord, Label, export_corpus, train_baseline
from seqscan.cli import EXIT_BAD_USAGE, EXIT_OK, EXIT_SCAN_FAILURE, main
from seqscan.model import Ecosystem
from seqscan.pipeline import scan_package


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def benign_archive(tmp_path):
    return make_tarball_from_files(
        {"setup.py": "from setuptools import setup\nsetup(name='hello')\n",
         "hello/__init__.py": "def greet():\n    return 'hi'\n"},
        tmp_path / "hello-1.0.0.tar.gz", top_dir="hello-1.0.0")


def seeded_model(tmp_path, oracle):
    # empty/near-empty sequences are benign; the golden download-chain malicious
    golden = tuple(i for entry in oracle["entries"] for i in entry["ids"])
    corpus = (
        [CorpusRecord(f"m{i}", "1", "pypi", "d", golden, Label.MALICIOUS)
         for i in range(4)]
        + [CorpusRecord(f"b{i}", "1", "pypi", "d", ("R1",), Label.BENIGN)
           for i in range(3)]
        + [CorpusRecord(f"e{i}", "1", "pypi", "d", (), Label.BENIGN)
           for i in range(3)]
    )
    model = train_baseline(corpus, n=3)
    path = tmp_path / "model.json"
    model.save(path)
    return path


def test_scan_fig3_fixture_report(tmp_path, capsys, superoptimzer_archive):
    code, out = run(capsys, "scan", str(superoptimzer_archive),
                    "--ecosystem", "pypi", "--json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["package"] == {"name": "superoptimzer", "version": "1.0.0",
                                 "ecosystem": "pypi"}
    assert report["description"].startswith("start entry superoptimizer/__init__.py")
    assert report["prediction"] is None
    assert report["feature_counts"]["R5"] == 2
    assert set(report["timings_ms"]) >= {"load", "extract", "graph", "sequence", "render"}


def test_scan_benign_with_model_predicts_benign(tmp_path, capsys, oracle):
    archive = benign_archive(tmp_path)
    model = seeded_model(tmp_path, oracle)
    code, out = run(capsys, "scan", str(archive), "--ecosystem", "pypi",
                    "--model", str(model), "--json")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["prediction"]["label"] == "benign"


def test_scan_malicious_fixture_with_model(tmp_path, capsys, superoptimzer_archive,
                                           oracle):
    model = seeded_model(tmp_path, oracle)
    code, out = run(capsys, "scan", str(superoptimzer_archive),
                    "--ecosystem", "pypi", "--model", str(model), "--json")
    report = json.loads(out)
    assert report["prediction"]["label"] == "malicious"


def test_corrupt_archive_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.tar.gz"
    bad.write_bytes(b"junk")
    code, out = run(capsys, "scan", str(bad), "--ecosystem", "pypi")
    assert code == EXIT_SCAN_FAILURE
    assert "ArchiveCorrupt" in json.loads(out)["error"]


def test_bad_usage_exit_3(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["scan", "--ecosystem", "marsupial", "x.tar.gz"])
    assert info.value.code == EXIT_BAD_USAGE
    with pytest.raises(SystemExit) as info:
        main(["no-such-command"])
    assert info.value.code == EXIT_BAD_USAGE


def test_unordered_mode_matches_render_unordered(tmp_path, capsys,
                                                 superoptimzer_archive):
    code, out = run(capsys, "scan", str(superoptimzer_archive),
                    "--ecosystem", "pypi", "--mode", "unordered", "--json")
    report = json.loads(out)
    assert "start entry" not in report["description"]
    assert report["mode"] == "unordered"


def test_batch_parallel_equals_serial(tmp_path, capsys, superoptimzer_archive):
    archive2 = benign_archive(tmp_path)
    _, serial = run(capsys, "batch", str(superoptimzer_archive), str(archive2),
                    "--ecosystem", "pypi", "--json")
    _, parallel = run(capsys, "batch", str(superoptimzer_archive), str(archive2),
                      "--ecosystem", "pypi", "--json", "--parallel", "4")

    def strip_timings(text):
        docs = [json.loads(line) for line in text.strip().split("\n")]
        for doc in docs:
            doc.pop("timings_ms", None)
        return docs

    assert strip_timings(serial) == strip_timings(parallel)


def test_export_train_eval_round_trip(tmp_path, capsys, superoptimzer_archive):
    benign = benign_archive(tmp_path)
    benign2 = make_tarball_from_files(
        {"setup.py": "from setuptools import setup\nsetup(name='copylib')\n",
         "copylib/__init__.py": "import shutil\n\n\ndef copy(a, b):\n"
                                "    return shutil.copy(a, b)\n"},
        tmp_path / "copylib-1.0.0.tar.gz", top_dir="copylib-1.0.0")
    mal_corpus = tmp_path / "mal.jsonl"
    ben_corpus = tmp_path / "ben.jsonl"
    code, _ = run(capsys, "export-corpus", str(superoptimzer_archive),
                  "--ecosystem", "pypi", "--out", str(mal_corpus),
                  "--label", "malicious")
    assert code == EXIT_OK
    code, _ = run(capsys, "export-corpus", str(benign), str(benign2),
                  "--ecosystem", "pypi", "--out", str(ben_corpus),
                  "--label", "benign")
    assert code == EXIT_OK

    combined = tmp_path / "corpus.jsonl"
    combined.write_text(mal_corpus.read_text() + ben_corpus.read_text())
    model_path = tmp_path / "model.json"
    code, _ = run(capsys, "train-baseline", "--corpus", str(combined),
                  "--out", str(model_path), "--ngram", "2")
    assert code == EXIT_OK

    code, out = run(capsys, "eval", "--corpus", str(combined),
                    "--model", str(model_path))
    assert code == EXIT_OK
    metrics = json.loads(out)
    assert metrics["precision"] == 1.0 and metrics["recall"] == 1.0


def test_eval_with_predictions_file(tmp_path, capsys):
    corpus_path = tmp_path / "c.jsonl"
    export_corpus([
        CorpusRecord("a", "1", "pypi", "d", ("D2",), Label.MALICIOUS),
        CorpusRecord("b", "1", "pypi", "d", (), Label.BENIGN),
    ], corpus_path)
    predictions = tmp_path / "p.jsonl"
    predictions.write_text(
        '{"package_name":"a","version":"1","ecosystem":"pypi","score":0.9,"label":"malicious"}\n'
        '{"package_name":"b","version":"1","ecosystem":"pypi","score":0.1,"label":"benign"}\n')
    code, out = run(capsys, "eval", "--corpus", str(corpus_path),
                    "--predictions", str(predictions))
    assert code == EXIT_OK
    metrics = json.loads(out)
    assert metrics["precision"] == 1.0 and metrics["recall"] == 1.0


def test_dump_tables(capsys):
    code, out = run(capsys, "dump-tables")
    assert code == EXIT_OK
    tables = json.loads(out)
    assert tables["version"] == 1
    assert "python" in tables["languages"]


def test_dump_graph(tmp_path, capsys, superoptimzer_archive):
    code, out = run(capsys, "dump-graph", str(superoptimzer_archive),
                    "--ecosystem", "pypi")
    assert code == EXIT_OK
    lines = [l.split("\t") for l in out.strip().split("\n")]
    assert ["superoptimizer/debug.py::__main__", "26",
            "superoptimizer/debug.py::start_sub"] in lines


def test_scan_dump_flags(tmp_path, capsys, superoptimzer_archive):
    graph_path = tmp_path / "graph.tsv"
    seq_path = tmp_path / "seq.tsv"
    code, _ = run(capsys, "scan", str(superoptimzer_archive), "--ecosystem", "pypi",
                  "--json", "--dump-graph", str(graph_path),
                  "--dump-sequence", str(seq_path))
    assert code == EXIT_OK
    assert "\t26\t" in graph_path.read_text()
    first = seq_path.read_text().splitlines()[0].split("\t")
    assert first == ["superoptimizer/__init__.py::__main__",
                     "superoptimizer/__init__.py::__main__", "1", "R1"]


def test_config_file_supplies_defaults(tmp_path, capsys, superoptimzer_archive):
    config = tmp_path / "config.json"
    config.write_text('{"json": true, "token-limit": 16}')
    code, out = run(capsys, "--config", str(config), "scan",
                    str(superoptimzer_archive), "--ecosystem", "pypi")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["truncated"] is True
    assert report["token_count"] == 16


def test_monitor_cycle_with_cursor(tmp_path, capsys):
    import threading
    from http.server import ThreadingHTTPServer

    from test_registry import Fixture

    httpd = ThreadingHTTPServer(("localhost", 0), Fixture)
    threading.Thread(target=httpd.serve_forever, daemon=True).start()
    base = f"http://localhost:{httpd.server_port}"
    cursor = tmp_path / "cursor.txt"
    dest = tmp_path / "archives"
    try:
        # first cycle: all four deduplicated events fetched and scanned
        code, out = run(capsys, "monitor", "--ecosystem", "pypi",
                        "--endpoint", f"{base}/rss",
                        "--meta-endpoint", f"{base}/pypi/{{name}}/{{version}}/json",
                        "--cursor", str(cursor), "--dest", str(dest),
                        "--since", "2023-03-01T00:00:00Z", "--min-interval", "0")
        assert code == EXIT_OK
        lines = [json.loads(l) for l in out.strip().split("\n")]
        summary = lines[-1]["monitor_summary"]
        assert summary["scanned"] == 4
        assert cursor.exists()
        assert len(list(dest.glob("*.tar.gz"))) == 4

        # second cycle resumes from the cursor: only the one strictly newer
        # event (the duplicate alpha entry's later timestamp) is scanned
        code, out = run(capsys, "monitor", "--ecosystem", "pypi",
                        "--endpoint", f"{base}/rss",
                        "--meta-endpoint", f"{base}/pypi/{{name}}/{{version}}/json",
                        "--cursor", str(cursor), "--dest", str(dest),
                        "--min-interval", "0")
        assert code == EXIT_OK
        lines = [json.loads(l) for l in out.strip().split("\n")]
        assert lines[-1]["monitor_summary"]["scanned"] == 1

        # third cycle: nothing newer remains
        code, out = run(capsys, "monitor", "--ecosystem", "pypi",
                        "--endpoint", f"{base}/rss",
                        "--meta-endpoint", f"{base}/pypi/{{name}}/{{version}}/json",
                        "--cursor", str(cursor), "--dest", str(dest),
                        "--min-interval", "0")
        assert code == EXIT_OK
        lines = [json.loads(l) for l in out.strip().split("\n")]
        assert lines[-1]["monitor_summary"]["scanned"] == 0
    finally:
        httpd.shutdown()


def test_console_script_smoke():
    import subprocess
    import sys

    proc = subprocess.run([sys.executable, "-m", "seqscan.cli", "dump-tables"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert '"version": 1' in proc.stdout


def test_scan_report_is_valid_json_schema(tmp_path, superoptimzer_archive):
    report = scan_package(superoptimzer_archive, Ecosystem.PYPI)
    doc = report.to_json_dict()
    round_tripped = json.loads(json.dumps(doc))
    assert round_tripped["schema_version"] == 1
    assert {"package", "mode", "warnings", "feature_counts", "entries",
            "description", "token_count", "truncated", "prediction",
            "timings_ms"} <= set(round_tripped)
