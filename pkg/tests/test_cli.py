import io
import subprocess
import sys
from pathlib import Path

import pytest

from eslab.cli import main
from eslab.gen import FIXTURE_NAMES, fixture
from eslab.io import parse_labels, read_es, serialize_es
from eslab.labelling import STRATEGIES, verify_labelling

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
S_FILE = str(FIXTURES / "S.es")


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), stdout=out)
    return code, out.getvalue()


def fields(text):
    return dict(line.split(": ", 1) for line in text.splitlines())


def test_validate():
    code, out = run("validate", S_FILE)
    assert code == 0
    f = fields(out)
    assert f["valid"] == "true" and f["events"] == "9" and f["orthogonal_pairs"] == "16"


def test_analyze_exact_and_bounds():
    code, out = run("analyze", S_FILE)
    f = fields(out)
    assert code == 0
    assert (f["degree"], f["width"], f["height"], f["chromatic"]) == ("3", "5", "2", "4")
    assert f["chromatic_method"] == "exact"
    code, out = run("analyze", S_FILE, "--exact-cap", "3")
    f = fields(out)
    assert code == 0 and f["chromatic"] == "unknown" and f["chromatic_reason"] == "ExceedsCap"
    assert f["chromatic_lower_bound"] == "3 (clique)" and f["chromatic_upper_bound"] == "4 (greedy)"
    f = fields(run("analyze", S_FILE, "--max-events-exact", "4")[1])
    assert f["chromatic_reason"] == "SizeLimitExceeded"


def test_label_exact_prints_letters():
    code, out = run("label", S_FILE, "--strategy", "exact")
    f = fields(out)
    assert code == 0
    assert f["alphabet_size"] == "4" and f["verified"] == "true"
    assert sum(k.startswith("label.") for k in f) == 9


def test_label_stratifier_choice():
    f = fields(run("label", S_FILE, "--strategy", "stratified")[1])
    assert f["alphabet_size"] == "9"
    f = fields(run("label", S_FILE, "--strategy", "stratified", "--stratifier", "optimal")[1])
    assert f["alphabet_size"] == "5"


def test_forest_on_s_is_an_error(capsys):
    code, _ = run("label", S_FILE, "--strategy", "forest")
    assert code == 1
    assert capsys.readouterr().err.startswith("NotAForest: ")


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_check_accepts_every_strategy_output(name, tmp_path):
    es_file = str(FIXTURES / f"{name}.es")
    for strategy in STRATEGIES:
        out_file = tmp_path / f"{strategy}.labels"
        code, out = run("label", es_file, "--strategy", strategy, "-o", str(out_file))
        if code == 1:
            assert strategy in ("forest", "simple")
            continue
        assert code == 0 and fields(out)["output"] == str(out_file)
        lab = parse_labels(out_file.read_text())
        assert verify_labelling(read_es(es_file), lab) == []
        code, out = run("check", es_file, "--labels", str(out_file))
        assert code == 0 and fields(out)["valid"] == "true"


def test_check_reports_violations(tmp_path):
    bad = tmp_path / "bad.labels"
    bad.write_text("".join(f"label {k} 0\n" for k in range(1, 10)))
    code, out = run("check", S_FILE, "--labels", str(bad))
    assert code == 1
    assert fields(out)["violations"] == "16"
    assert "valid: false" in out


def test_domain(tmp_path):
    dot = tmp_path / "d.dot"
    code, out = run("domain", S_FILE, "--dot", str(dot))
    f = fields(out)
    assert code == 0
    assert (f["configurations"], f["hasse_edges"], f["branching_degree"], f["degree"]) == ("23", "35", "3", "3")
    assert f["chopped_lattice"] == "ok"
    assert dot.read_text().startswith("digraph domain {")
    labels = tmp_path / "s.labels"
    run("label", S_FILE, "--strategy", "exact", "-o", str(labels))
    f = fields(run("domain", S_FILE, "--labels", str(labels))[1])
    assert f["perspective_violations"] == "0"
    code, _ = run("domain", S_FILE, "--max-configs", "5")
    assert code == 1


def test_graph(tmp_path):
    dot = tmp_path / "g.dot"
    code, out = run("graph", S_FILE, "--dot", str(dot))
    f = fields(out)
    assert code == 0 and f["vertices"] == "9" and f["edges"] == "16" and f["clique_number"] == "3"
    assert dot.read_text().count("[style=bold]") == 3


def test_gen_is_deterministic(tmp_path):
    a = run("gen", "random", "--events", "25", "--seed", "4")[1]
    b = run("gen", "random", "--events", "25", "--seed", "4")[1]
    assert a == b and a.startswith("event e00\n")
    target = tmp_path / "f.es"
    code, out = run("gen", "forest", "--events", "10", "--seed", "2", "-o", str(target))
    assert code == 0 and len(read_es(str(target))) == 10
    code, out = run("gen", "fixture", "S")
    assert out == serialize_es(fixture("S"))
    code, out = run("gen", "simple", "--events", "12", "--seed", "1", "--degree-cap", "2")
    assert code == 0


def test_verify_theory():
    code, out = run("verify-theory", S_FILE)
    assert code == 0
    assert set(fields(out).values()) <= {"ok", "skipped"}
    code, out = run("verify-theory", "--random", "--count", "6", "--events", "12", "--seed", "3")
    assert code == 0 and set(fields(out).values()) == {"ok"}


def test_usage_and_input_errors(tmp_path, capsys):
    assert run()[0] == 2
    assert run("label", S_FILE)[0] == 2
    assert run("gen", "random", "--events", "-3", "--seed", "0")[0] == 2
    assert run("validate", str(tmp_path / "missing.es"))[0] == 2
    broken = tmp_path / "broken.es"
    broken.write_text("event a\nbogus b\n")
    code, _ = run("validate", str(broken))
    assert code == 1
    assert capsys.readouterr().err.strip().endswith("line 2, col 1: unknown directive 'bogus'")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "eslab", "validate", S_FILE], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and "valid: true" in proc.stdout
