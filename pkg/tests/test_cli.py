"""Exit codes and output of the dexp command line."""

import csv
import io

import pytest

from dexp.cli import main


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_run_prints_one_line_per_command(tmp_path, capsys):
    path = write(tmp_path, "ok.dexp", "let n = 3\ndata.take(n)")
    assert main(["run", path]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out == ["3", "[0, 1, 2] (3 items)"]


def test_run_exits_1_on_runtime_error(tmp_path, capsys):
    path = write(tmp_path, "bad.dexp", 'data.take("x")')
    assert main(["run", path]) == 1
    captured = capsys.readouterr()
    assert "take" in captured.out


def test_run_reports_parse_errors_on_stderr(tmp_path, capsys):
    path = write(tmp_path, "broken.dexp", "data\nlet = 5")
    code = main(["run", path])
    captured = capsys.readouterr()
    assert "parse error" in captured.err
    # surviving command still evaluated, and its value is not an error
    assert code == 0
    assert captured.out.splitlines()[0].startswith("[0, 1, 2")


def test_missing_file_exits_2(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.dexp")]) == 2
    assert "no such file" in capsys.readouterr().err
    assert main(["check", str(tmp_path / "nope.dexp")]) == 2


def test_check_clean_program(tmp_path, capsys):
    path = write(tmp_path, "ok.dexp", "data.skip(1).take(2)")
    assert main(["check", path]) == 0
    assert capsys.readouterr().out == ""


def test_check_prints_tagged_diagnostics(tmp_path, capsys):
    path = write(tmp_path, "mixed.dexp", 'data.take("x")\nlet = 2')
    assert main(["check", path]) == 1
    out = capsys.readouterr().out
    assert "[parse]" in out and "[type]" in out


def test_bench_stdout_has_a_row_per_step(capsys):
    assert main(["bench", "--strategy", "live"]) == 0
    out = capsys.readouterr().out
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["step", "label", "strategy", "ms",
                       "total_calls", "calls_json"]
    assert len(rows) == 1 + 38
    assert {r[2] for r in rows[1:]} == {"live"}


def test_bench_csv_output_and_custom_script(tmp_path, capsys):
    script = write(tmp_path, "script.json",
                   '[{"text": "data"}, {"text": "data.take(2)", "label": "a"}]')
    out_path = tmp_path / "report.csv"
    code = main(["bench", "--strategy", "cbv", "--script", script,
                 "--out", str(out_path)])
    assert code == 0
    assert "wrote 2 rows" in capsys.readouterr().err
    with open(out_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert len(rows) == 3
    assert rows[2][1] == "a"


def test_bench_requires_a_strategy(capsys):
    with pytest.raises(SystemExit):
        main(["bench"])
