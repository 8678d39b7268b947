import csv
import io
import json
import subprocess
import sys

import pytest

from refinekit import gen_ladder, write_aut
from refinekit.cli import BENCH_COLUMNS, main

from conftest import DATA

SPEC = str(DATA / "spec_s0.aut")
T0 = str(DATA / "impl_t0.aut")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_trace_refines(capsys):
    code, out, _ = run(capsys, "check", "--relation", "trace", SPEC, T0)
    assert code == 0
    assert out.splitlines()[0] == "refines: true"


def test_stable_failures_counterexample(capsys):
    code, out, _ = run(capsys, "check", "--relation", "stable-failures", SPEC, T0, "--counterexample")
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "refines: false"
    assert "counterexample: req 20" in lines


@pytest.mark.parametrize("relation", ["trace", "stable-failures", "failures-divergences"])
@pytest.mark.parametrize("strategy", ["df", "bf"])
def test_identical_files(capsys, relation, strategy):
    code, _, _ = run(capsys, "check", "--relation", relation, "--strategy", strategy, SPEC, SPEC)
    assert code == 0


def test_legacy_fdr_needs_acknowledgement(capsys):
    args = ["check", "--relation", "failures-divergences", "--variant", "legacy",
            str(DATA / "incorrect_s0.aut"), str(DATA / "incorrect_s1.aut")]
    code, _, err = run(capsys, *args)
    assert code == 2
    assert "unsound" in err
    code, out, _ = run(capsys, *args, "--allow-unsound-legacy-fdr")
    assert code == 1 and out.startswith("refines: false")


def test_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.aut"
    bad.write_text("des (0,2,2)\n(0,\"a\",1)\n")
    code, _, err = run(capsys, "check", SPEC, str(bad))
    assert code == 2
    assert "line 1" in err


def test_missing_file_and_bad_usage(capsys, tmp_path):
    assert run(capsys, "check", SPEC, str(tmp_path / "nope.aut"))[0] == 2
    assert run(capsys, "check", "--relation", "bisim", SPEC, T0)[0] == 2
    assert run(capsys)[0] == 2


def test_metrics_json_and_csv(capsys):
    code, out, _ = run(capsys, "check", "--relation", "sfr", SPEC, T0, "--metrics", "json")
    assert code == 1
    data = json.loads(out.splitlines()[-1])
    assert data["refines"] is False
    assert {"working_max", "antichain_hits", "antichain_misses", "antichain_max", "pairs_done",
            "wall_time", "preprocessing_time", "spec_states", "impl_transitions"} <= set(data)
    assert (data["spec_states"], data["impl_states"]) == (5, 3)

    code, out, _ = run(capsys, "check", SPEC, T0, "--metrics", "csv", "--minimize")
    rows = list(csv.DictReader(io.StringIO("\n".join(out.splitlines()[1:]))))
    assert rows[0]["refines"] == "True"
    assert rows[0]["spec_states_reduced"] == "5"


def test_oracle_flag(capsys, tmp_path):
    code, out, _ = run(capsys, "check", "--relation", "fdr", SPEC, str(DATA / "impl_u0.aut"), "--oracle")
    assert code == 1
    assert "oracle: agrees" in out
    big = tmp_path / "big.aut"
    big.write_text(write_aut(gen_ladder(17, 1)))
    code, out, err = run(capsys, "check", str(big), str(big), "--oracle")
    assert code == 2 and out == ""
    assert "oracle budget" in err


def test_node_budget_is_an_error(capsys, tmp_path):
    path = tmp_path / "ladder.aut"
    path.write_text(write_aut(gen_ladder(5, 5)))
    code, _, err = run(capsys, "check", "--variant", "legacy", "--strategy", "bf",
                       "--node-budget", "10", str(path), str(path))
    assert code == 2 and "budget" in err


def _bench(capsys, *argv):
    code, out, _ = run(capsys, "bench", "ladder", *argv)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert tuple(rows[0]) == BENCH_COLUMNS
    return [dict(zip(rows[0], r)) for r in rows[1:]]


def test_bench_ranges_inclusive(capsys):
    rows = _bench(capsys, "--n-range", "2:6:2", "--k-range", "1:2")
    assert [(r["n"], r["k"]) for r in rows] == [(str(n), str(k)) for n in (2, 4, 6) for k in (1, 2)]
    assert all(r["verdict"] == "true" for r in rows)


def test_bench_smallest_ladder_working_max(capsys):
    (row,) = _bench(capsys, "--n-range", "2:2:1", "--k-range", "1:1:1", "--strategy", "df")
    assert row["working_max"] == "1"


def test_bench_budget_exceeded(capsys):
    (row,) = _bench(capsys, "--n-range", "10", "--k-range", "10", "--variant", "legacy",
                    "--strategy", "bf", "--node-budget", "1000000")
    assert row["verdict"] == "budget-exceeded"
    (row,) = _bench(capsys, "--n-range", "10", "--k-range", "10", "--strategy", "bf")
    assert row["verdict"] == "true"


def test_bench_bad_range(capsys):
    assert run(capsys, "bench", "ladder", "--n-range", "5:1", "--k-range", "1")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "refinekit", "check", SPEC, T0],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("refines: true")
