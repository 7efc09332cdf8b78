import json

import numpy as np

import psymtest as pt
from psymtest.cli import main

from helpers import strong_core_spec


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_measure_symmetric_function(tmp_path, capsys):
    path = tmp_path / "sym.json"
    pt.save_function(pt.SymmetricProfile(10, (np.arange(11) % 2).astype(np.uint8)), path)
    assert run_cli("measure", "--fn", path, "--set", ",".join(str(i) for i in range(10))) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["sets"][0]["symmetric_influence"] == 0.0
    assert report["sets"][0]["symmetric_influence_method"] == "exact"


def test_measure_hand_value(tmp_path, capsys):
    path = tmp_path / "f.json"
    pt.save_function(pt.TruthTable(2, [0, 1, 0, 0]), path)
    assert run_cli("measure", "--fn", path, "--set", "0,1") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["sets"][0]["symmetric_influence"] == 0.25
    assert report["sets"][0]["influence"] == 0.375


def test_measure_missing_file_exits_2(capsys):
    assert run_cli("measure", "--fn", "/nonexistent/f.json", "--set", "0") == 2
    assert "error" in capsys.readouterr().err


def test_measure_mc_fallback_for_large_n(tmp_path, capsys):
    path = tmp_path / "big.json"
    pt.save_function(pt.KLinear(40, [0, 1]), path)
    assert run_cli("measure", "--fn", path, "--set", "0", "--mc-trials", "20000") == 0
    report = json.loads(capsys.readouterr().out)
    entry = report["sets"][0]
    assert entry["influence_method"] == "mc"
    assert abs(entry["influence"] - 0.5) < 0.02


def test_experiment_is_deterministic_and_summarized(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    args = [
        "experiment", "--tester", "psym", "--fn", "profile:n=64", "--k", "2",
        "--eps", "0.1", "--trials", "200", "--seed", "7",
    ]
    assert run_cli(*args, "--out", out1) == 0
    assert run_cli(*args, "--out", out2) == 0
    assert out1.read_bytes() == out2.read_bytes()

    lines = out1.read_text().strip().splitlines()
    assert lines[0] == "trial,seed,accepted,queries,parts_found"
    assert len(lines) == 202
    summary = lines[-1].split(",")
    assert summary[0] == "SUMMARY"
    assert float(summary[2]) >= 0.9
    max_queries = int(summary[4])
    assert all(int(row.split(",")[3]) <= max_queries for row in lines[1:-1])

    from math import ceil
    from psymtest.testers import TesterConfig, _rounds, psym_partition_size, psym_query_bound

    cfg = TesterConfig()
    n = 64
    r = min(psym_partition_size(n, 2, 0.1, cfg), n)
    bound = psym_query_bound(_rounds(cfg, 2, 0.1), r, n, ceil(n / (2 * r)))
    assert max_queries <= bound


def test_experiment_junta_far_instance_exits_1(tmp_path):
    out = tmp_path / "junta.csv"
    code = run_cli(
        "experiment", "--tester", "junta", "--fn", "parity:n=64,k=6", "--k", "2",
        "--eps", "0.1", "--trials", "30", "--seed", "3", "--out", out,
    )
    assert code == 1
    summary = out.read_text().strip().splitlines()[-1].split(",")
    assert float(summary[2]) <= 0.4


def test_experiment_iso_needs_target(capsys):
    assert (
        run_cli(
            "experiment", "--tester", "iso", "--fn", "core:n=32,k=2", "--k", "2",
            "--trials", "2", "--seed", "0",
        )
        == 2
    )


def test_experiment_sampler(tmp_path):
    out = tmp_path / "sampler.csv"
    code = run_cli(
        "experiment", "--tester", "sampler", "--fn", "core:n=64,k=2", "--k", "2",
        "--delta", "0.2", "--eta", "0.2", "--trials", "20", "--seed", "1", "--out", out,
    )
    assert code == 0
    summary = out.read_text().strip().splitlines()[-1].split(",")
    assert float(summary[2]) >= 0.6


def test_lemmas_default_run_passes(capsys):
    assert run_cli("lemmas", "--n-max", "8", "--trials", "60", "--seed", "2") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["pass"] is True
    assert report["sandwich"]["violations"] == 0
    assert report["monotonicity"]["violations"] == 0
    assert report["fourier_identity"]["violations"] == 0
    ctr = report["strong_subadditivity_counterexample"]
    assert ctr["successes"] == ctr["draws"]
    assert ctr["normalized_slack_max"] > 0
    assert np.isfinite(report["weak_subadditivity_slack"]["max"])


def test_lemmas_exhaustive_small_n(capsys):
    assert run_cli("lemmas", "--n-max", "4", "--trials", "20", "--seed", "3") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["monotonicity"]["exhaustive_all_functions_violations"] == 0


def test_brute_iso_self_and_complement(tmp_path, capsys):
    f = strong_core_spec(8)
    fp = tmp_path / "f.json"
    pt.save_function(f, fp)
    assert run_cli("brute-iso", "--fn", fp, "--g", fp, "--eps", "0.1", "--trials", "3") == 0
    json.loads(capsys.readouterr().out)

    neg = pt.PartiallySymmetricCore(8, 2, f.asym, 1 - f.core)
    gp = tmp_path / "g.json"
    pt.save_function(neg, gp)
    assert run_cli("brute-iso", "--fn", fp, "--g", gp, "--eps", "0.1", "--trials", "3") == 1
    report = json.loads(capsys.readouterr().out)
    assert report["acceptance_rate"] == 0.0


def test_brute_iso_permuted_pair_accepts(tmp_path, capsys):
    rng = np.random.default_rng(4)
    f = pt.random_core_spec(8, 2, rng)
    g = pt.apply_permutation(f, pt.Permutation.random(8, rng))
    fp, gp = tmp_path / "f.json", tmp_path / "g.json"
    pt.save_function(f, fp)
    pt.save_function(g, gp)
    assert run_cli("brute-iso", "--fn", fp, "--g", gp, "--eps", "0.1", "--trials", "10", "--seed", "5") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["acceptance_rate"] >= 0.9


def test_brute_iso_refuses_oversized_enumeration(tmp_path, capsys):
    f = pt.random_function(10, np.random.default_rng(6))
    g = pt.random_function(10, np.random.default_rng(7))
    fp, gp = tmp_path / "f.json", tmp_path / "g.json"
    pt.save_function(f, fp)
    pt.save_function(g, gp)
    assert run_cli("brute-iso", "--fn", fp, "--g", gp, "--eps", "0.1") == 2


def test_resolve_function_descriptors():
    from psymtest.cli import resolve_function

    rng = np.random.default_rng(8)
    f = resolve_function("random:n=10", rng)
    assert isinstance(f, pt.TruthTable) and f.n == 10
    f = resolve_function("core:n=40,k=3", rng)
    assert isinstance(f, pt.PartiallySymmetricCore) and f.k == 3
    f = resolve_function("parity:n=16,vars=0;5;9", rng)
    assert f.indices == (0, 5, 9)
    f = resolve_function("profile:n=12", rng)
    assert isinstance(f, pt.SymmetricProfile)
