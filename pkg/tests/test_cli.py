from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import pytest

from zfcert import reference as ref
from zfcert.certificate import decode_value
from zfcert.cli import ConfigError, RunConfig, main, parse_config
from zfcert.store import CertificateStore
from zfcert.suite import ITERATION_INPUTS, REGISTRY


@pytest.fixture(scope="module")
def cache(tmp_path_factory, suite_ctx, variant_ctx):
    """A certificate store filled from the shared contexts, so CLI runs reuse their work."""
    root = tmp_path_factory.mktemp("cache")
    store = CertificateStore(root)
    for ctx, ids in ((suite_ctx, list(REGISTRY)), (variant_ctx, list(ITERATION_INPUTS))):
        digest = ctx.digest()
        for i in ids:
            store.save(ctx.get(i), i, digest)
    return root


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_unknown_lemma_exits_2(capsys):
    code, _, err = run(capsys, "verify", "--lemma", "9.9", "--no-cache")
    assert code == 2 and "unknown lemma" in err


def test_verify_single_certificate_json(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--lemma", "kappa-positivity", "--deterministic", "--no-cache")
    assert code == 0
    report = json.loads(out)
    assert report["schema"] == "zfcert-report/1" and "generated_at" not in report
    assert report["summary"]["PASS"] == 1
    assert report["certificates"][0]["id"] == "kappa-positivity"


def test_verify_markdown_and_out_path(capsys, tmp_path):
    target = tmp_path / "sub" / "report.md"
    code, out, _ = run(capsys, "verify", "--lemma", "trig-coefficients", "--format", "md", "--out", str(target),
                       "--no-cache")
    assert code == 0 and out == ""
    text = target.read_text()
    assert text.startswith("# Certificate report") and "1 of 1 certificates PASS." in text


def test_verify_csv_is_rejected(capsys):
    code, _, err = run(capsys, "verify", "--lemma", "trig-coefficients", "--format", "csv", "--no-cache")
    assert code == 2 and "csv" in err


def test_verify_all_reports_every_certificate_once(capsys, cache):
    code, out, _ = run(capsys, "verify", "--all", "--deterministic", "--cache-dir", str(cache))
    report = json.loads(out)
    ids = [c["id"] for c in report["certificates"]]
    assert sorted(ids) == sorted(REGISTRY) and len(ids) == len(set(ids))
    assert report["summary"]["PASS"] >= 20
    # the printed m_5 fails its certificate, so the exit code reports a non-PASS certificate
    failed = [c["id"] for c in report["certificates"] if c["status"] != "PASS"]
    assert failed == ["mp-5"] and code == 1


def test_verify_table_alias(capsys, cache):
    code, out, _ = run(capsys, "verify", "--lemma", "table", "--lemma", "trig-lower-bound", "--deterministic",
                       "--cache-dir", str(cache))
    ids = [c["id"] for c in json.loads(out)["certificates"]]
    assert len(ids) == 26 and ids[-1] == "trig-lower-bound" and code == 1


def test_constants_rows(capsys, cache):
    code, out, _ = run(capsys, "constants", "--deterministic")
    rows = {r["name"]: r for r in json.loads(out)["constants"]}
    assert code == 0
    assert rows["w(0)"]["printed"] is not None and rows["w(0)"]["agrees"]
    assert rows["kappa"]["value"] == "433/859" and rows["kappa"]["agrees"]
    assert rows["mu0"]["agrees"]


def test_constants_csv(capsys):
    code, out, _ = run(capsys, "constants", "--format", "csv")
    table = list(csv.reader(io.StringIO(out)))
    assert code == 0 and table[0] == ["name", "printed", "certified", "agrees"]
    assert any(r[0] == "efficiency" and r[2] == "859/433" for r in table)


def test_mp_table_csv(capsys, cache):
    code, out, _ = run(capsys, "mp-table", "--format", "csv", "--cache-dir", str(cache))
    table = list(csv.reader(io.StringIO(out)))
    assert len(table) == 26
    status = {r[0]: r[4] for r in table[1:]}
    assert status["2"] == "PASS" and status["97"] == "PASS" and status["5"] == "FAIL"
    assert code == 1


def test_final_default(capsys, cache):
    code, out, _ = run(capsys, "final", "--deterministic", "--cache-dir", str(cache))
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "PASS"
    assert decode_value(report["final_constant"]).lo > ref.VARIANT_A0["4.896"]
    assert abs(float(decode_value(report["crossover_log_t"]).mid()) - 76.463) < 1e-2


def test_final_markdown_has_coverage(capsys, cache):
    code, out, _ = run(capsys, "final", "--format", "md", "--cache-dir", str(cache))
    assert code == 0 and "## Coverage" in out and "verdict: PASS" in out


def test_final_second_variant(capsys, cache):
    # the boundary certificate misses the printed 138 for this variant (137.78), so the run fails there
    code, out, _ = run(capsys, "final", "--variant", "4.8594", "--deterministic", "--cache-dir", str(cache))
    report = json.loads(out)
    assert decode_value(report["log_t_max"]) == Fraction("56.693")
    assert report["first_failure"] == "boundary-nonnegativity" and code == 1


def test_final_target_one_quarter_fails(capsys, cache):
    code, out, _ = run(capsys, "final", "--A0", "1/4", "--deterministic", "--cache-dir", str(cache))
    report = json.loads(out)
    assert code == 1 and report["verdict"] == "FAIL"
    assert report["first_failure"] == "printed_route_closes"


def test_final_is_byte_identical_when_deterministic(capsys, cache):
    _, first, _ = run(capsys, "final", "--deterministic", "--cache-dir", str(cache))
    _, second, _ = run(capsys, "final", "--deterministic", "--cache-dir", str(cache))
    assert first == second


def test_jobs_match_serial_run(capsys):
    args = ("verify", "--lemma", "mp-2", "--lemma", "mp-3", "--deterministic", "--no-cache")
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--jobs", "2")
    assert serial == parallel


def test_cache_is_written_and_reused(capsys, tmp_path):
    args = ("verify", "--lemma", "kappa-positivity", "--deterministic", "--cache-dir", str(tmp_path))
    _, first, _ = run(capsys, *args)
    assert len(list(tmp_path.glob("*.json"))) == 1
    _, second, _ = run(capsys, *args)
    assert first == second


def test_search_command(capsys):
    code, out, _ = run(capsys, "search", "--degree", "0", "--deterministic")
    report = json.loads(out)
    assert code == 0 and len(report["leaderboard"]) == 1
    code, _, err = run(capsys, "search", "--degree", "13")
    assert code == 2


def test_list_command(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0 and len(out.splitlines()) == len(REGISTRY)


def test_config_parsing(tmp_path):
    cfg = parse_config("A0 = 5000/24297\nvariant = 4.8594\nkappa = 1, -1/2  # two terms\n")
    assert cfg.target_A0 == ref.VARIANT_A0["4.8594"] and cfg.kappa == (1, Fraction(-1, 2))
    assert RunConfig().endpoint == ref.LOG_T_MAX["4.896"]
    for bad in ("nonsense", "colour = red", "precision = many", "variant = 9.9", "theta = 1/0"):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_config_file_flag(capsys, tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("format = md\n")
    code, out, _ = run(capsys, "verify", "--lemma", "trig-coefficients", "--config", str(path), "--no-cache")
    assert code == 0 and out.startswith("# Certificate report")
    code, _, err = run(capsys, "verify", "--lemma", "trig-coefficients", "--config", str(tmp_path / "missing"))
    assert code == 2 and "config" in err
