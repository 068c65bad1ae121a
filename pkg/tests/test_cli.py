import json
import subprocess
import sys

import pytest

from modunits import cli
from modunits.level import InternalInconsistency


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, json.loads(capsys.readouterr().out)


def test_index(capsys):
    assert run(capsys, "index", "--level", "12") == (0, {"level": 12, "index": 576})


def test_cusps_and_widths(capsys):
    code, out = run(capsys, "cusps", "--level", "5")
    assert code == 0 and len(out["classes"]) == 12 and out["lcm"] == 5
    code, out = run(capsys, "widths", "--subgroup", "Gamma0(4)", "--cusp", "0/1")
    assert out["widths"] == [{"cusp": "0/1", "width": 4}]


def test_conductor(capsys):
    code, out = run(capsys, "conductor", "--level", "12", "--subgroup", "Gamma(6)")
    assert code == 0 and out["conductor"] == 6 and out["lcm_widths"] == 6
    code, out = run(capsys, "conductor", "--level", "10", "--subgroup", "Gamma(4)")
    assert code == 2 and out["error"] == "precondition"


def test_expand_and_j(capsys):
    code, out = run(capsys, "expand", "--unit", "g[1/2,0]", "--prec", "2")
    assert code == 0 and out["series"]["terms"][0]["exp"] == "-1/24"
    code, out = run(capsys, "j", "--prec", "2")
    assert [t["exp"] for t in out["series"]["terms"]] == ["-1", "0", "1"]


def test_root_level(capsys):
    code, out = run(capsys, "root-level", "--unit", "g[0,1/4]^2 * g[1/2,1/4]^-2", "--prime", "2",
                    "--no-series-check")
    assert code == 0 and out["verdict"] == "LevelExactly(8)" and out["stabilizer_index"] == 2


def test_root_level_not_invariant_is_a_verdict(capsys):
    code, out = run(capsys, "root-level", "--unit", "g[1/3,0]", "--prime", "2")
    assert code == 0 and out["verdict"] == "NotPthRootCandidate"


def test_quad_test(capsys):
    code, out = run(capsys, "quad-test", "--unit", "g[0,1/4]^2 * g[1/2,1/4]^-2")
    assert code == 0 and out["square_times_j_minus_1728"] is False
    code, out = run(capsys, "quad-test", "--unit", "g[1/3,0]^6")
    assert code == 2


def test_corpus_is_seeded(capsys):
    a = run(capsys, "--seed", "3", "corpus", "--level", "3", "--prime", "3", "--count", "2")
    b = run(capsys, "--seed", "3", "corpus", "--level", "3", "--prime", "3", "--count", "2")
    assert a == b and {u["verdict"] for u in a[1]["units"]} == {"LevelExactly(9)"}


def test_parse_error_reports_byte(capsys):
    code, out = run(capsys, "expand", "--unit", "g[1/3,0", "--prec", "2")
    assert code == 2 and out == {"error": "parse", "message": out["message"], "byte": 7}


def test_bad_prime_is_input_error(capsys):
    code, out = run(capsys, "root-level", "--unit", "g[1/2,0]^12", "--prime", "4")
    assert code == 2


def test_internal_error_exit_code(capsys, monkeypatch):
    def boom(*a, **k):
        raise InternalInconsistency("forced")

    monkeypatch.setattr(cli, "index_gamma", boom)
    code, out = run(capsys, "index", "--level", "3")
    assert code == 3 and out["error"] == "internal"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "modunits", "index", "--level", "7"],
                         capture_output=True, text=True, timeout=60)
    assert res.returncode == 0 and json.loads(res.stdout)["index"] == 168


def test_argparse_errors_exit_two():
    with pytest.raises(SystemExit) as info:
        cli.main(["index", "--level", "0"])
    assert info.value.code == 2
