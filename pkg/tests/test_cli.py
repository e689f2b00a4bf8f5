import json
import subprocess
import sys

import pytest

from fracdiv import __version__
from fracdiv.cli import main
from fracdiv.divisors import load_table


@pytest.fixture(autouse=True)
def _cache(tmp_path, monkeypatch):
    monkeypatch.setenv("FRACDIV_CACHE_DIR", str(tmp_path / "cache"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(out):
    first, _, rest = out.partition("\n")
    assert first.startswith(f"# fracdiv {__version__} ")
    return rest


def test_fracsum_both(capsys):
    code, out, _ = run(capsys, "fracsum", "--k", "2", "--x", "10", "--algo", "both")
    assert code == 0
    assert body(out) == "naive\t17\nblocks\t17\n"


def test_exppair_word(capsys):
    code, out, _ = run(capsys, "exppair", "--word", "BAAAAA", "--kappa", "13/84", "--lambda", "55/84")
    assert code == 0
    assert "1653/3494 1760/3494" in out
    assert "theta_below_9/19\ttrue" in out


def test_exppair_json_and_lwy(capsys):
    code, out, _ = run(capsys, "exppair", "--lwy", "3", "--search", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["meta"]["command"] == "exppair"
    assert doc["result"]["lwy_theta"]["theta"] == "14/29"
    assert doc["result"]["pair"]["theta"] == "9/19"


def test_ledger(capsys):
    code, out, _ = run(capsys, "ledger", "--nu", "9/19")
    assert code == 0
    assert "case I\t77/171" in out
    assert "overall\t9/19" in out


def test_tau_and_sieve(tmp_path, capsys):
    assert run(capsys, "tau", "--k", "3", "--n", "8")[1].endswith("\n10\n")
    dump = tmp_path / "t.bin"
    code, out, _ = run(capsys, "sieve", "--k", "2", "--limit", "10", "--dump", str(dump))
    assert code == 0 and "summatory\t27" in out
    assert load_table(dump).values[1:].tolist() == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4]


def test_constant(capsys):
    code, out, _ = run(capsys, "constant", "--k", "2", "--trunc", "1", "--digits", "5")
    assert code == 0 and "value\t0.5" in out


def test_decomp_check(capsys):
    code, out, _ = run(capsys, "decomp-check", "--k", "2", "--x", "100", "--format", "csv")
    assert code == 0
    lines = body(out).splitlines()
    assert lines[0] == "N,lhs,rhs,main_part,psi_part,equal"
    assert len(lines) == 4 and all(l.endswith(",true") for l in lines[1:])


def test_vaaler_scan(capsys):
    code, out, _ = run(capsys, "vaaler-scan", "--H", "1,4", "--grid", "200", "--format", "json")
    assert code == 0
    res = json.loads(out)["result"]
    assert [r["H"] for r in res] == [1, 4]
    assert all(r["max_violation"] <= 1e-9 for r in res)


def test_expsum_and_triple(capsys):
    code, out, _ = run(capsys, "expsum", "--h", "1", "--x", "1000000", "--D", "10,1000")
    assert code == 0
    assert body(out).splitlines()[0] == "h,x,D,shift,magnitude,vdc_bound,ratio"
    code, out, _ = run(capsys, "triple-sum", "--samples", "3", "--seed", "1")
    assert code == 0
    recs = json.loads(out)["result"]
    assert len(recs) == 3 and all("ratio" in r for r in recs)


def test_errscan_csv(capsys):
    code, out, _ = run(capsys, "errscan", "--k", "1", "--xs", "10,100", "--tail", "1e-3", "--no-timing")
    assert code == 0
    lines = body(out).splitlines()
    assert lines[0].split(",")[:6] == ["x", "S", "C_truncN", "C_value", "tail_bound", "E"]
    assert lines[1].startswith("10,10,") and lines[2].startswith("100,100,")


def test_out_file_has_header(tmp_path, capsys):
    path = tmp_path / "o.txt"
    code, out, _ = run(capsys, "ledger", "--nu", "1/2", "--out", str(path))
    assert code == 0 and out == ""
    text = path.read_text()
    assert text.startswith("# fracdiv ") and "overall\t1/2" in text


def test_byte_identical_across_threads(tmp_path, capsys):
    paths = []
    for threads in ("1", "3"):
        p = tmp_path / f"scan{threads}.csv"
        args = ["errscan", "--k", "2", "--xs", "1000,10000,100000", "--tail", "1e-3", "--no-timing"]
        assert run(capsys, *args, "--threads", threads, "--out", str(p))[0] == 0
        paths.append(p)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_exit_codes(capsys):
    assert run(capsys, "bogus")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "ledger", "--nu", "0.5")[0] == 1
    assert run(capsys, "tau", "--k", "2", "--n", "0")[0] == 1
    assert run(capsys, "exppair", "--kappa", "3/4", "--lambda", "1/2")[0] == 1
    code, _, err = run(capsys, "fracsum", "--k", "2", "--x", "1e9", "--algo", "naive")
    assert code == 2 and "fracsum_blocks" in err
    assert run(capsys, "tau", "--k", "1000", "--n", "1024")[0] == 2
    assert run(capsys, "constant", "--k", "5", "--tail", "1e-30")[0] == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "fracdiv", "fracsum", "--k", "2", "--x", "10"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert res.returncode == 0
    assert res.stdout.splitlines()[-1] == "blocks\t17"
