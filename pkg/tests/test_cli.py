import io
import json
import os
import subprocess
import sys

import pytest

from pdet.cli import parse_prefactor, run
from pdet.diffop import RatFunc


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_detp_with_prefactor():
    code, out, _ = call("detp", "--op", "d0.json", "--prefactor", "-(1+t)", "--prime", "5")
    assert code == 0
    assert out.strip() == "4*t^2 + 4*t^3 (mod 5)"


def test_detp_several_primes_json():
    code, out, _ = call("detp", "--op", "intro", "--prime", "7,5", "--format", "json")
    rows = json.loads(out)["detp"]
    assert code == 0 and [r["prime"] for r in rows] == [7, 5]
    assert rows[0]["coefficients"] == [0, 0, 2, 5, 5, 2]


def test_detp_non_polynomial():
    code, _, err = call("detp", "--op", "d0", "--prime", "5")
    assert code == 2 and "--order" in err
    code, out, _ = call("detp", "--op", "d0", "--prime", "5", "--order", "5")
    assert code == 0 and out.strip() == "t^2 + t^3 + O(t^5) (mod 5)"


def test_lambda_heun():
    code, out, _ = call("lambda", "--variant", "heun", "--order", "8")
    assert code == 0
    assert out.strip() == ("1/2*t + 1/24*t^2 + 25/144*t^3 - 11/17280*t^4 + 70591/518400*t^5"
                           " - 774601/24192000*t^6 + 2215989011/15240960000*t^7 + O(t^8)")


def test_lambda_elliptic_json():
    code, out, _ = call("lambda", "--variant", "elliptic", "--order", "3", "--format", "json")
    assert json.loads(out)["coefficients"] == ["1/1", "1/4", "9/64"]


def test_ldet_unperturbed():
    code, out, _ = call("ldet", "--op", "unperturbed.json", "--order", "6")
    assert code == 0
    assert out.splitlines()[0] == "L(D) = 0 + O(t^6)"
    assert "certified order" in out


def test_ldet_json_is_stable():
    a = json.loads(call("ldet", "--op", "d0", "--order", "4", "--format", "json")[1])
    b = json.loads(call("ldet", "--op", "d0", "--order", "4", "--format", "json")[1])
    a.pop("timing"), b.pop("timing")
    assert a == b
    assert a["ldet"] == ["0/1", "0/1", "-1/4", "-1/24"] and a["certified_order"] == 4


def test_wpoly():
    code, out, _ = call("wpoly", "--op", "minus_d1", "--order", "4")
    assert code == 0
    assert out.splitlines() == ["w_1 = 0 + O(t^4)", "w_2 = -1/16*t^2 - 9/128*t^3 + O(t^4)"]


def test_verify_pass_and_cache(tmp_path):
    code, out, _ = call("verify", "--op", "intro", "--primes", "2,5,7", "--order", "5",
                        "--cache-dir", str(tmp_path))
    assert code == 0 and "skipped" in out and "FAIL" not in out
    assert len(list(tmp_path.iterdir())) == 1


def test_verify_mismatch_exit_code(tmp_path):
    # a forged cache entry makes the congruence fail: exit 1, not 2
    from pdet.diffop import bundled_operator
    from pdet.series import TruncSeries
    from pdet.verify import CoefficientCache
    D = bundled_operator("intro")
    CoefficientCache(tmp_path).store(D.digest(), "ldet", 4, TruncSeries([0, 0, 1, 1]))
    code, out, _ = call("verify", "--op", "intro", "--primes", "7", "--order", "4",
                        "--cache-dir", str(tmp_path), "--format", "json")
    assert code == 1 and json.loads(out)["passed"] is False


def test_denoms():
    code, out, _ = call("denoms", "--order", "10")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 8
    assert "documented exception" in lines[4]
    code, out, _ = call("denoms", "--order", "6", "--format", "json")
    assert json.loads(out)["agrees"] is True


def test_monodromy_num():
    code, out, _ = call("monodromy-num", "--op", "intro", "--t", "0.01", "--radius", "0.5",
                        "--format", "json")
    data = json.loads(out)
    assert code == 0 and len(data["eigenvalues"]) == 2
    code, _, err = call("monodromy-num", "--op", "intro", "--t", "0.01", "--radius", "1")
    assert code == 2 and "leading coefficient" in err


@pytest.mark.parametrize("argv", [
    ("bogus",),
    ("ldet", "--op", "missing.json"),
    ("ldet", "--op", "d0", "--order", "0"),
    ("detp", "--op", "d0", "--prime", "9"),
    ("detp", "--op", "d0", "--prime", "5,5"),
    ("lambda", "--variant", "weird"),
    ("detp", "--op", "intro", "--prime", "5", "--prefactor", "t**"),
])
def test_usage_errors(argv):
    assert call(*argv)[0] == 2


def test_malformed_operator_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"n": 1, "l": [0], "m": 1, "coeffs": [{"i": 0, "k": 1, "num": [1], "den": [1]}]}')
    code, _, err = call("ldet", "--op", str(p))
    assert code == 2 and "t_(0,1)" in err


def test_parse_prefactor():
    assert parse_prefactor("-(1+t)") == RatFunc([-1, -1])
    assert parse_prefactor("2/(1-t)") == RatFunc([2], [1, -1])


def test_console_script():
    env = dict(os.environ)
    proc = subprocess.run([sys.executable, "-m", "pdet.cli", "lambda", "--variant", "elliptic",
                           "--order", "2"], capture_output=True, text=True, env=env)
    assert proc.returncode == 0 and proc.stdout.strip() == "1 + 1/4*t + O(t^2)"
    proc = subprocess.run([sys.executable, "-m", "pdet.cli", "nope"], capture_output=True, text=True)
    assert proc.returncode == 2
