import json
import math

import pytest

from thetafock.cli import UsageError, main, parse_complex, parse_point


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_cfg(tmp_path, **kw):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(kw))
    return str(p)


class TestParsers:
    @pytest.mark.parametrize("text, val", [("1+2j", 1 + 2j), ("1+2i", 1 + 2j), ("0.5,-1", 0.5 - 1j), ("3", 3), ("-2i", -2j)])
    def test_complex(self, text, val):
        assert parse_complex(text) == val

    def test_complex_bad(self):
        with pytest.raises(UsageError):
            parse_complex("one")

    def test_point(self):
        p = parse_point("0.3+0.1j;2,1j")
        assert p.z == 0.3 + 0.1j and p.zprime == (2, 1j)


class TestCommands:
    def test_theta(self, capsys):
        code, out, _ = run(capsys, "theta", "--tau", "0,1")
        d = json.loads(out)
        assert code == 0
        assert d["re"] == pytest.approx(math.pi**0.25 / math.gamma(0.75), rel=1e-14)
        assert {"re", "im", "n_used", "tail_bound"} <= set(d)

    def test_theta_bad_tau(self, capsys):
        code, _, err = run(capsys, "theta", "--tau", "0,-1")
        assert code == 2 and "error" in err

    def test_basis_eval(self, capsys):
        code, out, _ = run(capsys, "basis-eval", "--n", "0", "--k", "0", "--point", "0;0")
        assert code == 0 and json.loads(out)["re"] == pytest.approx(1.0)

    def test_basis_eval_wrong_k(self, capsys):
        code, _, err = run(capsys, "basis-eval", "--n", "0", "--k", "0,0", "--point", "0;0")
        assert code == 2

    def test_norm(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=2, nu=1.0, alpha=0.0)
        code, out, _ = run(capsys, "norm", "--config", cfg, "--n", "0", "--k", "0")
        d = json.loads(out)
        assert code == 0
        assert d["canonical"] == pytest.approx(math.pi**1.5 / math.sqrt(2), rel=1e-12)
        assert d["thm32"] == pytest.approx(math.sqrt(2 * math.pi) / 4, rel=1e-12)
        code, out, _ = run(capsys, "norm", "--config", cfg, "--n", "0", "--k", "2")
        assert json.loads(out)["lemma22"] is None

    def test_gram(self, capsys, tmp_path):
        csv = tmp_path / "g.csv"
        code, out, _ = run(capsys, "gram", "--n-window", "1", "--k-window", "1", "--csv", str(csv))
        d = json.loads(out)
        assert code == 0 and d["size"] == 6
        assert d["max_offdiag"] < 1e-8 and d["max_diag_err"] < 1e-8
        rows = csv.read_text().strip().splitlines()
        assert len(rows) == 7 and rows[0].startswith("index")

    @pytest.mark.parametrize("method", ["series", "closed"])
    def test_kernel_eval(self, capsys, method):
        code, out, _ = run(capsys, "kernel-eval", "--u", "0.1;0.2j", "--v=-0.3j;0.1", "--method", method)
        d = json.loads(out)
        assert code == 0 and d["method"] == method and set(d) == {"re", "im", "method", "trunc"}

    def test_kernel_methods_agree(self, capsys):
        vals = []
        for method in ("series", "closed"):
            _, out, _ = run(capsys, "kernel-eval", "--u", "0.1;0.2j", "--v=-0.3j;0.1", "--method", method)
            d = json.loads(out)
            vals.append(complex(d["re"], d["im"]))
        assert abs(vals[0] - vals[1]) < 1e-9 * abs(vals[0])

    def test_kernel_check(self, capsys):
        code, out, _ = run(capsys, "kernel-check", "--probes", "10")
        d = json.loads(out)
        assert code == 0
        assert {"max_rel_dev", "fitted_constant", "printed_constant", "fitted_tau", "printed_tau"} <= set(d)
        assert d["fitted_tau"] == pytest.approx([0.0, 2 * math.pi], abs=1e-12)

    def test_expand_reconstruct(self, capsys, tmp_path):
        out_path = tmp_path / "e.json"
        code, _, _ = run(capsys, "expand", "--input", "basis:1:2", "--out", str(out_path))
        assert code == 0
        d = json.loads(out_path.read_text())
        assert [(c["n"], c["k"]) for c in d["coeffs"]] == [(1, [2])]
        code, out, _ = run(capsys, "reconstruct", "--coeffs", str(out_path), "--point", "0;1")
        r = json.loads(out)
        code2, out2, _ = run(capsys, "basis-eval", "--n", "1", "--k", "2", "--point", "0;1")
        b = json.loads(out2)
        assert complex(r["re"], r["im"]) == pytest.approx(complex(b["re"], b["im"]), rel=1e-10)

    def test_expand_zero(self, capsys):
        code, out, _ = run(capsys, "expand", "--input", "zero")
        assert code == 0 and json.loads(out)["coeffs"] == []

    def test_table_format(self, capsys):
        code, out, _ = run(capsys, "theta", "--table")
        assert code == 0 and not out.lstrip().startswith("{")


class TestConfigErrors:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "norm", "--config", str(tmp_path / "nope.json"), "--n", "0", "--k", "0")
        assert code == 2 and "nope.json" in err

    def test_invalid_field(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=2, nu=-1.0, alpha=0.3)
        code, _, err = run(capsys, "norm", "--config", cfg, "--n", "0", "--k", "0")
        assert code == 2 and "nu" in err

    def test_missing_key(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=2, nu=1.0)
        code, _, err = run(capsys, "norm", "--config", cfg, "--n", "0", "--k", "0")
        assert code == 2 and "config.alpha" in err

    def test_bad_seed(self, capsys):
        code, _, err = run(capsys, "report", "--seed", "xyz")
        assert code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestReport:
    def test_g1_ratios(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=1, nu=1.0, alpha=0.3)
        code, out, _ = run(capsys, "report", "--config", cfg)
        ratios = json.loads(out)["calibration"]["norm_variant_ratios"]
        assert code == 0
        assert ratios["lemma22"]["ratio"] == 1.0

    def test_g2_thm32_ratio(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=2, nu=1.0, alpha=0.3)
        _, out, _ = run(capsys, "report", "--config", cfg)
        r = json.loads(out)["calibration"]["norm_variant_ratios"]["thm32"]
        assert r["ratio"] == pytest.approx(2 * math.pi, rel=1e-12)
        assert r["spread"] < 1e-12

    def test_byte_stable(self, capsys):
        _, a, _ = run(capsys, "report", "--seed", "5EED")
        _, b, _ = run(capsys, "report", "--seed", "5EED")
        assert a == b


class TestVerifyAll:
    def test_unreachable_tolerance(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=1, nu=1.0, alpha=0.3, theta_tol=1e-300)
        code, out, err = run(capsys, "verify-all", "--config", cfg)
        assert code == 1
        assert "Unreachable" in err or "unreachable" in err
        assert json.loads(out)["all_passed"] is False

    def test_g1_passes(self, capsys, tmp_path):
        cfg = write_cfg(tmp_path, g=1, nu=1.0, alpha=0.3)
        code, out, _ = run(capsys, "verify-all", "--config", cfg)
        d = json.loads(out)
        assert code == 0 and d["all_passed"]
        assert len(d["checks"]) == 10
