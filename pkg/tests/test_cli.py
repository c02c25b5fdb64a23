import subprocess
import sys

import numpy as np
import pytest

from specabs.approx import ErrorRecord, fit_rate
from specabs.cli import main
from specabs.exceptions import ConfigParseError, ConfigurationError, NumericalFailure
from specabs.studies import (StudySpec, off_kink_size, parse_config, parse_config_text,
                             run_converge, run_quad_study, run_stats, run_study)


def rows(result):
    return [r for r in result.rows if not isinstance(r, str)]


def slope(result):
    pts = rows(result)
    return np.polyfit(np.log([r[0] for r in pts]), np.log([r[1] for r in pts]), 1)[0]


class TestConfig:
    def test_minimal(self, tmp_path):
        p = tmp_path / "study.cfg"
        p.write_text("# smallest valid file\nstudy=converge\nproblem=SAE1\n")
        spec = parse_config(p)
        assert spec.method == "galerkin" and spec.degree_start == 1 and spec.degree_stop == 20
        assert spec.grid_points == 10001 and spec.dde_n == 20

    def test_unknown_key(self):
        with pytest.raises(ConfigParseError, match="line 3") as err:
            parse_config_text("study=converge\nproblem=SAE1\nfoo=1\n")
        assert err.value.lineno == 3

    def test_duplicate_key(self):
        with pytest.raises(ConfigParseError, match="line 2.*duplicate"):
            parse_config_text("problem=SAE1\nproblem=MSSAE1\nstudy=converge")

    def test_missing_key(self):
        with pytest.raises(ConfigurationError, match="problem"):
            parse_config_text("study=converge")

    @pytest.mark.parametrize("line", ["parity=prime", "method=remez", "degree_step=0",
                                      "rule=padua", "degree_start=x", "grid=1"])
    def test_bad_values_name_line(self, line):
        with pytest.raises(ConfigParseError, match="line 3"):
            parse_config_text(f"study=converge\nproblem=SAE1\n{line}\n")

    def test_parity(self):
        spec = parse_config_text("study=converge\nproblem=MSSAE1\ndegree_start=9\n"
                                 "degree_stop=15\nparity=odd")
        assert spec.sweep() == [9, 11, 13, 15]
        spec = StudySpec("quad-study", "SAE1", degree_start=8, degree_stop=512, degree_step="x2")
        assert spec.sweep() == [8, 16, 32, 64, 128, 256, 512]

    def test_empty_sweep(self):
        with pytest.raises(ConfigurationError, match="parity"):
            StudySpec("converge", "SAE1", degree_start=2, degree_stop=2, parity="odd")

    def test_off_kink_sizes(self):
        assert off_kink_size("trapezoid", 8) == 9
        assert off_kink_size("simpson", 8) == 10 and off_kink_size("simpson", 10) == 10
        assert off_kink_size("gauss", 8) == 8


class TestConverge:
    def test_smooth_final_error(self):
        r = run_converge(StudySpec("converge", "SAE1", degree_start=1, degree_stop=20))
        assert len(rows(r)) == 20
        assert rows(r)[-1][2] < 1e-10

    def test_square_root_collocation_rate(self):
        spec = StudySpec("converge", "MNSSAE1", method="collocation", degree_start=9,
                         degree_stop=63, parity="odd")
        recs = [ErrorRecord(d, n, e) for d, n, e, _ in rows(run_converge(spec))]
        assert -0.65 <= fit_rate(recs, (9, 63)) <= -0.35

    def test_oscillator_collocation_rate(self):
        spec = StudySpec("converge", "OSC_MSSAE", method="collocation", degree_start=2,
                         degree_stop=24)
        recs = run_converge(spec).records
        assert -1.3 <= fit_rate(recs) <= -0.7

    def test_deterministic_csv(self):
        spec = StudySpec("converge", "MSSAE1", degree_start=3, degree_stop=9)
        a, b = run_converge(spec).to_csv(), run_converge(spec).to_csv()
        assert a == b
        lines = a.splitlines()
        assert lines[0] == "# schema=1"
        assert "# problem=MSSAE1" in lines and "# error_grid=10001^1" in lines
        assert any(line.startswith("# rule_sizes=gauss_legendre(12)") for line in lines)
        assert "degree,n_coeffs,rel_linf_error,wall_ms" in lines

    def test_fixed_rule_size_flags(self):
        spec = StudySpec("converge", "SAE1", degree_start=8, degree_stop=10, rule_size="4")
        r = run_converge(spec)
        assert any("not exact" in n for n in r.notes)


class TestQuadStudy:
    @pytest.mark.parametrize("problem, rule, expected, tol", [
        ("SAE1", "trapezoid", -2.0, 0.3),
        ("MNSSAE1", "simpson", -1.5, 0.3),
        ("MSSAE1", "clenshaw_curtis", -2.0, 0.3),
    ])
    def test_slopes(self, problem, rule, expected, tol):
        spec = StudySpec("quad-study", problem, rule=rule, degree_start=8, degree_stop=512,
                         degree_step="x2")
        assert abs(slope(run_quad_study(spec)) - expected) <= tol

    def test_simpson_odd_skipped(self):
        spec = StudySpec("quad-study", "SAE1", rule="simpson", degree_start=5, degree_stop=8)
        r = run_quad_study(spec)
        # M=8 shifts to 10, which is already present
        assert [x[0] for x in rows(r)] == [6, 10]
        assert sum(isinstance(x, str) and "skipped" in x for x in r.rows) == 2
        assert "# warning: skipped M=5, Simpson's rule needs an even M" in r.to_csv()

    def test_two_dimensional_reference(self):
        spec = StudySpec("quad-study", "OSC_SAE", rule="padua", degree_start=4, degree_stop=16,
                         degree_step="2")
        r = run_quad_study(spec)
        assert r.meta["reference"] == "padua(199)"
        assert rows(r)[-1][1] < 1e-10


class TestStats:
    def test_kinked(self):
        spec = StudySpec("stats", "MSSAE1", degree_stop=200, rule="gauss", rule_size="256")
        rep = run_stats(spec).report
        assert abs(rep.mean - 0.25) < 1e-10
        assert abs(rep.variance - 5 / 48) < 1e-3

    def test_square_root(self):
        rep = run_stats(StudySpec("stats", "MNSSAE1", degree_stop=200)).report
        assert abs(rep.mean - 1 / 3) < 1e-8
        assert abs(rep.variance - 5 / 36) < 2e-3

    def test_oscillator_totals_identity(self):
        r = run_stats(StudySpec("stats", "OSC_SAE", degree_stop=8))
        rep = r.report
        assert abs(rep.total.sum() - (1 + rep.sobol[(1, 2)])) < 1e-10
        assert "sobol,{1 2}," in r.to_csv()
        assert "S{1,2}" in r.text


class TestOtherStudies:
    def test_eval(self):
        r = run_study(StudySpec("eval", "MSSAE1", grid="5"))
        assert [x[1] for x in rows(r)] == [0, 0, 0, 0.5, 1]

    def test_approx(self):
        r = run_study(StudySpec("approx", "MSSAE1", degree_stop=2, rule="gauss", rule_size="40"))
        assert [x[0] for x in rows(r)] == [0, 1, 2]
        assert r.columns == ("k", "i1", "coeff")


class TestCommandLine:
    def test_writes_csv(self, tmp_path):
        out = tmp_path / "c.csv"
        assert main(["converge", "--problem", "SAE1", "--degree-stop", "6",
                     "--out", str(out)]) == 0
        text = out.read_text()
        assert text.startswith("# schema=1\n") and text.count("\n") > 6

    def test_config_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("study=converge\nproblem=SAE1\ndegree_stop=30\n")
        assert main(["converge", "--config", str(cfg), "--degree-stop", "3"]) == 0
        out = capsys.readouterr().out
        assert "# degree_stop=3" in out

    def test_config_error_exit(self, tmp_path, capsys):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("study=converge\nproblem=SAE1\nfoo=1\n")
        assert main(["converge", "--config", str(cfg)]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_study_mismatch(self, tmp_path):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("study=stats\nproblem=SAE1\n")
        assert main(["converge", "--config", str(cfg)]) == 2

    def test_missing_config(self, tmp_path):
        assert main(["converge", "--config", str(tmp_path / "nope.cfg")]) == 2

    def test_short_sweep_has_no_slope(self, capsys):
        assert main(["converge", "--problem", "SAE1", "--degree-stop", "2"]) == 0
        assert "fitted_slope" not in capsys.readouterr().out

    def test_numerical_failure_exit(self, monkeypatch, capsys):
        def boom(spec, **kw):
            raise NumericalFailure("eigensolver did not converge")
        monkeypatch.setattr("specabs.cli.run_study", boom)
        assert main(["eval", "--problem", "OSC_SAE"]) == 3
        assert "numerical failure" in capsys.readouterr().err

    def test_console_script(self):
        proc = subprocess.run([sys.executable, "-m", "specabs.cli", "stats", "--problem", "SAE1",
                               "--degree-stop", "10"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "mean,,1.1752011936438" in proc.stdout
        assert "variance" in proc.stderr
