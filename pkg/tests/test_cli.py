import json

import pytest

from dworklab.cli import cli_main


@pytest.fixture()
def triangle_file(tmp_path):
    path = tmp_path / "triangle.json"
    path.write_text(
        json.dumps(
            {
                "n": 2,
                "terms": [
                    {"e": [0, 0], "c": "1"},
                    {"e": [1, 0], "c": "1"},
                    {"e": [0, 1], "c": "1"},
                ],
            }
        )
    )
    return str(path)


@pytest.fixture()
def family_file(tmp_path):
    path = tmp_path / "simplicial.json"
    path.write_text(
        json.dumps(
            {
                "form": "1-t*g",
                "g": {
                    "n": 2,
                    "terms": [
                        {"e": [1, 0], "c": "1"},
                        {"e": [0, 1], "c": "1"},
                        {"e": [-1, -1], "c": "1"},
                    ],
                },
            }
        )
    )
    return str(path)


def run(capsys, argv):
    code = cli_main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestExitCodes:
    def test_usage_error_is_2(self, capsys):
        code, _, err = run(capsys, ["hw", "--prime", "5"])
        assert code == 2
        assert "error" in err

    def test_unknown_suite_is_2(self, capsys):
        code, _, _ = run(capsys, ["verify", "nope"])
        assert code == 2

    def test_math_failure_is_1(self, capsys, monkeypatch):
        import dworklab.harness as H
        from dworklab.cy import constant_term_series as real_cts

        def corrupted(g, T):
            s = real_cts(g, T)
            s.coeffs[3] += 1
            return s

        monkeypatch.setattr(H, "constant_term_series", corrupted)
        code, out, _ = run(capsys, ["verify", "dwork", "--primes", "3", "--dims", "2"])
        assert code == 1
        assert json.loads(out)["pass"] is False

    def test_missing_file_is_2(self, capsys):
        code, _, _ = run(capsys, ["hw", "--poly", "/nonexistent.json", "--prime", "5"])
        assert code == 2


class TestCommands:
    def test_hw_preset(self, capsys):
        code, out, _ = run(
            capsys,
            ["hw", "--preset", "simplicial", "--dim", "2", "--prime", "5",
             "--mu", "interior"],
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["index"] == [[0, 0]]
        assert obj["entries"][0][0] == ["1", "0", "0", "1"]  # 1 + t^3 mod 5

    def test_gauss_verify(self, capsys, triangle_file):
        code, out, _ = run(
            capsys,
            ["verify", "gauss", "--poly", triangle_file, "--primes", "3,5",
             "--bound", "12"],
        )
        assert code == 0
        report = json.loads(out)
        assert report["pass"] is True
        assert report["schema"] == 1

    def test_lambda_family(self, capsys, family_file):
        code, out, _ = run(
            capsys,
            ["lambda", "--poly", family_file, "--prime", "5", "--mu", "interior",
             "--steps", "1", "--t-trunc", "9"],
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["entries"][0][0][:4] == ["1", "0", "0", "1"]

    def test_zeta_count(self, capsys, triangle_file):
        code, out, _ = run(
            capsys, ["zeta-count", "--poly", triangle_file, "--prime", "3"]
        )
        assert code == 0
        assert json.loads(out)["torus_points"] == 1

    def test_crosscheck(self, capsys, triangle_file):
        code, out, _ = run(
            capsys, ["crosscheck", "--poly", triangle_file, "--prime", "5",
                     "--smax", "2"]
        )
        assert code == 0
        assert json.loads(out)["pass"] is True

    def test_cartier_oracle(self, capsys, triangle_file):
        code, out, _ = run(
            capsys,
            ["cartier", "--poly", triangle_file, "--prime", "3",
             "--precision", "2", "--bound", "2"],
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["agree"] and obj["checked"] > 0

    def test_cy_instanton(self, capsys):
        code, out, _ = run(capsys, ["cy", "instanton", "--family", "quintic",
                                    "--degree", "4"])
        assert code == 0
        table = json.loads(out)["instantons"]
        assert table[0] == {"d": 1, "Nd_num": "575", "Nd_den": "1"}

    def test_cy_frobenius(self, capsys):
        code, out, _ = run(
            capsys,
            ["cy", "frobenius", "--family", "simplicial", "--dim", "2",
             "--prime", "5"],
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["lambda0"] == [[1, 0], [0, 5]]

    def test_cy_excellent(self, capsys):
        code, out, _ = run(
            capsys,
            ["cy", "excellent", "--family", "simplicial", "--dim", "2",
             "--prime", "5"],
        )
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_gamma_p(self, capsys):
        code, out, _ = run(capsys, ["gamma-p", "--x", "1", "--prime", "7",
                                    "--precision", "3"])
        assert code == 0
        assert json.loads(out)["value"] == 7**3 - 1

    def test_gamma_ratio(self, capsys):
        code, out, _ = run(
            capsys, ["gamma-p", "--prime", "5", "--ratio-check", "1",
                     "--precision", "2"]
        )
        assert code == 0
        assert json.loads(out)["ratio_congruence"] is True

    def test_higher_hw(self, capsys, family_file):
        code, out, _ = run(
            capsys,
            ["higher-hw", "--poly", family_file, "--prime", "5", "--level", "2",
             "--mu", "whole"],
        )
        assert code == 0
        obj = json.loads(out)
        assert obj["condition_holds"] is True
        assert obj["levels"]["2"]["L"] == 6

    def test_pretty_format(self, capsys, triangle_file):
        code, out, _ = run(
            capsys,
            ["--format", "pretty", "zeta-count", "--poly", triangle_file,
             "--prime", "3"],
        )
        assert code == 0
        assert "\n" in out.strip()

    def test_byte_identical_output(self, capsys, triangle_file):
        _, out1, _ = run(capsys, ["verify", "gauss", "--poly", triangle_file,
                                  "--primes", "3", "--bound", "9"])
        _, out2, _ = run(capsys, ["verify", "gauss", "--poly", triangle_file,
                                  "--primes", "3", "--bound", "9"])
        assert out1 == out2
