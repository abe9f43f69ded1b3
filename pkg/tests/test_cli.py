import io
import json
from contextlib import redirect_stderr, redirect_stdout

from oviprob.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


class TestPartitionsCommand:
    def test_enumerate_csv_catalan4(self):
        code, out, _ = run(["partitions", "enumerate", "--n", "4",
                            "--class", "noncrossing", "--format", "csv"])
        assert code == EXIT_OK
        lines = [l for l in out.splitlines() if l and not l.startswith("#")]
        assert len(lines) - 1 == 14  # header + Catalan(4) rows

    def test_moebius(self):
        code, out, _ = run(["partitions", "moebius",
                            "--sigma", "[[1],[2],[3]]",
                            "--pi", "[[1,2,3]]"])
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["results"][0]["moebius"] == 2

    def test_omega(self):
        code, out, _ = run(["partitions", "omega", "--pi", "[[1,4],[2],[3]]"])
        payload = json.loads(out)
        assert payload["results"][0]["omega"] == "1/6"


class TestCumulantsCommand:
    def test_convert(self):
        code, out, _ = run(["cumulants", "convert", "--kind", "free",
                            "--moments", "0,1,0,2,0,5", "--L", "6"])
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["results"][0]["values"] == ["0", "1", "0", "0",
                                                   "0", "0"]

    def test_mixed_test(self):
        code, out, _ = run(["cumulants", "mixed-test", "--kind", "boolean",
                            "--max-len", "4", "--seed", "2"])
        assert code == EXIT_OK


class TestConvolveCommand:
    def test_boolean(self):
        code, out, _ = run(["convolve", "boolean", "--mu", "0,1,0,1",
                            "--nu", "0,1,0,1", "--mu-inf", "0,-1,0,-1",
                            "--nu-inf", "0,-1,0,-1", "--infinitesimal",
                            "--L", "4"])
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["results"][0]["moments"] == ["0", "2", "0", "4"]


class TestMatrixModelCommand:
    def test_antitrace_a4(self):
        code, out, _ = run(["matrixmodel", "antitrace", "--word", "A4"])
        assert code == EXIT_OK
        payload = json.loads(out)
        row = payload["results"][0]
        assert row["limit"] == "1" and row["infinitesimal"] == "5"
        assert row["provenance"] == "exact"

    def test_mc_provenance(self):
        code, out, _ = run(["matrixmodel", "antitrace", "--word", "A2",
                            "--mc", "--N", "100", "--samples", "2000",
                            "--seed", "9"])
        assert code == EXIT_OK
        payload = json.loads(out)
        assert payload["results"][1]["provenance"].startswith("float")

    def test_violations(self):
        code, out, _ = run(["matrixmodel", "violations",
                            "--max-degree", "4"])
        assert code == EXIT_OK


class TestRelationsCommand:
    def test_verify_exit_zero(self):
        code, out, _ = run(["relations", "verify", "--n-max", "3",
                            "--mode", "exact"])
        assert code == EXIT_OK
        payload = json.loads(out)
        assert len(payload["results"]) == 12

    def test_comb_identity(self):
        code, _, _ = run(["relations", "comb-identity", "--n", "5"])
        assert code == EXIT_OK

    def test_float_mode_rejected(self):
        code, _, _ = run(["relations", "verify", "--mode", "float64"])
        assert code == EXIT_USAGE


class TestCltCommand:
    def test_identity(self):
        code, _, _ = run(["clt", "identity", "--L", "6"])
        assert code == EXIT_OK

    def test_finite_sum(self):
        code, out, _ = run(["clt", "finite-sum", "--kind", "boolean",
                            "--k", "2", "--moments", "0,1",
                            "--inf-moments", "0,1", "--n-values", "1,2"])
        assert code == EXIT_OK


class TestLemmasCommand:
    def test_weighted(self):
        code, _, _ = run(["lemmas", "weighted", "--n", "3"])
        assert code == EXIT_OK


class TestHarness:
    def test_usage_error_unknown_flag(self):
        code, _, _ = run(["partitions", "enumerate", "--bogus"])
        assert code == EXIT_USAGE

    def test_usage_error_unknown_command(self):
        code, _, _ = run(["nonsense"])
        assert code == EXIT_USAGE

    def test_deterministic_output(self):
        argv = ["relations", "verify", "--n-max", "3", "--seed", "4"]
        assert run(argv) == run(argv)

    def test_config_echoed(self):
        code, out, _ = run(["partitions", "enumerate", "--n", "3",
                            "--seed", "7"])
        payload = json.loads(out)
        assert payload["config"]["seed"] == 7
        assert payload["config"]["mode"] == "exact"
        assert payload["config"]["tol"] is None  # exact mode ignores tol

    def test_pretty_writes_summary_to_stderr(self):
        code, out, err = run(["--format", "pretty", "partitions",
                              "enumerate", "--n", "3"])
        assert code == EXIT_OK
        assert "PASS" in err
        json.loads(out)  # stdout still machine readable

    def test_global_flags_before_subcommand(self):
        code, out, _ = run(["--seed", "3", "partitions", "enumerate",
                            "--n", "3"])
        assert json.loads(out)["config"]["seed"] == 3
