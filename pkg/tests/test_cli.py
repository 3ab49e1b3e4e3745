import numpy as np

from qstrings.cli import main
from qstrings.crosscheck import run_crosscheck


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_primes_row(capsys):
    code, out, _ = run_cli(
        ["primes", "--delta", "4", "--max-len", "3", "--epsilon", "0.5", "--seed", "42"],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "r,p,epsilon,delta,max_len"
    r, p, eps, delta, max_len = lines[2].split(",")
    assert (r, eps, delta, max_len) == ("24", "0.5", "4", "3")


def test_match_found_and_exit_codes(capsys):
    code, out, _ = run_cli(
        ["match", "--text", "010101", "--pattern", "010", "--seed", "5", "--trials", "10"],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# qstrings match")
    assert lines[1].startswith("trial,seed,result_d")
    assert len(lines) == 12
    hits = [line for line in lines[2:] if line.split(",")[4] == "1"]
    assert hits and all(line.split(",")[2] in ("1", "3") for line in hits)


def test_match_absent_pattern_exit_code(capsys):
    code, _, _ = run_cli(
        ["match", "--text", "0000", "--pattern", "11", "--seed", "1", "--trials", "2"],
        capsys,
    )
    assert code == 1


def test_match_byte_identical_reruns(tmp_path):
    out = tmp_path / "a.csv"
    args = ["match", "--text", "01100101", "--pattern", "01", "--seed", "9",
            "--trials", "5", "--csv", str(out)]
    assert main(args) == 0
    first = out.read_bytes()
    assert main(args) == 0
    assert out.read_bytes() == first


def test_match_jobs_parallel_identical(tmp_path, capsys):
    args = ["match", "--text", "0110010110", "--pattern", "011", "--seed", "3",
            "--trials", "6"]
    assert main(args) == 0
    serial = capsys.readouterr().out
    assert main(args + ["--jobs", "2"]) == 0
    parallel = capsys.readouterr().out
    # data rows identical; the comment line differs only by the --jobs flag
    assert serial.splitlines()[1:] == parallel.splitlines()[1:]


def test_match_dense_width_guard(capsys):
    code, _, err = run_cli(
        ["match", "--text", "0" * 2000 + "1" * 8, "--pattern", "1" * 8,
         "--seed", "1", "--mode", "dense"],
        capsys,
    )
    assert code == 2
    assert "qubits" in err and "24" in err


def test_match_structured_size_guard(capsys):
    big = "01" * 40000
    code, _, err = run_cli(
        ["match", "--text", big, "--pattern", "01", "--seed", "1"], capsys
    )
    assert code == 2
    assert "cap" in err


def test_match_dense_dump_state(tmp_path, capsys):
    dump = tmp_path / "state.csv"
    code, _, _ = run_cli(
        ["match", "--text", "0101", "--pattern", "01", "--seed", "2",
         "--mode", "dense", "--dump-state", str(dump)],
        capsys,
    )
    assert code == 0
    lines = dump.read_text().strip().splitlines()
    assert all(len(line.split(",")) == 3 for line in lines)


def test_match_ascii_and_file_input(tmp_path, capsys):
    path = tmp_path / "text.txt"
    path.write_text("AB")
    code, out, _ = run_cli(
        ["match", "--text", f"@{path}", "--pattern", "A", "--ascii", "--seed", "4"],
        capsys,
    )
    assert code == 0
    assert out.strip().splitlines()[2].split(",")[2] == "1"


def test_usage_errors(capsys):
    assert run_cli(["match", "--text", "01"], capsys)[0] == 2  # missing flags
    assert run_cli(["match", "--text", "01", "--pattern", "0", "--seed", "1",
                    "--mode", "sparse"], capsys)[0] == 2
    assert run_cli(["compare", "--u", "01", "--v", "01", "--algo", "grover"],
                   capsys)[0] == 2  # seed is mandatory
    assert run_cli(["nonsense"], capsys)[0] == 2


def test_compare_csv(capsys):
    code, out, _ = run_cli(
        ["compare", "--u", "0110", "--v", "0100", "--algo", "bsearch",
         "--seed", "2", "--trials", "4"],
        capsys,
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "trial,seed,verdict,expected,a0,phases,qubits,gate_units"
    for line in lines[2:]:
        fields = line.split(",")
        assert fields[3] == "1"  # classical expectation echoed


def test_compare_grover_cli(capsys):
    code, out, _ = run_cli(
        ["compare", "--u", "101", "--v", "111", "--algo", "grover",
         "--seed", "7", "--trials", "3"],
        capsys,
    )
    assert code == 0
    assert len(out.strip().splitlines()) == 5


def test_min_find_csv(capsys):
    code, out, _ = run_cli(
        ["min-find", "--values", "3,1,2", "--seed", "9", "--trials", "5"], capsys
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "trial,found_index,phases,iterations"
    found = [line.split(",")[1] for line in lines[2:]]
    assert found.count("1") >= 3  # argmin found most of the time


def test_sweep_cli(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(
        ["sweep", "--algo", "match", "--grid", "16,32", "--m", "4",
         "--seed", "1", "--trials", "2", "--csv", str(out)]
    )
    assert code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("# qstrings")
    assert lines[1].startswith("algo,n,m,k,")
    assert len(lines) == 4


def test_crosscheck_cli(capsys):
    code, out, _ = run_cli(["crosscheck", "--seed", "1"], capsys)
    assert code == 0
    assert "battery of 22 instances" in out
    assert "FAIL" not in out


def test_crosscheck_fault_injection():
    def perturb(name, structured):
        if name.startswith("compare_grover k4"):
            structured.amps[0] += 1e-6
            structured.amps /= np.sqrt(np.sum(np.abs(structured.amps) ** 2))

    report = run_crosscheck(1, perturb=perturb)
    assert not report.passed
    bad = [r for r in report.instances if not r.passed]
    assert bad and "basis index" in bad[0].detail


def test_crosscheck_reports_deviation_per_instance():
    report = run_crosscheck(2)
    assert len(report.instances) == 22
    assert all(r.max_deviation < 1e-9 for r in report.instances)
