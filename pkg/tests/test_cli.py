import json

import pytest

from bipres.cli import main
from bipres.firepio import parse_betti, parse_firep, parse_presentation, serialize_firep

RUNNING = "firep v1\np 2\nsizes 0 1 2\nd2\n1 0 ; 0:1\n0 1 ; 0:1\nd1\n0 0 ;\n"


@pytest.fixture
def running_file(tmp_path):
    f = tmp_path / "run.firep"
    f.write_text(RUNNING)
    return str(f)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_presentation_of_running_example(capsys, running_file):
    code, out, err = run(capsys, "presentation", running_file)
    assert code == 0
    P = parse_presentation(out)
    assert P.minimal and P.to_dense().tolist() == [[1, 1]]
    assert "timing" in err
    code, out, _ = run(capsys, "presentation", running_file, "--semi-minimal", "-q")
    assert "type semi-minimal" in out


def test_betti_of_running_example(capsys, running_file):
    code, out, _ = run(capsys, "betti", running_file, "-q")
    assert code == 0
    assert out == "betti v1\nbeta0 1\n0 0 1\nbeta1 2\n0 1 1\n1 0 1\nbeta2 1\n1 1 1\n"
    code, out, _ = run(capsys, "betti", running_file, "-q", "--format", "json", "--include-hilbert")
    obj = json.loads(out)
    assert obj["betti"]["beta2"] == [[1, 1, 1]] and "hilbert" in obj


def test_hilbert_and_oracle_check(capsys, running_file):
    code, out, _ = run(capsys, "hilbert", running_file)
    assert code == 0 and out.startswith("hilbert v1\n")
    code, out, _ = run(capsys, "oracle-check", running_file, "-q")
    assert code == 0 and out.splitlines()[0] == "MATCH"
    code, out, _ = run(capsys, "betti", "--annulus", "14", "--percentile", "0.2", "--seed", "2", "--oracle-check", "-q")
    assert code == 0 and out.startswith("MATCH")


def test_output_file(capsys, running_file, tmp_path):
    dest = tmp_path / "out.txt"
    code, out, _ = run(capsys, "betti", running_file, "-o", str(dest), "-q")
    assert code == 0 and out == ""
    assert parse_betti(dest.read_text()).beta2 == {(1, 1): 1}


def test_exit_codes(capsys, tmp_path, running_file):
    assert run(capsys, "betti", str(tmp_path / "missing.firep"))[0] == 3
    bad = tmp_path / "bad.firep"
    bad.write_text(RUNNING.replace("0:1", "0:2", 1))
    code, _, err = run(capsys, "betti", str(bad))
    assert code == 4 and "line 5" in err
    assert run(capsys, "betti")[0] == 4
    assert run(capsys, "betti", "--annulus", "20")[0] == 4
    assert run(capsys, "betti", running_file, "--field", "3")[0] == 4
    for argv in (["nonsense"], ["betti", "--field", "4"], ["betti", "--percentile", "1.5"], ["betti", running_file, "--threads", "0"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2
    capsys.readouterr()


def test_firep_command_shapes(capsys):
    code, out, err = run(capsys, "firep", "--annulus", "50", "--percentile", "0.2", "--degree", "1")
    assert code == 0
    fr = parse_firep(out)
    assert fr.sizes == (50, 1225, 19600)
    assert "d1 50x1225" in err
    assert serialize_firep(fr) == out
    code, out, _ = run(capsys, "firep", "--annulus", "20", "--radius", "1.0", "--degree", "0", "-p", "5")
    fr = parse_firep(out)
    assert fr.sizes == (0, 20, 190) and fr.field.p == 5


def test_points_and_distance_inputs_agree(capsys, tmp_path):
    pts = tmp_path / "pts.txt"
    pts.write_text("0 0\n1 0\n0 1\n3 3\n")
    code, a, _ = run(capsys, "betti", "--points", str(pts), "--radius", "1.5", "--degree", "0", "-q")
    assert code == 0
    import numpy as np
    from bipres.bifiltration import pairwise_distances

    D = pairwise_distances(np.loadtxt(pts))
    dist = tmp_path / "d.txt"
    dist.write_text("\n".join(" ".join(repr(float(v)) for v in row) for row in D) + "\n")
    code, b, _ = run(capsys, "betti", "--dist", str(dist), "--radius", "1.5", "--degree", "0", "-q")
    assert code == 0 and a == b


def test_output_is_byte_identical_across_threads(capsys):
    base = ["presentation", "--annulus", "40", "--percentile", "0.2", "-q"]
    outs = {run(capsys, *base, "--threads", str(t))[1] for t in (1, 2, 4)}
    outs.add(run(capsys, *base, "--engine", "reference")[1])
    assert len(outs) == 1


def test_betti_agrees_with_minimal_presentation(capsys):
    src = ["--annulus", "30", "--percentile", "0.2", "-q", "--seed", "5"]
    _, out, _ = run(capsys, "presentation", *src)
    P = parse_presentation(out)
    _, out, _ = run(capsys, "betti", *src)
    bt = parse_betti(out)
    from collections import Counter

    assert dict(Counter(P.row_grade_list())) == bt.beta0
    assert dict(Counter(P.col_grade_list())) == bt.beta1


def test_bench_small(capsys):
    code, out, _ = run(capsys, "bench", "--sizes", "10", "15", "--format", "json", "-q")
    obj = json.loads(out)
    assert code == 0 and [r["n"] for r in obj["runs"]] == [10, 15]
    assert obj["loglog_slope"] is not None
