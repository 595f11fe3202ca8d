import json


from su2link import cli
from su2link import linkmodel as lm


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_sectors_table(capsys):
    code, out, _ = run(["sectors"], capsys)
    assert code == 0
    assert out.splitlines() == [
        "eigenvalue,degeneracy",
        "0.75,12",
        "2.25,16",
        "2.75,36",
    ]


def test_sectors_layout_file_round_trip(tmp_path, capsys):
    path = tmp_path / "triangle.layout"
    path.write_text(lm.format_layout(lm.triangle_layout()), encoding="utf-8")
    code, out, _ = run(["sectors", "--layout", str(path)], capsys)
    assert code == 0
    assert "0.75,12" in out


def test_sectors_malformed_layout_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.layout"
    path.write_text("link oops\n", encoding="utf-8")
    code, _, err = run(["sectors", "--layout", str(path)], capsys)
    assert code == 2
    assert "error" in err


def test_sectors_dimension_guard_exits_3(tmp_path, capsys):
    lines = []
    for t in range(3):  # three disjoint triangles: 18 qubits, over the limit
        base_v, base_q = 10 * t, 6 * t
        for k, (a, b) in enumerate([(1, 2), (2, 3), (3, 1)]):
            lines.append(
                f"link t{t}l{k} {base_v + a} {base_v + b} {base_q + 2 * k} {base_q + 2 * k + 1}"
            )
    path = tmp_path / "big.layout"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    code, _, err = run(["sectors", "--layout", str(path)], capsys)
    assert code == 3
    assert "guard" in err


def test_repeated_runs_byte_identical(tmp_path):
    out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["figures", "fig3", "--steps", "1,2", "--phi-stop", "0.3", "--out"]
    assert cli.main(argv + [str(out_a)]) == 0
    assert cli.main(argv + [str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()


def test_fig3_deviation_trend(capsys):
    code, out, _ = run(
        ["figures", "fig3", "--steps", "1,4", "--phi-start", "0.5", "--phi-stop", "0.5"],
        capsys,
    )
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    by_steps = {int(r[0]): abs(float(r[2])) for r in rows}
    assert by_steps[4] < by_steps[1]


def test_figs2_convergence(capsys):
    code, out, _ = run(
        [
            "figures",
            "figS2",
            "--steps",
            "64",
            "--phi-start",
            "2.0",
            "--phi-stop",
            "2.0",
            "--start-sector",
            "0.75",
        ],
        capsys,
    )
    assert code == 0
    header, row = out.splitlines()
    assert header.startswith("start,N,phi,gauge_I,gauge_D")
    gauge_d = float(row.split(",")[4])
    assert abs(gauge_d - 0.75) < 1e-2


def test_fig4_caps_decrease_with_steps(capsys):
    code, out, _ = run(
        ["figures", "fig4", "--steps", "2,3", "--phi-start", "0.4", "--phi-stop", "0.4"],
        capsys,
    )
    assert code == 0
    rows = [line.split(",") for line in out.splitlines()[1:]]
    caps = {int(r[0]): float(r[4]) for r in rows}
    assert caps[3] < caps[2]
    fidelities = {int(r[0]): float(r[3]) for r in rows}
    assert fidelities[3] > fidelities[2]


def test_compile_step_reports(capsys):
    code, out, _ = run(["compile", "--backend", "collective", "--step"], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["collective"] == 32
    assert report["single"] <= report["single_bound"] == 184
    assert report["schema"] == 1

    code, out, _ = run(["compile", "--backend", "cphase", "--step"], capsys)
    report = json.loads(out)
    assert report["cphase"] == 168
    assert report["single"] <= report["single_bound"] == 520


def test_compile_single_monomial(tmp_path, capsys):
    circuit_path = tmp_path / "gates.txt"
    code, out, _ = run(
        [
            "compile",
            "--backend",
            "collective",
            "--monomial",
            "(1.0) X0 Y1",
            "--phi",
            "0.2",
            "--circuit-out",
            str(circuit_path),
        ],
        capsys,
    )
    assert code == 0
    report = json.loads(out)
    assert report["collective"] == 2
    text = circuit_path.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "qubits 2"
    from su2link.compiler import parse_circuit

    assert parse_circuit(text).counts.collective == 2


def test_compile_rejects_conflicting_inputs(capsys):
    code, _, err = run(
        ["compile", "--backend", "collective", "--step", "--monomial", "(1.0) X0 X1"],
        capsys,
    )
    assert code == 2
    assert "mutually exclusive" in err


def test_bounds_printed_constant(capsys):
    code, out, _ = run(["bounds", "--plaquettes", "1", "--Jt", "1", "--eps", "0.1"], capsys)
    assert code == 0
    report = json.loads(out)
    assert round(report["steps_printed_constant_raw"]) == 7273
    assert report["steps_printed_constant"] == 7274
    assert report["steps_generic"] < report["steps_printed_constant"]
    assert report["schema"] == 1


def test_matter_sweep_csv(capsys):
    code, out, _ = run(["matter", "--ratios", "0.01,0.001"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "ratio,deviation,density_norm"
    first, second = (float(line.split(",")[1]) for line in lines[1:])
    assert second < first


def test_matter_guard_exits_3(capsys):
    # ratio 0.5 puts the penalty at twice the mode frequency: pair processes
    # become resonant with the penalty-free subspace
    code, _, err = run(["matter", "--ratios", "0.5"], capsys)
    assert code == 3
    assert "guard" in err


def test_covariance_report(capsys):
    code, out, _ = run(["covariance", "--sets", "2", "--seed", "7"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "set,link,max_deviation"
    assert len(lines) == 1 + 2 * 3
    assert all(float(line.split(",")[2]) < 1e-9 for line in lines[1:])


def test_config_file_defaults_and_precedence(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("eps=0.4\nplaquettes=1\n", encoding="utf-8")
    code, out, _ = run(["bounds", "--config", str(config)], capsys)
    assert code == 0
    assert json.loads(out)["eps"] == 0.4
    code, out, _ = run(["bounds", "--config", str(config), "--eps", "0.9"], capsys)
    assert code == 0
    assert json.loads(out)["eps"] == 0.9


def test_config_file_unknown_key(tmp_path, capsys):
    config = tmp_path / "run.conf"
    config.write_text("frobnicate=1\n", encoding="utf-8")
    code, _, err = run(["bounds", "--config", str(config)], capsys)
    assert code == 2
    assert "unknown option" in err
