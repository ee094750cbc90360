import pytest

from addm.cli import main
from addm.effective import read_coo
from addm.harness import load_csv


def run_cli(argv):
    return main(argv)


class TestBer:
    def test_sweep_writes_csv(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        code = run_cli([
            "ber", "--n", "8", "--m", "2", "--n-cp", "2", "--c1", "1/16",
            "--frames", "4", "--snr", "10", "--waveform", "addm,otfs",
            "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        rows = load_csv(out)
        assert [r.waveform for r in rows] == ["addm", "otfs"]
        assert all(r.frames == 4 for r in rows)
        assert "wrote" in capsys.readouterr().out

    def test_config_file_with_flag_override(self, tmp_path):
        cfgfile = tmp_path / "run.cfg"
        cfgfile.write_text(
            "n = 8\nm = 2\nn_cp = 2\nc1 = 1/16\nframes = 4\n"
            "snr = 10\nwaveform = addm\nseed = 3\n"
        )
        out_a = tmp_path / "a.csv"
        out_b = tmp_path / "b.csv"
        assert run_cli(["ber", "--config", str(cfgfile), "--out", str(out_a)]) == 0
        assert run_cli([
            "ber", "--config", str(cfgfile), "--seed", "4", "--out", str(out_b),
        ]) == 0
        assert load_csv(out_a)[0].seed == 3
        assert load_csv(out_b)[0].seed == 4

    def test_plot_script_flag(self, tmp_path):
        out = tmp_path / "r.csv"
        script = tmp_path / "plot.py"
        code = run_cli([
            "ber", "--n", "8", "--m", "2", "--n-cp", "2", "--c1", "1/16",
            "--frames", "2", "--snr", "10", "--waveform", "addm",
            "--out", str(out), "--plot-script", str(script),
        ])
        assert code == 0
        compile(script.read_text(), str(script), "exec")

    def test_bad_config_value_exits_nonzero(self, tmp_path, capsys):
        code = run_cli([
            "ber", "--waveform", "gfdm", "--out", str(tmp_path / "r.csv"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestMatrices:
    @pytest.fixture
    def path_file(self, tmp_path):
        f = tmp_path / "paths.txt"
        # gain_re gain_im delay doppler; integer shifts at n = 8, c1 = 1/16
        f.write_text("0.8 0.1 1 0.125\n0.4 -0.3 2 -0.25\n")
        return f

    def test_full_export(self, tmp_path, path_file, capsys):
        out = tmp_path / "h.coo"
        code = run_cli([
            "matrices", "--path-file", str(path_file), "--n", "8", "--m", "4",
            "--n-cp", "2", "--c1", "1/16", "--mode", "full", "--out", str(out),
        ])
        assert code == 0
        eff = read_coo(out)
        assert eff.size == 32
        assert eff.mode == "full"
        assert "wrote" in capsys.readouterr().out

    def test_exact_export_is_sparse(self, tmp_path, path_file):
        out = tmp_path / "h.coo"
        code = run_cli([
            "matrices", "--path-file", str(path_file), "--n", "8", "--m", "4",
            "--n-cp", "2", "--c1", "1/16", "--mode", "exact", "--out", str(out),
        ])
        assert code == 0
        eff = read_coo(out)
        assert eff.exact
        assert eff.nnz == 2 * 32  # one entry per column per path

    def test_trunc_export_records_widths(self, tmp_path, path_file):
        out = tmp_path / "h.coo"
        code = run_cli([
            "matrices", "--path-file", str(path_file), "--n", "8", "--m", "4",
            "--n-cp", "2", "--c1", "1/16", "--mode", "trunc",
            "--k-a", "1", "--k-f", "1", "--out", str(out),
        ])
        assert code == 0
        eff = read_coo(out)
        assert (eff.k_a, eff.k_f) == (1, 1)

    def test_exact_mode_rejects_fractional_paths(self, tmp_path, capsys):
        f = tmp_path / "paths.txt"
        f.write_text("1.0 0.0 1 0.077\n")
        code = run_cli([
            "matrices", "--path-file", str(f), "--n", "8", "--m", "4",
            "--n-cp", "2", "--c1", "1/16", "--mode", "exact",
            "--out", str(tmp_path / "h.coo"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_path_file_exits_nonzero(self, tmp_path, capsys):
        code = run_cli([
            "matrices", "--path-file", str(tmp_path / "nope.txt"),
            "--out", str(tmp_path / "h.coo"),
        ])
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestSelftest:
    def test_exit_zero_and_reports(self, capsys):
        assert run_cli(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "PASS" in out
        assert "checks passed" in out


class TestParser:
    def test_missing_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli([])
        assert exc.value.code == 2
        assert "usage" in capsys.readouterr().err

    def test_requires_path_file(self, capsys):
        with pytest.raises(SystemExit) as exc:
            run_cli(["matrices"])
        assert exc.value.code == 2
