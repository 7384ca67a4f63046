import pytest

from varietas.cli import main
from varietas.samples import HALTING, LOOPING, HALTING_TAPE, LOOPING_TAPE


@pytest.fixture()
def files(tmp_path):
    halting = tmp_path / "halting.tm"
    halting.write_text(HALTING)
    looping = tmp_path / "looping.tm"
    looping.write_text(LOOPING)
    inf_pres = tmp_path / "inf.pres"
    inf_pres.write_text("gen b1 b2\n")
    free_pres = tmp_path / "free.pres"
    free_pres.write_text("gen x y\nrel f(x) = y\n")
    return tmp_path


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out


class TestSolveCommand:
    def test_inf_equal_exit_zero(self, files, capsys):
        code, out = run(capsys, [
            "solve", "--variety", "inf",
            "-p", str(files / "inf.pres"),
            "--query", "b1 b2 = b2 b1"])
        assert code == 0
        assert out.splitlines()[0] == "EQUAL"

    def test_free_unequal_exit_one(self, files, capsys):
        code, out = run(capsys, [
            "solve", "--variety", "free",
            "-p", str(files / "free.pres"),
            "--query", "x = y"])
        assert code == 1
        assert out.splitlines()[0] == "UNEQUAL"

    def test_free_equal(self, files, capsys):
        code, out = run(capsys, [
            "solve", "--variety", "free",
            "-p", str(files / "free.pres"),
            "--query", "f(x) = y"])
        assert code == 0

    def test_fb_degenerate_with_trace(self, files, capsys, tmp_path):
        code, out = run(capsys, [
            "gen-presentation", "--machine", str(files / "halting.tm"),
            "--tape", HALTING_TAPE])
        assert code == 0
        pres = tmp_path / "halting.pres"
        pres.write_text(out)
        code, out = run(capsys, [
            "solve", "--variety", "fb",
            "-p", str(pres),
            "--machine", str(files / "halting.tm"),
            "--case", "degenerate",
            "--query", "0 = 1",
            "--trace"])
        assert code == 0
        lines = out.splitlines()
        assert lines[0] == "EQUAL"
        assert any(line.startswith("trace: 1 ~ E(q0)") for line in lines)

    def test_fb_unknown_exit_two(self, files, capsys, tmp_path):
        code, out = run(capsys, [
            "gen-presentation", "--machine", str(files / "looping.tm"),
            "--tape", LOOPING_TAPE])
        pres = tmp_path / "looping.pres"
        pres.write_text(out)
        code, out = run(capsys, [
            "solve", "--variety", "fb",
            "-p", str(pres),
            "--machine", str(files / "looping.tm"),
            "--query", "K(E(K(E(h),T(c))),T(c)) = 0",
            "--stage-bound", "1",
            "--time-window", "8", "--space-window", "4"])
        assert code == 2
        assert out.startswith("UNKNOWN(")

    def test_missing_file_exit_66(self, files, capsys):
        with pytest.raises(SystemExit) as err:
            main(["solve", "--variety", "inf", "-p", str(files / "nope.pres"),
                  "--query", "b1 = b1"])
        assert err.value.code == 66

    def test_parse_error_exit_64(self, files, capsys):
        with pytest.raises(SystemExit) as err:
            main(["solve", "--variety", "inf", "-p", str(files / "inf.pres"),
                  "--query", "b1 b2"])
        assert err.value.code == 64

    def test_bad_machine_exit_65(self, files, capsys, tmp_path):
        bad = tmp_path / "bad.tm"
        bad.write_text("states q0\nalphabet B\n")
        with pytest.raises(SystemExit) as err:
            main(["simulate-tm", "--machine", str(bad), "--tape", "e_L a e_R"])
        assert err.value.code == 65

    def test_unknown_flag_exit_64(self, files):
        with pytest.raises(SystemExit) as err:
            main(["solve", "--wat"])
        assert err.value.code == 64


class TestOtherCommands:
    def test_simulate(self, files, capsys):
        code, out = run(capsys, [
            "simulate-tm", "--machine", str(files / "halting.tm"),
            "--tape", HALTING_TAPE, "--steps", "50"])
        assert code == 0
        assert out.strip().endswith("HALTED@5")

    def test_gen_presentation_roundtrip(self, files, capsys):
        code, out = run(capsys, [
            "gen-presentation", "--machine", str(files / "halting.tm"),
            "--tape", HALTING_TAPE])
        assert code == 0
        assert "rel C_Q(c) = q0" in out
        assert "rel C_S(S^2(c)) = e_R" in out

    def test_normalize(self, files, capsys):
        code, out = run(capsys, [
            "normalize", "--term", "S(S^-1(T(P(x))))",
            "--machine", str(files / "halting.tm"),
            "--generators", "x"])
        assert code == 0
        assert out.splitlines()[0] == "T(P(x))"

    def test_check_laws(self, files, capsys):
        code, out = run(capsys, [
            "check-laws", "--machine", str(files / "looping.tm"),
            "--tape", LOOPING_TAPE,
            "--time-window", "6", "--space-window", "6"])
        assert code == 0
        assert "violations: 0" in out
        assert "0 != 1: True" in out

    def test_demo_scenarios(self, files, capsys):
        code, out = run(capsys, ["demo", "--scenario", "halting"])
        assert code == 0
        assert "EQUAL" in out
        code, out = run(capsys, ["demo", "--scenario", "looping",
                                 "--time-window", "6", "--space-window", "6"])
        assert code == 0
        assert "UNEQUAL" in out

    def test_demo_unknown_scenario(self, capsys):
        code = main(["demo", "--scenario", "wat"])
        assert code == 64
