"""Command-line interface: exit codes, file outputs, the play REPL."""

import io

from nmemory.cli import main
from nmemory.core import serialize_automaton
from nmemory.fixtures import FIXTURES, load_fixture


def fixture_path(tmp_path, name):
    path = tmp_path / f"{name}.aut"
    path.write_text(serialize_automaton(load_fixture(name)))
    return str(path)


def test_validate_reports_clean_and_broken(tmp_path, capsys):
    assert main(["validate", fixture_path(tmp_path, "game_copy")]) == 0
    assert "ok:" in capsys.readouterr().out
    broken = tmp_path / "broken.aut"
    broken.write_text("states: a\n")
    assert main(["validate", str(broken)]) == 5
    partial = tmp_path / "partial.aut"
    partial.write_text("states: a\ninit: a\npriority: a=0\n"
                       "trans: a # 0 0 -> a U\n")
    assert main(["validate", str(partial)]) == 2
    assert main(["validate", str(tmp_path / "absent.aut")]) == 5


def test_simulate_prints_column_traces(tmp_path, capsys):
    assert main(["simulate", fixture_path(tmp_path, "successors"),
                 "1", "2", "3"]) == 0
    out = capsys.readouterr().out
    assert out.count("col ") == 3 and "max=2" in out
    assert main(["simulate", fixture_path(tmp_path, "climb_forever"),
                 "0"]) == 0
    assert "diverges in column 0" in capsys.readouterr().out


def test_member_matches_the_language(tmp_path, capsys):
    path = fixture_path(tmp_path, "step_walk")
    assert main(["member", path, "--prefix", "", "--loop", "0 1"]) == 0
    assert capsys.readouterr().out.strip() == "accept"
    assert main(["member", path, "--loop", "0 2"]) == 0
    assert capsys.readouterr().out.strip() == "reject"


def test_empty_decides_fixtures(tmp_path, capsys):
    assert main(["empty", fixture_path(tmp_path, "climb_forever")]) == 0
    assert capsys.readouterr().out.strip() == "empty"
    assert main(["empty", fixture_path(tmp_path, "successors")]) == 0
    assert capsys.readouterr().out.strip() == "nonempty"


def test_solve_writes_certificate_and_table(tmp_path, capsys):
    cert = tmp_path / "cert.txt"
    table = tmp_path / "rtable.txt"
    assert main(["solve", fixture_path(tmp_path, "game_successor"),
                 "--emit-cert", str(cert), "--dump-r", str(table)]) == 0
    assert "winner: Output" in capsys.readouterr().out
    cert_text = cert.read_text()
    assert cert_text.startswith("winner: O\n")
    assert "threshold:" in cert_text and "rule:" in cert_text
    assert table.read_text().count("\n") > 10


def test_solve_surfaces_unknown_as_exit_code(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("NMEMORY_MAX_HEIGHT", "8")
    monkeypatch.setenv("NMEMORY_LIMIT", "50")
    rc = main(["solve", fixture_path(tmp_path, "game_predict")])
    out = capsys.readouterr().out
    assert rc == 3
    assert "unknown" in out and "winner:" not in out


def test_synthesize_then_run_roundtrip(tmp_path, capsys):
    machine = tmp_path / "copy.mach"
    assert main(["synthesize", fixture_path(tmp_path, "game_copy"),
                 "-o", str(machine)]) == 0
    capsys.readouterr()
    assert main(["run", str(machine), "--input", "2 9"]) == 0
    assert capsys.readouterr().out.splitlines() == ["I 2", "O 2",
                                                    "I 9", "O 9"]
    assert main(["run", str(machine), "--loop", "4", "--rounds", "2"]) == 0
    assert capsys.readouterr().out.splitlines() == ["I 4", "O 4",
                                                    "I 4", "O 4"]


def test_run_flag_validation(tmp_path, capsys):
    machine = tmp_path / "copy.mach"
    assert main(["synthesize", fixture_path(tmp_path, "game_copy"),
                 "-o", str(machine)]) == 0
    assert main(["run", str(machine)]) == 2
    assert main(["run", str(machine), "--loop", "4"]) == 2
    assert main(["run", str(machine), "--input", "no numbers"]) == 2


def test_play_session_replays_deterministically(tmp_path, capsys,
                                                monkeypatch):
    path = fixture_path(tmp_path, "game_successor")
    session = tmp_path / "session.txt"
    monkeypatch.setattr("sys.stdin", io.StringIO("3\n7\n:quit\n"))
    assert main(["play", path, "--as", "input",
                 "--save", str(session)]) == 0
    capsys.readouterr()
    saved = session.read_text().splitlines()
    assert saved == ["I 3", "O 4", "I 7", "O 8"]
    machine = tmp_path / "succ.mach"
    assert main(["synthesize", path, "-o", str(machine)]) == 0
    capsys.readouterr()
    human = " ".join(line.split()[1] for line in saved if line[0] == "I")
    assert main(["run", str(machine), "--input", human]) == 0
    assert capsys.readouterr().out.splitlines() == saved


def test_play_takes_only_the_losing_side(tmp_path, capsys):
    assert main(["play", fixture_path(tmp_path, "game_successor"),
                 "--as", "output"]) == 2
    assert "certified winner" in capsys.readouterr().out


def test_play_reprompts_on_bad_input(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin",
                        io.StringIO("abc\n2000001\n5\n:history\n:quit\n"))
    assert main(["play", fixture_path(tmp_path, "game_successor"),
                 "--cap", "2000000"]) == 0
    out = capsys.readouterr().out
    assert "enter a natural number" in out
    assert "rejected" in out
    assert "O 6" in out


def test_machine_side_input_moves_first(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("4\n:quit\n"))
    assert main(["play", fixture_path(tmp_path, "game_predict"),
                 "--as", "output"]) == 0
    out = capsys.readouterr().out
    lines = [line for line in out.splitlines()
             if line[:2] in ("I ", "O ")]
    assert lines and lines[0].startswith("I ")


def test_every_fixture_parses_through_the_cli(tmp_path):
    for name in FIXTURES:
        assert main(["validate", fixture_path(tmp_path, name)]) == 0
