"""
CLI exit codes and output formats.
"""
import json

import pytest
from click.testing import CliRunner

from cli import cli
from reports.writers import validate_envelope


@pytest.fixture
def run():
    runner = CliRunner()

    def invoke(*args):
        return runner.invoke(cli, ["--quiet", *args], obj={})

    return invoke


def envelope(result):
    document = json.loads(result.stdout)
    assert validate_envelope(document) == []
    return document


def test_grundy_cuboid(run):
    result = run("grundy", "--fn", "5", "--arity", "2", "--pos", "5,3,5")
    assert result.exit_code == 0
    assert result.stdout.strip() == "3"


def test_grundy_half(run):
    result = run("grundy", "--fn", "x1/2", "--arity", "1", "--pos", "2,5")
    assert result.exit_code == 0
    assert result.stdout.strip() == "7"


def test_grundy_invalid_position(run):
    result = run("grundy", "--fn", "x1/2", "--arity", "1", "--pos", "3,5")
    assert result.exit_code == 3


def test_grundy_wrong_coordinate_count(run):
    result = run("grundy", "--fn", "x1/2", "--pos", "1,2,3")
    assert result.exit_code == 2


def test_grundy_parse_error(run):
    result = run("grundy", "--fn", "max(x1,", "--pos", "0,0")
    assert result.exit_code == 2


def test_grundy_json(run):
    result = run("grundy", "--fn", "max(x1/2, x2/2)", "--pos", "7,3,7", "--json")
    assert result.exit_code == 0
    document = envelope(result)
    assert document["payload_type"] == "grundy-table"
    assert document["payload"]["entries"][0] == {"position": [7, 3, 7], "grundy": 7 ^ 3 ^ 7}


def test_moves(run):
    result = run("moves", "--fn", "x1/2", "--pos", "1,3")
    assert result.exit_code == 0
    lines = result.stdout.split()
    assert "0,3" in lines
    assert "0,5" not in lines


def test_check_ns_holds(run):
    result = run("check-ns", "--fn", "x1/2", "--bound", "64")
    assert result.exit_code == 0
    assert "holds up to 64" in result.stdout


def test_check_ns_witness(run):
    result = run("check-ns", "--fn", "x1", "--bound", "8", "--json")
    assert result.exit_code == 0
    witness = envelope(result)["payload"]["witness"]
    assert (witness["z"], witness["z_prime"], witness["i"]) == (0, 1, 1)


def test_check_ns_needs_unary(run):
    result = run("check-ns", "--fn", "max(x1,x2)")
    assert result.exit_code == 2


def test_verify_sufficiency(run):
    result = run("verify", "--fn", "max(x1/2,x2/2)", "--arity", "2", "--bounds", "16,16", "--mode", "sufficiency")
    assert result.exit_code == 0


def test_verify_necessity_json(run):
    result = run("verify", "--fn", "x1+x2", "--arity", "2", "--bounds", "8,8", "--mode", "necessity", "--json")
    assert result.exit_code == 0
    payload = envelope(result)["payload"]
    assert payload["verdict"] == "consistent-with-theorem"
    assert payload["mismatches"]


def test_verify_sweep_counterexample(run):
    result = run("verify", "--fn", "x1", "--bounds", "8", "--csv")
    assert result.exit_code == 1
    lines = result.stdout.splitlines()
    assert lines[0] == "y,z,grundy,nim_sum"
    assert "\r" not in result.stdout


def test_verify_bad_bounds(run):
    assert run("verify", "--fn", "x1/2", "--bounds", "8,8").exit_code == 2
    assert run("verify", "--fn", "x1/2", "--bounds", "a").exit_code == 2
    assert run("verify", "--fn", "x1/2").exit_code == 2


@pytest.mark.parametrize("value", ["1,,2", "1,2,", ",", ""])
def test_empty_list_segment_is_a_usage_error(run, value):
    result = run("grundy", "--fn", "x1/2", "--arity", "2", "--pos", value)
    assert result.exit_code == 2
    assert run("verify", "--fn", "x1+x2", "--bounds", value).exit_code == 2


def test_oversized_literal_is_a_usage_error(run):
    result = run("verify", "--fn", "99999999999999999999", "--bounds", "2")
    assert result.exit_code == 2
    assert "too large" in result.stderr


@pytest.mark.slow
def test_verify_payload_is_independent_of_jobs(run):
    args = ("verify", "--fn", "x1+x2", "--bounds", "8,8", "--mode", "necessity", "--json")
    serial = envelope(run(*args, "--jobs", "1"))["payload"]
    parallel = envelope(run(*args, "--jobs", "2"))["payload"]
    assert serial == parallel


@pytest.mark.slow
def test_nim_pass_payload_is_independent_of_jobs(run):
    args = ("nim-pass", "--piles", "2", "--t", "2", "--bounds", "12", "--json")
    serial = envelope(run(*args, "--jobs", "1"))["payload"]
    parallel = envelope(run(*args, "--jobs", "2"))["payload"]
    assert serial == parallel


@pytest.mark.slow
def test_verify_biconditional(run):
    result = run("verify", "--mode", "biconditional", "--enum-d", "10", "--enum-v", "3")
    assert result.exit_code == 0
    assert "functions classified: 364" in result.stdout


def test_verify_enumeration_cap(run, monkeypatch):
    monkeypatch.setattr("config.Config.ENUM_CAP", 10)
    result = run("verify", "--mode", "biconditional", "--enum-d", "10", "--enum-v", "3")
    assert result.exit_code == 2


def test_nim_pass_odd(run):
    result = run("nim-pass", "--piles", "2", "--t", "1", "--bounds", "16")
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "holds (t odd)"


def test_nim_pass_csv_lists_p_positions(run):
    result = run("nim-pass", "--piles", "2", "--t", "1", "--bounds", "16", "--csv")
    assert result.exit_code == 0
    lines = result.stdout.splitlines()
    assert lines[0] == "x,y,p,grundy"
    assert "2,3,1,0" in lines


def test_nim_pass_even(run):
    result = run("nim-pass", "--piles", "2", "--t", "2", "--bounds", "16", "--json")
    assert result.exit_code == 0
    payload = envelope(result)["payload"]
    assert payload["notes"][0] == "fails (t even)"
    assert payload["mismatches"]


def test_nim_pass_three_piles(run):
    result = run("nim-pass", "--piles", "3", "--t", "3", "--bounds", "8", "--isomorphism")
    assert result.exit_code == 0
    assert result.stdout.splitlines()[0] == "holds (t odd)"


def test_render_side_view(run):
    result = run("render", "--fn", "x1/2", "--pos", "2,5")
    assert result.exit_code == 0
    assert result.stdout == "    oo\n  oooo\n#ooooo\n"


def test_render_heights_csv(run):
    result = run("render", "--fn", "x1/2", "--pos", "2,5", "--csv")
    assert result.stdout.splitlines() == ["c0,c1,c2,c3,c4,c5", "1,1,2,2,3,3"]


def test_render_pass_encoding(run):
    result = run("render", "--nim-pass", "2", "--bounds", "4")
    assert result.exit_code == 0
    assert len(result.stdout.splitlines()) == 5


def test_render_refuses_four_coordinates(run):
    result = run("render", "--fn", "1", "--arity", "3", "--pos", "1,1,1,1")
    assert result.exit_code == 2
