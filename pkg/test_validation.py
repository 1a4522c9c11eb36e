"""Run input validation"""

import os

import pytest

from data import validation
from data.validation import RunValidator


def test_input_path(tmp_path):
    good = tmp_path / "r.csv"
    good.write_text("return\n0.1\n")
    assert validation.validate_input_path(str(good)) == (True, str(good))
    ok, message = validation.validate_input_path(str(tmp_path / "r.xlsx"))
    assert not ok and "not allowed" in message
    ok, message = validation.validate_input_path(str(tmp_path / "missing.csv"))
    assert not ok and "does not exist" in message
    assert not validation.validate_input_path("")[0]


def test_spec_extension(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text("{}")
    assert RunValidator.validate_input_path(str(spec), RunValidator.ALLOWED_SPEC_EXTENSIONS)[0]
    assert not RunValidator.validate_input_path(str(spec))[0]


def test_output_path(tmp_path):
    assert validation.validate_output_path(str(tmp_path / "out.json"))[0]
    assert not validation.validate_output_path(str(tmp_path))[0]
    assert not validation.validate_output_path(str(tmp_path / "missing" / "out.json"))[0]


@pytest.mark.skipif(os.geteuid() == 0, reason="root can write anywhere")
def test_unwritable_output_directory(tmp_path):
    locked = tmp_path / "locked"
    locked.mkdir()
    locked.chmod(0o500)
    try:
        assert not validation.validate_output_path(str(locked / "out.json"))[0]
    finally:
        locked.chmod(0o700)


@pytest.mark.parametrize("level,ok", [(0.05, True), (0.0, False), (1.0, False)])
def test_level(level, ok):
    assert validation.validate_level(level)[0] is ok


@pytest.mark.parametrize("alpha_star,ok", [(None, True), (1.5, True), (2.0, False), (0.0, False)])
def test_alpha_star(alpha_star, ok):
    assert RunValidator.validate_alpha_star(alpha_star)[0] is ok


def test_parse_theta():
    assert RunValidator.parse_theta("0.2, 0.1,0.2,0.5,1.5") == (True, [0.2, 0.1, 0.2, 0.5, 1.5])
    assert not RunValidator.parse_theta("0.2,0.1")[0]
    assert not RunValidator.parse_theta("a,b,c,d,e")[0]
    assert not RunValidator.parse_theta(None)[0]
