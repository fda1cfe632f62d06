"""Shared fixtures: canned channel/aux files and a CLI runner."""

import json

import pytest

from sdbc.channels import (
    aux_from_px,
    aux_to_json,
    channel_to_json,
    make_adder_erasure,
    make_bsc_pair,
    make_function_erasure,
)


@pytest.fixture(scope="session")
def adder06_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("channels") / "adder06.json"
    path.write_text(channel_to_json(make_adder_erasure(0.6)))
    return str(path)


@pytest.fixture(scope="session")
def bsc025_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("channels") / "bsc025.json"
    path.write_text(channel_to_json(make_bsc_pair(0.25)))
    return str(path)


@pytest.fixture(scope="session")
def identity_erasure05_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("channels") / "id2_erasure05.json"
    path.write_text(channel_to_json(make_function_erasure([0, 1], 0.5)))
    return str(path)


@pytest.fixture(scope="session")
def uniform_binary_aux_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("aux") / "uniform_binary.json"
    path.write_text(aux_to_json(aux_from_px([0.5, 0.5])))
    return str(path)


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    from sdbc.cli import main

    def run(*args):
        code = main([str(a) for a in args])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run


@pytest.fixture
def parse_json():
    return json.loads
