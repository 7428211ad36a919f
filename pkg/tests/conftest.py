# conftest.py
import json
import random

import pytest
from click.testing import CliRunner

from pcog import settings
from pcog.cli import cli
from pcog.reductions import worked_example

_SETTINGS = {name: getattr(settings, name) for name in dir(settings) if name.isupper()}


@pytest.fixture(autouse=True)
def restore_settings():
    """Puts every pcog.settings knob back after a test reassigns it."""
    yield
    for name, value in _SETTINGS.items():
        setattr(settings, name, value)


@pytest.fixture
def rng():
    """Seeded generator so property runs are reproducible."""
    return random.Random(20241019)


@pytest.fixture
def example():
    """worked_example by id, e.g. example("1g1").instance"""
    return worked_example


@pytest.fixture
def write_json(tmp_path):
    """Writes a JSON document into tmp_path and returns its path as a string."""

    def write(name: str, document) -> str:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return str(path)

    return write


@pytest.fixture
def run_cli():
    """
    Invokes the click group and returns (result, report) where report maps
    the key=value lines of standard output.
    """

    runner = CliRunner()

    def run(*args):
        result = runner.invoke(cli, [str(a) for a in args])
        report = {}
        for line in result.output.splitlines():
            key, sep, value = line.partition("=")
            if sep:
                report[key] = value
        return result, report

    return run
