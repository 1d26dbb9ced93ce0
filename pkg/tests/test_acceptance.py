"""The ten acceptance criteria, run exactly as specified with the fixed default seed."""

import pytest

from mapcone import acceptance

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(acceptance.CRITERIA))
def test_criterion(number):
    r = acceptance.CRITERIA[number](acceptance.DEFAULT_SEED)
    line = r.line()
    print(line)
    ACCEPTANCE_LINES[number] = line
    assert r.number == number
    assert r.ok, r.detail
