"""Acceptance gate: every criterion must pass at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one line per
criterion, or ``nmqj selftest`` for the same checks from the CLI.
"""

import pytest

from nmqj.acceptance import CRITERIA


@pytest.mark.parametrize("index", sorted(CRITERIA))
def test_criterion(index):
    result = CRITERIA[index]()
    print(result.line())
    assert result.passed, result.line()
