"""Acceptance gate: every numbered criterion at its stated tolerance.

Run with ``pytest tests/test_acceptance.py -s`` to see one line per
criterion; the same checks back the ``pinchlab accept`` subcommand.
"""

import pytest

from pinchlab.acceptance import CRITERIA

SEED = 7


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    result = CRITERIA[number](seed=SEED)
    with capsys.disabled():
        print("\n" + result.line(), end="")
    failing = [c for c in result.claims if not c["passed"]]
    assert result.passed, f"criterion {number} failing claims: {failing}"
