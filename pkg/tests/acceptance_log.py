"""PASS/FAIL lines from the acceptance tests, echoed in the terminal summary."""

LINES: list[str] = []
