"""Tests for the ordered worker pool."""
from dclab.core.workers import run_ordered


def _square(x: int) -> int:
    return x * x


def test_run_ordered_inline() -> None:
    """Test the single-worker path."""
    assert run_ordered(_square, [3, 1, 2], n_jobs=1) == [9, 1, 4]
    assert run_ordered(_square, [], n_jobs=4) == []


def test_run_ordered_parallel_keeps_order() -> None:
    """Test that parallel results come back in input order."""
    items = list(range(20))
    assert run_ordered(_square, items, n_jobs=2) == [x * x for x in items]
