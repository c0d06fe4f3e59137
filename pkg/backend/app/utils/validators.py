"""Input validation utilities."""

from typing import List, Optional

from backend.app.config import settings


def validate_matrix_size(matrix: List[List[int]], name: str = "matrix") -> tuple[bool, Optional[str]]:
    """Check that a matrix is square and within the configured size.

    Args:
        matrix: Nested list of integers
        name: Name used in the error message

    Returns:
        Tuple of (is_valid, error_message)
    """
    n = len(matrix)
    if n == 0:
        return False, f"{name} cannot be empty"
    if any(len(row) != n for row in matrix):
        return False, f"{name} must be square"
    if n > settings.MAX_MATRIX_SIZE:
        return False, f"{name} has size {n}; the limit is {settings.MAX_MATRIX_SIZE}"
    return True, None


def validate_length(length: Optional[int]) -> tuple[bool, Optional[str]]:
    """Check a requested sequence length against the configured limit."""
    if length is not None and length > settings.MAX_LEFSCHETZ_LENGTH:
        return False, f"length {length} exceeds the limit of {settings.MAX_LEFSCHETZ_LENGTH}"
    return True, None


def validate_entry_bound(bound: Optional[int]) -> tuple[bool, Optional[str]]:
    if bound is not None and bound > settings.MAX_ENTRY_BOUND:
        return False, f"entry bound {bound} exceeds the limit of {settings.MAX_ENTRY_BOUND}"
    return True, None
