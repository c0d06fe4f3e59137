"""Backend API tests."""

