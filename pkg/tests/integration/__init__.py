"""Long-run acceptance tests for the access model."""
