"""Report builders and verify suites used by the pwrot command."""
