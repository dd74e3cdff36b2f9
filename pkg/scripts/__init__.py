"""Project utility scripts."""
