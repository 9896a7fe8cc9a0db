"""Shared exception hierarchy.

Content/validation errors derive from GlossforgeError; the CLI maps them to
exit code 1 and I/O problems (OSError) to exit code 2.
"""


class GlossforgeError(Exception):
    """Base class for all content and validation errors raised by glossforge."""
