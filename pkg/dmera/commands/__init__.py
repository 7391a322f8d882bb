"""Subcommands of the dmera command-line interface"""

# Load the CLI core first: it registers these subcommands on import, and the
# subcommands import names from it, so core must start initialising before them.
import dmera.core  # noqa: E402,F401
