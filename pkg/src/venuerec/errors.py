"""Exception types shared across the package.

The split matters for the command line front end, which maps each class
to a distinct process exit code:

* ``UsageError``   -> exit 1 (bad flags, malformed config values)
* ``DataError``    -> exit 2 (unreadable/invalid input files, missing
  upstream artifacts, corrupt artifact files)
* anything else    -> exit 3 (internal error, i.e. a bug)

Library code raises ``ValueError`` for programming errors on in-memory
arguments (bad parameter ranges and the like); those are not wrapped.
"""


class VenuerecError(Exception):
    """Base class for package-specific errors."""


class UsageError(VenuerecError):
    """The caller asked for something malformed (flags, config values)."""


class DataError(VenuerecError):
    """Input data or on-disk artifacts are missing, invalid, or stale."""
