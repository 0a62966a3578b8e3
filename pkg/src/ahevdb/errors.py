"""Exception hierarchy and CLI exit codes.

Validation problems (bad parameters, dimension mismatches, out-of-range
values) map to exit 2; integrity problems (key mismatch, corrupt files or
ciphertexts) map to exit 3; plain I/O failures map to exit 4.
"""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTEGRITY = 3
EXIT_IO = 4


class AhevdbError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(AhevdbError):
    """A precondition on user-supplied values does not hold."""


class IntegrityError(AhevdbError):
    """Stored or transmitted data fails a consistency check."""


class KeyMismatchError(IntegrityError):
    """Ciphertext or file was produced under a different key."""


class CorruptCiphertextError(IntegrityError):
    """Ciphertext value is outside the valid ciphertext group."""


class StoreFormatError(IntegrityError):
    """File does not follow the expected container format."""


class StoreCorruptError(IntegrityError):
    """File follows the format but its contents are damaged."""
