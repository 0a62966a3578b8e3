import random

import pytest

from ahevdb.paillier import keygen


# Session-scoped keys keep prime generation out of the per-test hot path.
# Seeds are fixed so failures reproduce; production callers never pass an rng.

@pytest.fixture(scope="session")
def key128():
    return keygen(128, random.Random(0x5EED))


@pytest.fixture(scope="session")
def key256():
    return keygen(256, random.Random(0xC0FFEE))
