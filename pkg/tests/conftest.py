import pytest

from websterpart.partition import canonical_triple


@pytest.fixture(scope="session")
def triple():
    return canonical_triple()
