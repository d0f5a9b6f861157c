import pytest

from wfsound import fig1_examples


@pytest.fixture(scope="session")
def fig1():
    left, middle, right = fig1_examples()
    return {"left": left, "middle": middle, "right": right}
