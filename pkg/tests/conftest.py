import pytest

from hetmod.models import builtin_model


@pytest.fixture(scope="session")
def iwasawa():
    return builtin_model("iwasawa")


@pytest.fixture(scope="session")
def torus():
    return builtin_model("torus")


@pytest.fixture(scope="session")
def calabi_eckmann():
    return builtin_model("calabi-eckmann")


@pytest.fixture(scope="session")
def builtins(iwasawa, torus, calabi_eckmann):
    return [iwasawa, torus, calabi_eckmann]
