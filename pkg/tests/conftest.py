import sys

import pytest

from lpm import embed, examples, kernel, llproof, signature

sys.setrecursionlimit(200_000)


@pytest.fixture(scope="session")
def logic_shallow():
    return signature.install_entries(signature.EMPTY, embed.prelude("shallow"))


@pytest.fixture(scope="session")
def logic_deep():
    return signature.install_entries(signature.EMPTY, embed.prelude("deep"))


@pytest.fixture(scope="session")
def bool_sig(logic_shallow):
    return signature.install_entries(logic_shallow, embed.theory_entries(examples.bool_theory()))


@pytest.fixture(scope="session")
def set_sig(logic_shallow):
    return signature.install_entries(logic_shallow, embed.theory_entries(examples.set_theory()))


@pytest.fixture(scope="session")
def pair_sig(logic_shallow):
    return signature.install_entries(logic_shallow, embed.theory_entries(examples.pair_theory()))


@pytest.fixture(scope="session")
def base_sigs():
    """Full logic+rules+theory signatures per (example, mode), built once."""
    cache = {}

    def get(name: str, mode: str):
        key = (name, mode)
        if key not in cache:
            thy = examples.BUILTINS[name][0]()
            cache[key] = llproof.base_signature(thy, mode)
        return cache[key]

    return get


@pytest.fixture
def fuel():
    return kernel.Fuel()
