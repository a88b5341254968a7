import pytest

from finlat import build_lattice, make_grid

S7_ELEMENTS = ["0", "u", "v", "l", "m", "r", "1"]
S7_COVERS = [
    ("0", "u"), ("0", "v"), ("u", "l"), ("u", "m"), ("v", "m"), ("v", "r"),
    ("l", "1"), ("m", "1"), ("r", "1"),
]


@pytest.fixture
def c2():
    return build_lattice(["0", "1"], [("0", "1")])


@pytest.fixture
def c3():
    return build_lattice(["0", "a", "1"], [("0", "a"), ("a", "1")])


@pytest.fixture
def c4():
    return build_lattice(["0", "a", "b", "1"], [("0", "a"), ("a", "b"), ("b", "1")])


@pytest.fixture
def c5():
    return build_lattice(
        ["0", "a", "b", "c", "1"],
        [("0", "a"), ("a", "b"), ("b", "c"), ("c", "1")],
    )


@pytest.fixture
def b2():
    return make_grid((2, 2)).lattice


@pytest.fixture
def b3():
    return make_grid((2, 2, 2)).lattice


@pytest.fixture
def s7():
    return build_lattice(S7_ELEMENTS, S7_COVERS)


@pytest.fixture
def d5():
    """The four-element boolean lattice with a new top."""
    return build_lattice(
        ["0", "p", "q", "1", "t"],
        [("0", "p"), ("0", "q"), ("p", "1"), ("q", "1"), ("1", "t")],
    )


@pytest.fixture
def grid32():
    return make_grid((3, 2))


@pytest.fixture
def grid33():
    return make_grid((3, 3))
