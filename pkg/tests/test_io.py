import numpy as np
import pytest

from curlra.generators import SpecError, generate, oracle_for, parse_spec, spec_shape
from curlra.linalg import singular_values
from curlra.matrixfile import MatrixFileError, format_matrix, parse_matrix, read_matrix, write_matrix


def test_delta_spec():
    np.testing.assert_array_equal(generate("delta:2:2:0:1", 0), [[0, 1], [0, 0]])


def test_geometric_spectrum():
    W = generate("spsd:64:geo:0.5", 7)
    np.testing.assert_allclose(W, W.T)
    s = singular_values(W)
    expected = 0.5 ** np.arange(64)
    big = expected > 1e-6
    np.testing.assert_allclose(s[big], expected[big], rtol=1e-10)


def test_cauchy_spec():
    assert generate("cauchy:8", 0)[0, 0] == -2.0


def test_low_rank_specs():
    assert np.linalg.matrix_rank(generate("rank:9:7:2", 1)) == 2
    W = generate("spsd:10:rank:3", 1)
    assert np.linalg.matrix_rank(W) == 3 and np.min(np.linalg.eigvalsh(W)) > -1e-10


def test_generation_is_seeded():
    np.testing.assert_array_equal(generate("rank:5:5:2", 3), generate("rank:5:5:2", 3))
    assert not np.array_equal(generate("rank:5:5:2", 3), generate("rank:5:5:2", 4))


@pytest.mark.parametrize("spec", [
    "spsd:4:geo:0.5", "spsd:6:rank:2", "cauchy:5", "rank:4:3:2", "delta:3:4:2:1",
])
def test_oracles_match_dense(spec):
    W = oracle_for(spec, 2)
    assert W.shape == spec_shape(spec)
    np.testing.assert_allclose(W.to_dense(), generate(spec, 2), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("spec", [
    "", "spsd:4", "spsd:4:geo:2", "spsd:4:geo:x", "spsd:4:rank:5", "spsd:4:flat:1",
    "cauchy:0", "rank:2:2", "rank:2:x:1", "delta:2:2:2:0", "toeplitz:4",
])
def test_bad_specs(spec):
    with pytest.raises(SpecError) as err:
        parse_spec(spec)
    assert "expected" in str(err.value)


def test_round_trip_is_exact(tmp_path, rng):
    A = rng.standard_normal((4, 3)) * 10.0 ** rng.integers(-300, 300, (4, 3))
    path = tmp_path / "m.txt"
    write_matrix(path, A)
    np.testing.assert_array_equal(read_matrix(path), A)
    assert format_matrix(np.eye(1)) == "1 1\n1\n"


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("2 x\n", 1),
    ("0 2\n", 1),
    ("2 2\n1 2\n", 3),
    ("1 2\n1 2\n3 4\n", 3),
    ("2 2\n1 2\n3\n", 3),
    ("1 2\n1 abc\n", 2),
    ("1 1\nnan\n", 2),
])
def test_parse_errors_name_the_line(text, line):
    with pytest.raises(MatrixFileError) as err:
        parse_matrix(text, "f.txt")
    assert err.value.line == line
    assert str(err.value).startswith(f"f.txt:{line}:")


def test_trailing_blank_lines_are_allowed():
    np.testing.assert_array_equal(parse_matrix("1 2\n3 4\n\n\n"), [[3, 4]])
