import pytest

from hetbec import ParameterError, emit_svg


def test_two_point_series_single_polyline(tmp_path):
    path = tmp_path / "plot.svg"
    emit_svg([("line", [0.0, 1.0], [0.0, 2.0])], "x", "y", str(path))
    text = path.read_text()
    assert text.count("<polyline") == 1
    assert text.startswith('<?xml version="1.0"')
    assert "</svg>" in text


def test_multi_series_legend_and_colors(tmp_path):
    path = tmp_path / "plot.svg"
    xs = list(range(10))
    emit_svg([("a", xs, [v * 0.1 for v in xs]),
              ("b", xs, [v * -0.2 for v in xs])], "x", "y", str(path),
             title="demo")
    text = path.read_text()
    assert text.count("<polyline") == 2
    assert "#1f77b4" in text and "#d62728" in text
    assert ">a</text>" in text and ">b</text>" in text


def test_byte_deterministic(tmp_path):
    series = [("s", [0.0, 0.5, 1.0], [1.0, -1.0, 2.0])]
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    emit_svg(series, "x", "y", str(p1))
    emit_svg(series, "x", "y", str(p2))
    assert p1.read_bytes() == p2.read_bytes()


def test_empty_series_rejected(tmp_path):
    with pytest.raises(ParameterError):
        emit_svg([], "x", "y", str(tmp_path / "no.svg"))
    with pytest.raises(ParameterError):
        emit_svg([("empty", [], [])], "x", "y", str(tmp_path / "no.svg"))


def test_nonfinite_points_dropped(tmp_path):
    path = tmp_path / "plot.svg"
    emit_svg([("s", [0.0, 1.0, 2.0], [1.0, float("nan"), 3.0])], "x", "y",
             str(path))
    assert path.read_text().count("<polyline") == 1
