import pytest

from bitterm.absdom import interval_template
from bitterm.absdom.template import Row, Template, TemplateSpec
from bitterm.errors import TemplateError
from bitterm.logic import terms as T
from bitterm.logic.evaluate import evaluate

X = T.var("x", 4)
Y = T.var("y", 4, signed=True)
B = T.bool_var("b")


def test_interval_template_skips_booleans():
    template = interval_template([X, B, Y])
    assert len(template) == 4
    assert [r.label for r in template.rows] == ["x<=d", "-x<=d", "y<=d", "-y<=d"]


def test_row_range_and_width():
    template = Template((X, Y), (Row((1, -1)), Row((3, 0))))
    assert template.row_range(0) == (-7, 23)
    assert template.row_range(1) == (0, 45)
    lo, hi = T.type_range(template.row_width(0), True)
    assert lo <= -7 and 23 <= hi


def test_row_term_does_not_overflow():
    template = Template((X, Y), (Row((1, -1)),))
    term = template.row_term(0)
    assert evaluate(term, {"x": 15, "y": -8}) == 23
    assert template.row_value(0, {"x": 15, "y": 8}) == 23


def test_wrong_row_dimension_is_rejected():
    with pytest.raises(TemplateError):
        Template((X,), (Row((1, 1)),))
    with pytest.raises(TemplateError):
        Template((X,), (), kind="nope")


def test_builtin_shapes():
    assert TemplateSpec.parse("interval").overflow_rows
    assert not TemplateSpec.parse("box").overflow_rows
    with pytest.raises(TemplateError):
        TemplateSpec.parse("no/such/file.yml")


def test_sidecar_rows(tmp_path):
    path = tmp_path / "rows.yml"
    path.write_text("rows:\n  - {x: 1, y: -1}\n  - {z: 1}\n  - [2, 1]\n")
    spec = TemplateSpec.parse(str(path))
    template = spec.build([X, Y], ["x", "y"])
    assert len(template) == 6
    assert [r.coefficients for r in template.rows[4:]] == [(1, -1), (2, 1)]


def test_sidecar_without_intervals(tmp_path):
    path = tmp_path / "rows.yml"
    path.write_text("interval: false\nrows:\n  - {x: 1, y: 1}\n")
    template = TemplateSpec.parse(str(path)).build([X, Y], ["x", "y"])
    assert [r.coefficients for r in template.rows] == [(1, 1)]


def test_malformed_sidecar(tmp_path):
    path = tmp_path / "rows.yml"
    path.write_text("rows: 3\n")
    with pytest.raises(TemplateError):
        TemplateSpec.parse(str(path))


def test_max_vars_truncates():
    spec = TemplateSpec(max_vars=1)
    template = spec.build([X, Y], ["x", "y"])
    assert template.variables == (X,)
