import pytest

from deepsva.llm import TemplateError, load_template, render_template
from deepsva.llm.templates import parse_template, placeholders


@pytest.mark.parametrize("name", ["module_spec.v1", "features.v1", "mining.v1"])
def test_packaged_templates_load(name):
    t = load_template(name)
    assert t.id == name and t.system.strip() and t.user.strip()


def test_placeholders_and_escapes():
    assert placeholders("{a} {{b}} {c} {a}") == ["a", "c"]
    assert render_template("{a} {{x}}", {"a": "1"}) == "1 {x}"


def test_missing_values_listed():
    with pytest.raises(TemplateError) as exc:
        render_template("{a}{b}{c}", {"b": ""})
    assert exc.value.missing == ["a", "c"]


def test_directory_override(tmp_path):
    (tmp_path / "module_spec.v1.txt").write_text("[system]\nS {module_name}\n[user]\nU\n")
    t = load_template("module_spec.v1", tmp_path)
    assert t.render({"module_name": "m"}) == ("S m\n", "U\n")
    # names not present in the directory fall back to the packaged copy
    assert "feature" in load_template("features.v1", tmp_path).user.lower()


def test_user_section_required():
    with pytest.raises(ValueError):
        parse_template("x", "[system]\nonly\n")
