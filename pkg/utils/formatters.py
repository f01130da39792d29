from enum import Enum
from typing import Any, Dict, List, Mapping

from jinja2 import Template  # text templates for CSV headers and the acceptance report

# Header block written above every CSV table. Each parameter becomes one
# "# key=value" line so a dataset can be regenerated from its own header.
header_template = """
{%- for key, value in parameters.items() %}
# {{ key }}={{ value }}
{%- endfor %}
"""

# Single-line header of a sampled spectral curve: "# axis=xi L=30 gamma=0.08".
inline_header_template = "# {% for key, value in parameters.items() %}{{ key }}={{ value }}{{ ' ' if not loop.last }}{% endfor %}"

# Plain-text report printed by `eddy-casimir check`.
acceptance_report_template = """
🧪 Acceptance report: {{ passed }}/{{ total }} criteria passed

{% for c in criteria -%}
[{{ 'PASS' if c.passed else 'FAIL' }}] {{ c.number }}. {{ c.title }}
      measured: {{ c.measured }}
      required: {{ c.required }}
{% if c.detail %}      {{ c.detail }}
{% endif -%}
{% endfor %}
"""


def format_value(value: Any) -> str:
    """Floats with 17 significant digits, everything else via str()."""
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def format_header(parameters: Mapping[str, Any]) -> str:
    """
    Renders the "# key=value" header block of a CSV file.

    Args:
        parameters (Mapping[str, Any]): Ordered parameters of the dataset.

    Returns:
        str: Header lines, each terminated by a newline.
    """
    rendered = Template(header_template).render(
        parameters={key: format_value(value) for key, value in parameters.items()}
    )
    return rendered.lstrip("\n") + "\n" if parameters else ""


def format_inline_header(parameters: Mapping[str, Any]) -> str:
    """One "# k1=v1 k2=v2" line; values must not contain spaces."""
    rendered = Template(inline_header_template).render(
        parameters={key: format_value(value) for key, value in parameters.items()}
    )
    return rendered + "\n"


def parse_header(text: str) -> Dict[str, str]:
    """
    Inverse of format_header and format_inline_header: collect the key=value
    pairs of the leading '#' lines of a CSV text.

    A line is read as several pairs only when every word in it has an '=';
    otherwise it is one pair whose value may contain spaces.
    """
    parameters = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            break
        words = line[1:].split()
        pairs = words if words and all("=" in w for w in words) else [line[1:].strip()]
        for pair in pairs:
            key, _, value = pair.partition("=")
            parameters[key.strip()] = value.strip()
    return parameters


def format_acceptance_report(criteria: List[Any]) -> str:
    """
    Renders the pass/fail report of the acceptance suite.

    Args:
        criteria (list): Objects with number, title, passed, measured, required and detail attributes.

    Returns:
        str: The rendered report.
    """
    passed = sum(1 for c in criteria if c.passed)
    return Template(acceptance_report_template).render(criteria=criteria, passed=passed, total=len(criteria)).strip() + "\n"
