###############################################################################################
#
# Run reports: what every CLI command returns, in deterministic JSON or as pandas tables.
#
###############################################################################################

import json
from dataclasses import dataclass, field
from typing import Any, Dict

import numpy as np
import pandas as pd

from helpers.config import JSON_FLOAT_FORMAT

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_INPUT_ERROR = 2


def _round(x: float) -> float:
    return float(JSON_FLOAT_FORMAT % x)


def to_jsonable(value: Any) -> Any:
    """Plain JSON values with floats rounded to 12 significant digits and complex as {re, im}."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _round(float(value))
    if isinstance(value, (complex, np.complexfloating)):
        return {"re": _round(value.real), "im": _round(value.imag)}
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def _scalar(value: Any) -> Any:
    if isinstance(value, (complex, np.complexfloating)):
        return "{} {} {}j".format(JSON_FLOAT_FORMAT % value.real, "-" if value.imag < 0 else "+",
                                 JSON_FLOAT_FORMAT % abs(value.imag))
    if isinstance(value, (float, np.floating)):
        return JSON_FLOAT_FORMAT % value
    return value


def _cell(value: Any) -> Any:
    # Real floats stay numeric so pandas formats the column
    if isinstance(value, (list, tuple, np.ndarray)):
        return ", ".join(str(_scalar(v)) for v in value)
    if isinstance(value, (complex, np.complexfloating)):
        return _scalar(value)
    return value


@dataclass
class RunReport:
    """
    Result of one CLI command.

    `results` maps a name to either a table (list of row dicts) or a scalar.
    """
    command: str
    inputs: Dict[str, Any] = field(default_factory=dict)
    results: Dict[str, Any] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def tables(self) -> Dict[str, pd.DataFrame]:
        return {name: pd.DataFrame(value) for name, value in self.results.items()
                if isinstance(value, list) and value and isinstance(value[0], dict)}

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "exit_code": self.exit_code,
        }
        return json.dumps(to_jsonable(doc), sort_keys=True, indent=2)

    def to_text(self) -> str:
        lines = []
        for name, value in self.results.items():
            if isinstance(value, list) and value and isinstance(value[0], dict):
                frame = pd.DataFrame([{k: _cell(v) for k, v in row.items()} for row in value])
                lines.append("{}:".format(name))
                lines.append(frame.to_string(index=False, float_format=lambda x: JSON_FLOAT_FORMAT % x))
                lines.append("")
            else:
                lines.append("{}: {}".format(name, _scalar(_cell(value))))
        return "\n".join(lines)
