"""
Report writers and golden-file comparison

JSON is written with sorted keys and a trailing newline so identical runs give identical
bytes; CSV files carry a header row.
"""

import csv
import json
import logging
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field

from iwasawa_lab.errors import SchemaMismatchError, UsageError
from iwasawa_lab.harmonic_maps import MapField

logger = logging.getLogger(__name__)


class GoldenVerdict(BaseModel):
    """Outcome of comparing a report with its golden file"""

    match: bool
    mismatches: list[str] = Field(default_factory=list)


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_json(path: Path, data: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(data), encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    logger.info(f"Wrote {path}")
    return path


def map_header(f: MapField) -> list[str]:
    m, n = f.domain.space_dim, f.dim
    return [
        *(f"i{a}" for a in range(m)),
        *(f"x{a}" for a in range(m)),
        *(f"f{i + 1}{j + 1}" for i in range(n) for j in range(n)),
    ]


def map_rows(f: MapField) -> Iterable[list[object]]:
    """Node index, coordinates and row-major entries of F at every inside node."""
    coords = f.domain.coordinates()
    for index in zip(*f.domain.inside.nonzero(), strict=True):
        entries = f.values[index].ravel().tolist()
        yield [*(int(i) for i in index), *coords[index].tolist(), *entries]


def load_golden(path: Path) -> Any:
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"Cannot read golden file {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"Golden file {path} is not valid JSON: {e}") from e


def _compare(
    actual: Any, expected: Any, where: str, rel_tol: float, abs_tol: float, out: list[str]
) -> None:
    if isinstance(expected, dict):
        if not isinstance(actual, dict) or set(actual) != set(expected):
            raise SchemaMismatchError(f"Fields differ at {where or '<root>'}")
        for key in sorted(expected):
            _compare(actual[key], expected[key], f"{where}.{key}", rel_tol, abs_tol, out)
    elif isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            raise SchemaMismatchError(f"List shape differs at {where}")
        for i, (a, e) in enumerate(zip(actual, expected, strict=True)):
            _compare(a, e, f"{where}[{i}]", rel_tol, abs_tol, out)
    elif isinstance(expected, bool) or expected is None or isinstance(expected, str):
        if actual != expected:
            out.append(f"{where}: {actual!r} != {expected!r}")
    elif isinstance(expected, int | float):
        if isinstance(actual, bool) or not isinstance(actual, int | float):
            raise SchemaMismatchError(f"Expected a number at {where}")
        if not math.isclose(actual, expected, rel_tol=rel_tol, abs_tol=abs_tol):
            out.append(f"{where}: {actual!r} != {expected!r}")
    else:
        raise SchemaMismatchError(f"Unsupported golden value at {where}")


def golden_compare(
    report: Any, golden_path: Path, rel_tol: float = 0.10, abs_tol: float = 1e-12
) -> GoldenVerdict:
    """Field-by-field comparison; numbers within rel_tol (or abs_tol near zero)."""
    expected = load_golden(golden_path)
    mismatches: list[str] = []
    _compare(report, expected, "", rel_tol, abs_tol, mismatches)
    verdict = GoldenVerdict(match=not mismatches, mismatches=mismatches)
    if verdict.match:
        logger.info(f"Report matches golden file {golden_path}")
    else:
        logger.warning(f"Report differs from {golden_path} in {len(mismatches)} fields")
    return verdict
