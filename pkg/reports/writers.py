"""
JSON envelopes and CSV tables for the CLI.
"""
import csv
import io
import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, List, Sequence

import numpy as np
from jsonschema import Draft202012Validator

from config import Config
from reports.models import GrundyTablePayload, NSReport, ReportEnvelope, VerificationReport

SCHEMA_PATH = Path(__file__).with_name("report_schema.json")

_PAYLOAD_TAGS = {
    VerificationReport: "verification",
    NSReport: "ns",
    GrundyTablePayload: "grundy-table",
}


def make_envelope(command: Sequence[str], payload, **extra) -> ReportEnvelope:
    return ReportEnvelope(
        schema_version=Config.SCHEMA_VERSION,
        tool_version=Config.TOOL_VERSION,
        command=list(command),
        timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
        payload_type=_PAYLOAD_TAGS[type(payload)],
        payload=payload,
        extra=extra,
    )


def envelope_json(envelope: ReportEnvelope) -> str:
    return envelope.model_dump_json(indent=2)


def load_schema() -> dict:
    with open(SCHEMA_PATH, "r") as f:
        return json.load(f)


def validate_envelope(document: dict) -> List[str]:
    """Schema errors for a decoded envelope; empty when it conforms."""
    validator = Draft202012Validator(load_schema())
    return [error.message for error in validator.iter_errors(document)]


def _write_rows(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def grundy_csv(payload: GrundyTablePayload) -> str:
    return _write_rows(
        payload.columns + ["grundy"],
        (entry.position + [entry.grundy] for entry in payload.entries),
    )


def mismatch_csv(report: VerificationReport, columns: Sequence[str]) -> str:
    return _write_rows(
        list(columns) + ["grundy", "nim_sum"],
        (m.position + [m.grundy, m.nim_sum] for m in report.mismatches),
    )


def heights_csv(heights: np.ndarray) -> str:
    """Rows are the first base axis, columns the second (a single row for s=1)."""
    matrix = np.atleast_2d(heights)
    header = [f"c{j}" for j in range(matrix.shape[1])]
    return _write_rows(header, (list(map(int, row)) for row in matrix))


def written_columns(s: int) -> List[str]:
    if s == 1:
        return ["y", "z"]
    if s == 2:
        return ["x", "y", "z"]
    return [f"x{i}" for i in range(1, s + 1)] + ["y"]
