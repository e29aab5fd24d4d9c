"""CSV and JSON-lines result files with atomic writes."""

import csv
import io
import json
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Sequence, Union

from pydantic import ValidationError

from quantum_music.exceptions import ResultsIOError
from quantum_music.models.results import RMSE_COLUMNS, SPECTRUM_COLUMNS, RmseRecord, SpectrumTable
from quantum_music.models.scenario import ScenarioConfig


class ResultFormat(str, Enum):
    """On-disk result encodings."""

    CSV = 'csv'
    JSONL = 'jsonl'


SpectrumRow = tuple[int, float, float]


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return format(float(value), '.17g')


def _record_row(record: RmseRecord) -> dict[str, Any]:
    data = record.model_dump(by_alias=True, mode='json')
    return {column: data[column] for column in RMSE_COLUMNS}


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


class ResultsStore:
    """Writes and reads RMSE records and spectrum tables."""

    def __init__(self, fmt: ResultFormat = ResultFormat.CSV) -> None:
        """Initialize the results store."""
        self.fmt = ResultFormat(fmt)

    def _write_atomic(self, path: Path, text: str) -> None:
        """Write through a temporary sibling file, then replace the target."""
        tmp_path = path.with_name(path.name + '.tmp')
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(tmp_path, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            tmp_path.replace(path)
        except OSError as exc:
            if tmp_path.exists():
                tmp_path.unlink()
            raise ResultsIOError(path, exc.strerror or str(exc)) from exc

    def _read_text(self, path: Path) -> str:
        try:
            with open(path, 'r', encoding='utf-8', newline='') as f:
                return f.read()
        except OSError as exc:
            raise ResultsIOError(path, exc.strerror or str(exc)) from exc

    def render_records(self, records: Sequence[RmseRecord]) -> str:
        """Serialize records without touching the filesystem."""
        buffer = io.StringIO()
        if self.fmt is ResultFormat.CSV:
            writer = csv.DictWriter(buffer, fieldnames=RMSE_COLUMNS, lineterminator='\n')
            writer.writeheader()
            for record in records:
                writer.writerow({k: _csv_cell(v) for k, v in _record_row(record).items()})
        else:
            for record in records:
                buffer.write(record.model_dump_json(by_alias=True) + '\n')
        return buffer.getvalue()

    def render_spectra(self, spectra: Sequence[SpectrumTable]) -> str:
        buffer = io.StringIO()
        if self.fmt is ResultFormat.CSV:
            writer = csv.writer(buffer, lineterminator='\n')
            writer.writerow(SPECTRUM_COLUMNS)
            for table in spectra:
                for k, theta, value in table.rows():
                    writer.writerow((k, format_float(theta), format_float(value)))
        else:
            for table in spectra:
                for k, theta, value in table.rows():
                    buffer.write(json.dumps(dict(zip(SPECTRUM_COLUMNS, (k, theta, value)))) + '\n')
        return buffer.getvalue()

    def emit_results(
        self,
        results: Union[Sequence[RmseRecord], Sequence[SpectrumTable]],
        path: Path,
    ) -> Path:
        """Write records or spectrum tables to path.

        An empty sequence produces a header-only CSV (or an empty JSON-lines file).

        Raises:
            ResultsIOError: If the file cannot be written.
        """
        path = Path(path)
        if results and isinstance(results[0], SpectrumTable):
            text = self.render_spectra(results)  # type: ignore[arg-type]
        else:
            text = self.render_records(results)  # type: ignore[arg-type]
        self._write_atomic(path, text)
        return path

    def load_records(self, path: Path) -> list[RmseRecord]:
        """Parse an RMSE file written by :meth:`emit_results`."""
        path = Path(path)
        text = self._read_text(path)
        try:
            if self.fmt is ResultFormat.CSV:
                reader = csv.DictReader(io.StringIO(text))
                return [RmseRecord.model_validate(row) for row in reader]
            return [
                RmseRecord.model_validate_json(line) for line in text.splitlines() if line.strip()
            ]
        except (ValidationError, ValueError) as exc:
            raise ResultsIOError(path, f'malformed results: {exc}') from exc

    def load_spectrum_rows(self, path: Path) -> list[SpectrumRow]:
        """Parse a spectrum file into (K, theta_deg, p_q_value) rows."""
        path = Path(path)
        text = self._read_text(path)
        try:
            if self.fmt is ResultFormat.CSV:
                reader = csv.DictReader(io.StringIO(text))
                items: list[dict[str, Any]] = list(reader)
            else:
                items = [json.loads(line) for line in text.splitlines() if line.strip()]
            return [
                (int(item['K']), float(item['theta_deg']), float(item['p_q_value']))
                for item in items
            ]
        except (KeyError, ValueError) as exc:
            raise ResultsIOError(path, f'malformed spectrum: {exc}') from exc

    @staticmethod
    def meta_path(path: Path) -> Path:
        path = Path(path)
        return path.with_name(path.name + '.meta.json')

    def write_meta(
        self,
        path: Path,
        scenario: ScenarioConfig,
        command: str,
        snr_definition: Optional[str] = None,
        failures: Optional[list[dict[str, Any]]] = None,
        extra: Optional[dict[str, Any]] = None,
    ) -> Path:
        """Write the ``<out>.meta.json`` sidecar next to a results file."""
        meta: dict[str, Any] = {
            'command': command,
            'format': self.fmt.value,
            'scenario': scenario.model_dump(mode='json'),
            'failures': failures or [],
        }
        if snr_definition is not None:
            meta['snr_definition'] = snr_definition
        if extra:
            meta.update(extra)
        target = self.meta_path(path)
        self._write_atomic(target, json.dumps(meta, indent=2) + '\n')
        return target

    def load_meta(self, path: Path) -> dict[str, Any]:
        target = self.meta_path(path)
        try:
            return json.loads(self._read_text(target))
        except json.JSONDecodeError as exc:
            raise ResultsIOError(target, f'malformed metadata: {exc}') from exc
