import csv
import json
import logging
import os

from scenario_error import ScenarioParseError


class FileService:
    def __init__(self, base_dir: str):
        """
        Initializes the FileService with a base directory where files are stored.
        """
        self.base_dir = base_dir

    def _get_full_path(self, file_name: str) -> str:
        """
        Constructs the full path to a file within the base directory.
        """
        return os.path.join(self.base_dir, file_name)

    def save_json(self, file_name: str, data: dict) -> str:
        """
        Saves a dictionary as a JSON file.
        """
        file_path = self._get_full_path(file_name)
        os.makedirs(os.path.dirname(file_path) or ".", exist_ok=True)
        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=4)
            f.write("\n")
        return file_path

    def load_json(self, file_name: str) -> dict:
        """
        Loads JSON data from a file. Syntax errors are reported with their line and column.
        """
        file_path = self._get_full_path(file_name)
        with open(file_path, 'r', encoding='utf-8') as f:
            text = f.read()
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ScenarioParseError(file_path, e.lineno, e.colno, message=f"Invalid JSON ({e.msg})") from e

    def save_csv(self, file_name: str, header, rows) -> str:
        """
        Writes a header and rows as CSV. Floats are written with 17 significant digits.
        """
        file_path = self._get_full_path(file_name)
        os.makedirs(os.path.dirname(file_path) or ".", exist_ok=True)
        with open(file_path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                if len(row) != len(header):
                    raise ValueError(f"Row has {len(row)} cells, header has {len(header)}")
                writer.writerow([format_cell(v) for v in row])
        logging.info(f"[io] Wrote {file_path}")
        return file_path


def format_cell(value) -> str:
    if value is None:
        return "infeasible"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            return repr(value)
        return f"{value:.17g}"
    return str(value)
