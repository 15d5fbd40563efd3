"""
ResultTable: a pandas DataFrame plus the provenance block written ahead of it.
"""

import io
import logging
import os

import pandas as pd

from .. import __version__
from ..exceptions import MaxAffineError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


class ResultTable:
    """Rectangular table with unique column names and a '#'-prefixed provenance header"""

    def __init__(self, rows, columns, config=None, provenance=None):
        if len(set(columns)) != len(columns):
            raise MaxAffineError(f"Duplicate column names in result table: {columns}")
        for row in rows:
            missing = set(columns) - set(row)
            extra = set(row) - set(columns)
            if missing or extra:
                raise MaxAffineError(f"Row does not match columns (missing {sorted(missing)}, extra {sorted(extra)})")
        self.frame = pd.DataFrame(rows, columns=list(columns))
        self.config = config
        self.provenance = list(provenance or [])

    @property
    def columns(self):
        return list(self.frame.columns)

    def __len__(self):
        return len(self.frame)

    def column(self, name):
        return self.frame[name].to_numpy()

    def provenance_lines(self):
        lines = [f"# version={version_string()}"]
        if self.config is not None:
            lines.extend(f"# {key}={value}" for key, value in self.config.echo())
        lines.extend(f"# {key}={value}" for key, value in self.provenance)
        return lines

    def to_csv_string(self):
        buffer = io.StringIO()
        buffer.write('\n'.join(self.provenance_lines()) + '\n')
        self.frame.to_csv(buffer, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        return buffer.getvalue()

    def to_csv(self, path):
        """Write the provenance block and the table; returns the path written"""
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            f.write(self.to_csv_string())
        logger.info(f"Wrote {len(self)} rows to {path}")
        return path


def version_string():
    return f"maxaffine {__version__}"


def read_result_csv(path):
    """Load the table part of a result CSV, skipping the provenance block"""
    return pd.read_csv(path, comment='#')
