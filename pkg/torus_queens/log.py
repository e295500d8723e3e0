import contextlib
import json
import logging
import os
import shutil
from datetime import datetime
from pathlib import Path

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# fixed column order of report.csv
REPORT_COLUMNS = [
    'n', 'd', 'method', 'count', 'deficit', 'verified', 'upper_bound', 'below_known_max', 'status', 'elapsed_ms',
]


# -----------------------------
# Sweep experiment
# -----------------------------

class SweepExperiment(object):

    def __init__(
        self,
        save_dir,
        name='sweep',
        version=None,
        description=None,
        debug=False,
    ):
        """
        A versioned directory holding one sweep's report. A new version is
        created unless an existing one is requested.

        save_dir/name/version_k/{meta.experiment, meta_tags.json, report.csv, report.json}

        :param save_dir:
        :param name:
        :param version: reuse this version; None picks last + 1
        :param description:
        :param debug: keep everything in memory, write nothing
        """
        self.save_dir = str(save_dir)
        self.name = name
        self.description = description
        self.debug = debug
        self.rows = []
        self.tags = {}
        self.summary = {}
        self.created_at = str(datetime.utcnow())

        if version is None:
            version = self.__get_last_experiment_version() + 1
        self.version = version
        self.exp_hash = '{}_v{}'.format(self.name, self.version)

        # when debugging don't touch the disk
        if debug:
            return

        os.makedirs(self.get_data_path(), exist_ok=True)
        if os.path.exists(self.__get_log_name()):
            self.__load()
        else:
            self.save()

    # --------------------------------
    # FILE IO UTILS
    # --------------------------------
    def __get_last_experiment_version(self):
        exp_dir = os.path.join(self.save_dir, self.name)
        if not os.path.isdir(exp_dir):
            return -1
        return find_last_experiment_version(exp_dir)

    def __get_log_name(self):
        return os.path.join(self.get_data_path(), 'meta.experiment')

    def get_data_path(self):
        return os.path.join(self.save_dir, self.name, 'version_{}'.format(self.version))

    @property
    def report_csv_path(self):
        return os.path.join(self.get_data_path(), 'report.csv')

    @property
    def report_json_path(self):
        return os.path.join(self.get_data_path(), 'report.json')

    def tag(self, tag_dict):
        """
        Adds metadata to the sweep (its arguments, seeds, budgets)

        >> e.tag({"d": 3, "method": "thm5"})
        """
        for k, v in tag_dict.items():
            self.tags[k] = _plain(v)

    def argparse(self, namespace):
        parsed = vars(namespace)
        self.tag({k: v for k, v in parsed.items() if not callable(v)})

    def log(self, row):
        """
        Appends one report row; missing columns are left empty
        :param row: dict keyed by REPORT_COLUMNS (extra keys are kept in report.json)
        """
        row = {k: _plain(v) for k, v in row.items()}
        self.rows.append(row)
        logger.info('%s row %d: %s', self.exp_hash, len(self.rows), row)

    def set_summary(self, summary):
        self.summary.update({k: _plain(v) for k, v in summary.items()})

    def frame(self):
        df = pd.DataFrame(self.rows)
        for column in REPORT_COLUMNS:
            if column not in df.columns:
                df[column] = None
        return df[REPORT_COLUMNS]

    def save(self):
        """
        Writes meta.experiment, meta_tags.json, report.csv and report.json atomically
        """
        if self.debug:
            return

        obj = {
            'name': self.name,
            'version': self.version,
            'description': self.description,
            'created_at': self.created_at,
            'exp_hash': self.exp_hash,
            'report_path': self.report_csv_path,
        }
        with atomic_write(self.__get_log_name()) as tmp_path:
            with open(tmp_path, 'w') as file:
                json.dump(obj, file, ensure_ascii=False)

        with atomic_write(os.path.join(self.get_data_path(), 'meta_tags.json')) as tmp_path:
            with Path(tmp_path).open(mode='w') as file:
                json.dump(self.tags, file)

        with atomic_write(self.report_csv_path) as tmp_path:
            self.frame().to_csv(tmp_path, index=False)

        with atomic_write(self.report_json_path) as tmp_path:
            with open(tmp_path, 'w') as file:
                json.dump({'summary': self.summary, 'rows': self.rows}, file, ensure_ascii=False, indent=2)

    def __load(self):
        with open(self.__get_log_name(), 'r') as file:
            data = json.load(file)
            self.description = data['description']
            self.created_at = data['created_at']

        try:
            with Path(self.get_data_path(), 'meta_tags.json').open() as file:
                self.tags = json.load(file)
        except (OSError, ValueError):
            self.tags = {}

        try:
            with open(self.report_json_path) as file:
                report = json.load(file)
            self.rows = report.get('rows', [])
            self.summary = report.get('summary', {})
        except (OSError, ValueError):
            # report was empty...
            self.rows = []

    def __str__(self):
        return 'Sweep: {}, v: {}'.format(self.name, self.version)


def _plain(v):
    # numpy scalars are not json serializable
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


@contextlib.contextmanager
def atomic_write(dst_path):
    """A context manager to simplify atomic writing.

    Usage:
    >>> with atomic_write(dst_path) as tmp_path:
    >>>     # write to tmp_path
    >>> # Here tmp_path renamed to dst_path, if no exception happened.
    """
    tmp_path = str(dst_path) + '.tmp'
    try:
        yield tmp_path
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    else:
        shutil.move(tmp_path, str(dst_path))


def find_last_experiment_version(path):
    last_version = -1
    for f in os.listdir(path):
        if f.startswith('version_'):
            try:
                last_version = max(last_version, int(f.split('_')[-1]))
            except ValueError:
                continue
    return last_version
