import json

import numpy as np
import pandas as pd
import pytest

from torus_queens.log import REPORT_COLUMNS, SweepExperiment, atomic_write, find_last_experiment_version


def row(n, count):
    return {
        'n': n, 'd': 2, 'method': 'lemma1', 'count': count, 'deficit': n - count,
        'verified': True, 'upper_bound': n, 'status': 'constructed', 'elapsed_ms': 1,
    }


def test_versions_increment(tmp_path):
    a = SweepExperiment(save_dir=tmp_path, name='d2')
    b = SweepExperiment(save_dir=tmp_path, name='d2')
    assert (a.version, b.version) == (0, 1)
    assert find_last_experiment_version(str(tmp_path / 'd2')) == 1
    assert (tmp_path / 'd2' / 'version_1' / 'meta.experiment').exists()


def test_save_and_load(tmp_path):
    exp = SweepExperiment(save_dir=tmp_path, name='d2', description='lemma1 sweep')
    exp.tag({'seed': 3, 'n': [5, 7]})
    exp.log(row(5, np.int64(5)))
    exp.log(dict(row(7, 7), extra='kept in json'))
    exp.set_summary({'deficit_constant': None})
    exp.save()

    df = pd.read_csv(exp.report_csv_path)
    assert list(df.columns) == REPORT_COLUMNS
    assert df['count'].tolist() == [5, 7]

    with open(exp.report_json_path) as f:
        report = json.load(f)
    assert report['rows'][1]['extra'] == 'kept in json'
    assert report['summary'] == {'deficit_constant': None}

    reloaded = SweepExperiment(save_dir=tmp_path, name='d2', version=exp.version)
    assert reloaded.rows == exp.rows
    assert reloaded.tags == {'seed': 3, 'n': [5, 7]}
    assert reloaded.description == 'lemma1 sweep'


def test_debug_writes_nothing(tmp_path):
    exp = SweepExperiment(save_dir=tmp_path, name='dry', debug=True)
    exp.log(row(5, 5))
    exp.save()
    assert not (tmp_path / 'dry').exists()


def test_atomic_write_keeps_old_file_on_error(tmp_path):
    target = tmp_path / 'report.csv'
    target.write_text('old')
    with pytest.raises(RuntimeError):
        with atomic_write(target) as tmp:
            with open(tmp, 'w') as f:
                f.write('new')
            raise RuntimeError('boom')
    assert target.read_text() == 'old'
    assert not (tmp_path / 'report.csv.tmp').exists()


if __name__ == '__main__':
    pytest.main([__file__])
