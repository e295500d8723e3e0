import json
import os
import shutil

import pandas as pd
import pytest

from torus_queens import constructions
from torus_queens.certificates import known_max_2d
from torus_queens.cli import EXIT_BUDGET, EXIT_INVALID, EXIT_NEGATIVE, EXIT_OK, int_range, main
from torus_queens.constructions import construct_lemma1, construct_lemma3
from torus_queens.core import ConstructionError
from torus_queens.lines import Placement
from torus_queens.placement_file import read_placement, write_placement
from torus_queens.render import render_text

LOCKED_BASELINE = os.path.join(os.path.dirname(__file__), 'data', 'deficit_baseline.json')


def sweep_dir(root, name='sweep', version=0):
    return root / name / 'version_{}'.format(version)


def test_int_range():
    assert int_range('7') == [7]
    assert int_range('5,7,11') == [5, 7, 11]
    assert int_range('2:6') == [2, 3, 4, 5, 6]
    assert int_range('3:15:6') == [3, 9, 15]


def test_construct(tmp_path, capsys):
    out = tmp_path / 'l1.json'
    assert main(['construct', '--n', '5', '--d', '2', '--method', 'lemma1', '--out', str(out)]) == EXIT_OK
    assert read_placement(out).count == 5
    assert 'count=5' in capsys.readouterr().out


def test_construct_precondition(capsys):
    assert main(['construct', '--n', '12', '--d', '2', '--method', 'lemma1']) == EXIT_INVALID
    assert 'n must be coprime to 6 for lemma1' in capsys.readouterr().err


def test_construct_auto_three_dimensions(capsys):
    assert main(['construct', '--n', '11', '--d', '3']) == EXIT_OK
    out = capsys.readouterr().out
    assert 'method=thm3' in out
    assert 'count=121' in out


def test_verify(tmp_path, capsys):
    good = tmp_path / 'good.json'
    write_placement(construct_lemma1(25).placement, good)
    assert main(['verify', str(good)]) == EXIT_OK

    bad = tmp_path / 'bad.json'
    write_placement(Placement(9, 2, ((0, 0), (3, 3))), bad)
    capsys.readouterr()
    assert main(['verify', str(bad), '--list-conflicts']) == EXIT_NEGATIVE
    assert '(1,1)' in capsys.readouterr().out
    assert main(['verify', str(bad), '--pairwise']) == EXIT_NEGATIVE

    truncated = tmp_path / 'truncated.json'
    truncated.write_text('{"version": "1", "n": 9, "d": 2, "queens": [[0, 0], [3')
    assert main(['verify', str(truncated)]) == EXIT_INVALID


def test_solve(capsys):
    assert main(['solve', '--n', '9', '--d', '2']) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['best_count'] == 7
    assert doc['status'] == 'Optimal'

    assert main(['solve', '--n', '5', '--d', '2', '--target', '5']) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['decision'] == 'Yes'
    assert len(doc['queens']) == 5

    assert main(['solve', '--n', '8', '--target', '7']) == EXIT_NEGATIVE
    assert main(['solve', '--n', '12', '--node-budget', '50']) == EXIT_BUDGET


@pytest.mark.slow
def test_solve_refutes_eleven_on_twelve():
    assert main(['solve', '--n', '12', '--d', '2', '--target', '11']) == EXIT_NEGATIVE


def test_certify(capsys):
    assert main(['certify', '--n', '12']) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert [c['kind'] for c in doc['certificates']] == ['PolyaNoN', 'Theorem2NoNminus1']
    assert [c['bound'] for c in doc['certificates']] == [11, 10]
    assert doc['known_max'] == 10

    assert main(['certify', '--n', '35', '--d', '3']) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['certificates'][0]['bound'] == 1224

    assert main(['certify', '--n', '25']) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc['certificates'] == []
    assert doc['summary'] == 'no impossibility certificate; exact value 25'


def test_render(tmp_path, capsys):
    path = tmp_path / 'l3.txt'
    pl = construct_lemma3(15).placement
    write_placement(pl, path)
    assert main(['render', str(path)]) == EXIT_OK
    assert capsys.readouterr().out == render_text(pl)

    svg = tmp_path / 'l3.svg'
    assert main(['render', str(path), '--format', 'svg', '--out', str(svg)]) == EXIT_OK
    assert svg.read_text().count('<circle') == 13

    empty = tmp_path / 'empty.json'
    write_placement(Placement(4, 2, ()), empty)
    assert main(['render', str(empty)]) == EXIT_OK


def test_sweep_two_dimensions(tmp_path):
    assert main(['sweep', '--n', '2:15', '--d', '2', '--save-dir', str(tmp_path)]) == EXIT_OK
    df = pd.read_csv(sweep_dir(tmp_path) / 'report.csv')
    assert list(df.columns) == [
        'n', 'd', 'method', 'count', 'deficit', 'verified', 'upper_bound', 'below_known_max', 'status', 'elapsed_ms',
    ]
    assert len(df) == 14
    assert df['verified'].all()
    assert (df['count'] <= df['upper_bound']).all()
    for n, count in zip(df['n'], df['count']):
        assert count == known_max_2d(n)
    assert not df['below_known_max'].any()


@pytest.mark.slow
def test_sweep_two_dimensions_to_one_hundred(tmp_path):
    assert main(['sweep', '--n', '2:100', '--save-dir', str(tmp_path), '--solve-max-n', '10']) == EXIT_OK
    df = pd.read_csv(sweep_dir(tmp_path) / 'report.csv')
    assert len(df) == 99
    assert df['verified'].all()
    for n, count, below in zip(df['n'], df['count'], df['below_known_max']):
        if not below:
            assert count == known_max_2d(n)


def test_sweep_deficit_baseline(tmp_path):
    baseline = tmp_path / 'baseline.json'
    args = ['sweep', '--n', '2:60', '--d', '3', '--method', 'thm5',
            '--save-dir', str(tmp_path), '--baseline', str(baseline)]
    assert main(args) == EXIT_OK
    locked = json.loads(baseline.read_text())['deficit_constant']
    with open(sweep_dir(tmp_path) / 'report.json') as f:
        summary = json.load(f)['summary']
    assert summary['deficit_constant'] == locked
    assert summary['rows'] > 0

    # the same run stays within the lock
    assert main(args) == EXIT_OK

    baseline.write_text(json.dumps({'deficit_constant': -1}))
    assert main(args) == EXIT_NEGATIVE


def test_sweep_within_locked_deficit_constant(tmp_path):
    baseline = tmp_path / 'baseline.json'
    shutil.copy(LOCKED_BASELINE, baseline)
    args = ['sweep', '--n', '2:60', '--d', '3', '--method', 'thm5',
            '--save-dir', str(tmp_path), '--baseline', str(baseline)]
    assert main(args) == EXIT_OK
    assert json.loads(baseline.read_text()) == {'deficit_constant': 47}


def test_sweep_construction_error_is_a_failed_row(tmp_path, monkeypatch, capsys):
    def broken(n, d, method='auto'):
        raise ConstructionError('step modulus too large')

    monkeypatch.setattr(constructions, 'construct', broken)
    args = ['sweep', '--n', '5:7', '--save-dir', str(tmp_path), '--threads', '1']
    assert main(args) == EXIT_NEGATIVE
    assert 'construction failed: step modulus too large' in capsys.readouterr().err

    with open(sweep_dir(tmp_path) / 'report.json') as f:
        doc = json.load(f)
    assert doc['summary']['failed_rows'] == 3
    assert [r['status'] for r in doc['rows']] == ['failed'] * 3
    assert [r['deficit'] for r in doc['rows']] == [5, 6, 7]
    assert not any(r['verified'] for r in doc['rows'])


def test_sweep_four_dimensions(tmp_path):
    assert main(['sweep', '--n', '17', '--d', '4', '--save-dir', str(tmp_path), '--name', 'd4']) == EXIT_OK
    df = pd.read_csv(sweep_dir(tmp_path, 'd4') / 'report.csv')
    assert df['count'].tolist() == [4913]
    assert df['method'].tolist() == ['thm3']


def test_sweep_config_and_random_strategy(tmp_path):
    config = tmp_path / 'sweep.json'
    config.write_text(json.dumps({'n': '5,7,11,13', 'method': ['lemma1']}))
    args = ['sweep', '--n', '2', '--config', str(config), '--save-dir', str(tmp_path),
            '--strategy', 'random_search', '--nb-trials', '2', '--seed', '3']
    assert main(args) == EXIT_OK
    df = pd.read_csv(sweep_dir(tmp_path) / 'report.csv')
    assert len(df) == 2
    assert set(df['n']) <= {5, 7, 11, 13}
    assert (df['method'] == 'lemma1').all()


def test_sweep_threads(tmp_path):
    args = ['sweep', '--n', '5:25', '--save-dir', str(tmp_path), '--threads', '2']
    assert main(args) == EXIT_OK
    df = pd.read_csv(sweep_dir(tmp_path) / 'report.csv')
    assert df['n'].tolist() == list(range(5, 26))


def test_bad_arguments():
    assert main(['construct']) == EXIT_INVALID
    assert main(['sweep', '--n', '2:x']) == EXIT_INVALID


if __name__ == '__main__':
    pytest.main([__file__])
