#!/usr/bin/env python3
"""Test the fsr command line: exit codes, witness files and replay"""

import json
import os
import sys

import pytest

# Add project root to path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from src.cli import EXIT_NEGATIVE, EXIT_POSITIVE, EXIT_USAGE, parse_and_dispatch

NATURALS = '{"family": "naturals", "params": {}}'
FAN = '{"family": "fan", "params": {}}'
TYPE_C = '{"family": "type_c", "params": {}}'


def run_json(capsys, *argv):
    code = parse_and_dispatch(list(argv) + ['--json'])
    return code, json.loads(capsys.readouterr().out)


def test_proper_violation_on_naturals(capsys):
    code, witness = run_json(capsys, 'proper', '--spec', NATURALS, '--prefix', '1,2,3')
    assert code == EXIT_NEGATIVE
    assert witness['body']['result'] == {'holds': False, 'violation': [[1, 2], [3]]}
    assert witness['body']['positive'] is False
    assert witness['verified'] is False


def test_spec_from_file(tmp_path, capsys):
    spec = tmp_path / 'fan.json'
    spec.write_text(FAN)
    code, witness = run_json(capsys, 'fs2', '--spec', str(spec), '--prefix', '2,3,4')
    assert code == EXIT_POSITIVE
    assert witness['body']['result']['elements'] == [1]
    assert witness['header']['verb'] == 'fs2'


def test_detect_then_verify(tmp_path, capsys):
    out = tmp_path / 'fan.json'
    code = parse_and_dispatch(['detect', '--spec', FAN, '--pattern', 'type_b', '--leaves', '5', '-o', str(out)])
    assert code == EXIT_POSITIVE
    assert 'e=1' in capsys.readouterr().out

    data = json.loads(out.read_text())
    assert data['verified'] is True
    assert data['body']['result']['elements'] == {'e': 1, 'e2': 2, 'e3': 3, 'e4': 4, 'e5': 5, 'e6': 6}

    assert parse_and_dispatch(['verify', str(out)]) == EXIT_POSITIVE
    assert 'verified' in capsys.readouterr().out


def test_tampered_witness_is_rejected(tmp_path, capsys):
    out = tmp_path / 'type_c.json'
    assert parse_and_dispatch(['detect', '--spec', TYPE_C, '--pattern', 'type_c', '-o', str(out)]) == EXIT_POSITIVE
    capsys.readouterr()

    data = json.loads(out.read_text())
    lhs, rhs, _ = data['body']['result']['identities'][0]
    assert (lhs, rhs) == ('e + e', 'e')
    data['body']['result']['identities'][0][2] = [1, 1]
    out.write_text(json.dumps(data))

    assert parse_and_dispatch(['verify', str(out)]) == EXIT_NEGATIVE
    printed = capsys.readouterr().out
    assert 'e + e = e does not hold' in printed
    assert 'body_sha256' in printed


def test_truncated_witness_file(tmp_path, capsys):
    out = tmp_path / 'census.json'
    assert parse_and_dispatch(['enumerate-oracle', '--order', '2', '-o', str(out)]) == EXIT_POSITIVE
    text = out.read_text()
    out.write_text(text[:len(text) // 2])
    assert parse_and_dispatch(['verify', str(out)]) == EXIT_USAGE
    assert 'error[WITNESS_FORMAT]' in capsys.readouterr().err


def test_malformed_witness_bodies(tmp_path, capsys):
    out = tmp_path / 'fan.json'
    assert parse_and_dispatch(['detect', '--spec', FAN, '--pattern', 'type_b', '-o', str(out)]) == EXIT_POSITIVE
    capsys.readouterr()
    original = json.loads(out.read_text())

    listed = json.loads(json.dumps(original))
    listed['body']['result']['elements'] = list(listed['body']['result']['elements'].values())
    unbound = json.loads(json.dumps(original))
    unbound['body']['semigroup'] = None
    short = json.loads(json.dumps(original))
    short['body']['result']['identities'][0] = short['body']['result']['identities'][0][:1]

    for data in (listed, unbound, short):
        out.write_text(json.dumps(data))
        assert parse_and_dispatch(['verify', str(out)]) == EXIT_USAGE
        assert 'error[WITNESS_FORMAT]' in capsys.readouterr().err


def test_bad_specs_and_usage(capsys):
    assert parse_and_dispatch(['fs', '--spec', '{"family": "free_group", "params": {}}']) == EXIT_USAGE
    assert 'error[INVALID_PARAMETER]' in capsys.readouterr().err

    assert parse_and_dispatch(['fs', '--spec', '{not json']) == EXIT_USAGE
    assert parse_and_dispatch(['fs']) == EXIT_USAGE
    assert parse_and_dispatch(['detect', '--spec', FAN]) == EXIT_USAGE
    assert parse_and_dispatch(['shuffle']) == EXIT_USAGE
    assert parse_and_dispatch(['--version']) == EXIT_POSITIVE


def test_prefix_too_long(capsys):
    code = parse_and_dispatch(['fs', '--spec', NATURALS, '--horizon', '30'])
    assert code == EXIT_USAGE
    assert 'error[PREFIX_TOO_LONG]' in capsys.readouterr().err


def test_hindman_on_fan(capsys):
    code = parse_and_dispatch(['hindman', '--spec', FAN, '--coloring', 'paper-fan', '--k', '2'])
    assert code == EXIT_NEGATIVE
    code = parse_and_dispatch(['hindman', '--spec', FAN, '--coloring', 'constant', '--k', '2'])
    assert code == EXIT_POSITIVE


def test_tails_of_multiples(capsys):
    spec = '{"family": "nat_mod_k", "params": {"k": 5}}'
    blocks = ';'.join(str(n) for n in range(5, 61, 5))
    code, witness = run_json(capsys, 'tails', '--spec', spec, '--horizon', '60', '--sumsequence', blocks)
    assert code == EXIT_POSITIVE
    result = witness['body']['result']
    assert result['status'] == 'stable'
    assert result['value'] == [0]
    assert witness['verified'] is True


def test_construct_split_verifies(tmp_path, capsys):
    out = tmp_path / 'split.json'
    code = parse_and_dispatch(['construct', '--spec', NATURALS, '--method', 'split',
                               '--prefix', '1,2,4,8,16,32', '--parts', '3', '-o', str(out)])
    assert code == EXIT_POSITIVE
    assert parse_and_dispatch(['verify', str(out)]) == EXIT_POSITIVE


def test_construct_error_code(capsys):
    code = parse_and_dispatch(['construct', '--spec', NATURALS, '--method', 'group-proper'])
    assert code == EXIT_USAGE
    assert 'error[NOT_A_GROUP]' in capsys.readouterr().err


def test_threshold_verb(tmp_path, capsys):
    out = tmp_path / 'threshold.json'
    code = parse_and_dispatch(['threshold', '--spec', NATURALS, '--k', '2', '--r', '2', '--max-n', '12',
                               '-o', str(out)])
    assert code == EXIT_POSITIVE
    assert 'threshold for k=2, r=2: 9' in capsys.readouterr().out
    assert json.loads(out.read_text())['body']['result']['threshold'] == 9
    assert parse_and_dispatch(['verify', str(out)]) == EXIT_POSITIVE


def test_enumerate_oracle(tmp_path, capsys):
    out = tmp_path / 'census.json'
    code, witness = run_json(capsys, 'enumerate-oracle', '--order', '2', '--tables', '-o', str(out))
    assert code == EXIT_POSITIVE
    assert witness['body']['semigroup'] is None
    assert witness['body']['result']['count'] == 8
    assert len(witness['body']['result']['tables']) == 8
    assert parse_and_dispatch(['verify', str(out)]) == EXIT_POSITIVE


def test_classify_fan_verifies(tmp_path, capsys):
    out = tmp_path / 'classify.json'
    assert parse_and_dispatch(['classify', '--spec', FAN, '-o', str(out)]) == EXIT_POSITIVE
    assert 'OBSTRUCTION_FOUND' in capsys.readouterr().out
    assert parse_and_dispatch(['verify', str(out)]) == EXIT_POSITIVE


def test_disjoint_families_verb(tmp_path, capsys):
    out = tmp_path / 'families.json'
    code = parse_and_dispatch(['disjoint-families', '--spec', NATURALS, '--m', '3', '-o', str(out)])
    assert code == EXIT_POSITIVE
    assert parse_and_dispatch(['verify', str(out)]) == EXIT_POSITIVE


def test_bodies_do_not_depend_on_workers(capsys):
    bodies = []
    for workers in ('1', '2'):
        code, witness = run_json(capsys, 'detect', '--spec', FAN, '--pattern', 'type_b', '--workers', workers)
        assert code == EXIT_POSITIVE
        bodies.append(json.dumps(witness['body'], sort_keys=True))
    assert bodies[0] == bodies[1]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, '-v']))
