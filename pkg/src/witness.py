"""Witness files: canonical JSON bodies, header hashes and replay verification.

A witness file is {"header": ..., "body": ..., "verified": bool}. The body
always carries "kind" and the "semigroup" spec, so it can be replayed
against a freshly constructed handle. The header never holds timestamps;
it echoes the command and pins the body by its sha256.
"""

import hashlib
import json
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List

from src.cayley import enumerate_finite_semigroups
from src.coloring import coloring_from_json
from src.config import Config
from src.constructions import (verify_disjoint_family, verify_right_ideals, verify_type1,
                               verify_type2, right_ideal_scan)
from src.detectors import ForbiddenWitness, Fs2Certificate, verify_forbidden_witness, verify_fs2_certificate
from src.errors import FsrError, WitnessFormatError
from src.fs_core import (FsSet, IndexSet, SequencePrefix, SumsequencePrefix, disjoint_proper_check,
                         fs_set, fs_ge2, is_proper_prefix, length_determined_check, sum_over,
                         tail_intersection)
from src.hindman_search import (DisjointFamilyReport, MonoFsWitness, ThresholdResult,
                                has_mono_witness_bruteforce, verify_disjoint_families,
                                verify_mono_witness)
from src.semigroups import Semigroup, SemigroupSpec, construct

logger = logging.getLogger(__name__)


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(',', ':'), ensure_ascii=False)


def body_sha256(body: Dict) -> str:
    return hashlib.sha256(canonical_json(body).encode('utf-8')).hexdigest()


@dataclass
class WitnessFile:
    header: Dict
    body: Dict
    verified: bool

    def to_json(self) -> Dict:
        return {'header': self.header, 'body': self.body, 'verified': self.verified}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=2, ensure_ascii=False) + '\n'

    def write(self, path: str) -> None:
        with open(path, 'w', encoding='utf-8') as f:
            f.write(self.dumps())
        logger.info(f"Wrote {self.body.get('kind')} witness to {path}")

    @classmethod
    def load(cls, path: str) -> 'WitnessFile':
        try:
            with open(path, encoding='utf-8') as f:
                data = json.load(f)
        except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
            raise WitnessFormatError(f"cannot read witness file {path}: {e}")

        if not isinstance(data, dict) or not {'header', 'body', 'verified'} <= set(data):
            raise WitnessFormatError("witness file needs header, body and verified")
        header, body = data['header'], data['body']
        if not isinstance(header, dict) or not isinstance(header.get('body_sha256'), str):
            raise WitnessFormatError("header is missing body_sha256")
        if not isinstance(body, dict) or 'kind' not in body or 'semigroup' not in body:
            raise WitnessFormatError("body needs kind and semigroup")
        if not isinstance(data['verified'], bool):
            raise WitnessFormatError("verified must be a boolean")
        return cls(header, body, data['verified'])


def make_witness_file(verb: str, options: Dict, seed: int, body: Dict) -> WitnessFile:
    """Replay the body once and wrap it with a header"""
    header = {
        'verb': verb,
        'options': options,
        'seed': seed,
        'version': Config.VERSION,
        'body_sha256': body_sha256(body),
    }
    failures = replay_body(body)
    if failures:
        logger.error(f"Fresh {body['kind']} body failed replay: {failures}")
    return WitnessFile(header, body, not failures and bool(body.get('positive', True)))


# -- rebuilding library objects from wire data ------------------------------------------

def prefix_from_wire(S: Semigroup, wire: List, bijective: bool = False) -> SequencePrefix:
    return SequencePrefix(S, tuple(S.from_wire(w) for w in wire), bijective=bijective)


def sumsequence_from_json(base: SequencePrefix, data: Dict) -> SumsequencePrefix:
    S = base.semigroup
    return SumsequencePrefix(base, tuple(IndexSet(tuple(F)) for F in data['index_sets']),
                             derived=tuple(S.from_wire(w) for w in data['derived']))


def fs_set_from_json(S: Semigroup, data: Dict) -> FsSet:
    return FsSet(S, {S.from_wire(w): tuple(F) for w, F in data['witnesses']})


def _wire_set(S: Semigroup, wires: List) -> frozenset:
    return frozenset(S.from_wire(w) for w in wires)


# -- per-kind replays ---------------------------------------------------------------

def _replay_fs(S: Semigroup, body: Dict) -> List[str]:
    prefix = prefix_from_wire(S, body['input']['prefix'])
    at_least = 2 if body['kind'] == 'fs2' else 1
    failures = []
    recorded = set()
    for w, F in body['result']['witnesses']:
        x = S.from_wire(w)
        recorded.add(x)
        index_set = IndexSet(tuple(F))
        if len(index_set) < at_least:
            failures.append(f"witness {index_set} of {w!r} has fewer than {at_least} indices")
        elif sum_over(prefix, index_set) != x:
            failures.append(f"a_{index_set} != {w!r}")
    expected = (fs_ge2 if at_least == 2 else fs_set)(prefix).elements
    if _wire_set(S, body['result']['elements']) != recorded:
        failures.append("element list and witness list disagree")
    if recorded != expected:
        failures.append(f"{len(expected ^ recorded)} elements missing from or extra in the recorded set")
    return failures


_CHECKS = {
    'proper': (is_proper_prefix, lambda F, G: F.precedes(G), "F1 < F2"),
    'disjoint_proper': (disjoint_proper_check, lambda F, G: F.disjoint(G), "disjoint"),
    'length_determined': (length_determined_check, lambda F, G: len(F) == len(G) >= 2, "same length"),
}


def _replay_check(S: Semigroup, body: Dict) -> List[str]:
    check, relation, relation_name = _CHECKS[body['kind']]
    prefix = prefix_from_wire(S, body['input']['prefix'])
    result = body['result']
    failures = []
    if result['holds'] != bool(check(prefix)):
        failures.append(f"recorded holds={result['holds']} does not replay")
    if 'violation' in result:
        F, G = (IndexSet(tuple(v)) for v in result['violation'])
        if not relation(F, G):
            failures.append(f"violating pair {F}, {G} is not {relation_name}")
        same = sum_over(prefix, F) == sum_over(prefix, G)
        # length-determined violations are pairs with different sums
        if same == (body['kind'] == 'length_determined'):
            failures.append(f"a_{F} and a_{G} do not witness the violation")
    return failures


def _replay_tails(S: Semigroup, body: Dict) -> List[str]:
    inputs = body['input']
    prefix = prefix_from_wire(S, inputs['prefix'])
    report = tail_intersection(prefix, inputs['schedule'], inputs['stability'])
    if canonical_json(report.to_json()) != canonical_json(body['result']):
        return [f"tail intersection replays as {report.status}, recorded {body['result'].get('status')}"]
    return []


def _replay_construction(S: Semigroup, body: Dict) -> List[str]:
    result = body['result']
    kind, payload = result['kind'], result['payload']
    inputs = body['input']
    stream = prefix_from_wire(S, inputs['stream']) if 'stream' in inputs else None

    if kind == 'proper_prefix':
        sumsequence = sumsequence_from_json(stream, payload)
        return [] if is_proper_prefix(sumsequence.as_prefix()) else ["derived prefix is not proper"]
    if kind in ('type1', 'type2'):
        sumsequence = sumsequence_from_json(stream, payload)
        return (verify_type1 if kind == 'type1' else verify_type2)(sumsequence)
    if kind == 'disjoint_family':
        classes = [sumsequence_from_json(stream, c) for c in payload['classes']]
        sets = [fs_set_from_json(S, fs) for fs in payload['fs_sets']]
        return verify_disjoint_family(S, classes, sets)
    if kind == 'ideal_list':
        carrier = [S.from_wire(w) for w in inputs['carrier']]
        ideals = [(_wire_set(S, item['ideal']), item['maximal_proper']) for item in payload]
        failures = verify_right_ideals(S, carrier, ideals)
        rescanned = right_ideal_scan(S, carrier).payload
        if sorted(map(_ideal_key(S), rescanned)) != sorted(map(_ideal_key(S), ideals)):
            failures.append("recorded ideal list differs from a fresh scan")
        return failures
    if kind == 'probe_report':
        return _replay_probe(S, stream, inputs, payload)
    return []


def _ideal_key(S: Semigroup) -> Callable:
    return lambda item: (sorted(S.rank(x) for x in item[0]), item[1])


def _replay_probe(S: Semigroup, stream: SequencePrefix, inputs: Dict, payload: Dict) -> List[str]:
    failures = []
    baseline = tail_intersection(stream, inputs.get('schedule'))
    if canonical_json(baseline.to_json()) != canonical_json(payload['baseline']):
        failures.append("baseline tail intersection does not replay")
    if payload['witness'] is None:
        return failures
    candidate = sumsequence_from_json(stream, payload['witness'])
    report = tail_intersection(candidate.as_prefix())
    if canonical_json(report.to_json()) != canonical_json(payload['best']):
        failures.append("improved tail intersection does not replay")
    elif not (report.stable and baseline.stable and report.value < baseline.value):
        failures.append("probe result is not strictly inside the baseline")
    return failures


def _replay_forbidden(S: Semigroup, body: Dict) -> List[str]:
    if body['result'] is None:
        return []
    return verify_forbidden_witness(S, ForbiddenWitness.from_json(body['result'], S))


def _fs2_from_json(S: Semigroup, stream: SequencePrefix, data: Dict) -> Fs2Certificate:
    return Fs2Certificate(sumsequence_from_json(stream, data), data['block_size'],
                          _wire_set(S, data['fs2']), data['stable_upto'])


def _replay_fs2_certificate(S: Semigroup, body: Dict) -> List[str]:
    if body['result'] is None:
        return []
    stream = prefix_from_wire(S, body['input']['stream'])
    return verify_fs2_certificate(_fs2_from_json(S, stream, body['result']))


def _replay_classify(S: Semigroup, body: Dict) -> List[str]:
    result = body['result']
    failures = []
    for pattern, data in result['witnesses'].items():
        witness = ForbiddenWitness.from_json(data, S)
        failures += [f"{pattern}: {f}" for f in verify_forbidden_witness(S, witness)]
    if (result['verdict'] == 'OBSTRUCTION_FOUND') != bool(result['witnesses']):
        failures.append(f"verdict {result['verdict']} does not match the witnesses")
    if result['fs2_evidence'] is not None:
        stream = SequencePrefix.from_stream(S, result['horizon'])
        cert = _fs2_from_json(S, stream, result['fs2_evidence'])
        failures += [f"fs2 evidence: {f}" for f in verify_fs2_certificate(cert)]
    return failures


def _mono_from_json(base: SequencePrefix, data: Dict) -> MonoFsWitness:
    return MonoFsWitness(sumsequence_from_json(base, data), data['color'])


def _replay_hindman(S: Semigroup, body: Dict) -> List[str]:
    if body['result'] is None:
        return []
    inputs = body['input']
    base = prefix_from_wire(S, inputs['base'])
    coloring = coloring_from_json(inputs['coloring'], S)
    witness = _mono_from_json(base, body['result'])
    universe = None if inputs['within'] else base.elements
    failures = verify_mono_witness(S, coloring, witness, universe)
    if _wire_set(S, body['result']['fs']) != witness.fs:
        failures.append("recorded finite-sums set does not match the terms")
    return failures


def _replay_threshold(S: Semigroup, body: Dict) -> List[str]:
    data = body['result']
    universe = [S.from_wire(w) for w in data['universe']]
    result = ThresholdResult(data['status'], data['k'], data['colors'], data['threshold'],
                             data['avoider'], universe, data['budget_used'])
    failures = []
    if result.status == 'reached' and result.threshold != len(universe) + 1:
        failures.append(f"threshold {result.threshold} does not follow the avoider universe")
    if result.avoider is not None:
        if len(result.avoider) != len(universe):
            failures.append("avoider does not color the whole universe")
        elif any(not 0 <= c < result.colors for c in result.avoider):
            failures.append("avoider uses colors outside the palette")
        elif universe and has_mono_witness_bruteforce(S, universe, result.avoider_coloring(), result.k):
            failures.append(f"avoider of {len(universe)} elements has a monochromatic witness")
    return failures


def _replay_disjoint_families(S: Semigroup, body: Dict) -> List[str]:
    inputs = body['input']
    data = body['result']
    base = prefix_from_wire(S, inputs['universe'])
    coloring = coloring_from_json(inputs['coloring'], S)
    report = DisjointFamilyReport(
        families=[_mono_from_json(base, w) for w in data['families']],
        fs2_sets=[_wire_set(S, B) for B in data['fs2_sets']],
        trace=list(data['trace']),
        requested=data['requested'],
        alpha=data['alpha'],
        beta=data['beta'],
    )
    failures = verify_disjoint_families(S, coloring, report, base.elements)
    if report.complete != data['complete']:
        failures.append("recorded completeness does not match the families")
    return failures


def _replay_census(S: Semigroup, body: Dict) -> List[str]:
    order = body['input']['order']
    tables = [[v for row in table for v in row] for table in enumerate_finite_semigroups(order)]
    result = body['result']
    failures = []
    if len(tables) != result['count']:
        failures.append(f"order {order} census replays as {len(tables)}, recorded {result['count']}")
    if 'tables' in result and result['tables'] != tables:
        failures.append("recorded tables differ from a fresh census")
    return failures


REPLAYS: Dict[str, Callable[[Semigroup, Dict], List[str]]] = {
    'fs': _replay_fs,
    'fs2': _replay_fs,
    'proper': _replay_check,
    'disjoint_proper': _replay_check,
    'length_determined': _replay_check,
    'tails': _replay_tails,
    'construction': _replay_construction,
    'forbidden': _replay_forbidden,
    'fs2_certificate': _replay_fs2_certificate,
    'classify': _replay_classify,
    'hindman': _replay_hindman,
    'threshold': _replay_threshold,
    'disjoint_families': _replay_disjoint_families,
    'census': _replay_census,
}


def replay_body(body: Dict) -> List[str]:
    """Rebuild the handle from the embedded spec and replay every claim in the body"""
    replay = REPLAYS.get(body.get('kind')) if isinstance(body.get('kind'), str) else None
    if replay is None:
        raise WitnessFormatError(f"unknown witness kind {body.get('kind')!r}")
    kind = body['kind']
    # census bodies are not tied to one semigroup
    if body.get('semigroup') is None:
        if kind != 'census':
            raise WitnessFormatError(f"{kind} body has no semigroup spec")
        S = None
    else:
        try:
            S = construct(SemigroupSpec.from_dict(body['semigroup']))
        except FsrError as e:
            raise WitnessFormatError(f"embedded semigroup spec is invalid: {e}")

    try:
        return replay(S, body)
    except (KeyError, IndexError, TypeError, ValueError, AttributeError) as e:
        raise WitnessFormatError(f"malformed {kind} body: {e!r}")
    except WitnessFormatError:
        raise
    except FsrError as e:
        return [f"{e.code}: {e}"]


def verify_witness_file(witness: WitnessFile) -> List[str]:
    """All failed claims of a loaded file; empty means it verifies"""
    failures = []
    if body_sha256(witness.body) != witness.header['body_sha256']:
        failures.append("body does not match header body_sha256")
    replayed = replay_body(witness.body)
    failures += replayed
    expected = not replayed and bool(witness.body.get('positive', True))
    if witness.verified != expected:
        failures.append(f"recorded verified={witness.verified} but replay gives {expected}")
    for failure in failures:
        logger.warning(f"Witness claim failed: {failure}")
    return failures
