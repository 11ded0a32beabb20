"""Command-line front end for the finite-sums toolkit.

    fsr <verb> --spec <file> [verb flags] [--horizon H] [--budget B] [--seed S] [--workers n] [-o out.json]

Exit codes: 0 witness found or check passed, 1 no witness at this
budget/horizon, 2 usage or spec error (printed as error[CODE] on stderr).
"""

import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Tuple

from src.cayley import enumerate_finite_semigroups
from src.coloring import parse_coloring
from src.config import Config
from src.constructions import (group_proper_subsequence, minimality_probe, right_ideal_scan,
                               split_into_disjoint_ip, sumsequence_dichotomy, tail_to_proper)
from src.detectors import classify, detect_type_a, detect_type_b, detect_type_c, fs2_certificate
from src.errors import FsrError, InvalidParameter
from src.fs_core import (IndexSet, SequencePrefix, SumsequencePrefix, disjoint_proper_check, fs_ge2,
                         fs_set, is_bijective_prefix, is_proper_prefix, length_determined_check,
                         sum_over, tail_intersection)
from src.hindman_search import (exhaustive_threshold, find_disjoint_mono_families, find_mono_fs,
                                find_mono_fs_within)
from src.semigroups import Semigroup, SemigroupSpec, construct
from src.witness import WitnessFile, make_witness_file, verify_witness_file

logger = logging.getLogger(__name__)

EXIT_POSITIVE = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2

# default stream lengths for verbs bounded by the finite-sums length cap
PREFIX_HORIZON = 12
DICHOTOMY_HORIZON = 16

Outcome = Tuple[bool, Dict, List[str]]


# -- argument parsing helpers ------------------------------------------------------------

def load_spec(text: str) -> Semigroup:
    """--spec takes a JSON file path or an inline JSON object"""
    try:
        if text.lstrip().startswith('{'):
            data = json.loads(text)
        else:
            with open(text, encoding='utf-8') as f:
                data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise InvalidParameter(f"cannot read semigroup spec {text!r}: {e}")
    return construct(SemigroupSpec.from_dict(data))


def parse_wire_list(S: Semigroup, text: str) -> List:
    """Comma-separated element wire forms, e.g. `1,2,3` or `[1,2],[2,1]`"""
    try:
        wires = json.loads('[' + text + ']')
    except json.JSONDecodeError as e:
        raise InvalidParameter(f"cannot parse element list {text!r}: {e}")
    return [S.from_wire(w) for w in wires]


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise InvalidParameter(f"expected comma-separated integers, got {text!r}")


def parse_index_sets(text: str) -> Tuple[IndexSet, ...]:
    """`1;2,3;4` -> {1}, {2,3}, {4}"""
    return tuple(IndexSet(tuple(parse_int_list(block))) for block in text.split(';') if block.strip())


def periodic_stream(S: Semigroup, horizon: int) -> SequencePrefix:
    """a_n = element of rank n mod |S|, for n = 1..horizon"""
    return SequencePrefix(S, tuple(S.element_at(n % S.size) for n in range(1, horizon + 1)))


def resolve_stream(S: Semigroup, args, default_horizon: int) -> SequencePrefix:
    """--prefix when given, otherwise the first H stream elements.

    Finite carriers smaller than the horizon repeat periodically.
    """
    if args.prefix:
        elements = tuple(parse_wire_list(S, args.prefix))
        prefix = SequencePrefix(S, elements)
        return SequencePrefix(S, elements, bijective=is_bijective_prefix(prefix))
    horizon = args.horizon or default_horizon
    if horizon < 1:
        raise InvalidParameter(f"horizon must be >= 1, got {horizon}")
    if S.size is not None and S.size < horizon:
        return periodic_stream(S, horizon)
    return SequencePrefix.from_stream(S, horizon)


def _body(S: Semigroup, kind: str, inputs: Dict, result, positive: bool) -> Dict:
    return {
        'kind': kind,
        'semigroup': S.spec.to_dict() if S is not None else None,
        'input': inputs,
        'result': result,
        'positive': positive,
    }


def _wire(S: Semigroup, elements) -> str:
    return ', '.join(json.dumps(S.to_wire(x)) for x in elements)


# -- verbs ----------------------------------------------------------------------------

class FsrCommands:
    """One method per verb; each returns (positive, body, summary lines)"""

    def __init__(self, args):
        self.args = args
        self.S: Optional[Semigroup] = None
        if getattr(args, 'spec', None):
            self.S = load_spec(args.spec)

    def semigroup(self) -> Semigroup:
        if self.S is None:
            raise InvalidParameter(f"{self.args.verb} needs --spec")
        return self.S

    def fs(self) -> Outcome:
        S = self.semigroup()
        prefix = resolve_stream(S, self.args, PREFIX_HORIZON)
        sums = (fs_ge2 if self.args.verb == 'fs2' else fs_set)(prefix)
        kind = self.args.verb
        body = _body(S, kind, {'prefix': prefix.to_wire()}, sums.to_json(), True)
        return True, body, [f"|{kind.upper()}| = {len(sums)} over a prefix of length {len(prefix)}"]

    def prefix_check(self, kind: str, check) -> Outcome:
        S = self.semigroup()
        prefix = resolve_stream(S, self.args, PREFIX_HORIZON)
        result = check(prefix)
        body = _body(S, kind, {'prefix': prefix.to_wire()}, result.to_json(S), result.holds)
        if result.holds:
            return True, body, [f"{kind} holds on a prefix of length {len(prefix)}"]
        F, G = result.violation
        return False, body, [f"{kind} fails: a_{F} = {_wire(S, [sum_over(prefix, F)])}, "
                             f"a_{G} = {_wire(S, [sum_over(prefix, G)])}"]

    def proper(self) -> Outcome:
        return self.prefix_check('proper', is_proper_prefix)

    def disjoint_proper(self) -> Outcome:
        return self.prefix_check('disjoint_proper', disjoint_proper_check)

    def tails(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        stream = resolve_stream(S, args, Config.DEFAULT_HORIZON)
        inputs = {}
        prefix = stream
        if args.sumsequence:
            sumsequence = SumsequencePrefix(stream, parse_index_sets(args.sumsequence))
            prefix = sumsequence.as_prefix()
            inputs['sumsequence'] = [F.to_wire() for F in sumsequence.index_sets]
        schedule = parse_int_list(args.schedule) if args.schedule else None
        stability = args.stability or Config.STABILITY_WINDOW
        report = tail_intersection(prefix, schedule, stability)
        inputs.update({'prefix': prefix.to_wire(), 'schedule': report.schedule, 'stability': stability})
        body = _body(S, 'tails', inputs, report.to_json(), report.status != 'unstable')

        lines = [f"H={H}: {len(snap)} elements" for H, snap in zip(report.schedule, report.snapshots)]
        if report.stable:
            lines.append(f"stable: {{{_wire(S, sorted(report.value, key=S.rank))}}}")
        else:
            lines.append(report.status)
        return report.status != 'unstable', body, lines

    def construct(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        method = args.method
        if method == 'length-determined':
            return self.prefix_check('length_determined', length_determined_check)
        if method == 'right-ideals':
            carrier = parse_wire_list(S, args.carrier) if args.carrier else None
            if carrier is None:
                if S.size is None:
                    raise InvalidParameter("right-ideals on an infinite carrier needs --carrier")
                carrier = S.enumerate(S.size)
            result = right_ideal_scan(S, carrier)
            inputs = {'method': method, 'carrier': [S.to_wire(x) for x in carrier]}
        else:
            default = DICHOTOMY_HORIZON if method in ('dichotomy', 'split') else Config.DEFAULT_HORIZON
            stream = resolve_stream(S, args, default)
            inputs = {'method': method, 'stream': stream.to_wire()}
            if method == 'group-proper':
                result = group_proper_subsequence(S, stream, args.length)
                inputs['length'] = args.length
            elif method == 'tail-proper':
                schedule = parse_int_list(args.schedule) if args.schedule else None
                result = tail_to_proper(S, stream, args.length, schedule, args.lookahead)
                inputs.update({'length': args.length, 'schedule': schedule, 'lookahead': args.lookahead})
            elif method == 'dichotomy':
                result = sumsequence_dichotomy(S, stream, args.length, args.budget, args.max_block)
                inputs.update({'length': args.length, 'max_block': args.max_block})
            elif method == 'split':
                result = split_into_disjoint_ip(S, stream, args.parts)
                inputs['parts'] = args.parts
            else:
                schedule = parse_int_list(args.schedule) if args.schedule else None
                result = minimality_probe(S, stream, args.trials, args.budget, args.seed, schedule)
                inputs.update({'trials': args.trials, 'schedule': schedule})

        positive = result.verified and (result.kind != 'probe_report' or result.payload['improved'])
        body = _body(S, 'construction', inputs, result.to_json(S), positive)
        return positive, body, [f"{method}: {result.kind} after {result.budget_used} steps"]

    def detect(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        pattern = args.pattern
        if pattern == 'fs2':
            stream = resolve_stream(S, args, Config.DEFAULT_HORIZON)
            cert = fs2_certificate(S, stream)
            body = _body(S, 'fs2_certificate', {'stream': stream.to_wire()},
                         cert.to_json() if cert else None, cert is not None)
            if cert is None:
                return False, body, ["no stable FS>=2 set at this horizon"]
            return True, body, [f"FS>=2 of {cert.block_size}-blocks stable from length {cert.stable_upto}"]

        if pattern == 'type_a':
            witness = detect_type_a(S, args.family_size, args.cap, args.horizon, args.budget, args.seed)
        elif pattern == 'type_b':
            witness = detect_type_b(S, args.leaves, args.horizon, args.budget, args.workers)
        else:
            witness = detect_type_c(S, args.generators, args.multiple_bound, args.horizon, args.budget,
                                    args.exhaustive, args.workers)
        inputs = {'pattern': pattern, 'horizon': args.horizon or Config.DEFAULT_HORIZON}
        body = _body(S, 'forbidden', inputs, witness.to_json(S) if witness else None, witness is not None)
        if witness is None:
            return False, body, [f"no {pattern} witness at this horizon"]
        named = ', '.join(f"{name}={json.dumps(S.to_wire(x))}" for name, x in witness.elements.items())
        return True, body, [f"{pattern} witness ({witness.exactness}): {named}"]

    def classify(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        report = classify(S, args.horizon, args.budget, args.family_size, args.cap, args.leaves,
                          args.generators, args.multiple_bound, args.seed, args.workers)
        positive = report.verdict == 'OBSTRUCTION_FOUND'
        body = _body(S, 'classify', {'horizon': report.horizon}, report.to_json(S), positive)
        lines = [f"verdict: {report.verdict}"]
        lines += [f"{pattern}: {witness.exactness}" for pattern, witness in report.witnesses.items()]
        if report.fs2:
            lines.append(f"FS>=2 stable from length {report.fs2.stable_upto} (evidence only)")
        return positive, body, lines

    def hindman(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        base = resolve_stream(S, args, Config.DEFAULT_HORIZON)
        coloring = parse_coloring(args.coloring, S)
        if args.within:
            witness = find_mono_fs_within(S, base, coloring, args.k, args.budget, args.max_block, args.workers)
        else:
            witness = find_mono_fs(S, base, coloring, args.k, args.budget, workers=args.workers)
        inputs = {'base': base.to_wire(), 'coloring': coloring.to_json(S), 'k': args.k, 'within': args.within}
        body = _body(S, 'hindman', inputs, witness.to_json() if witness else None, witness is not None)
        if witness is None:
            return False, body, [f"no monochromatic FS of {args.k} terms among {len(base)} elements"]
        return True, body, [f"color {witness.color}: b = ({_wire(S, witness.terms)})"]

    def threshold(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        result = exhaustive_threshold(S, args.k, args.r, args.max_n, args.budget, args.workers)
        body = _body(S, 'threshold', {'k': args.k, 'r': args.r, 'max_n': args.max_n},
                     result.to_json(S), result.status == 'reached')
        if result.status == 'reached':
            return True, body, [f"threshold for k={args.k}, r={args.r}: {result.threshold}"]
        return False, body, [f"threshold {result.status} within {args.max_n} elements"]

    def disjoint_families(self) -> Outcome:
        S = self.semigroup()
        args = self.args
        coloring = parse_coloring(args.coloring, S)
        horizon = args.horizon or Config.DEFAULT_HORIZON
        report = find_disjoint_mono_families(S, coloring, args.m, args.k, horizon, args.budget, args.workers)
        inputs = {'universe': [S.to_wire(x) for x in S.enumerate(horizon)],
                  'coloring': coloring.to_json(S), 'm': args.m, 'k': args.k}
        body = _body(S, 'disjoint_families', inputs, report.to_json(S), report.complete)
        return report.complete, body, list(report.trace)

    def enumerate_oracle(self) -> Outcome:
        order = self.args.order
        tables = [[v for row in table for v in row] for table in enumerate_finite_semigroups(order)]
        result = {'order': order, 'count': len(tables)}
        if self.args.tables:
            result['tables'] = tables
        body = _body(None, 'census', {'order': order}, result, True)
        return True, body, [f"{len(tables)} labeled semigroups of order {order}"]


# -- parser -----------------------------------------------------------------------------

VERBS = {
    'fs': FsrCommands.fs,
    'fs2': FsrCommands.fs,
    'proper': FsrCommands.proper,
    'disjoint-proper': FsrCommands.disjoint_proper,
    'tails': FsrCommands.tails,
    'construct': FsrCommands.construct,
    'detect': FsrCommands.detect,
    'classify': FsrCommands.classify,
    'hindman': FsrCommands.hindman,
    'threshold': FsrCommands.threshold,
    'disjoint-families': FsrCommands.disjoint_families,
    'enumerate-oracle': FsrCommands.enumerate_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--spec', help='semigroup spec: JSON file or inline object')
    common.add_argument('--prefix', help='comma-separated element wire forms')
    common.add_argument('--horizon', type=int)
    common.add_argument('--budget', type=int)
    common.add_argument('--seed', type=int, default=Config.SEED)
    common.add_argument('--workers', type=int, default=Config.WORKERS)
    common.add_argument('-o', '--output', help='write the witness file here')
    common.add_argument('--json', action='store_true', help='print the witness file on stdout')

    pattern_flags = argparse.ArgumentParser(add_help=False)
    pattern_flags.add_argument('--family-size', type=int, default=20)
    pattern_flags.add_argument('--cap', type=int, default=9)
    pattern_flags.add_argument('--leaves', type=int, default=3)
    pattern_flags.add_argument('--generators', type=int, default=3)
    pattern_flags.add_argument('--multiple-bound', type=int, default=5)

    parser = argparse.ArgumentParser(prog='fsr', description='Finite-sums and proper IP set experiments')
    parser.add_argument('--version', action='version', version=f"fsr {Config.VERSION}")
    verbs = parser.add_subparsers(dest='verb', required=True)

    for verb in ('fs', 'fs2', 'proper', 'disjoint-proper', 'classify', 'enumerate-oracle'):
        parents = [common, pattern_flags] if verb == 'classify' else [common]
        sub = verbs.add_parser(verb, parents=parents)
        if verb == 'enumerate-oracle':
            sub.add_argument('--order', type=int, required=True)
            sub.add_argument('--tables', action='store_true', help='include every table in the result')

    tails = verbs.add_parser('tails', parents=[common])
    tails.add_argument('--schedule', help='increasing horizons, e.g. 8,16,24')
    tails.add_argument('--sumsequence', help='index sets over the stream, e.g. "1;2,3;4"')
    tails.add_argument('--stability', type=int)

    construct_verb = verbs.add_parser('construct', parents=[common])
    construct_verb.add_argument('--method', required=True,
                                choices=['group-proper', 'tail-proper', 'dichotomy', 'split',
                                         'minimality', 'right-ideals', 'length-determined'])
    construct_verb.add_argument('--length', type=int, default=12)
    construct_verb.add_argument('--max-block', type=int)
    construct_verb.add_argument('--parts', type=int, default=2)
    construct_verb.add_argument('--trials', type=int, default=16)
    construct_verb.add_argument('--lookahead', type=int, default=12)
    construct_verb.add_argument('--schedule')
    construct_verb.add_argument('--carrier', help='finite subsemigroup as element wire forms')

    detect = verbs.add_parser('detect', parents=[common, pattern_flags])
    detect.add_argument('--pattern', required=True, choices=['type_a', 'type_b', 'type_c', 'fs2'])
    detect.add_argument('--exhaustive', action='store_true', help='check every multiple up to the bound')

    hindman = verbs.add_parser('hindman', parents=[common])
    hindman.add_argument('--coloring', default='mod:2')
    hindman.add_argument('--k', type=int, default=2)
    hindman.add_argument('--within', action='store_true', help='search sumsequences of the stream')
    hindman.add_argument('--max-block', type=int)

    threshold = verbs.add_parser('threshold', parents=[common])
    threshold.add_argument('--k', type=int, default=2)
    threshold.add_argument('--r', type=int, default=2)
    threshold.add_argument('--max-n', type=int, default=12)

    families = verbs.add_parser('disjoint-families', parents=[common])
    families.add_argument('--coloring', default='mod:2')
    families.add_argument('--m', type=int, default=2)
    families.add_argument('--k', type=int, default=2)

    verify = verbs.add_parser('verify')
    verify.add_argument('path')
    return parser


def run_verify(path: str) -> int:
    witness = WitnessFile.load(path)
    failures = verify_witness_file(witness)
    if failures:
        print(f"\n❌ {path}: {len(failures)} claim(s) failed")
        for failure in failures:
            print(f"  ❌ {failure}")
        return EXIT_NEGATIVE
    print(f"\n✅ {path}: {witness.body['kind']} witness verified")
    return EXIT_POSITIVE


def parse_and_dispatch(argv: List[str]) -> int:
    """Run one fsr command; returns the process exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_POSITIVE if e.code == 0 else EXIT_USAGE

    try:
        if args.verb == 'verify':
            return run_verify(args.path)

        commands = FsrCommands(args)
        positive, body, lines = VERBS[args.verb](commands)
        options = {k: v for k, v in sorted(vars(args).items()) if k not in ('verb', 'json')}
        witness = make_witness_file(args.verb, options, args.seed, body)
        if args.output:
            witness.write(args.output)
    except FsrError as e:
        logger.debug(f"{e.code}: {e.detail!r}")
        print(f"error[{e.code}]: {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.json:
        sys.stdout.write(witness.dumps())
    else:
        print(f"\n{'✅' if positive else '❌'} fsr {args.verb}")
        print("=" * 50)
        for line in lines:
            print(f"  {line}")
    return EXIT_POSITIVE if positive else EXIT_NEGATIVE
