#!/usr/bin/env python3

# builds report records from result objects and writes them as CSV or JSON lines

from dataclasses import asdict
from typing import Iterable, List, Sequence, TextIO, Tuple

import csv
import json

from moment_functions import constants
from moment_functions.characters import DirichletCharacter, gauss_sum
from moment_functions.lvalues import CentralValueRecord
from moment_adapter.identity_lab import VerificationReport
from moment_adapter.moments import MomentReport


def moment_record(report: MomentReport, timing: bool = False) -> dict:
    """
    Generates moment table record from moment report.
    :param report: moment report of one modulus
    :param timing: include runtime, left empty otherwise so that repeated
        runs give identical output
    :return: record keyed by MOMENT_CSV_HEADER
    """
    values = (
        report.q, report.q1, report.q2,
        report.family_sum.real, report.family_sum.imag,
        report.main_term,
        report.ratio.real, report.ratio.imag,
        report.s1.real, report.s1.imag,
        report.s2.real, report.s2.imag,
        report.num_characters,
        report.runtime_ms if timing else ''
    )
    return dict(zip(constants.MOMENT_CSV_HEADER, values))


def lvalue_record(record: CentralValueRecord) -> dict:
    values = (
        record.chi_id,
        record.product_afe.real, record.product_afe.imag,
        record.l_chi.real, record.l_chi.imag,
        record.l_twist.real, record.l_twist.imag,
        record.truncation_n,
        record.tail_estimate
    )
    return dict(zip(constants.LVALUE_CSV_HEADER, values))


def character_record(chi: DirichletCharacter) -> dict:
    values = (
        chi.chi_id,
        ' '.join(str(j) for j in chi.exponents),
        chi.parity,
        chi.conductor,
        int(chi.primitive),
        abs(gauss_sum(chi))
    )
    return dict(zip(constants.CHARACTER_CSV_HEADER, values))


def scan_records(hits: Iterable[Tuple[int, float]]) -> List[dict]:
    return [dict(zip(constants.SCAN_CSV_HEADER, hit)) for hit in hits]


def verification_record(report: VerificationReport) -> dict:
    return asdict(report)


def write_records(
    records: Sequence[dict],
    header: Sequence[str],
    output_format: str,
    stream: TextIO
):
    """
    Writes records to stream.
    :param records: records with the keys of header
    :param header: column order
    :param output_format: 'csv' (header line + one line per record) or
        'json' (one JSON object per line)
    :param stream: text stream to write to
    :raise ValueError on unknown format
    """
    if output_format == constants.FORMAT_CSV:
        writer = csv.DictWriter(stream, fieldnames=list(header), lineterminator='\n')
        writer.writeheader()
        for record in records:
            writer.writerow(record)
    elif output_format == constants.FORMAT_JSON:
        for record in records:
            stream.write(json.dumps({key: record[key] for key in header}) + '\n')
    else:
        raise ValueError('Bad output format: {}'.format(output_format))
