#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "sample-measure" and "sample-matrix" commands"""

import argparse
import logging
from typing import List, Sequence

from jot_sdk import cli
from jot_sdk.errors import ExitCode

logger = logging.getLogger(__name__)


def replicate_name(stem: str, suffix: str, index: int, count: int) -> str:
    """`stem.suffix` for single runs, `stem_0001.suffix` otherwise"""
    return f"{stem}.{suffix}" if count == 1 else f"{stem}_{index:04d}.{suffix}"


def write_matrices(output: cli.Output, doc, matrices: Sequence) -> None:
    """
    Matrices as 0/1 CSV (or one JSON file), their statistics to stats.json

    :param output:
    :param doc:         run document
    :param matrices:    feature matrices in replicate order
    :return:
    """
    from jot_sdk import featmat

    if doc.output.format == "json":
        output.write_json(
            "matrix.json",
            {
                "matrices": [
                    {
                        "n_rows": z.n_rows,
                        "column_ids": [col_id for col_id, _ in z.columns],
                        "dense": z.to_dense().tolist(),
                    }
                    for z in matrices
                ]
            },
        )
    else:
        for i, z in enumerate(matrices):
            output.write_csv(replicate_name("matrix", "csv", i, len(matrices)), z.to_csv)

    output.write_json(
        "stats.json",
        {
            "replicates": len(matrices),
            "stats": [featmat.stats(z).to_json() for z in matrices],
        },
    )


def _measure_sampler(doc):
    """Draw function (stream -> UnitaryMeasure) for the document's model"""
    from jot_sdk import measures
    from jot_sdk.cli import schema

    lv = schema.build_levy(doc.model)
    trunc = schema.build_truncation(doc.truncation)

    if doc.zeta is not None:
        return lambda stream: measures.sample_scaled_levy(lv, doc.zeta, trunc, stream)

    pstar = schema.build_scaling(doc.pstar)
    return lambda stream: measures.sample_jot(lv, pstar, trunc, stream)


def _sample_measure(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import measures, util
    from jot_sdk.cli import schema

    schema.require(doc, "sample-measure", "model")
    draw = _measure_sampler(doc)

    results = util.run_replicates(
        draw, cli.streams(doc.seed, doc.replicates), cli.jobs(arguments)
    )
    output.write_json(
        "measure.json",
        {
            "replicates": doc.replicates,
            "measures": [m.to_json() for m in results],
            "total_mass": [measures.total_mass(m)._asdict() for m in results],
        },
    )
    return ExitCode.OK


def _sample_matrix(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import featmat, urns, util
    from jot_sdk.cli import schema
    from jot_sdk.featmat import FeatureMatrix

    schema.require(doc, "sample-matrix", "model", "n")

    if doc.model.family in schema.URN_KINDS:
        model = schema.build_urn(doc.model, doc.pstar)

        def draw(stream):
            _, rows = urns.run_urn(model, doc.n, stream, track_features=True)
            return FeatureMatrix.from_rows([row.features for row in rows])

    else:
        measure = _measure_sampler(doc)

        def draw(stream):
            return featmat.sample_bernoulli_matrix(measure(stream), doc.n, stream)

    matrices: List[FeatureMatrix] = util.run_replicates(
        draw, cli.streams(doc.seed, doc.replicates), cli.jobs(arguments)
    )
    write_matrices(output, doc, matrices)
    return ExitCode.OK


def execute_measure(arguments):
    """Sample unitary measures"""
    return cli.run("sample-measure", arguments, _sample_measure)


def execute_matrix(arguments):
    """Sample feature matrices"""
    return cli.run("sample-matrix", arguments, _sample_matrix)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    measure_parser = subparsers.add_parser(
        "sample-measure",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Sample JOT measures (or scaled subordinators).",
        description="Draw unitary measures of a Lévy family and write measure.json.",
    )
    cli.add_run_options(measure_parser)
    measure_parser.set_defaults(command=execute_measure)

    matrix_parser = subparsers.add_parser(
        "sample-matrix",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Sample feature matrices.",
        description="Draw feature matrices from an urn scheme or a Lévy family "
        "and write matrix.csv and stats.json.",
    )
    cli.add_run_options(matrix_parser)
    matrix_parser.set_defaults(command=execute_matrix)
