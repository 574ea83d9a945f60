#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "posterior" and "predictive" commands"""

import argparse
import logging

from jot_sdk import cli
from jot_sdk.errors import ExitCode

logger = logging.getLogger(__name__)


def observations(doc):
    """ObservationSummary of the document's observed rows"""
    from pydantic import ValidationError

    from jot_sdk.cli import schema
    from jot_sdk.featmat import FeatureMatrix
    from jot_sdk.posterior import ObservationSummary

    spec = doc.observations
    try:
        if spec.rows is not None:
            return ObservationSummary.from_matrix(FeatureMatrix.from_rows(spec.rows))
        return ObservationSummary(n=spec.n, counts=spec.counts)
    except ValidationError as ex:
        raise schema.from_validation(ex, "/observations") from ex


def _posterior(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import posterior, util
    from jot_sdk.cli import schema

    schema.require(doc, "posterior", "model", "observations")
    lv = schema.build_levy(doc.model)
    pstar = schema.build_scaling(doc.pstar)
    trunc = schema.build_truncation(doc.truncation)
    obs = observations(doc)

    grid = posterior.delta_posterior(lv, pstar, obs)
    a_mean = grid.mean()
    logger.info("Δ° posterior mean: %.6g (n=%s, K_n=%s)", a_mean, obs.n, obs.K_n)

    def draw(stream):
        a = grid.sample(stream)
        unobserved = posterior.sample_posterior_jumps(
            lv, a, obs.n, trunc, stream, route=doc.route
        )
        observed = [
            posterior.sample_observed_jump(lv, a, obs.n, nk, stream) for nk in obs.counts
        ]
        return {"a": a, "observed": observed, "unobserved": unobserved.to_json()}

    samples = util.run_replicates(
        draw, cli.streams(doc.seed, doc.replicates), cli.jobs(arguments)
    )

    output.write_json(
        "posterior.json",
        {
            "observations": obs.dict(),
            "delta": {**grid.to_json(), "mean": a_mean},
            "c_a": {
                "a": a_mean,
                "variant": doc.variant,
                "values": {
                    str(nk): posterior.c_a(lv, a_mean, obs.n, nk, doc.variant)
                    for nk in sorted(set(obs.counts))
                },
            },
            "psi_n": posterior.psi_n(lv, a_mean, obs.n),
            "samples": samples,
        },
    )
    return ExitCode.OK


def _predictive(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import posterior, util
    from jot_sdk.cli import schema
    from jot_sdk.cli.sample import write_matrices

    schema.require(doc, "predictive", "model", "n")
    lv = schema.build_levy(doc.model)
    pstar = schema.build_scaling(doc.pstar)

    # Δ° posteriors are deterministic given (rows, sorted counts): share them
    cache: dict = {}

    matrices = util.run_replicates(
        lambda stream: posterior.sample_predictive_matrix(lv, pstar, doc.n, stream, cache),
        cli.streams(doc.seed, doc.replicates),
        cli.jobs(arguments),
    )
    write_matrices(output, doc, matrices)
    return ExitCode.OK


def execute_posterior(arguments):
    """Posterior of Δ° and the jumps given observed rows"""
    return cli.run("posterior", arguments, _posterior)


def execute_predictive(arguments):
    """Feature matrices row by row from the predictive law"""
    return cli.run("predictive", arguments, _predictive)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    posterior_parser = subparsers.add_parser(
        "posterior",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Posterior of the scaling variable and the jumps.",
        description="Tabulate the Δ° posterior given observed rows, draw observed "
        "and unobserved jumps, write posterior.json.",
    )
    cli.add_run_options(posterior_parser)
    posterior_parser.set_defaults(command=execute_posterior)

    predictive_parser = subparsers.add_parser(
        "predictive",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Sample matrices sequentially from the predictive law.",
        description="Generate rows one at a time, Δ° drawn from its posterior "
        "given the rows so far; write matrix.csv and stats.json.",
    )
    cli.add_run_options(predictive_parser)
    predictive_parser.set_defaults(command=execute_predictive)
