#
# jot-sdk
#
# This file is distributed under the terms of the MIT license.
# For details see the file LICENSE in the top directory.
#

"""CLI: "bridge" command"""

#
# Three modes, selected by the run document:
#
#   default             partitions of JOT(λ, P°) conditioned on mass <= threshold
#   coupled: true       one scale-invariant measure driving a CRP(θ) partition
#                       and an IBP(θ) matrix
#   surrogate_power: p  block-count law under the surrogate h(s) = s^p,
#                       reweighted from largest-jump bridge records
#

import argparse
import logging
from collections import Counter

from jot_sdk import cli
from jot_sdk.errors import ConfigError, ExitCode

logger = logging.getLogger(__name__)


def _block_count_law(partitions):
    counts = Counter(len(p.blocks) for p in partitions)
    total = sum(counts.values())
    return {str(k): v / total for k, v in sorted(counts.items())}


def _bridge(doc, output: cli.Output, arguments) -> ExitCode:
    from jot_sdk import featmat, pkbridge, util
    from jot_sdk.cli import schema
    from jot_sdk.cli.sample import write_matrices

    schema.require(doc, "bridge", "model", "n")
    lv = schema.build_levy(doc.model)
    trunc = schema.build_truncation(doc.truncation)
    streams = cli.streams(doc.seed, doc.replicates)
    payload = {"mode": "partition", "threshold": doc.threshold}

    if doc.coupled:
        if lv.family != "scale_invariant":
            raise ConfigError("/coupled", "coupling needs the scale_invariant family")
        pairs = util.run_replicates(
            lambda stream: pkbridge.coupled_crp_ibp(
                lv.params["theta"], doc.n, stream, doc.max_tries
            ),
            streams,
            cli.jobs(arguments),
        )
        partitions = [partition for partition, _ in pairs]
        write_matrices(output, doc, [z for _, z in pairs])
        payload.update(
            mode="coupled",
            feature_counts=[featmat.stats(z).K_n for _, z in pairs],
        )

    elif doc.surrogate_power is not None:
        records = pkbridge.bridge_records(
            lv,
            doc.n,
            doc.replicates,
            streams[0],
            threshold=doc.threshold,
            max_tries=doc.max_tries,
            trunc=trunc,
        )
        power = doc.surrogate_power
        result = pkbridge.surrogate_reweight(
            lv,
            lambda s: s ** power,
            [(r.a, r.t, len(r.partition.blocks)) for r in records],
        )
        partitions = [r.partition for r in records]
        payload.update(mode="surrogate", surrogate_power=power, reweighted=result.dict())

    else:
        pstar = schema.build_scaling(doc.pstar)
        partitions = util.run_replicates(
            lambda stream: pkbridge.bridge_partition(
                lv, pstar, doc.n, doc.threshold, stream, doc.max_tries, trunc
            ),
            streams,
            cli.jobs(arguments),
        )

    output.write_json(
        "partition.json",
        {
            **payload,
            "replicates": len(partitions),
            "block_counts": _block_count_law(partitions),
            "partitions": [p.to_json() for p in partitions],
        },
    )
    return ExitCode.OK


def execute(arguments):
    """Poisson-Kingman bridge partitions"""
    return cli.run("bridge", arguments, _bridge)


def add_subparser(subparsers):
    """
    Command arguments parser

    :param subparsers:
    :return:
    """

    bridge_parser = subparsers.add_parser(
        "bridge",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
        help="Sample partitions of mass-conditioned measures.",
        description="Condition JOT measures on their total mass, normalize and "
        "paint partitions; write partition.json.",
    )
    cli.add_run_options(bridge_parser)
    bridge_parser.set_defaults(command=execute)
