from __future__ import annotations

import logging

import click

from livecastlab import settings
from livecastlab.commands.bench import bench
from livecastlab.commands.fit_predictor import fit_predictor
from livecastlab.commands.gen import gen_net, gen_video
from livecastlab.commands.label import label
from livecastlab.commands.run import run
from livecastlab.exceptions import LabError


class LabGroup(click.Group):
    """Reports `LabError`s as one line on stderr and exits with their exit code."""

    def invoke(self, ctx: click.Context):
        try:
            return super().invoke(ctx)
        except LabError as e:
            click.secho(f'Error: {e}', err=True, fg='red')
            ctx.exit(e.exit_code)


@click.group(cls=LabGroup)
@click.version_option(package_name='livecastlab')
def cli():
    logging.basicConfig(
        level=settings.LOG_LEVEL, format='%(asctime)s %(levelname)s %(name)s: %(message)s'
    )


for command in (gen_net, gen_video, label, fit_predictor, run, bench):
    cli.add_command(command)
