import click
from flask.cli import FlaskGroup, ScriptInfo

from fieldgraph import create_app


def _set_cache(ctx, param, value):
    """--cache DIR: build the app with that cache directory"""
    if value:
        ctx.ensure_object(ScriptInfo).create_app = lambda: create_app(CACHE_DIR=value)
    return value


@click.group(cls=FlaskGroup, create_app=create_app, add_default_commands=False)
@click.option('--cache', metavar='DIR', expose_value=False, is_eager=True, callback=_set_cache,
              help='Census cache directory (overrides FIELDGRAPH_CACHE).')
def cli():
    """Finite field graphs: census, reports, drawings and spectra."""


if __name__ == '__main__':
    # Run the command-line interface
    cli()
