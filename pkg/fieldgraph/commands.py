"""Command-line interface, registered on the Flask app's CLI group"""
import functools
import sys

import click
from flask import current_app
from flask.cli import with_appcontext
from werkzeug.datastructures import MultiDict

from config import Config
from fieldgraph import create_app
from fieldgraph import census as census_mod
from fieldgraph import spectral
from fieldgraph.database import cache
from fieldgraph.errors import (CacheVerificationError, FieldGraphError,
                               LimitExceededError)
from fieldgraph.export import to_dot
from fieldgraph.forms import (CensusForm, DotForm, ExpanderForm, ModelForm,
                              VerifyForm)
from fieldgraph.graph_algo import components
from fieldgraph.graph_build import build_cover, build_graph, to_undirected
from fieldgraph.models import db

VALIDATION_EXIT = 2


def handle_errors(command):
    """Report FieldGraphError on stderr and exit with its code"""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except FieldGraphError as exc:
            current_app.logger.error('%s failed: %s', command.__name__, exc)
            click.echo(f'Error: {exc}', err=True)
            sys.exit(exc.exit_code)

    return wrapper


def validated(form_class, **params):
    """Bind parameters to a form; exit 2 with the messages when invalid"""
    data = MultiDict()
    for name, value in params.items():
        if value is None or value is False:
            continue
        data[name] = 'y' if value is True else str(value)
    form = form_class(data)
    if not form.validate():
        for name, messages in form.errors.items():
            for message in messages:
                click.echo(f'Error: {name}: {message}', err=True)
        sys.exit(VALIDATION_EXIT)
    return form


def _emit(text, out):
    if out:
        with open(out, 'w', encoding='utf-8') as handle:
            handle.write(text)
        current_app.logger.info('wrote %s', out)
    else:
        click.echo(text, nl=not text.endswith('\n'))


@click.command('census')
@click.option('--p', 'p', type=int)
@click.option('--k', 'k', type=int)
@click.option('--mode', default=None, help='default, strict or simple')
@click.option('--variant', default='full', help='full, additive or multiplicative')
@click.option('--format', 'fmt', default='csv', help='csv or md')
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@click.option('--limit', type=int, default=None, help='largest p^k accepted')
@click.option('--workers', type=int, default=None)
@click.option('--verify-cache', is_flag=True, help='recompute cached entries and compare')
@click.option('--no-cache', is_flag=True, help='neither read nor write the cache')
@click.option('--cache', 'cache_dir', default=None, type=click.Path(file_okay=False),
              help='cache directory for this census only')
@with_appcontext
@handle_errors
def census_command(p, k, mode, variant, fmt, out, limit, workers, verify_cache, no_cache, cache_dir):
    """Classify every model of (p, k) up to graph isomorphism."""
    if cache_dir is None:
        return _census(p, k, mode, variant, fmt, out, limit, workers, verify_cache, no_cache)
    settings = {name: current_app.config[name] for name in dir(Config) if name.isupper()}
    settings.update(CACHE_DIR=cache_dir, SQLALCHEMY_DATABASE_URI=None, TESTING=current_app.testing)
    other = create_app(Config, **settings)
    current_app.logger.info('census cache at %s', other.config['SQLALCHEMY_DATABASE_URI'])
    with other.app_context():
        try:
            return _census(p, k, mode, variant, fmt, out, limit, workers, verify_cache, no_cache)
        finally:
            db.session.remove()
            db.engine.dispose()


def _census(p, k, mode, variant, fmt, out, limit, workers, verify_cache, no_cache):
    config = current_app.config
    form = validated(CensusForm, p=p, k=k, mode=mode or config['CANONICAL_MODE'], variant=variant,
                     format=fmt, limit=limit, workers=workers, verify_cache=verify_cache)
    limit = form.limit.data or config['CENSUS_LIMIT']
    if p ** k > limit:
        raise LimitExceededError(f'p^k = {p ** k} exceeds the census limit {limit}; raise it with --limit')
    rows = census_mod.classify(p, k, form.mode.data, limit=limit,
                               cache=None if no_cache else cache,
                               workers=form.workers.data or config['CENSUS_WORKERS'],
                               variant=form.variant.data)
    for finding in census_mod.census_findings(rows):
        click.echo(f'Finding: {finding}', err=True)
    if verify_cache and not no_cache:
        bad = cache.verify(p, k)
        if bad:
            raise CacheVerificationError(f'{len(bad)} cache entries disagree: {", ".join(bad)}', bad)
        click.echo('cache verified', err=True)
    text = census_mod.render_csv(rows) if form.format.data == 'csv' else census_mod.render_markdown(rows)
    _emit(text, out)


@click.command('report')
@click.option('--p', 'p', type=int)
@click.option('--f', 'f')
@click.option('--json', 'as_json', is_flag=True)
@with_appcontext
@handle_errors
def report_command(p, f, as_json):
    """Everything known about one model."""
    form = validated(ModelForm, p=p, f=f)
    config = current_app.config
    result = census_mod.report(form.p.data, form.model.f, mode=config['CANONICAL_MODE'],
                               cover_limit=config['COVER_LIMIT'], spectral_limit=config['SPECTRAL_LIMIT'])
    click.echo(result.to_json() if as_json else result.to_text())


@click.command('dot')
@click.option('--p', 'p', type=int)
@click.option('--f', 'f')
@click.option('--variant', default='full')
@click.option('--out', default=None, type=click.Path(dir_okay=False))
@with_appcontext
@handle_errors
def dot_command(p, f, variant, out):
    """DOT drawing of a graph variant."""
    form = validated(DotForm, p=p, f=f, variant=variant)
    _emit(to_dot(build_graph(form.model, form.variant.data)), out)


@click.command('spectrum')
@click.option('--p', 'p', type=int)
@click.option('--f', 'f')
@click.option('--variant', default='full')
@click.option('--csv', 'csv_out', default=None, type=click.Path(dir_okay=False))
@with_appcontext
@handle_errors
def spectrum_command(p, f, variant, csv_out):
    """Laplacian spectrum as CSV."""
    form = validated(DotForm, p=p, f=f, variant=variant)
    config = current_app.config
    g = build_graph(form.model, form.variant.data)
    if g.n > config['SPECTRAL_LIMIT']:
        raise LimitExceededError(f'{g.n} vertices exceed the spectral limit {config["SPECTRAL_LIMIT"]}')
    _emit(spectral.spectrum_csv(spectral.spectrum(g, config['EIGEN_TOL'])), csv_out)


@click.command('expander')
@click.option('--primes', default='3,7,11,19,23')
@with_appcontext
@handle_errors
def expander_command(primes):
    """lambda_1 of X_{x^2+1} against 8 sin^2(pi/p)."""
    form = validated(ExpanderForm, primes=primes)
    result = spectral.expander_report(form.values, current_app.config['EIGEN_TOL'])
    click.echo('p,lambda1,explicit')
    for row in result.rows:
        click.echo(f'{row.p},{row.lambda1:.12g},{row.explicit:.12g}')
    verdict = 'nonincreasing' if result.nonincreasing else 'not monotone'
    click.echo(f'lambda1 {verdict}; bounded by 8sin^2(pi/p): {str(result.dominated).lower()}')


@click.command('cover')
@click.option('--p', 'p', type=int)
@click.option('--f', 'f')
@click.option('--check', is_flag=True, help='verify the covering map and deck transformations')
@with_appcontext
@handle_errors
def cover_command(p, f, check):
    """Connectivity of the cover, optionally with the covering checks."""
    form = validated(ModelForm, p=p, f=f)
    model = form.model
    if model.order > current_app.config['COVER_LIMIT']:
        raise LimitExceededError(f'p^k = {model.order} exceeds the cover limit {current_app.config["COVER_LIMIT"]}; '
                                 'the cover has (p^k)(p^k - 1) vertices')
    cover = build_cover(model)
    parts = components(to_undirected(cover))
    click.echo(f'cover of {model}: {cover.n} vertices, {len(cover.edges)} edges, {len(parts)} components')
    if check:
        failures = census_mod.check_cover(model)
        for failure in failures:
            click.echo(f'FAIL {failure}', err=True)
        if failures:
            raise FieldGraphError(f'{len(failures)} covering checks failed')
        click.echo('covering map and deck transformations verified')


@click.command('verify')
@click.option('--p', 'p', type=int)
@click.option('--k', 'k', type=int)
@click.option('--cover-limit', type=int, default=None)
@click.option('--spectral-limit', type=int, default=None)
@with_appcontext
@handle_errors
def verify_command(p, k, cover_limit, spectral_limit):
    """Structural theorem suite over every model of (p, k)."""
    form = validated(VerifyForm, p=p, k=k, cover_limit=cover_limit, spectral_limit=spectral_limit)
    config = current_app.config
    failures = census_mod.verify_theorems(
        p, k,
        cover_limit=config['COVER_LIMIT'] if form.cover_limit.data is None else form.cover_limit.data,
        spectral_limit=config['SPECTRAL_LIMIT'] if form.spectral_limit.data is None else form.spectral_limit.data,
    )
    for failure in failures:
        click.echo(f'FAIL {failure}', err=True)
    if failures:
        raise FieldGraphError(f'{len(failures)} theorem checks failed for {p}^{k}')
    click.echo(f'{p}^{k}: all theorem checks passed')


@click.command('init-cache')
@with_appcontext
def init_cache_command():
    """Create the cache tables and show their statistics."""
    db.create_all()
    stats = cache.get_statistics()
    click.echo(f'cache database: {current_app.config["SQLALCHEMY_DATABASE_URI"]}')
    for name, value in stats.items():
        click.echo(f'{name}: {value}')


COMMANDS = (census_command, report_command, dot_command, spectrum_command,
            expander_command, cover_command, verify_command, init_cache_command)


def register_commands(app):
    for command in COMMANDS:
        app.cli.add_command(command)
