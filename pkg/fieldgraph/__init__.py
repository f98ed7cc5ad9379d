"""Graphs of finite field models: construction, isomorphism census, spectra."""
import logging
import os
from logging.handlers import RotatingFileHandler

from flask import Flask

from config import Config

LOG_FORMAT = '%(asctime)s %(levelname)s [%(name)s] %(message)s'


def _configure_logging(app):
    level = getattr(logging, str(app.config['LOG_LEVEL']).upper(), logging.INFO)
    package_logger = logging.getLogger('fieldgraph')
    package_logger.setLevel(level)
    app.logger.setLevel(level)
    if app.testing or not app.config.get('LOG_FILE'):
        return
    directory = os.path.dirname(app.config['LOG_FILE'])
    if directory:
        os.makedirs(directory, exist_ok=True)
    handler = RotatingFileHandler(app.config['LOG_FILE'], maxBytes=1_000_000, backupCount=3)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    handler.setLevel(level)
    app.logger.addHandler(handler)
    package_logger.addHandler(handler)


def create_app(config_class=Config, **overrides):
    """Application factory; keyword overrides win over the config class"""
    app = Flask(__name__)
    app.config.from_object(config_class)
    app.config.update(overrides)

    if not app.config.get('SQLALCHEMY_DATABASE_URI'):
        cache_dir = os.path.abspath(app.config['CACHE_DIR'])
        os.makedirs(cache_dir, exist_ok=True)
        app.config['SQLALCHEMY_DATABASE_URI'] = 'sqlite:///' + os.path.join(cache_dir, 'census.sqlite')

    _configure_logging(app)

    from fieldgraph.models import db
    from fieldgraph.database import cache
    from fieldgraph.commands import register_commands

    db.init_app(app)
    cache.init_app(app)
    register_commands(app)

    app.logger.debug('census cache at %s', app.config['SQLALCHEMY_DATABASE_URI'])
    return app
