import os

from dotenv import load_dotenv

load_dotenv()


class Config:
    """Application configuration"""

    # Cache directory; FIELDGRAPH_CACHE overrides it
    CACHE_DIR = os.environ.get('FIELDGRAPH_CACHE') or os.path.join('instance', 'cache')

    # SQLite census cache, derived from CACHE_DIR by create_app when unset
    SQLALCHEMY_DATABASE_URI = None
    SQLALCHEMY_TRACK_MODIFICATIONS = False
    CACHE_FORMAT_VERSION = 1

    # Census settings
    CENSUS_LIMIT = 700
    CENSUS_WORKERS = 1
    CANONICAL_MODE = 'default'

    # Largest p^k for cover analyses and for spectra in reports
    COVER_LIMIT = 64
    SPECTRAL_LIMIT = 625

    # Spectral tolerances
    EIGEN_TOL = 1e-9
    MEMBERSHIP_TOL = 1e-6

    # Logging
    LOG_FILE = os.path.join('instance', 'fieldgraph.log')
    LOG_LEVEL = 'INFO'
