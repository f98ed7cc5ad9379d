"""
Setup script for initializing the census cache
Run this script before the first census to create the SQLite cache database
"""

from fieldgraph import create_app
from fieldgraph.database import cache
from fieldgraph.models import db


def setup_database():
    """Initialize the SQLite census cache"""
    app = create_app()

    with app.app_context():
        # Create all tables
        db.create_all()
        stats = cache.get_statistics()
        print(f"Census cache ready at {app.config['SQLALCHEMY_DATABASE_URI']}")
        print(f"Entries: {stats['total_entries']} ({stats['stale_entries']} stale)")
        print("\nNext steps:")
        print("1. Run 'python run.py census --p 3 --k 2' for a first table")
        print("2. Run 'python run.py report --p 5 --f \"x^4+2\"' for a single model")
        print("3. Set FIELDGRAPH_CACHE or pass --cache DIR to move the cache")


if __name__ == '__main__':
    setup_database()
