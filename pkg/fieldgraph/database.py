import hashlib
import logging
import zlib

from sqlalchemy.exc import SQLAlchemyError

from fieldgraph.census import analyse_polynomial
from fieldgraph.ff_core import parse_poly
from fieldgraph.models import CacheEntry, db

logger = logging.getLogger(__name__)


class CensusCache:
    """Census results keyed by (p, k, polynomial, mode, variant)"""

    def __init__(self, app=None):
        self.version = None
        if app:
            self.init_app(app)

    def init_app(self, app):
        """Read the format version and create the cache table"""
        self.version = app.config['CACHE_FORMAT_VERSION']
        with app.app_context():
            db.create_all()

    @staticmethod
    def key_for(p, k, polynomial, mode, variant):
        text = f'{p}|{k}|{polynomial}|{mode}|{variant}'
        return hashlib.sha256(text.encode('utf-8')).hexdigest()

    def _discard(self, entry, reason):
        logger.warning('ignoring cache entry %s (%s): %s', entry.key, entry.polynomial, reason)
        db.session.delete(entry)
        db.session.commit()

    def load(self, p, k, polynomial, mode, variant):
        """(canonical form, aut order) or None on a miss, a stale version or a corrupt entry"""
        entry = CacheEntry.query.filter_by(key=self.key_for(p, k, polynomial, mode, variant)).first()
        if entry is None:
            return None
        if entry.version != self.version:
            self._discard(entry, f'version {entry.version} != {self.version}')
            return None
        try:
            return zlib.decompress(entry.canonical_form), int(entry.aut_order)
        except (zlib.error, ValueError, TypeError) as exc:
            self._discard(entry, f'corrupt entry: {exc}')
            return None

    def store(self, p, k, polynomial, mode, variant, form, aut_order):
        """One committed transaction per entry so interrupted runs resume"""
        key = self.key_for(p, k, polynomial, mode, variant)
        entry = CacheEntry.query.filter_by(key=key).first()
        if entry is None:
            entry = CacheEntry(key=key, p=p, k=k, polynomial=polynomial, mode=mode, variant=variant)
            db.session.add(entry)
        entry.canonical_form = zlib.compress(form)
        entry.aut_order = str(aut_order)
        entry.version = self.version
        try:
            db.session.commit()
        except SQLAlchemyError:
            db.session.rollback()
            raise

    def verify(self, p=None, k=None):
        """Recompute every entry (optionally for one (p, k)); keys that disagree"""
        query = CacheEntry.query
        if p is not None:
            query = query.filter_by(p=p)
        if k is not None:
            query = query.filter_by(k=k)
        bad = []
        for entry in query.order_by(CacheEntry.p, CacheEntry.k, CacheEntry.polynomial).all():
            stored = self.load(entry.p, entry.k, entry.polynomial, entry.mode, entry.variant)
            if stored is None:
                continue
            coeffs = parse_poly(entry.polynomial, entry.p).coeffs
            if analyse_polynomial(entry.p, coeffs, entry.mode, entry.variant) != stored:
                logger.error('cache entry %s for %s disagrees with recomputation', entry.key, entry.polynomial)
                bad.append(entry.key)
        return bad

    def get_statistics(self):
        total = CacheEntry.query.count()
        current = CacheEntry.query.filter_by(version=self.version).count()
        return {
            'total_entries': total,
            'current_entries': current,
            'stale_entries': total - current,
        }


# Global cache instance
cache = CensusCache()
