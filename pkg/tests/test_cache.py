import unittest

from config import Config
from fieldgraph import create_app
from fieldgraph.census import analyse_polynomial, classify
from fieldgraph.database import CensusCache, cache
from fieldgraph.ff_core import parse_poly
from fieldgraph.models import CacheEntry, db


class TestConfig(Config):
    """Testing configuration"""
    TESTING = True
    SQLALCHEMY_DATABASE_URI = 'sqlite:///:memory:'


class CountingCache:
    """Wraps the cache and counts computed (stored) entries"""

    def __init__(self, inner):
        self.inner = inner
        self.stored = 0

    def load(self, *key):
        return self.inner.load(*key)

    def store(self, *args):
        self.stored += 1
        return self.inner.store(*args)


class CensusCacheTestCase(unittest.TestCase):
    """Test cases for the SQLite census cache"""

    def setUp(self):
        """Set up a fresh in-memory cache"""
        self.app = create_app(TestConfig)
        self.ctx = self.app.app_context()
        self.ctx.push()
        self.form, self.order = analyse_polynomial(3, parse_poly('x^2+1', 3).coeffs)

    def tearDown(self):
        """Clean up after tests"""
        db.session.remove()
        db.drop_all()
        self.ctx.pop()

    def _entry(self):
        return CacheEntry.query.filter_by(key=CensusCache.key_for(3, 2, 'x^2 + 1', 'default', 'full')).first()

    def test_store_and_load(self):
        """Test a round trip through the table"""
        self.assertIsNone(cache.load(3, 2, 'x^2 + 1', 'default', 'full'))
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        self.assertEqual(cache.load(3, 2, 'x^2 + 1', 'default', 'full'), (self.form, 8))
        self.assertNotEqual(self._entry().canonical_form, self.form)

    def test_store_replaces(self):
        """Test that storing twice keeps one row"""
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        self.assertEqual(CacheEntry.query.count(), 1)

    def test_mode_and_variant_in_key(self):
        """Test that entries of other modes and variants are not served"""
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        self.assertIsNone(cache.load(3, 2, 'x^2 + 1', 'strict', 'full'))
        self.assertIsNone(cache.load(3, 2, 'x^2 + 1', 'default', 'additive'))

    def test_version_mismatch_ignored(self):
        """Test that entries of another format version are dropped"""
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        self._entry().version = 0
        db.session.commit()
        self.assertEqual(cache.get_statistics()['stale_entries'], 1)
        self.assertIsNone(cache.load(3, 2, 'x^2 + 1', 'default', 'full'))
        self.assertEqual(CacheEntry.query.count(), 0)

    def test_corrupt_entry_ignored(self):
        """Test that undecodable forms and orders are dropped"""
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        self._entry().canonical_form = b'not zlib'
        db.session.commit()
        self.assertIsNone(cache.load(3, 2, 'x^2 + 1', 'default', 'full'))
        cache.store(3, 2, 'x^2 + 1', 'default', 'full', self.form, self.order)
        self._entry().aut_order = 'eight'
        db.session.commit()
        self.assertIsNone(cache.load(3, 2, 'x^2 + 1', 'default', 'full'))

    def test_verify_flags_poisoned_entry(self):
        """Test that verification recomputes and reports disagreement"""
        classify(3, 2, cache=cache)
        self.assertEqual(cache.verify(3, 2), [])
        self._entry().aut_order = '7'
        db.session.commit()
        self.assertEqual(cache.verify(3, 2), [self._entry().key])
        self.assertEqual(cache.verify(2, 2), [])

    def test_cold_and_warm_runs_agree(self):
        """Test that a warm census computes nothing and returns the same rows"""
        cold = CountingCache(cache)
        first = classify(3, 2, cache=cold)
        self.assertEqual(cold.stored, 3)
        warm = CountingCache(cache)
        second = classify(3, 2, cache=warm)
        self.assertEqual(warm.stored, 0)
        self.assertEqual(first, second)
        self.assertEqual(first, classify(3, 2))

    def test_statistics(self):
        """Test entry counts"""
        classify(2, 3, cache=cache)
        stats = cache.get_statistics()
        self.assertEqual(stats['total_entries'], 2)
        self.assertEqual(stats['current_entries'], 2)
        self.assertEqual(stats['stale_entries'], 0)


if __name__ == '__main__':
    unittest.main()
