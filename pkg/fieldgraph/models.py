from datetime import datetime

from flask_sqlalchemy import SQLAlchemy

db = SQLAlchemy()


class CacheEntry(db.Model):
    """Canonical form and automorphism group order of one model, stored in SQLite"""

    __tablename__ = 'cache_entries'

    id = db.Column(db.Integer, primary_key=True)
    key = db.Column(db.String(64), unique=True, nullable=False, index=True)
    p = db.Column(db.Integer, nullable=False)
    k = db.Column(db.Integer, nullable=False)
    polynomial = db.Column(db.String(255), nullable=False)
    mode = db.Column(db.String(16), nullable=False)
    variant = db.Column(db.String(32), nullable=False)
    # zlib-compressed canonical form bytes
    canonical_form = db.Column(db.LargeBinary, nullable=False)
    # decimal text; orders exceed 64 bits
    aut_order = db.Column(db.Text, nullable=False)
    version = db.Column(db.Integer, nullable=False)
    created_at = db.Column(db.DateTime, default=datetime.utcnow)

    def __repr__(self):
        return f'<CacheEntry {self.p}^{self.k} {self.polynomial} {self.mode}/{self.variant}>'
