"""Validation of command-line parameters with WTForms"""
from wtforms import BooleanField, Form, IntegerField, StringField
from wtforms.validators import AnyOf, InputRequired, NumberRange, Optional, ValidationError

from fieldgraph.errors import FieldGraphError
from fieldgraph.ff_core import MAX_PRIME, check_prime, make_model
from fieldgraph.graph_build import MODES, parse_variant


def _prime(form, field):
    try:
        check_prime(field.data)
    except FieldGraphError as exc:
        raise ValidationError(str(exc))


class CensusForm(Form):
    """census --p P --k K [--mode M] [--format F] [--limit N] [--workers W]"""

    p = IntegerField('p', validators=[InputRequired(message='p is required'),
                                      NumberRange(min=2, max=MAX_PRIME)])
    k = IntegerField('k', validators=[InputRequired(message='k is required'),
                                      NumberRange(min=1, max=64, message='k must be between 1 and 64')])
    mode = StringField('mode', default='default', validators=[AnyOf(MODES)])
    variant = StringField('variant', default='full',
                          validators=[AnyOf(('full', 'additive', 'multiplicative'))])
    format = StringField('format', default='csv', validators=[AnyOf(('csv', 'md'))])
    limit = IntegerField('limit', validators=[Optional(), NumberRange(min=1)])
    workers = IntegerField('workers', validators=[Optional(), NumberRange(min=1, max=256)])
    verify_cache = BooleanField('verify_cache')

    def validate_p(self, p):
        _prime(self, p)


class ModelForm(Form):
    """--p P --f POLY, f irreducible over F_p"""

    p = IntegerField('p', validators=[InputRequired(message='p is required'),
                                      NumberRange(min=2, max=MAX_PRIME)])
    f = StringField('f', validators=[InputRequired(message='f is required')])

    model = None

    def validate_p(self, p):
        _prime(self, p)

    def validate_f(self, f):
        if self.p.errors or self.p.data is None:
            return
        try:
            self.model = make_model(self.p.data, f.data)
        except FieldGraphError as exc:
            raise ValidationError(str(exc))


class DotForm(ModelForm):
    variant = StringField('variant', default='full')

    def validate_variant(self, variant):
        try:
            name, index = parse_variant(variant.data)
        except FieldGraphError as exc:
            raise ValidationError(str(exc))
        if name == 'core' and self.model is not None and index >= self.model.k:
            raise ValidationError(f'core index {index} outside [0, {self.model.k - 1}]')


class ExpanderForm(Form):
    primes = StringField('primes', default='3,7,11,19,23', validators=[InputRequired()])

    values = ()

    def validate_primes(self, primes):
        parts = [t.strip() for t in primes.data.split(',') if t.strip()]
        if not parts or not all(t.isdigit() for t in parts):
            raise ValidationError('primes must be a comma-separated list of integers')
        values = [int(t) for t in parts]
        for p in values:
            try:
                check_prime(p)
            except FieldGraphError as exc:
                raise ValidationError(str(exc))
            if p % 4 != 3:
                raise ValidationError(f'{p} is not 3 mod 4')
        self.values = tuple(values)


class VerifyForm(Form):
    """verify --p P --k K [--cover-limit N] [--spectral-limit N]"""

    p = IntegerField('p', validators=[InputRequired(), NumberRange(min=2, max=MAX_PRIME)])
    k = IntegerField('k', validators=[InputRequired(), NumberRange(min=1, max=64)])
    cover_limit = IntegerField('cover_limit', validators=[Optional(), NumberRange(min=0)])
    spectral_limit = IntegerField('spectral_limit', validators=[Optional(), NumberRange(min=0)])

    def validate_p(self, p):
        _prime(self, p)
