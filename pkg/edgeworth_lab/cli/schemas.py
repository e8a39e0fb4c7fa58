#
# edgeworth-lab - Exact and asymptotic CLT errors of atomic sums
#
# Copyright (C) 2026      The edgeworth-lab developers
#
# This program is free software; you can redistribute it and/or modify
# it under the terms of the GNU Affero General Public License as published by
# the Free Software Foundation; either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Affero General Public License for more details.
#
# You should have received a copy of the GNU Affero General Public License
# along with this program. If not, see <https://www.gnu.org/licenses/>.
#

"""Parameter schemas of the command line subcommands.

Every schema rejects unknown keys and materializes all defaults, so the
loaded dictionary is the complete parameter set echoed in the output.
"""

from marshmallow import RAISE, Schema, ValidationError, validates_schema
from webargs import fields, validate

from ..const import (
    HARNESS_DIOPHANTINE,
    HARNESS_EXPONENT,
    HARNESS_JOINT,
    HARNESS_LIMIT,
    HARNESS_LLT,
    HARNESS_MIXSCALE,
    LAW_METHODS,
    LAW_MULTINOMIAL,
    LIMIT_HAT_X,
    LIMIT_KINDS,
    LIMIT_X,
    LIMIT_Y,
    METHOD_RESONANCE,
    METHODS,
)


def _reals(**kwargs):
    return fields.DelimitedList(fields.Float(allow_nan=False), **kwargs)


def _integers(**kwargs):
    return fields.DelimitedList(fields.Int(strict=False), **kwargs)


class LabSchema(Schema):
    """Base schema rejecting unknown parameters."""

    class Meta:
        unknown = RAISE


class AtomsSchema(LabSchema):
    atoms = _reals(required=True, validate=validate.Length(min=3))
    probs = _reals(required=True, validate=validate.Length(min=3))


class OptionalAtomsSchema(LabSchema):
    atoms = _reals(load_default=None, allow_none=True, validate=validate.Length(min=3))
    probs = _reals(load_default=None, allow_none=True, validate=validate.Length(min=3))

    @validates_schema
    def validate_pair(self, data, **kwargs):
        if (data.get("atoms") is None) != (data.get("probs") is None):
            raise ValidationError("atoms and probs must be given together")


class ExactLawSchema(AtomsSchema):
    n = fields.Int(required=True, validate=validate.Range(min=1))
    method = fields.Str(load_default=LAW_MULTINOMIAL, validate=validate.OneOf(LAW_METHODS))
    merge_tol = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0))


class EdgeworthSchema(AtomsSchema):
    n = fields.Int(required=True, validate=validate.Range(min=1))
    r = fields.Int(load_default=1, validate=validate.Range(min=1, max=12))
    z = _reals(load_default=[0.0], validate=validate.Length(min=1))


class ErrorSchema(EdgeworthSchema):
    r = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1, max=12))
    method = fields.Str(load_default=LAW_MULTINOMIAL, validate=validate.OneOf(LAW_METHODS))


class ResonanceSchema(AtomsSchema):
    n = fields.Int(required=True, validate=validate.Range(min=1))
    z = fields.Float(load_default=0.0)
    kmax = fields.Int(load_default=10, validate=validate.Range(min=1))


class TildeDeltaSchema(AtomsSchema):
    n = fields.Int(required=True, validate=validate.Range(min=1))
    z = _reals(load_default=[0.0], validate=validate.Length(min=1))
    delta = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    K = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    k1 = fields.Float(load_default=None, allow_none=True)
    exact = fields.Boolean(load_default=False)


class FourierOracleSchema(AtomsSchema):
    n = fields.Int(required=True, validate=validate.Range(min=1))
    z = _reals(load_default=[0.0], validate=validate.Length(min=1))
    K1 = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    full_line = fields.Boolean(load_default=False)
    tol = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))


class LatticeSchema(OptionalAtomsSchema):
    n = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1))
    z = fields.Float(load_default=0.0)
    d = fields.Int(load_default=None, allow_none=True, validate=validate.OneOf([2, 3]))
    minima = fields.Boolean(load_default=False)

    @validates_schema
    def validate_source(self, data, **kwargs):
        from_atoms = data.get("atoms") is not None
        if from_atoms == (data.get("d") is not None):
            raise ValidationError("give either atoms, probs and n or a Haar dimension d")
        if from_atoms and data.get("n") is None:
            raise ValidationError("n is required with atoms", "n")


class LimitSampleSchema(OptionalAtomsSchema):
    d = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    which = fields.Str(load_default=LIMIT_X, validate=validate.OneOf(LIMIT_KINDS))
    N = fields.Int(load_default=1000, validate=validate.Range(min=1))
    c = fields.Float(load_default=None, allow_none=True)
    z = fields.Float(load_default=0.0)
    smooth = fields.Boolean(load_default=None, allow_none=True)

    @validates_schema
    def validate_kind(self, data, **kwargs):
        if data["which"] == LIMIT_Y and data.get("c") is None:
            raise ValidationError("Y needs the window constant c", "c")
        if data["which"] == LIMIT_HAT_X and data.get("atoms") is None:
            raise ValidationError("hatX needs atoms and probs", "atoms")


class LimitHarnessSchema(LabSchema):
    d = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    n_list = _integers(load_default=[250, 1000, 4000], validate=validate.Length(min=1))
    z = fields.Float(load_default=0.0)
    N = fields.Int(load_default=2000, validate=validate.Range(min=1))
    method = fields.Str(load_default=METHOD_RESONANCE, validate=validate.OneOf(METHODS))
    z_check = fields.Float(load_default=1.0)
    reference_size = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1))
    dyadic_draws = fields.Int(load_default=20, validate=validate.Range(min=0))
    cache = fields.Boolean(load_default=True)


class DiophantineHarnessSchema(OptionalAtomsSchema):
    n_list = _integers(load_default=[250, 500, 1000, 2000], validate=validate.Length(min=1))
    R_exponent = fields.Float(load_default=0.9)
    z_grid = _reals(load_default=None, allow_none=True, validate=validate.Length(min=1))
    control = fields.Boolean(load_default=True)


class ExponentHarnessSchema(OptionalAtomsSchema):
    kmax = fields.Int(load_default=2000, validate=validate.Range(min=2))
    control = fields.Boolean(load_default=True)


class LltHarnessSchema(OptionalAtomsSchema):
    n = fields.Int(load_default=2000, validate=validate.Range(min=1))
    z = fields.Float(load_default=0.0)
    eps = fields.Float(load_default=0.3, validate=validate.Range(min=0, max=1, min_inclusive=False))
    c_list = _reals(load_default=[1.0], validate=validate.Length(min=1))
    N = fields.Int(load_default=500, validate=validate.Range(min=1))
    reference_size = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1))
    cache = fields.Boolean(load_default=True)


class JointHarnessSchema(LabSchema):
    n = fields.Int(load_default=2000, validate=validate.Range(min=1))
    z1 = fields.Float(load_default=0.0)
    z2 = fields.Float(load_default=1.0)
    N = fields.Int(load_default=500, validate=validate.Range(min=1))
    d = fields.Int(load_default=2, validate=validate.OneOf([2, 3]))
    method = fields.Str(load_default=METHOD_RESONANCE, validate=validate.OneOf(METHODS))
    reference_size = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1))


class MixscaleHarnessSchema(LabSchema):
    d = fields.Int(load_default=2, validate=validate.Equal(2))
    n_list = _integers(load_default=[100, 10000, 1000000], validate=validate.Length(min=1))
    N = fields.Int(load_default=2000, validate=validate.Range(min=4))
    reference_size = fields.Int(load_default=None, allow_none=True, validate=validate.Range(min=1))
    control = fields.Boolean(load_default=True)


HARNESS_SCHEMAS = {
    HARNESS_LIMIT: LimitHarnessSchema,
    HARNESS_DIOPHANTINE: DiophantineHarnessSchema,
    HARNESS_EXPONENT: ExponentHarnessSchema,
    HARNESS_LLT: LltHarnessSchema,
    HARNESS_JOINT: JointHarnessSchema,
    HARNESS_MIXSCALE: MixscaleHarnessSchema,
}
