"""
Serializers for experiment configuration documents
"""

import math
from collections.abc import Mapping

from django.conf import settings
from django.core.exceptions import ValidationError as DjangoValidationError
from rest_framework import serializers
from rest_framework.fields import SkipField, get_error_detail, set_value
from rest_framework.settings import api_settings

from lab_services.lattice_spinor import DIMENSION_CHOICES, REPRESENTATION_CHOICES, GridSpec
from lab_services.spectral_evolution import required_extent

from .catalog import EXPERIMENTS
from .models import ExperimentRun

RECIPE_KINDS = ['bump', 'nise', 'dsabtp', 'slab_cut', 'momentum_bump']
MIN_GRID_POINTS = 8


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class SpinorWeightsField(serializers.Field):
    """Spinor weights as a list of real numbers or [re, im] pairs"""

    default_error_messages = {
        'invalid': 'Expected a non-empty list of numbers or [re, im] pairs.',
        'zero': 'Spinor weights must not all vanish.',
    }

    def to_internal_value(self, data):
        if not isinstance(data, list) or not data:
            self.fail('invalid')
        weights = []
        for entry in data:
            if _is_number(entry):
                weights.append([float(entry), 0.0])
            elif isinstance(entry, list) and len(entry) == 2 and all(_is_number(part) for part in entry):
                weights.append([float(entry[0]), float(entry[1])])
            else:
                self.fail('invalid')
        if not any(re or im for re, im in weights):
            self.fail('zero')
        return weights

    def to_representation(self, value):
        return [[float(re), float(im)] for re, im in value]


class GridSerializer(serializers.Serializer):
    dim = serializers.ChoiceField(choices=DIMENSION_CHOICES)
    n = serializers.IntegerField()
    extent = serializers.FloatField()

    def validate_n(self, value):
        if value < MIN_GRID_POINTS or value & (value - 1):
            raise serializers.ValidationError(f"Grid size must be a power of two >= {MIN_GRID_POINTS}, got {value}")
        return value

    def validate_extent(self, value):
        if not value > 0 or not math.isfinite(value):
            raise serializers.ValidationError(f"Extent must be a positive finite length, got {value}")
        return value


class TimeSamplingSerializer(serializers.Serializer):
    t_min = serializers.FloatField()
    t_max = serializers.FloatField()
    steps = serializers.IntegerField(min_value=2)

    def validate(self, attrs):
        if not attrs['t_min'] < attrs['t_max']:
            raise serializers.ValidationError(
                f"t_min must be below t_max, got ({attrs['t_min']}, {attrs['t_max']})"
            )
        return attrs


class StateRecipeSerializer(serializers.Serializer):
    """Declarative recipe for one constructed state"""

    kind = serializers.ChoiceField(choices=RECIPE_KINDS)
    center = serializers.ListField(child=serializers.FloatField(), required=False)
    radius = serializers.FloatField(required=False, default=0.5)
    spinor = SpinorWeightsField(required=False, allow_null=True, default=None)
    mass = serializers.FloatField(required=False, default=1.0)
    representation = serializers.ChoiceField(choices=REPRESENTATION_CHOICES, required=False)
    direction = serializers.ListField(child=serializers.FloatField(), required=False)

    # nise
    tau = serializers.FloatField(required=False)
    shift = serializers.FloatField(required=False)
    t1 = serializers.FloatField(required=False)
    t2 = serializers.FloatField(required=False)
    time_step = serializers.FloatField(required=False, default=0.05)

    # dsabtp / slab_cut
    a = serializers.FloatField(required=False)
    b = serializers.FloatField(required=False)
    depth = serializers.FloatField(required=False)
    ramp = serializers.FloatField(required=False, min_value=0.0)

    # momentum_bump
    p_center = serializers.ListField(child=serializers.FloatField(), required=False)
    p_radius = serializers.FloatField(required=False)
    radial = serializers.BooleanField(required=False, default=False)

    def validate_mass(self, value):
        if not value > 0:
            raise serializers.ValidationError(f"Mass must be positive, got {value}")
        return value

    def validate_time_step(self, value):
        if not value > 0:
            raise serializers.ValidationError(f"Time step must be positive, got {value}")
        return value

    def validate(self, attrs):
        errors = {}
        kind = attrs['kind']
        attrs.setdefault('representation', settings.DIRAC_FRONT['DEFAULT_REPRESENTATION'])

        if kind in ('bump', 'nise') and not attrs['radius'] > 0:
            errors['radius'] = f"Bump radius must be positive, got {attrs['radius']}"
        if kind == 'nise':
            has_shift = 'tau' in attrs and 'shift' in attrs
            has_targets = 't1' in attrs and 't2' in attrs
            if not (has_shift or has_targets):
                errors['kind'] = "nise needs either (tau, shift) or prescribed turning times (t1, t2)"
            if has_shift and not has_targets and abs(attrs['tau']) > attrs['shift']:
                errors['tau'] = f"Construction needs |tau| <= shift, got tau={attrs['tau']}, shift={attrs['shift']}"
        if kind in ('dsabtp', 'slab_cut'):
            missing = [key for key in ('a', 'b', 'tau') if key not in attrs]
            if missing:
                errors['kind'] = f"{kind} needs {', '.join(missing)}"
            elif not attrs['a'] < attrs['b']:
                errors['a'] = f"Slab bounds must satisfy a < b, got ({attrs['a']}, {attrs['b']})"
            elif not abs(attrs['tau']) < 0.5 * (attrs['b'] - attrs['a']):
                errors['tau'] = f"Need |tau| < (b - a)/2, got {attrs['tau']}"
        if kind == 'slab_cut':
            depth = attrs.get('depth')
            if depth is None or not 0.0 < depth < abs(attrs.get('tau', 0.0)):
                errors['depth'] = "Cut depth must satisfy 0 < depth < |tau|"
            elif attrs.get('ramp') is not None and not attrs['ramp'] < depth:
                errors['ramp'] = "Cut ramp must be shorter than the cut depth"
        if kind == 'momentum_bump':
            if 'p_center' not in attrs:
                errors['p_center'] = "momentum_bump needs p_center"
            if not attrs.get('p_radius', 0.0) > 0:
                errors['p_radius'] = "momentum_bump needs a positive p_radius"

        if errors:
            raise serializers.ValidationError(errors)
        return attrs


def carrier_estimate(recipe: dict, dim: int):
    """
    A-priori carrier radius of a recipe, or None when it is only known after construction.

    Momentum bumps are not compactly supported and count as radius 0.
    """
    kind = recipe['kind']
    center = recipe.get('center') or [0.0] * dim
    offset = math.sqrt(sum(c * c for c in center))
    if kind == 'bump':
        return offset + recipe['radius']
    if kind == 'nise':
        if 'tau' in recipe and 'shift' in recipe and 't1' not in recipe:
            return offset + recipe['radius'] + recipe['shift'] + abs(recipe['tau'])
        return None
    if kind in ('dsabtp', 'slab_cut'):
        return max(abs(recipe['a']), abs(recipe['b'])) + abs(recipe['tau'])
    return 0.0


class ExperimentConfigSerializer(serializers.Serializer):
    """
    One experiment configuration document.

    Field errors and cross-field violations are collected before raising,
    so a single call reports the whole list.
    """

    experiment = serializers.ChoiceField(choices=list(EXPERIMENTS))
    seed = serializers.IntegerField(required=False, default=0, min_value=0)
    delta = serializers.FloatField(required=False)
    grid = GridSerializer(required=False)
    state = StateRecipeSerializer(required=False)
    time = TimeSamplingSerializer(required=False)
    tolerances = serializers.DictField(child=serializers.FloatField(allow_null=True), required=False, default=dict)
    output_dir = serializers.CharField(required=False, allow_blank=False)
    parameters = serializers.DictField(required=False, default=dict)

    def validate_delta(self, value):
        if not 0.0 < value < 1.0:
            raise serializers.ValidationError(f"delta must lie in (0, 1), got {value}")
        return value

    def validate_tolerances(self, value):
        unknown = sorted(set(value) - {'single', 'compound'})
        if unknown:
            raise serializers.ValidationError(f"Unknown tolerance keys: {', '.join(unknown)}")
        return value

    def to_internal_value(self, data):
        """
        Parse every field, then run the cross-field checks on whatever parsed.

        Field errors and cross-field violations are raised together, so a
        malformed grid or recipe does not hide the remaining violations.
        """
        if not isinstance(data, Mapping):
            message = self.error_messages['invalid'].format(datatype=type(data).__name__)
            raise serializers.ValidationError({api_settings.NON_FIELD_ERRORS_KEY: [message]}, code='invalid')

        attrs, errors = {}, {}
        for field in self._writable_fields:
            validate_method = getattr(self, f'validate_{field.field_name}', None)
            try:
                value = field.run_validation(field.get_value(data))
                if validate_method is not None:
                    value = validate_method(value)
            except serializers.ValidationError as exc:
                errors[field.field_name] = exc.detail
            except DjangoValidationError as exc:
                errors[field.field_name] = get_error_detail(exc)
            except SkipField:
                pass
            else:
                set_value(attrs, field.source_attrs, value)

        violations = self._cross_field_violations(attrs, errors) if 'experiment' in attrs else []
        if violations:
            errors[api_settings.NON_FIELD_ERRORS_KEY] = violations
        if errors:
            raise serializers.ValidationError(errors)
        return attrs

    def _cross_field_violations(self, attrs, errors) -> list:
        entry = EXPERIMENTS[attrs['experiment']]
        violations = []
        attrs.setdefault('delta', settings.DIRAC_FRONT['DEFAULT_DELTA'])

        grid, state, time = attrs.get('grid'), attrs.get('state'), attrs.get('time')
        if entry.needs_grid and grid is None and 'grid' not in errors:
            violations.append(f"Experiment '{entry.name}' needs a grid")
        if entry.needs_state and state is None and 'state' not in errors:
            violations.append(f"Experiment '{entry.name}' needs a state recipe")
        if entry.needs_time and time is None and 'time' not in errors:
            violations.append(f"Experiment '{entry.name}' needs a time sampling")
        if state is not None and entry.state_kinds and state['kind'] not in entry.state_kinds:
            violations.append(
                f"Experiment '{entry.name}' accepts state kinds {', '.join(entry.state_kinds)}, got '{state['kind']}'"
            )

        if 'parameters' not in attrs:
            return violations
        allowed = set(entry.defaults) | ({'direction'} if entry.needs_grid else set())
        unknown = sorted(set(attrs['parameters']) - allowed)
        if unknown:
            violations.append(f"Unknown parameters for '{entry.name}': {', '.join(unknown)}")
        parameters = {**entry.defaults, **attrs['parameters']}
        attrs['parameters'] = parameters

        if grid is not None:
            violations.extend(self._dimension_violations(grid, state, parameters))
            try:
                violations.extend(self._horizon_violations(entry, grid, state, time, parameters))
            except (TypeError, ValueError) as exc:
                violations.append(f"Horizon check needs numeric time parameters: {exc}")
        return violations

    @staticmethod
    def _dimension_violations(grid, state, parameters) -> list:
        dim = grid['dim']
        violations = []
        shift = state.get('shift') if state is not None else None
        if shift is not None and not GridSpec(dim=dim, n=grid['n'], extent=grid['extent']).is_lattice_multiple(shift):
            violations.append(f"state.shift {shift} is not a lattice multiple of dx = {grid['extent'] / grid['n']:.6g}")
        vectors = []
        if state is not None:
            vectors += [(key, state.get(key)) for key in ('center', 'direction', 'p_center')]
            if state.get('spinor') is not None:
                n_components = 4 if dim == 3 else 2
                if len(state['spinor']) != n_components:
                    violations.append(f"Spinor weights need {n_components} entries in dim {dim}, "
                                      f"got {len(state['spinor'])}")
        vectors.append(('parameters.direction', parameters.get('direction')))
        for key, vector in vectors:
            if vector is not None and len(vector) != dim:
                violations.append(f"{key} must have {dim} components, got {len(vector)}")
            elif vector is not None and key.endswith('direction') and not any(vector):
                violations.append(f"{key} must be nonzero")
        return violations

    @staticmethod
    def _horizon_violations(entry, grid, state, time, parameters) -> list:
        layout = GridSpec(dim=grid['dim'], n=grid['n'], extent=grid['extent'])
        if state is None:
            return []
        radius = carrier_estimate(state, grid['dim'])
        if radius is None:
            return []

        if entry.name == 'min_law':
            t_max = max((abs(t) for t in parameters['times']), default=0.0)
        elif entry.name == 'long_term':
            R = parameters.get('radius') or radius
            t_max = 2.0 * R + parameters['span']
        elif time is not None:
            t_max = max(abs(time['t_min']), abs(time['t_max']))
        else:
            t_max = 0.0

        required = required_extent(layout, radius, t_max)
        if grid['extent'] < required - 1e-12:
            return [
                f"Wrap-around horizon violated: extent {grid['extent']:.6g} < 2(R0 + T_max) + 4dx = "
                f"{required:.6g} (R0={radius:.6g}, T_max={t_max:.6g})"
            ]
        return []


class ExperimentRunSerializer(serializers.ModelSerializer):
    """Serializer for ExperimentRun rows"""

    class Meta:
        model = ExperimentRun
        fields = [
            'id', 'experiment', 'config', 'manifest', 'output_dir',
            'all_passed', 'seed', 'tool_version', 'created_at'
        ]
        read_only_fields = ['id', 'created_at']


def validate_config(raw) -> dict:
    """
    Validate a raw configuration document.

    Returns:
        The typed configuration (validated_data)

    Raises:
        rest_framework.exceptions.ValidationError: with every violation in ``detail``
    """
    if not isinstance(raw, dict):
        raise serializers.ValidationError(["A configuration document must be a JSON object"])
    serializer = ExperimentConfigSerializer(data=raw)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data
