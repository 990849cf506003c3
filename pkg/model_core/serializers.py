from rest_framework import serializers

from core.serializers import DomainSerializer, PointField, PointListField, WeightListField

from .domain import (
    Box, CandidateSet, Design, DiscreteMeasure, GammaInverseLink, ModelSpec,
    UniformMeasure, builtin_basis, check_points_in_region,
)

BASIS_CHOICES = ['linear', 'additive', 'quadratic']


class RegionSerializer(DomainSerializer):
    """Box bounds or an explicit candidate list"""

    lower = PointField(required=False)
    upper = PointField(required=False)
    candidates = PointListField(required=False)

    def validate(self, attrs):
        has_box = 'lower' in attrs or 'upper' in attrs
        if has_box == ('candidates' in attrs):
            raise serializers.ValidationError('Give either lower/upper bounds or candidates.')
        if has_box and not ('lower' in attrs and 'upper' in attrs):
            raise serializers.ValidationError('Both lower and upper bounds are required.')
        return super().validate(attrs)

    def build(self, attrs):
        if 'candidates' in attrs:
            return CandidateSet(attrs['candidates'])
        return Box(attrs['lower'], attrs['upper'])


class ModelSpecSerializer(DomainSerializer):
    """Gamma GLM with a built-in basis"""

    dim_x = serializers.IntegerField(min_value=1)
    basis = serializers.ChoiceField(choices=BASIS_CHOICES, default='linear')
    region = RegionSerializer(required=False)
    kappa = serializers.FloatField(required=False)

    def validate_kappa(self, value):
        """Shape parameter must be positive"""
        if value <= 0:
            raise serializers.ValidationError('kappa must be positive.')
        return value

    def build(self, attrs):
        dim_x = attrs['dim_x']
        region_data = attrs.get('region') or {'lower': [0.0] * dim_x, 'upper': [1.0] * dim_x}
        region = RegionSerializer().build(region_data)
        intensity = GammaInverseLink(attrs['kappa']) if 'kappa' in attrs else None
        return ModelSpec(builtin_basis(attrs['basis'], dim_x), region, intensity)


class DesignSerializer(DomainSerializer):
    """Support points with weights; checked against ``context['model']`` when given"""

    support = PointListField()
    weights = WeightListField()

    def validate(self, attrs):
        if len(attrs['support']) != len(attrs['weights']):
            raise serializers.ValidationError('support and weights must have the same length.')
        return super().validate(attrs)

    def build(self, attrs):
        xi = Design(attrs['support'], attrs['weights'])
        model = self.context.get('model')
        if model is not None:
            check_points_in_region(model, xi.support, what='support point')
        return xi


class WeightingMeasureSerializer(DomainSerializer):
    """IMSE weighting measure; uniform needs ``context['model']`` for its region"""

    kind = serializers.ChoiceField(choices=['discrete', 'uniform'])
    points = PointListField(required=False)
    weights = WeightListField(required=False)

    def validate(self, attrs):
        if attrs['kind'] == 'discrete':
            if 'points' not in attrs or 'weights' not in attrs:
                raise serializers.ValidationError('A discrete measure needs points and weights.')
            if len(attrs['points']) != len(attrs['weights']):
                raise serializers.ValidationError('points and weights must have the same length.')
        elif self.context.get('model') is None:
            raise serializers.ValidationError('A uniform measure needs a model region.')
        return super().validate(attrs)

    def build(self, attrs):
        if attrs['kind'] == 'discrete':
            return DiscreteMeasure(attrs['points'], attrs['weights'])
        return UniformMeasure(self.context['model'].region)
