from rest_framework import serializers

from criteria.serializers import CriterionSerializer
from model_core.serializers import DesignSerializer, ModelSpecSerializer
from optimize.serializers import OptimizeOptionsSerializer
from transforms.equivariance import inverse_pair
from transforms.serializers import TransformSerializer


def build_nested(serializer_class, data, field, **context):
    """Validate a nested payload and return its domain object; errors are keyed by ``field``"""
    serializer = serializer_class(data=data, context=context)
    if not serializer.is_valid():
        raise serializers.ValidationError({field: serializer.errors})
    return serializer.save()


class ProblemSerializer(serializers.Serializer):
    """Model, parameter guess and criterion shared by every request"""

    model = serializers.JSONField()
    beta = serializers.ListField(child=serializers.FloatField(), allow_empty=False)
    criterion = serializers.JSONField(required=False)

    def validate(self, attrs):
        attrs['model'] = build_nested(ModelSpecSerializer, attrs['model'], 'model')
        attrs['criterion'] = build_nested(
            CriterionSerializer, attrs.get('criterion') or {'kind': 'D'}, 'criterion', model=attrs['model'])
        return attrs


class OptimizeRequestSerializer(ProblemSerializer):
    options = OptimizeOptionsSerializer(required=False)


class CheckRequestSerializer(ProblemSerializer):
    design = serializers.JSONField()

    def validate(self, attrs):
        attrs = super().validate(attrs)
        attrs['design'] = build_nested(DesignSerializer, attrs['design'], 'design', model=attrs['model'])
        return attrs


class TransferRequestSerializer(CheckRequestSerializer):
    transform = serializers.JSONField()
    inverse = serializers.BooleanField(default=False)
    assert_optimal = serializers.BooleanField(default=False)

    def validate(self, attrs):
        attrs = super().validate(attrs)
        pair = build_nested(TransformSerializer, attrs['transform'], 'transform', model=attrs['model'])
        attrs['transform'] = inverse_pair(pair) if attrs['inverse'] else pair
        return attrs
