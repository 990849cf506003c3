from rest_framework import serializers

from .exceptions import OptDesignError


class PointField(serializers.ListField):
    """Covariate vector; a bare number is read as a one-factor point"""

    child = serializers.FloatField()

    def to_internal_value(self, data):
        if isinstance(data, (int, float)) and not isinstance(data, bool):
            data = [data]
        return super().to_internal_value(data)


class PointListField(serializers.ListField):
    """List of covariate vectors"""

    child = PointField()

    def __init__(self, **kwargs):
        kwargs.setdefault('allow_empty', False)
        super().__init__(**kwargs)


class WeightListField(serializers.ListField):
    """List of probability weights"""

    child = serializers.FloatField(min_value=0.0)

    def __init__(self, **kwargs):
        kwargs.setdefault('allow_empty', False)
        super().__init__(**kwargs)


class DomainSerializer(serializers.Serializer):
    """Serializer whose ``save()`` returns an immutable domain object.

    Subclasses implement ``build(attrs)``. Domain validation errors raised
    while building are reported as serializer errors.
    """

    def build(self, attrs):
        raise NotImplementedError

    def validate(self, attrs):
        attrs = super().validate(attrs)
        try:
            self.build(attrs)
        except OptDesignError as exc:
            raise serializers.ValidationError(str(exc))
        return attrs

    def create(self, validated_data):
        return self.build(validated_data)

    def update(self, instance, validated_data):
        raise NotImplementedError('Domain objects are immutable.')


def load(serializer_class, data, **context):
    """Validate ``data`` with ``serializer_class`` and return the built object"""
    serializer = serializer_class(data=data, context=context)
    serializer.is_valid(raise_exception=True)
    return serializer.save()
