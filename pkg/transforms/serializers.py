from rest_framework import serializers

from core.serializers import DomainSerializer

from .equivariance import LINEAR, PARAM_MODES, make_pair
from .maps import AffinePointMap, parse_named_map


class TransformSerializer(DomainSerializer):
    """{"a": [[-1]], "b": [1], "param_mode": ...} or {"name": "reflect:1", ...}

    Needs ``context['model']`` to derive Q_g from the model's basis.
    """

    name = serializers.CharField(required=False)
    a = serializers.ListField(child=serializers.ListField(child=serializers.FloatField()), required=False)
    b = serializers.ListField(child=serializers.FloatField(), required=False)
    param_mode = serializers.ChoiceField(choices=list(PARAM_MODES), default=LINEAR)

    def validate(self, attrs):
        if ('name' in attrs) == ('a' in attrs):
            raise serializers.ValidationError('Give either a named transform or the matrix "a".')
        if self.context.get('model') is None:
            raise serializers.ValidationError('A transform needs a model to derive Q_g.')
        return super().validate(attrs)

    def point_map(self, attrs):
        model = self.context['model']
        if 'name' in attrs:
            return parse_named_map(attrs['name'], model.region)
        return AffinePointMap(attrs['a'], attrs.get('b'))

    def build(self, attrs):
        return make_pair(self.context['model'], self.point_map(attrs), attrs['param_mode'])
