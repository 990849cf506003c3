from rest_framework import serializers

from core.serializers import DomainSerializer
from transforms.equivariance import LINEAR, PARAM_MODES, make_pair
from transforms.maps import parse_named_map

from .groups import generate_group


class GroupSerializer(DomainSerializer):
    """{"generators": ["reflect:1", "swap:1,2"], "param_mode": ...}; needs ``context['model']``"""

    generators = serializers.ListField(child=serializers.CharField(), allow_empty=False)
    param_mode = serializers.ChoiceField(choices=list(PARAM_MODES), default=LINEAR)
    max_size = serializers.IntegerField(min_value=1, required=False)

    def validate(self, attrs):
        if self.context.get('model') is None:
            raise serializers.ValidationError('A group needs a model.')
        return super().validate(attrs)

    def build(self, attrs):
        model = self.context['model']
        pairs = [
            make_pair(model, parse_named_map(name, model.region), attrs['param_mode'])
            for name in attrs['generators']
        ]
        return generate_group(model, pairs, attrs.get('max_size'))


class OrbitPartitionSerializer(serializers.Serializer):
    orbits = serializers.ListField(child=serializers.ListField(child=serializers.IntegerField()))
    points = serializers.SerializerMethodField()

    def get_points(self, obj):
        return obj.points.tolist()
