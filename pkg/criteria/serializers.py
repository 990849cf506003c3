from rest_framework import serializers

from core.serializers import DomainSerializer
from model_core.serializers import WeightingMeasureSerializer

from .local import CriterionSpec


class CriterionSerializer(DomainSerializer):
    """{"kind": "D"} or {"kind": "IMSE", "nu": {...}}"""

    kind = serializers.ChoiceField(choices=['D', 'IMSE'], default='D')
    nu = WeightingMeasureSerializer(required=False)

    def validate(self, attrs):
        if attrs.get('kind') == 'IMSE' and 'nu' not in attrs:
            raise serializers.ValidationError({'nu': 'The IMSE criterion needs a weighting measure.'})
        return super().validate(attrs)

    def build(self, attrs):
        if attrs['kind'] == 'D':
            return CriterionSpec.d()
        nu = WeightingMeasureSerializer(context=self.context).build(attrs['nu'])
        return CriterionSpec.imse(nu)


class CertificateSerializer(serializers.Serializer):
    max_sensitivity = serializers.FloatField()
    bound = serializers.FloatField()
    argmax = serializers.ListField(child=serializers.FloatField())
    passed = serializers.BooleanField()
