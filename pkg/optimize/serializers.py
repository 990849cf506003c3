from rest_framework import serializers

from core.serializers import DomainSerializer
from criteria.serializers import CertificateSerializer

from .weights import OptimizeOptions


class OptimizeOptionsSerializer(DomainSerializer):
    max_iters = serializers.IntegerField(min_value=1, required=False)
    weight_tol = serializers.FloatField(min_value=0.0, required=False)
    sensitivity_tol = serializers.FloatField(min_value=0.0, required=False)
    prune_threshold = serializers.FloatField(min_value=0.0, required=False)

    def build(self, attrs):
        return OptimizeOptions.from_settings(**attrs)


class DesignResultSerializer(serializers.Serializer):
    """Read-only rendering of an OptimizationResult"""

    support = serializers.SerializerMethodField()
    weights = serializers.SerializerMethodField()
    criterion_value = serializers.FloatField()
    iterations = serializers.IntegerField()
    method = serializers.CharField()
    certificate = CertificateSerializer()

    def get_support(self, obj):
        return obj.design.support.tolist()

    def get_weights(self, obj):
        return obj.design.weights.tolist()
