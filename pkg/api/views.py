from rest_framework import status
from rest_framework.decorators import api_view, permission_classes
from rest_framework.permissions import AllowAny
from rest_framework.response import Response

from core.exceptions import OptDesignError
from criteria.equivalence import equivalence_check
from criteria.serializers import CertificateSerializer
from optimize.local import local_opt_design
from optimize.serializers import DesignResultSerializer
from optimize.weights import OptimizeOptions
from transforms.equivariance import transfer_optimal

from .serializers import CheckRequestSerializer, OptimizeRequestSerializer, TransferRequestSerializer


def error_response(exc):
    """400 for input errors, 422 when the numerics fail"""
    code = status.HTTP_422_UNPROCESSABLE_ENTITY if exc.exit_code == 2 else status.HTTP_400_BAD_REQUEST
    return Response({'error': type(exc).__name__, 'detail': str(exc)}, status=code)


@api_view(['POST'])
@permission_classes([AllowAny])
def optimize_view(request):
    """Certified locally optimal design"""

    serializer = OptimizeRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    try:
        opts = OptimizeOptions.from_settings(**data.get('options', {}))
        result = local_opt_design(data['model'], data['beta'], data['criterion'], opts=opts)
    except OptDesignError as exc:
        return error_response(exc)

    return Response({
        'beta': list(data['beta']),
        'criterion': data['criterion'].as_dict(),
        **DesignResultSerializer(result).data,
    }, status=status.HTTP_200_OK)


@api_view(['POST'])
@permission_classes([AllowAny])
def check_view(request):
    """Equivalence-theorem certificate of a given design"""

    serializer = CheckRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    try:
        certificate = equivalence_check(data['model'], data['design'], data['beta'], data['criterion'])
    except OptDesignError as exc:
        return error_response(exc)

    return Response(CertificateSerializer(certificate).data, status=status.HTTP_200_OK)


@api_view(['POST'])
@permission_classes([AllowAny])
def transfer_view(request):
    """Image of a design, parameter and weighting measure under a transformation"""

    serializer = TransferRequestSerializer(data=request.data)
    if not serializer.is_valid():
        return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
    data = serializer.validated_data
    try:
        result = transfer_optimal(data['model'], data['design'], data['transform'], data['criterion'])
        image_beta = result.param_map(data['beta'])
        image_design = result.design.canonical()
        payload = {
            'design': image_design.as_dict(),
            'beta': image_beta.tolist(),
            'region': result.model.region.as_dict(),
            'criterion': result.criterion.as_dict(),
        }
        if data['assert_optimal']:
            certificate = equivalence_check(result.model, image_design, image_beta, result.criterion)
            payload['certificate'] = CertificateSerializer(certificate).data
    except OptDesignError as exc:
        return error_response(exc)

    return Response(payload, status=status.HTTP_200_OK)
