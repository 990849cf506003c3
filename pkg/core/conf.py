from django.conf import settings

DEFAULTS = {
    'KAPPA': 1.0,
    'QUADRATURE_ORDER': 32,
    'MAX_ITERS': 10000,
    'WEIGHT_TOL': 1e-10,
    'SENSITIVITY_TOL': 1e-6,
    'PRUNE_THRESHOLD': 1e-8,
    'CHECK_GRID_POINTS': 101,
    'CHECK_GRID_CAP': 10201,
    'POSITIVITY_GRID_POINTS': 16,
    'POSITIVITY_GRID_CAP': 65536,
    'MAX_GROUP_SIZE': 64,
    'MAX_AUGMENTATIONS': 50,
    'GOLDEN_TOL': 1e-8,
    'SEED': 20240101,
}


def optdesign_setting(name):
    """Read one entry of ``settings.OPTDESIGN`` with a built-in fallback"""
    configured = getattr(settings, 'OPTDESIGN', {}) if settings.configured else {}
    if name in configured:
        return configured[name]
    return DEFAULTS[name]
