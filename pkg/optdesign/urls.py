"""
URL configuration for the optdesign project.

The HTTP surface is a thin JSON wrapper over the same operations the
``optdesign`` management command exposes.
"""
from django.urls import path, include

urlpatterns = [
    path('api/', include('api.urls')),
]
