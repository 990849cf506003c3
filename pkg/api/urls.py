from django.urls import path

from . import views

urlpatterns = [
    path('optimize/', views.optimize_view, name='optimize'),
    path('check/', views.check_view, name='check'),
    path('transfer/', views.transfer_view, name='transfer'),
]
