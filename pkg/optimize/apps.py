from django.apps import AppConfig


class OptimizeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'optimize'
    verbose_name = 'Optimal and maximin designs'
