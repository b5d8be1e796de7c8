from django.apps import AppConfig


class CgAppConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cg_app'
    verbose_name = 'cgSpan conceptual graph mining'
