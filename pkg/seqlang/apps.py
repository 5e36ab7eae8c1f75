from django.apps import AppConfig


class SeqlangConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'seqlang'
    verbose_name = 'Pulse sequence language'
