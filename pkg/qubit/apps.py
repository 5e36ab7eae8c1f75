from django.apps import AppConfig


class QubitConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'qubit'
    verbose_name = 'Two-level quantum math'
