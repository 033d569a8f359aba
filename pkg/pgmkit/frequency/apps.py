from django.apps import AppConfig


class FrequencyConfig(AppConfig):
    name = 'frequency'
    verbose_name = 'Частотное усиление границ'
