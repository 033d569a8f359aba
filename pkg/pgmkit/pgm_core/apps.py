from django.apps import AppConfig


class PgmCoreConfig(AppConfig):
    name = 'pgm_core'
    verbose_name = 'Фотометрическая гауссова смесь'
