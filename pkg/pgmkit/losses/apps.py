from django.apps import AppConfig


class LossesConfig(AppConfig):
    name = 'losses'
    verbose_name = 'Слагаемые функции потерь'
