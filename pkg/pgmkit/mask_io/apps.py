from django.apps import AppConfig


class MaskIoConfig(AppConfig):
    name = 'mask_io'
    verbose_name = 'Маски, сетки яркости и аннотации'
