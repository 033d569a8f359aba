import threading

from django.test import SimpleTestCase, override_settings

from core.exceptions import (DomainError, IoError, ParseError, RangeError,
                             ResourceError, SchemaError, UsageError)
from core.parallel import map_ordered, resolve_workers
from pgmkit import settings as project_settings


class ExceptionsTest(SimpleTestCase):

    def test_exit_codes(self):
        """Ошибки разбора и использования завершаются кодом 2."""
        expected = {
            ParseError: 2,
            SchemaError: 2,
            IoError: 2,
            UsageError: 2,
            RangeError: 1,
            DomainError: 1,
            ResourceError: 1,
        }
        for error, code in expected.items():
            with self.subTest(error=error.__name__):
                self.assertEqual(error.exit_code, code)

    def test_parse_error_offset(self):
        """ParseError хранит смещение и пишет его в сообщение."""
        error = ParseError('bad magic', offset=0)
        self.assertEqual(error.offset, 0)
        self.assertIn('byte offset 0', str(error))

    def test_domain_error_is_value_error(self):
        self.assertTrue(issubclass(DomainError, ValueError))


class MapOrderedTest(SimpleTestCase):

    def test_order_preserved(self):
        """Результаты идут в порядке входа при любом числе потоков."""
        items = list(range(50))
        for workers in (1, 2, 8):
            with self.subTest(workers=workers):
                self.assertEqual(
                    map_ordered(lambda x: x * x, items, workers),
                    [x * x for x in items]
                )

    def test_inline_for_single_worker(self):
        """Один поток выполняет работу в вызывающем потоке."""
        seen = map_ordered(lambda _: threading.get_ident(), [1, 2, 3], 1)
        self.assertEqual(set(seen), {threading.get_ident()})

    @override_settings(PGMKIT_WORKERS=3)
    def test_workers_from_settings(self):
        self.assertEqual(resolve_workers(), 3)
        self.assertEqual(resolve_workers(0), 1)


class ProjectSettingsTest(SimpleTestCase):

    def test_no_web_settings(self):
        """Проект без HTTP: хосты, часовой пояс и URL не настраиваются."""
        for name in ('ALLOWED_HOSTS', 'TIME_ZONE', 'USE_TZ',
                     'ROOT_URLCONF', 'WSGI_APPLICATION'):
            with self.subTest(setting=name):
                self.assertFalse(hasattr(project_settings, name))

    def test_docstring_matches_version(self):
        self.assertNotIn('2.2', project_settings.__doc__)
