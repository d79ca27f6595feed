from django.test import SimpleTestCase

from crossprompt.app.common.checksums import crc64


class TestCrc64(SimpleTestCase):
    def test_format(self):
        digest = crc64(b'123456789')
        self.assertEqual(len(digest), 16)
        self.assertEqual(digest, digest.lower())
        int(digest, 16)

    def test_deterministic_and_sensitive(self):
        self.assertEqual(crc64(b'prompt'), crc64(bytearray(b'prompt')))
        self.assertNotEqual(crc64(b'prompt'), crc64(b'prompu'))
