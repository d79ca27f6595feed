import crcmod.predefined

_crc64 = crcmod.predefined.mkPredefinedCrcFun('crc-64')


def crc64(payload):
    """Return the CRC-64 of ``payload`` as a 16 digit lower-case hex string."""
    return '{:016x}'.format(_crc64(bytes(payload)))
