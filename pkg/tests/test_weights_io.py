import numpy as np
import pytest

from chorus.nn import (
    Architecture,
    WeightsFormatError,
    load_weights,
    save_weights,
    weights_from_bytes,
    weights_to_bytes,
)
from chorus.nn.network import init_model


@pytest.fixture
def model():
    arch = Architecture(hidden_layers=2, activation="tanh", dropout=True)
    return init_model(arch, np.random.default_rng(0))


class TestRoundTrip:
    def test_save_load_save_byte_identical(self, model, tmp_path):
        path = tmp_path / "model.w1"
        save_weights(model, path)
        first = path.read_bytes()
        loaded = load_weights(path, model.architecture)
        save_weights(loaded, path)
        assert path.read_bytes() == first

    def test_fields_equal(self, model, tmp_path):
        path = tmp_path / "model.w1"
        save_weights(model, path)
        loaded = load_weights(path, model.architecture)
        assert loaded.architecture == model.architecture
        for a, b in zip(loaded.weights, model.weights):
            assert np.array_equal(a, b)
        for a, b in zip(loaded.biases, model.biases):
            assert np.array_equal(a, b)

    def test_architecture_inferred_from_shapes(self, model, tmp_path):
        path = tmp_path / "model.w1"
        save_weights(model, path)
        loaded = load_weights(path)
        assert loaded.architecture.hidden_layers == 2
        assert loaded.architecture.input_dim == 784
        assert loaded.architecture.output_dim == 10


class TestCorruption:
    def test_bad_magic(self, model):
        data = bytearray(weights_to_bytes(model))
        data[0] ^= 0xFF
        with pytest.raises(WeightsFormatError, match="magic"):
            weights_from_bytes(bytes(data))

    def test_crc_detects_payload_tamper(self, model):
        data = bytearray(weights_to_bytes(model))
        data[100] ^= 0x01
        with pytest.raises(WeightsFormatError, match="CRC"):
            weights_from_bytes(bytes(data))

    def test_length_mismatch(self, model):
        import struct
        import zlib
        data = weights_to_bytes(model)
        # drop some payload but keep the CRC consistent so the length check fires
        body = data[:-40]
        truncated = body + struct.pack("<I", zlib.crc32(body))
        with pytest.raises(WeightsFormatError):
            weights_from_bytes(truncated)

    def test_too_short(self):
        with pytest.raises(WeightsFormatError):
            weights_from_bytes(b"AISPEC")

    def test_missing_file(self, tmp_path):
        with pytest.raises(WeightsFormatError, match="cannot read"):
            load_weights(tmp_path / "nope.w1")
