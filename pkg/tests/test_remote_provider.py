import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import numpy as np
import pytest

from embedmatch import RemoteEmbeddingProvider, TransportError


class EmbedHandler(BaseHTTPRequestHandler):
    """Tiny embedding service: vectors derive from text length, 'oov:' is OOV."""

    dimension = 4
    request_log: list = []
    fail_first = 0

    def do_POST(self):
        if self.path != "/embed":
            self.send_error(404)
            return
        if EmbedHandler.fail_first > 0:
            EmbedHandler.fail_first -= 1
            self.send_error(500, "flaky")
            return
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        texts = body["texts"]
        EmbedHandler.request_log.append(list(texts))
        vectors, oov = [], []
        for i, text in enumerate(texts):
            if text.startswith("oov:"):
                oov.append(i)
                vectors.append([0.0] * self.dimension)
            else:
                vectors.append([float(len(text)), 1.0, 0.0, 0.0])
        payload = json.dumps(
            {"dimension": self.dimension, "vectors": vectors, "oov": oov}
        ).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def embed_server():
    server = ThreadingHTTPServer(("127.0.0.1", 0), EmbedHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    EmbedHandler.request_log = []
    EmbedHandler.fail_first = 0
    yield f"http://127.0.0.1:{server.server_address[1]}"
    server.shutdown()


class TestRemoteProvider:
    def test_single_embed_and_dimension(self, embed_server):
        provider = RemoteEmbeddingProvider(embed_server)
        vector = provider.embed("paris")
        assert np.array_equal(vector, np.array([5.0, 1.0, 0.0, 0.0]))
        assert provider.dimension == 4

    def test_oov_distinct_from_error(self, embed_server):
        provider = RemoteEmbeddingProvider(embed_server)
        assert provider.embed("oov:unknown") is None

    def test_batching_respects_size(self, embed_server):
        provider = RemoteEmbeddingProvider(embed_server, batch_size=3)
        texts = [f"text-{i}" for i in range(7)]
        results = provider.embed_many(texts)
        assert all(r is not None for r in results)
        sizes = [len(batch) for batch in EmbedHandler.request_log]
        assert sizes == [3, 3, 1]

    def test_batch_results_cached(self, embed_server):
        provider = RemoteEmbeddingProvider(embed_server, batch_size=8)
        provider.embed_many(["a", "b", "c"])
        EmbedHandler.request_log.clear()
        provider.embed_many(["a", "b", "c"])
        assert EmbedHandler.request_log == []

    def test_retry_then_success(self, embed_server):
        EmbedHandler.fail_first = 1
        provider = RemoteEmbeddingProvider(embed_server, retries=2)
        assert provider.embed("ok") is not None

    def test_transport_error_after_retries(self, embed_server):
        EmbedHandler.fail_first = 10
        provider = RemoteEmbeddingProvider(embed_server, retries=1)
        with pytest.raises(TransportError):
            provider.embed("ok")

    def test_unreachable_host(self):
        provider = RemoteEmbeddingProvider("http://127.0.0.1:1", retries=0, timeout=0.2)
        with pytest.raises(TransportError):
            provider.embed("anything")
