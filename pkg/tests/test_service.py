import io
import random

import numpy as np
import pytest
from fastapi.testclient import TestClient
from scipy.io import wavfile

from voxdrum.pipeline import load_model
from voxdrum.service import CHUNK_HEADER, create_app

from conftest import make_user, random_pattern


def wav_bytes(clip):
    pcm = np.clip(np.floor(clip.samples * 32768.0 + 0.5), -32768, 32767).astype(np.int16)
    buf = io.BytesIO()
    wavfile.write(buf, clip.sample_rate, pcm)
    return buf.getvalue()


def pcm16(clip):
    return np.clip(np.floor(clip.samples * 32768.0 + 0.5), -32768, 32767).astype("<i2").tobytes()


def chunked(payload, size, start_seq=0):
    """Split raw PCM bytes into wire chunks with the 9-byte header."""
    chunks = []
    offset = 0
    seq = start_seq
    while offset < len(payload) or not chunks:
        part = payload[offset:offset + size]
        offset += len(part)
        final = offset >= len(payload)
        chunks.append(CHUNK_HEADER.pack(seq, len(part), 1 if final else 0) + part)
        seq += 1
    return chunks


@pytest.fixture(scope="module")
def user():
    return make_user("a")


@pytest.fixture(scope="module")
def enrolment(user):
    return wav_bytes(user.enrolment_clip())


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app()) as c:
        yield c


def new_session(client):
    response = client.post("/api/sessions")
    assert response.status_code == 200
    return response.json()["id"]


def train_session(client, session_id, enrolment, classes="kick:5,snare:5,hihat:5"):
    return client.post(
        f"/api/sessions/{session_id}/train",
        files={"audio": ("enrol.wav", enrolment, "audio/wav")},
        data={"classes": classes},
    )


class TestWorkflow:
    def test_full_train_transcribe_midi_flow(self, client, user, enrolment):
        session = new_session(client)
        response = train_session(client, session, enrolment)
        assert response.status_code == 200
        body = response.json()
        assert body["onsets_found"] == 15
        assert body["training_accuracy"] == 1.0
        assert body["selected_features"]

        perf, _ = user.performance(random_pattern(random.Random(3), 8), variant=70)
        response = client.post(f"/api/sessions/{session}/transcribe",
                               files={"audio": ("perf.wav", wav_bytes(perf), "audio/wav")})
        assert response.status_code == 200
        events = response.json()["events"]
        assert len(events) == 8
        assert all(set(e) == {"time", "label", "velocity"} for e in events)
        times = [e["time"] for e in events]
        assert times == sorted(times)

        response = client.get(f"/api/sessions/{session}/midi", params={"tempo": 100})
        assert response.status_code == 200
        assert response.content[:4] == b"MThd"
        from voxdrum.midi import read_smf
        assert len(read_smf(response.content)) == 8

    def test_model_document_download(self, client, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        response = client.get(f"/api/sessions/{session}/model")
        assert response.status_code == 200
        model = load_model(response.text)
        assert model.class_names == ["kick", "snare", "hihat"]

    def test_count_mismatch_409_with_detail(self, client, enrolment):
        session = new_session(client)
        response = train_session(client, session, enrolment, classes="kick:5,snare:5,hihat:6")
        assert response.status_code == 409
        detail = response.json()["detail"]
        assert detail["onsets_found"] == 15
        assert detail["expected"] == 16

    def test_transcribe_before_train_409(self, client, user):
        session = new_session(client)
        perf, _ = user.performance(["kick"], variant=71)
        response = client.post(f"/api/sessions/{session}/transcribe",
                               files={"audio": ("p.wav", wav_bytes(perf), "audio/wav")})
        assert response.status_code == 409

    def test_midi_before_transcribe_409(self, client, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        assert client.get(f"/api/sessions/{session}/midi").status_code == 409

    def test_unknown_session_404(self, client, enrolment):
        assert client.post("/api/sessions/nope/train",
                           files={"audio": ("a.wav", enrolment, "audio/wav")},
                           data={"classes": "kick:1,snare:1"}).status_code == 404
        assert client.get("/api/sessions/nope/midi").status_code == 404
        assert client.get("/api/sessions/nope/model").status_code == 404

    def test_malformed_payloads_400(self, client, enrolment):
        session = new_session(client)
        response = client.post(f"/api/sessions/{session}/train",
                               files={"audio": ("a.wav", b"not audio", "audio/wav")},
                               data={"classes": "kick:5,snare:5,hihat:5"})
        assert response.status_code == 400
        response = train_session(client, session, enrolment, classes="kick:zzz")
        assert response.status_code == 400

    def test_retrain_replaces_model(self, client, enrolment, user):
        session = new_session(client)
        train_session(client, session, enrolment)
        first = client.get(f"/api/sessions/{session}/model").text
        response = train_session(client, session, enrolment)
        assert response.status_code == 200
        assert client.get(f"/api/sessions/{session}/model").text == first  # same audio

    def test_persistence_to_data_dir(self, tmp_path, enrolment):
        with TestClient(create_app(data_dir=str(tmp_path))) as c:
            session = new_session(c)
            train_session(c, session, enrolment)
            saved = tmp_path / f"{session}.json"
            assert saved.exists()
            assert load_model(saved.read_text()).class_names == ["kick", "snare", "hihat"]

    def test_static_ui_mount(self, tmp_path):
        (tmp_path / "index.html").write_text("<html><body>studio</body></html>")
        with TestClient(create_app(ui_dir=str(tmp_path))) as c:
            response = c.get("/")
            assert response.status_code == 200
            assert "studio" in response.text
            assert c.post("/api/sessions").status_code == 200  # API still reachable
        with pytest.raises(ValueError, match="does not exist"):
            create_app(ui_dir=str(tmp_path / "missing"))


class TestLiveStream:
    def live_events(self, client, session, payload, chunk_size):
        events = []
        done = None
        with client.websocket_connect(f"/api/sessions/{session}/live") as ws:
            for chunk in chunked(payload, chunk_size):
                ws.send_bytes(chunk)
            while True:
                message = ws.receive_json()
                if message["type"] == "event":
                    events.append(message)
                elif message["type"] == "done":
                    done = message
                    break
                else:
                    raise AssertionError(message)
        return events, done

    def test_streaming_equals_offline(self, client, user, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        perf, _ = user.performance(random_pattern(random.Random(12), 6), variant=80)

        response = client.post(f"/api/sessions/{session}/transcribe",
                               files={"audio": ("p.wav", wav_bytes(perf), "audio/wav")})
        offline = response.json()["events"]

        events, done = self.live_events(client, session, pcm16(perf), 8192)
        assert done["event_count"] == len(offline)
        assert [e["label"] for e in events] == [e["label"] for e in offline]
        hop_period = 512 / 44100
        for live, off in zip(events, offline):
            assert abs(live["time"] - off["time"]) <= hop_period
            assert live["velocity"] == off["velocity"]

    def test_rechunking_invariance_over_wire(self, client, user, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        perf, _ = user.performance(random_pattern(random.Random(13), 5), variant=81)
        payload = pcm16(perf)
        baseline, _ = self.live_events(client, session, payload, 4096)
        for size in (882, 16384, 44100):
            events, _ = self.live_events(client, session, payload, size)
            assert events == baseline

    def test_live_updates_latest_transcription(self, client, user, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        perf, _ = user.performance(["kick", "snare"], variant=82)
        events, done = self.live_events(client, session, pcm16(perf), 10000)
        assert done["event_count"] == 2
        response = client.get(f"/api/sessions/{session}/midi")
        assert response.status_code == 200
        from voxdrum.midi import read_smf
        assert len(read_smf(response.content)) == 2

    def test_live_untrained_rejected(self, client):
        session = new_session(client)
        with client.websocket_connect(f"/api/sessions/{session}/live") as ws:
            message = ws.receive_json()
            assert message["type"] == "error"
            assert "not trained" in message["detail"]

    def test_live_bad_sequence_rejected(self, client, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        with client.websocket_connect(f"/api/sessions/{session}/live") as ws:
            ws.send_bytes(CHUNK_HEADER.pack(5, 4, 1) + b"\x00\x00\x00\x00")
            message = ws.receive_json()
            assert message["type"] == "error"
            assert "expected chunk 0" in message["detail"]

    def test_live_bad_header_rejected(self, client, enrolment):
        session = new_session(client)
        train_session(client, session, enrolment)
        with client.websocket_connect(f"/api/sessions/{session}/live") as ws:
            ws.send_bytes(b"\x00\x01")
            assert ws.receive_json()["type"] == "error"
        with client.websocket_connect(f"/api/sessions/{session}/live") as ws:
            ws.send_bytes(CHUNK_HEADER.pack(0, 100, 1) + b"\x00" * 10)
            assert "length" in ws.receive_json()["detail"]
