import requests

from cocycleforge.alerts import webhook
from cocycleforge.config import Config


def _cfg(enabled=True, url="https://hooks.example.com/abc"):
    return Config(alerts={"enabled": enabled, "webhook_url": url})


class TestSendAnomaly:
    """Test cases for webhook.send_anomaly function."""

    def test_posts_message(self, mocker):
        post = mocker.patch("cocycleforge.alerts.webhook.requests.post")

        webhook.send_anomaly("sweep", ["distance not decreasing"], _cfg(), "0123456789abcdef")

        post.assert_called_once()
        args, kwargs = post.call_args
        assert args[0] == "https://hooks.example.com/abc"
        assert kwargs["timeout"] == 10
        content = kwargs["json"]["content"]
        assert "sweep flagged 1 anomalies (0123456789ab)" in content
        assert "- distance not decreasing" in content

    def test_only_first_five_lines(self, mocker):
        post = mocker.patch("cocycleforge.alerts.webhook.requests.post")

        webhook.send_anomaly("drift", [f"anomaly {i}" for i in range(8)], _cfg())

        content = post.call_args[1]["json"]["content"]
        assert "flagged 8 anomalies" in content
        assert "anomaly 4" in content
        assert "anomaly 5" not in content

    def test_disabled(self, mocker):
        post = mocker.patch("cocycleforge.alerts.webhook.requests.post")
        webhook.send_anomaly("solve", ["x"], _cfg(enabled=False))
        post.assert_not_called()

    def test_missing_url(self, mocker):
        post = mocker.patch("cocycleforge.alerts.webhook.requests.post")
        webhook.send_anomaly("solve", ["x"], _cfg(url=""))
        post.assert_not_called()


class TestSendFailure:
    """Test cases for webhook.send_failure function."""

    def test_failure_with_details(self, mocker):
        post = mocker.patch("cocycleforge.alerts.webhook.requests.post")

        webhook.send_failure("run crashed", _cfg(), "Traceback ...")

        content = post.call_args[1]["json"]["content"]
        assert content == "[cocycle-forge] FAIL: run crashed\nTraceback ..."

    def test_failure_without_details(self, mocker):
        post = mocker.patch("cocycleforge.alerts.webhook.requests.post")
        webhook.send_failure("bad config", _cfg())
        assert post.call_args[1]["json"]["content"] == "[cocycle-forge] FAIL: bad config"

    def test_network_error_is_logged(self, mocker, caplog):
        mocker.patch("cocycleforge.alerts.webhook.requests.post",
                     side_effect=requests.ConnectionError("refused"))

        webhook.send_failure("run crashed", _cfg())

        assert "Webhook alert failed: refused" in caplog.text
