import logging
from unittest.mock import MagicMock

from sdi_lab.lazy_logger import LOGGER_NAME, LazyLogger, get_logger


class TestGetLogger:
    @staticmethod
    def test_package_logger() -> None:
        logger = get_logger()
        assert logger.name == LOGGER_NAME == "sdilab"
        assert len(logger.handlers) == 1
        assert logger.level != logging.NOTSET
        assert get_logger() is logger
        assert len(logger.handlers) == 1

    @staticmethod
    def test_level() -> None:
        logger = get_logger()
        level = logger.level
        try:
            assert get_logger(logging.DEBUG).level == logging.DEBUG
            assert get_logger().level == logging.DEBUG
        finally:
            logger.setLevel(level)


class TestLazyLogger:
    @staticmethod
    def test_default_logger() -> None:
        assert LazyLogger()._logger is get_logger()

    @staticmethod
    def test_custom_logger() -> None:
        class Service(LazyLogger):
            def __init__(self, logger: logging.Logger) -> None:
                self._lazy_logger = logger

            def run(self) -> None:
                self._logger.info("running")

        logger_mock = MagicMock()
        Service(logger_mock).run()
        logger_mock.info.assert_called_once_with("running")
