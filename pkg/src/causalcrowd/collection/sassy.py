"""Climate-attitude segmentation from the four-item short survey.

The published instrument's answer-to-segment formula lives in an external
scoring tool, so the mapping ships as data: a band table over the answer
sum. Deployments replace the placeholder table with their own mapping.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path


class Segment(str, Enum):
    ALARMED = "alarmed"
    CONCERNED = "concerned"
    CAUTIOUS = "cautious"
    DISENGAGED = "disengaged"
    DOUBTFUL = "doubtful"
    DISMISSIVE = "dismissive"


class MalformedAnswers(ValueError):
    pass


@dataclass(frozen=True)
class SassyTable:
    answers: int
    answer_range: tuple[int, int]
    bands: tuple[tuple[int, int, Segment], ...]

    @staticmethod
    def load(path: Path) -> "SassyTable":
        with open(path) as handle:
            payload = json.load(handle)
        return SassyTable(
            answers=payload["answers"],
            answer_range=tuple(payload["answer_range"]),
            bands=tuple(
                (band["min"], band["max"], Segment(band["segment"]))
                for band in payload["bands"]
            ),
        )

    def validate(self, answers: list[int]) -> None:
        low, high = self.answer_range
        if len(answers) != self.answers:
            raise MalformedAnswers(
                f"expected {self.answers} answers, got {len(answers)}"
            )
        for answer in answers:
            if not isinstance(answer, int) or not low <= answer <= high:
                raise MalformedAnswers(
                    f"answer {answer!r} outside {low}..{high}"
                )

    def score(self, answers: list[int]) -> Segment:
        self.validate(answers)
        total = sum(answers)
        for low, high, segment in self.bands:
            if low <= total <= high:
                return segment
        raise MalformedAnswers(f"answer sum {total} not covered by the table")


@dataclass(frozen=True)
class SassyProfile:
    answers: tuple[int, ...]
    segment: Segment
