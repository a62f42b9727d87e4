"""Prelab question flow: sequential grading with unlimited retries.

Three question kinds: exact free response (value within tolerance), range
free response (value inside [lo, hi]), and multiple choice.  Questions
must be answered in order; answered ones stay reviewable.  Completing a
prelab is what unlocks the scheduler for that experiment.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import NotFoundError, SchedulingError
from .store import Store

PROGRESS_FILE = "prelab_progress.json"


@dataclass
class PrelabVerdict:
    correct: bool
    hint: str | None
    completed: bool
    next_question_id: str | None


class Prelab:
    def __init__(self, store: Store, catalogs: dict):
        """catalogs: experiment id -> list of question dicts."""
        self.store = store
        self.catalogs = catalogs
        self.progress = self.store.read_json(PROGRESS_FILE, default={})

    def _save(self) -> None:
        self.store.write_json(PROGRESS_FILE, self.progress)

    def questions(self, experiment: str) -> list:
        if experiment not in self.catalogs:
            raise NotFoundError(f"no prelab for experiment '{experiment}'")
        return self.catalogs[experiment]

    def done_ids(self, user_id: str, experiment: str) -> list:
        return self.progress.get(user_id, {}).get(experiment, [])

    def completed(self, user_id: str, experiment: str) -> bool:
        qs = self.catalogs.get(experiment, [])
        done = set(self.done_ids(user_id, experiment))
        return bool(qs) and all(q["id"] in done for q in qs)

    def public_questions(self, experiment: str, user_id: str) -> dict:
        """Questions without answer keys, plus this user's progress."""
        qs = self.questions(experiment)
        done = self.done_ids(user_id, experiment)
        out = []
        for q in qs:
            item = {"id": q["id"], "prompt": q["prompt"], "kind": q["kind"], "units": q.get("units", "")}
            if q["kind"] == "multiple_choice":
                item["options"] = q["options"]
            if q.get("image"):
                item["image"] = q["image"]
            out.append(item)
        return {"questions": out, "done": done, "completed": self.completed(user_id, experiment)}

    def submit(self, user_id: str, experiment: str, question_id: str, answer) -> PrelabVerdict:
        qs = self.questions(experiment)
        ids = [q["id"] for q in qs]
        if question_id not in ids:
            raise NotFoundError(f"no prelab question '{question_id}'")
        done = self.done_ids(user_id, experiment)
        expected_next = next((i for i in ids if i not in done), None)
        if question_id not in done and question_id != expected_next:
            raise SchedulingError(
                f"answer question '{expected_next}' first (questions unlock in order)"
            )
        q = qs[ids.index(question_id)]
        correct = self._grade(q, answer)
        if correct and question_id not in done:
            self.progress.setdefault(user_id, {}).setdefault(experiment, []).append(question_id)
            self._save()
            done = self.done_ids(user_id, experiment)
        remaining = [i for i in ids if i not in done]
        return PrelabVerdict(
            correct=correct,
            hint=(q.get("hint") if not correct else None),
            completed=not remaining,
            next_question_id=(remaining[0] if remaining else None),
        )

    @staticmethod
    def _grade(q: dict, answer) -> bool:
        kind = q["kind"]
        try:
            if kind == "exact_free_response":
                value = float(answer)
                tol = float(q.get("tolerance", 0.0))
                return abs(value - float(q["answer"])) <= tol
            if kind == "range_free_response":
                value = float(answer)
                lo, hi = q["range"]
                return float(lo) <= value <= float(hi)
            if kind == "multiple_choice":
                return str(answer) == str(q["answer"])
        except (TypeError, ValueError):
            return False
        raise ValueError(f"unknown prelab question kind '{kind}'")
