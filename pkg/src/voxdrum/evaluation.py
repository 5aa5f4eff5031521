"""Transcription scoring against reference annotations.

Events are matched label-blind within a time tolerance (50 ms default,
the common onset tolerance), greedily in order of increasing |dt|. A
matched pair with differing labels costs one "modify" edit; unmatched
reference events must be added, unmatched predictions removed. That
three-operation model is what makes a right-time wrong-class prediction
cheaper than a miss plus a false alarm.
"""

from __future__ import annotations

from dataclasses import dataclass

DEFAULT_TOLERANCE = 0.050


class EvalError(Exception):
    pass


class AnnotationError(EvalError):
    pass


@dataclass(frozen=True)
class RefEvent:
    time: float
    label: str


@dataclass
class Matching:
    pairs: list[tuple[int, int]]  # (predicted index, reference index)
    unmatched_pred: list[int]
    unmatched_ref: list[int]
    tolerance: float


@dataclass
class ClassScore:
    precision: float
    recall: float
    f_measure: float
    true_positives: int
    n_pred: int
    n_ref: int


@dataclass
class EditOps:
    modify: int
    add: int
    remove: int

    @property
    def total(self) -> int:
        return self.modify + self.add + self.remove


@dataclass
class EvalReport:
    per_class: dict[str, ClassScore]
    edit_ops: EditOps
    n_pred: int
    n_ref: int
    n_matched: int


def parse_annotations(text: str) -> list[RefEvent]:
    """Parse `time<TAB or ,>label` lines; `#` comments and blanks ignored."""
    events = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        sep = "\t" if "\t" in line else ","
        time_text, _, label = line.partition(sep)
        try:
            time = float(time_text.strip())
        except ValueError:
            raise AnnotationError(f"line {lineno}: cannot parse time {time_text.strip()!r}") from None
        label = label.strip().lower()
        if not label:
            raise AnnotationError(f"line {lineno}: missing label")
        events.append(RefEvent(time, label))
    if not events:
        raise AnnotationError("annotation file contains no events")
    events.sort(key=lambda e: e.time)
    return events


def match_events(pred, ref, tolerance: float = DEFAULT_TOLERANCE) -> Matching:
    """Greedy one-to-one matching over label-blind candidate pairs.

    Candidates within tolerance are taken in order of increasing |dt|,
    breaking ties by earlier reference, then earlier prediction. Both the
    inclusion test and the ordering quantize |dt| to whole nanoseconds so
    that decimal boundaries and decimal ties behave the way they read
    (0.55 vs 0.50 at tolerance 0.05 matches). Greedy matching is optimal
    whenever events are separated by more than twice the tolerance.
    """
    if tolerance < 0:
        raise EvalError("tolerance must be non-negative")
    tolerance_ns = round(tolerance * 1e9)
    candidates = []
    for ri, r in enumerate(ref):
        for pi, p in enumerate(pred):
            dt_ns = round(abs(p.time - r.time) * 1e9)
            if dt_ns <= tolerance_ns:
                candidates.append((dt_ns, ri, pi))
    candidates.sort()
    pred_used = [False] * len(pred)
    ref_used = [False] * len(ref)
    pairs = []
    for _, ri, pi in candidates:
        if pred_used[pi] or ref_used[ri]:
            continue
        pred_used[pi] = True
        ref_used[ri] = True
        pairs.append((pi, ri))
    return Matching(
        pairs=pairs,
        unmatched_pred=[i for i, used in enumerate(pred_used) if not used],
        unmatched_ref=[i for i, used in enumerate(ref_used) if not used],
        tolerance=tolerance,
    )


def _class_order(pred, ref) -> list[str]:
    order = []
    for e in list(ref) + list(pred):
        if e.label not in order:
            order.append(e.label)
    return order


def f_measures(matching: Matching, pred, ref) -> dict[str, ClassScore]:
    """Per-class precision, recall and F over the matched pairs.

    A pair only counts as a true positive for class c when both sides
    carry label c; a cross-labeled pair is a false positive for the
    predicted class and a false negative for the reference class.
    """
    scores = {}
    for label in _class_order(pred, ref):
        tp = sum(1 for pi, ri in matching.pairs
                 if pred[pi].label == label and ref[ri].label == label)
        n_pred = sum(1 for e in pred if e.label == label)
        n_ref = sum(1 for e in ref if e.label == label)
        precision = tp / n_pred if n_pred else 0.0
        recall = tp / n_ref if n_ref else 0.0
        f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        scores[label] = ClassScore(precision, recall, f, tp, n_pred, n_ref)
    return scores


def edit_operations(matching: Matching, pred, ref) -> EditOps:
    modify = sum(1 for pi, ri in matching.pairs if pred[pi].label != ref[ri].label)
    return EditOps(modify=modify,
                   add=len(matching.unmatched_ref),
                   remove=len(matching.unmatched_pred))


def evaluate(pred, ref, tolerance: float = DEFAULT_TOLERANCE) -> EvalReport:
    matching = match_events(pred, ref, tolerance)
    return EvalReport(
        per_class=f_measures(matching, pred, ref),
        edit_ops=edit_operations(matching, pred, ref),
        n_pred=len(pred),
        n_ref=len(ref),
        n_matched=len(matching.pairs),
    )


def render_report(report: EvalReport, fmt: str = "text") -> str:
    """Stable column order: Modify, Add, Remove, then per-class columns."""
    ops = report.edit_ops
    if fmt == "csv":
        header = ["modify", "add", "remove"]
        row = [str(ops.modify), str(ops.add), str(ops.remove)]
        for label, s in report.per_class.items():
            header += [f"{label}_P", f"{label}_R", f"{label}_F"]
            row += [f"{s.precision:.3f}", f"{s.recall:.3f}", f"{s.f_measure:.3f}"]
        return ",".join(header) + "\n" + ",".join(row) + "\n"
    if fmt == "text":
        headers = ["Modify", "Add", "Remove"] + [f"F({label})" for label in report.per_class]
        values = [str(ops.modify), str(ops.add), str(ops.remove)]
        values += [f"{s.f_measure:.3f}" for s in report.per_class.values()]
        widths = [max(len(h), len(v)) for h, v in zip(headers, values)]
        head = "  ".join(h.rjust(w) for h, w in zip(headers, widths))
        body = "  ".join(v.rjust(w) for v, w in zip(values, widths))
        return head + "\n" + body + "\n"
    raise EvalError(f"unknown report format {fmt!r}")
