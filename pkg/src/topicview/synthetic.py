"""Synthetic corpora: planted-topic documents and demo dialogue transcripts.

The planted generators build the fixtures the test suite scores recovery
against; the demo generator produces a small multi-session transcript store
for the CLI and dashboard walkthroughs.
"""

from __future__ import annotations

import numpy as np

from .corpus import Session, Turn

GROUP_A = (
    "calm", "breathing", "relaxed", "grounding", "stillness", "meadow",
    "quiet", "peaceful", "exhale", "softness", "resting", "unwind",
    "serene", "gentle", "slow", "steady", "ease", "warmth", "lightness", "open",
)

GROUP_B = (
    "deadline", "overtime", "meetings", "boss", "workload", "emails",
    "pressure", "projects", "reports", "targets", "budget", "shifts",
    "commute", "office", "tasks", "reviews", "quota", "overdue", "staffing", "audit",
)

WORD_POOLS = {
    "family": ["mother", "father", "sister", "brother", "childhood", "household",
               "parents", "holidays", "visits", "grandmother", "cousins", "divorce"],
    "sleep": ["insomnia", "nightmares", "bedtime", "restless", "waking", "dreams",
              "tired", "exhausted", "naps", "caffeine", "melatonin", "snoring"],
    "anxiety": ["worry", "panic", "racing", "tension", "dread", "spiral",
                "overthinking", "nerves", "shaking", "sweating", "avoidance", "fear"],
    "work": ["deadline", "boss", "meetings", "workload", "emails", "promotion",
             "colleagues", "burnout", "salary", "layoffs", "projects", "overtime"],
    "exercise": ["running", "walking", "stretching", "yoga", "gym", "hiking",
                 "swimming", "cycling", "routine", "energy", "outdoors", "strength"],
    "food": ["appetite", "cooking", "meals", "snacking", "dinner", "breakfast",
             "cravings", "groceries", "recipes", "vegetables", "skipping", "comfort"],
    "social": ["friends", "parties", "loneliness", "texting", "gatherings", "smalltalk",
               "invitations", "neighbors", "community", "belonging", "isolation", "trust"],
    "mood": ["sadness", "crying", "numbness", "hopeless", "irritable", "empty",
             "heavy", "foggy", "flat", "tearful", "withdrawn", "apathy"],
    "coping": ["journaling", "meditation", "breathing", "grounding", "therapy",
               "medication", "routines", "boundaries", "selfcare", "affirmations", "hobbies", "music"],
    "numbers": ["10", "20", "30", "counting", "minutes", "hours",
                "weekly", "daily", "twice", "sessions", "scores", "scale"],
}

FILLER = ["yeah", "okay", "well", "right", "hmm", "like", "just", "really"]


def planted_documents(
    docs_per_group: int = 20,
    doc_len: int = 30,
    seed: int = 7,
) -> tuple[list[list[str]], list[int]]:
    """Documents drawn from two disjoint word groups.

    Returns (documents, group labels); label g means the document samples
    only GROUP_A (g=0) or GROUP_B (g=1) words.
    """
    rng = np.random.default_rng(seed)
    groups = (GROUP_A, GROUP_B)
    documents = []
    labels = []
    for g, group in enumerate(groups):
        for _ in range(docs_per_group):
            words = rng.choice(group, size=doc_len, replace=True)
            documents.append([str(w) for w in words])
            labels.append(g)
    return documents, labels


def ab_session(
    session_id: str = "ab-demo",
    turns_per_half: int = 6,
    words_per_turn: int = 8,
    seed: int = 11,
) -> Session:
    """A session whose first half speaks GROUP_A words, second half GROUP_B."""
    rng = np.random.default_rng(seed)
    turns = []
    index = 0
    for group in (GROUP_A, GROUP_B):
        for _ in range(turns_per_half):
            words = rng.choice(group, size=words_per_turn, replace=True)
            turns.append(
                Turn(
                    session_id=session_id,
                    turn_index=index,
                    speaker="patient" if index % 2 == 0 else "therapist",
                    text=" ".join(str(w) for w in words),
                    timestamp=float(index * 30),
                )
            )
            index += 1
    return Session(session_id=session_id, turns=tuple(turns))


def rejection_demo_session(session_id: str = "session-rej") -> Session:
    """A session whose first image excerpt trips the mock safety filter.

    The text spans more than one 1,000-character excerpt so the strip shows a
    rejected tile next to generated ones.
    """
    filler = (
        "breathing slowly and counting to 10 while naming five things "
        "in the room and noticing the weight of both feet on the floor"
    )
    texts = ["please REJECTME now " * 3] + [filler] * 9
    turns = tuple(
        Turn(
            session_id=session_id,
            turn_index=i,
            speaker="patient" if i % 2 == 0 else "therapist",
            text=text,
        )
        for i, text in enumerate(texts)
    )
    return Session(session_id=session_id, turns=turns)


def demo_sessions(
    n_sessions: int = 8,
    turns_per_session: int = 30,
    seed: int = 23,
) -> list[Session]:
    """Multi-session synthetic transcripts with per-session themes.

    Each theme pool is assigned to exactly two sessions so the default
    document-frequency cap (0.3 over 8 session documents) keeps thematic
    words while dropping the fillers that appear everywhere.
    """
    rng = np.random.default_rng(seed)
    pool_names = list(WORD_POOLS)
    conditions = ["anxiety", "depression", "schizophrenia"]
    assignments: dict[int, list[str]] = {i: [] for i in range(n_sessions)}
    slots = [i for i in range(n_sessions) for _ in range(2)]  # 2 pools per session
    session_slots = iter(rng.permutation(slots).tolist())
    for name in pool_names[: len(slots) // 2]:  # each chosen pool fills 2 slots
        for _ in range(2):
            assignments[next(session_slots)].append(name)

    sessions = []
    for s in range(n_sessions):
        session_id = f"session-{s:03d}"
        pools = assignments[s] or [pool_names[s % len(pool_names)]]
        lexicons = [WORD_POOLS[name] for name in pools]
        turns = []
        for t in range(turns_per_session):
            # the session drifts from its first theme to its second, so the
            # turn-level score series shows real movement
            progress = t / max(turns_per_session - 1, 1)
            p_second = 0.15 + 0.7 * progress
            n_theme = int(rng.integers(5, 9))
            n_fill = int(rng.integers(1, 4))
            words = []
            for _ in range(n_theme):
                lexicon = lexicons[int(rng.random() < p_second) % len(lexicons)]
                words.append(str(rng.choice(lexicon)))
            words += rng.choice(FILLER, size=n_fill, replace=True).tolist()
            rng.shuffle(words)
            turns.append(
                Turn(
                    session_id=session_id,
                    turn_index=t,
                    speaker="patient" if t % 2 == 0 else "therapist",
                    text=" ".join(str(w) for w in words) + ".",
                    timestamp=float(t * 45),
                )
            )
        sessions.append(
            Session(
                session_id=session_id,
                turns=tuple(turns),
                condition_tag=conditions[s % len(conditions)],
            )
        )
    return sessions
