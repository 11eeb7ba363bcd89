"""Tokenization and the six linguistic descriptors used for proficiency annotation.

All functions are pure; feature values are deterministic for a given input
string. Syllable counting is a vowel-group heuristic, consistent rather than
dictionary-exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from .errors import BlankInput

__all__ = [
    "Word",
    "TokenizedText",
    "FeatureVector",
    "FEATURE_NAMES",
    "segment",
    "count_syllables",
    "fkgl",
    "gunning_fog",
    "coleman_liau",
    "mtld",
    "mtld_tokens",
    "pronoun_density",
    "avg_word_length",
    "features",
]

FEATURE_NAMES = (
    "fkgl",
    "gunning_fog",
    "mtld",
    "pronoun_density",
    "coleman_liau",
    "avg_word_length",
)

_SENTENCE_SPLIT = re.compile(r"[.!?]+(?:\s+|$)")
# Maximal runs of letters, allowing internal apostrophes (don't, o'clock).
_WORD = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*", re.UNICODE)
_VOWELS = frozenset("aeiouy")

MTLD_TTR_THRESHOLD = 0.72


def _load_lexicon(name: str) -> frozenset[str]:
    text = resources.files("ontoconvo.data").joinpath(name).read_text("utf-8")
    entries = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            entries.append(line.lower())
    return frozenset(entries)


PRONOUNS = _load_lexicon("pronouns.txt")


@dataclass(frozen=True)
class Word:
    surface: str  # lowercase form
    letters: int  # alphabetic character count
    syllables: int  # >= 1


@dataclass(frozen=True)
class TokenizedText:
    sentences: tuple[tuple[Word, ...], ...]

    @property
    def words(self) -> tuple[Word, ...]:
        return tuple(w for s in self.sentences for w in s)

    @property
    def word_count(self) -> int:
        return sum(len(s) for s in self.sentences)

    @property
    def sentence_count(self) -> int:
        return len(self.sentences)


@dataclass(frozen=True)
class FeatureVector:
    fkgl: float
    gunning_fog: float
    mtld: float
    pronoun_density: float
    coleman_liau: float
    avg_word_length: float

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in FEATURE_NAMES)


def count_syllables(word: str) -> int:
    """Count vowel groups in ``word``, discounting a final silent 'e'.

    Clamps to 1 so every word contributes at least one syllable.
    """
    w = word.lower()
    groups = 0
    in_group = False
    for ch in w:
        if ch in _VOWELS:
            if not in_group:
                groups += 1
            in_group = True
        else:
            in_group = False
    if len(w) > 2 and w.endswith("e") and w[-2] not in _VOWELS:
        groups -= 1
    return max(groups, 1)


def segment(text: str) -> TokenizedText:
    """Split ``text`` into sentences and word tokens.

    Sentences end at '.', '!' or '?' followed by whitespace or end of input;
    words are maximal runs of letters with internal apostrophes. Raises
    :class:`BlankInput` when no word token is found.
    """
    sentences: list[tuple[Word, ...]] = []
    for chunk in _SENTENCE_SPLIT.split(text):
        words = tuple(
            Word(
                surface=m.group(0).lower(),
                letters=sum(ch.isalpha() for ch in m.group(0)),
                syllables=count_syllables(m.group(0)),
            )
            for m in _WORD.finditer(chunk)
            # \w admits non-decimal numerics like '¼'; require a real letter
            if any(ch.isalpha() for ch in m.group(0))
        )
        if words:
            sentences.append(words)
    if not sentences:
        raise BlankInput("no word token found in input text")
    return TokenizedText(sentences=tuple(sentences))


def fkgl(t: TokenizedText) -> float:
    """Flesch-Kincaid grade level."""
    words = t.word_count
    syllables = sum(w.syllables for w in t.words)
    return 0.39 * (words / t.sentence_count) + 11.8 * (syllables / words) - 15.59


def gunning_fog(t: TokenizedText) -> float:
    """Gunning fog index; complex words carry three or more syllables."""
    words = t.word_count
    complex_words = sum(1 for w in t.words if w.syllables >= 3)
    return 0.4 * ((words / t.sentence_count) + 100.0 * (complex_words / words))


def coleman_liau(t: TokenizedText) -> float:
    """Coleman-Liau index over letters and sentences per 100 words."""
    words = t.word_count
    letters = sum(w.letters for w in t.words)
    letters_per_100 = 100.0 * letters / words
    sentences_per_100 = 100.0 * t.sentence_count / words
    return 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8


def _mtld_one_direction(tokens: list[str]) -> float:
    factors = 0.0
    types: set[str] = set()
    count = 0
    ttr = 1.0
    for tok in tokens:
        count += 1
        types.add(tok)
        ttr = len(types) / count
        if ttr < MTLD_TTR_THRESHOLD:
            factors += 1.0
            types.clear()
            count = 0
            ttr = 1.0
    if count > 0:
        factors += (1.0 - ttr) / (1.0 - MTLD_TTR_THRESHOLD)
    if factors == 0.0:
        return float(len(tokens))
    return len(tokens) / factors


def mtld_tokens(tokens: list[str]) -> float:
    """Bidirectional MTLD over an explicit token list (threshold 0.72)."""
    if not tokens:
        raise BlankInput("MTLD requires at least one token")
    forward = _mtld_one_direction(tokens)
    backward = _mtld_one_direction(tokens[::-1])
    return (forward + backward) / 2.0


def mtld(t: TokenizedText) -> float:
    """Measure of textual lexical diversity on the lowercase word stream."""
    return mtld_tokens([w.surface for w in t.words])


def pronoun_density(t: TokenizedText) -> float:
    """Fraction of words found in the bundled closed-class pronoun list."""
    words = t.word_count
    hits = sum(1 for w in t.words if w.surface in PRONOUNS)
    return hits / words


def avg_word_length(t: TokenizedText) -> float:
    """Mean letter count per word."""
    return sum(w.letters for w in t.words) / t.word_count


def features(text: str) -> FeatureVector:
    """Compute all six descriptors for one utterance, taken as a whole turn."""
    t = segment(text)
    return FeatureVector(
        fkgl=fkgl(t),
        gunning_fog=gunning_fog(t),
        mtld=mtld(t),
        pronoun_density=pronoun_density(t),
        coleman_liau=coleman_liau(t),
        avg_word_length=avg_word_length(t),
    )
