"""Snowball (Porter2) English stemmer.

Follows the current published Snowball English algorithm (snowballstem.org,
Snowball 3.x), including the extended R1 prefix list and the ``-ying`` /
``-eed`` special cases folded into step 1b.

>>> stem("because"), stem("colleague"), stem("only")
('becaus', 'colleagu', 'onli')
"""

from functools import lru_cache

__all__ = ["stem", "EnglishStemmer"]

_VOWELS = frozenset("aeiouy")
# non-vowels that still cannot end a short syllable
_VOWELS_WXY = frozenset("aeiouywxY")
_VALID_LI = frozenset("cdeghkmnrt")

_EXCEPTIONS = {
    "skis": "ski",
    "skies": "sky",
    "idly": "idl",
    "gently": "gentl",
    "ugly": "ugli",
    "early": "earli",
    "only": "onli",
    "singly": "singl",
    # invariant forms
    "sky": "sky",
    "news": "news",
    "howe": "howe",
    "atlas": "atlas",
    "cosmos": "cosmos",
    "bias": "bias",
    "andes": "andes",
}

_R1_PREFIXES = ("arsen", "commun", "emerg", "gener", "inter", "later",
                "organ", "past", "univers")

_STEP1B_ING_KEEP = ("even", "cann", "inn", "earr", "herr", "out")

_STEP2 = {
    "tional": "tion", "enci": "ence", "anci": "ance", "abli": "able",
    "entli": "ent", "izer": "ize", "ization": "ize", "ational": "ate",
    "ation": "ate", "ator": "ate", "alism": "al", "aliti": "al",
    "alli": "al", "fulness": "ful", "fulli": "ful", "ousli": "ous",
    "ousness": "ous", "iveness": "ive", "iviti": "ive", "biliti": "ble",
    "bli": "ble", "ogist": "og", "lessli": "less",
    # conditional entries, handled in _step2
    "ogi": None, "li": None,
}

_STEP3 = {
    "tional": "tion", "ational": "ate", "alize": "al", "icate": "ic",
    "iciti": "ic", "ical": "ic", "ful": "", "ness": "",
    "ative": None,  # R2 only
}

_STEP4 = ("al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
          "ment", "ent", "ism", "ate", "iti", "ous", "ive", "ize", "ion")


def _longest_suffix(word, suffixes):
    """Return the longest entry of `suffixes` that ends `word`, or None."""
    best = None
    for suf in suffixes:
        if word.endswith(suf) and (best is None or len(suf) > len(best)):
            best = suf
    return best


def _is_vowel(ch):
    return ch in _VOWELS


def _regions(word):
    """Start offsets of R1 and R2."""
    n = len(word)

    def after_vc(start):
        # position after the first non-vowel that follows a vowel
        i = start
        while i < n and not _is_vowel(word[i]):
            i += 1
        while i < n and _is_vowel(word[i]):
            i += 1
        return i + 1 if i < n else n

    for prefix in _R1_PREFIXES:
        if word.startswith(prefix):
            r1 = len(prefix)
            break
    else:
        r1 = after_vc(0)
    r2 = after_vc(r1) if r1 < n else n
    return r1, r2


def _ends_short_syllable(word):
    """True when `word` (a prefix of the stem) ends in a short syllable."""
    n = len(word)
    if n >= 3 and (word[-1] not in _VOWELS_WXY and _is_vowel(word[-2])
                   and not _is_vowel(word[-3])):
        return True
    if n == 2 and _is_vowel(word[0]) and not _is_vowel(word[1]):
        return True
    return word.endswith("past")


def _step1a(word):
    suf = _longest_suffix(word, ("'", "'s'", "'s"))
    if suf:
        word = word[:-len(suf)]
    suf = _longest_suffix(word, ("sses", "ied", "ies", "ss", "us", "s"))
    if suf == "sses":
        return word[:-2]
    if suf in ("ied", "ies"):
        head = word[:-3]
        return head + ("i" if len(head) > 1 else "ie")
    if suf == "s":
        head = word[:-1]
        # a vowel somewhere before the letter preceding the s
        if any(_is_vowel(c) for c in head[:-1]):
            return head
    return word


def _step1b(word, r1):
    suf = _longest_suffix(word, ("eed", "eedly", "ed", "edly", "ing", "ingly"))
    if suf is None:
        return word
    head = word[:-len(suf)]
    if suf in ("eed", "eedly"):
        if len(head) >= r1 and head not in ("succ", "proc", "exc"):
            return head + "ee"
        return word
    if suf == "ing":
        if len(head) == 2 and head[1] == "y" and not _is_vowel(head[0]):
            return head[0] + "ie"
        if head in _STEP1B_ING_KEEP:
            return word
    if not any(_is_vowel(c) for c in head):
        return word
    if head.endswith(("at", "bl", "iz")):
        return head + "e"
    if head.endswith(("bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt")):
        if len(head) == 3 and head[0] in "aeo":
            return head
        return head[:-1]
    if len(head) == r1 and _ends_short_syllable(head):
        return head + "e"
    return head


def _step1c(word):
    if len(word) > 2 and word[-1] in "yY" and not _is_vowel(word[-2]):
        return word[:-1] + "i"
    return word


def _step2(word, r1):
    suf = _longest_suffix(word, _STEP2)
    if suf is None or len(word) - len(suf) < r1:
        return word
    head = word[:-len(suf)]
    if suf == "ogi":
        return head + "og" if head.endswith("l") else word
    if suf == "li":
        return head if head and head[-1] in _VALID_LI else word
    return head + _STEP2[suf]


def _step3(word, r1, r2):
    suf = _longest_suffix(word, _STEP3)
    if suf is None:
        return word
    start = len(word) - len(suf)
    if start < r1:
        return word
    if suf == "ative":
        return word[:start] if start >= r2 else word
    return word[:start] + _STEP3[suf]


def _step4(word, r2):
    suf = _longest_suffix(word, _STEP4)
    if suf is None:
        return word
    start = len(word) - len(suf)
    if start < r2:
        return word
    if suf == "ion":
        return word[:start] if word[:start].endswith(("s", "t")) else word
    return word[:start]


def _step5(word, r1, r2):
    last = len(word) - 1
    if word.endswith("e"):
        if last >= r2 or (last >= r1 and not _ends_short_syllable(word[:-1])):
            return word[:-1]
    elif word.endswith("ll") and last >= r2:
        return word[:-1]
    return word


@lru_cache(maxsize=1 << 16)
def stem(token):
    """Return the Snowball English stem of a lowercase token."""
    if token in _EXCEPTIONS:
        return _EXCEPTIONS[token]
    if len(token) < 3:
        return token

    word = token[1:] if token.startswith("'") else token
    chars = list(word)
    if chars and chars[0] == "y":
        chars[0] = "Y"
    for i in range(1, len(chars)):
        if chars[i] == "y" and chars[i - 1] in _VOWELS:
            chars[i] = "Y"
    word = "".join(chars)

    r1, r2 = _regions(word)
    word = _step1a(word)
    word = _step1b(word, r1)
    word = _step1c(word)
    word = _step2(word, r1)
    word = _step3(word, r1, r2)
    word = _step4(word, r2)
    word = _step5(word, r1, r2)
    return word.replace("Y", "y")


class EnglishStemmer:
    """Callable wrapper, handy where a stemmer object is expected."""

    def __call__(self, token):
        return stem(token)

    def stem(self, token):
        return stem(token)
